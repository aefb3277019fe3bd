#pragma once

// Small sequence classifier: token embeddings -> masked mean pooling ->
// ReLU hidden layer -> linear head. Forward and exact backward in f64.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvd/error.hpp"
#include "mvd/rng.hpp"
#include "mvd/subword.hpp"
#include "mvd/types.hpp"

namespace mvd {

struct ModelDims {
  std::size_t vocab = 1;
  std::size_t embed = 64;
  std::size_t hidden = 128;
  std::size_t classes = 2;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct ModelParams {
  ModelDims dims;
  Matrix embed;             // vocab x embed
  Matrix w1;                // embed x hidden
  std::vector<double> b1;   // hidden
  Matrix w2;                // hidden x classes
  std::vector<double> b2;   // classes

  static ModelParams zeros(const ModelDims& d) {
    ModelParams p;
    p.dims = d;
    p.embed = Matrix(d.vocab, d.embed);
    p.w1 = Matrix(d.embed, d.hidden);
    p.b1.assign(d.hidden, 0.0);
    p.w2 = Matrix(d.hidden, d.classes);
    p.b2.assign(d.classes, 0.0);
    return p;
  }

  // Tensors in serialization order: embed, w1, b1, w2, b2.
  std::vector<std::span<double>> tensors() {
    return {embed.data, w1.data, b1, w2.data, b2};
  }
  std::vector<std::span<const double>> tensors() const {
    return {embed.data, w1.data, b1, w2.data, b2};
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (auto t : tensors()) n += t.size();
    return n;
  }

  bool same_shape(const ModelParams& other) const {
    if (dims != other.dims) return false;
    auto a = tensors();
    auto b = other.tensors();
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k].size() != b[k].size()) return false;
    return true;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Same layout as the parameters they differentiate.
using Gradients = ModelParams;

inline Gradients zero_gradients(const ModelParams& p) { return ModelParams::zeros(p.dims); }

inline ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  if (dims.vocab < 1 || dims.embed < 1 || dims.hidden < 1 || dims.classes < 1)
    throw Error(ErrorCode::BadDims, "all model dimensions must be >= 1");
  ModelParams p = ModelParams::zeros(dims);
  Rng rng = make_rng(seed, 0x1417);
  auto fill = [&](Matrix& m) {
    const double s = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    std::uniform_real_distribution<double> u(-s, s);
    for (auto& x : m.data) x = u(rng);
  };
  fill(p.embed);
  fill(p.w1);
  fill(p.w2);
  return p;
}

// Intermediate values kept for the backward pass.
struct ForwardTrace {
  std::vector<double> pooled;   // mean embedding
  std::vector<double> pre;      // W1^T v + b1
  std::vector<double> hidden;   // relu(pre)
  std::vector<double> logits;
  std::size_t attended = 0;
};

inline ForwardTrace forward_trace(const ModelParams& params, const Encoding& enc) {
  const auto& d = params.dims;
  if (enc.ids.size() != enc.attention.size())
    throw Error(ErrorCode::ShapeMismatch, "ids and attention differ in length");
  ForwardTrace t;
  t.pooled.assign(d.embed, 0.0);
  for (std::size_t k = 0; k < enc.ids.size(); ++k) {
    if (!enc.attention[k]) continue;
    const TokenId id = enc.ids[k];
    if (id >= d.vocab)
      throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(id) + " >= vocab " + std::to_string(d.vocab));
    auto row = params.embed.row(id);
    for (std::size_t j = 0; j < d.embed; ++j) t.pooled[j] += row[j];
    ++t.attended;
  }
  if (t.attended > 0)
    for (auto& x : t.pooled) x /= static_cast<double>(t.attended);

  t.pre = params.b1;
  for (std::size_t i = 0; i < d.embed; ++i) {
    const double v = t.pooled[i];
    if (v == 0.0) continue;
    auto wrow = params.w1.row(i);
    for (std::size_t j = 0; j < d.hidden; ++j) t.pre[j] += wrow[j] * v;
  }
  t.hidden.resize(d.hidden);
  for (std::size_t j = 0; j < d.hidden; ++j) t.hidden[j] = t.pre[j] > 0.0 ? t.pre[j] : 0.0;

  t.logits = params.b2;
  for (std::size_t j = 0; j < d.hidden; ++j) {
    const double a = t.hidden[j];
    if (a == 0.0) continue;
    auto wrow = params.w2.row(j);
    for (std::size_t c = 0; c < d.classes; ++c) t.logits[c] += wrow[c] * a;
  }
  return t;
}

inline std::vector<double> forward(const ModelParams& params, const Encoding& enc) {
  return forward_trace(params, enc).logits;
}

// Adds d(upstream . logits)/d(params) for one sample into `grads`.
inline void accumulate_backward(const ModelParams& params, const Encoding& enc,
                                std::span<const double> dlogits, Gradients& grads) {
  const auto& d = params.dims;
  if (dlogits.size() != d.classes)
    throw Error(ErrorCode::ShapeMismatch, "upstream gradient has " + std::to_string(dlogits.size()) +
                                              " entries, expected " + std::to_string(d.classes));
  if (!grads.same_shape(params)) throw Error(ErrorCode::ShapeMismatch, "gradient buffer shape");
  const ForwardTrace t = forward_trace(params, enc);

  for (std::size_t c = 0; c < d.classes; ++c) grads.b2[c] += dlogits[c];
  std::vector<double> dpre(d.hidden, 0.0);
  for (std::size_t j = 0; j < d.hidden; ++j) {
    auto w2row = params.w2.row(j);
    auto g2row = grads.w2.row(j);
    double dh = 0.0;
    for (std::size_t c = 0; c < d.classes; ++c) {
      g2row[c] += t.hidden[j] * dlogits[c];
      dh += w2row[c] * dlogits[c];
    }
    dpre[j] = t.pre[j] > 0.0 ? dh : 0.0;
  }
  std::vector<double> dpooled(d.embed, 0.0);
  for (std::size_t j = 0; j < d.hidden; ++j) grads.b1[j] += dpre[j];
  for (std::size_t i = 0; i < d.embed; ++i) {
    auto w1row = params.w1.row(i);
    auto g1row = grads.w1.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < d.hidden; ++j) {
      g1row[j] += t.pooled[i] * dpre[j];
      acc += w1row[j] * dpre[j];
    }
    dpooled[i] = acc;
  }
  if (t.attended == 0) return;
  const double scale = 1.0 / static_cast<double>(t.attended);
  for (std::size_t k = 0; k < enc.ids.size(); ++k) {
    if (!enc.attention[k]) continue;
    auto grow = grads.embed.row(enc.ids[k]);
    for (std::size_t i = 0; i < d.embed; ++i) grow[i] += dpooled[i] * scale;
  }
}

struct BackwardItem {
  const Encoding* encoding;
  std::vector<double> dlogits;
};

// Gradients summed over the batch.
inline Gradients backward(const ModelParams& params, const std::vector<BackwardItem>& batch) {
  Gradients g = zero_gradients(params);
  for (const auto& item : batch) accumulate_backward(params, *item.encoding, item.dlogits, g);
  return g;
}

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xff));
}
inline void put_f64(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int k = 0; k < 8; ++k) out.put(static_cast<char>((bits >> (8 * k)) & 0xff));
}
inline std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int k = 0; k < bytes; ++k) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw Error(ErrorCode::BadFormat, "params.bin truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * k);
  }
  return v;
}

}  // namespace detail

// params.bin: "CVM1", dims (V, d, h, K) as LE u32, then every tensor
// row-major as LE f64 in field order.
inline void save_params(const ModelParams& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out.write("CVM1", 4);
  for (auto dim : {p.dims.vocab, p.dims.embed, p.dims.hidden, p.dims.classes})
    detail::put_u32(out, static_cast<std::uint32_t>(dim));
  for (auto t : p.tensors())
    for (double x : t) detail::put_f64(out, x);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CVM1", 4) != 0) throw Error(ErrorCode::BadFormat, path + ": bad magic");
  ModelDims d;
  d.vocab = detail::get_le(in, 4);
  d.embed = detail::get_le(in, 4);
  d.hidden = detail::get_le(in, 4);
  d.classes = detail::get_le(in, 4);
  if (d.vocab < 1 || d.embed < 1 || d.hidden < 1 || d.classes < 1)
    throw Error(ErrorCode::BadDims, path + ": zero dimension");
  ModelParams p = ModelParams::zeros(d);
  for (auto t : p.tensors())
    for (double& x : t) x = std::bit_cast<double>(detail::get_le(in, 8));
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::BadFormat, path + ": trailing bytes");
  return p;
}

}  // namespace mvd
