#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mvd {

using TokenId = std::uint32_t;
using ClassIndex = std::size_t;

// A: human vs machine. B: human plus ten generator families.
enum class Task { A, B };

inline std::size_t num_classes(Task t) { return t == Task::A ? 2 : 11; }

inline std::string_view task_name(Task t) { return t == Task::A ? "a" : "b"; }

}  // namespace mvd
