#pragma once

#include "mvd/data.hpp"
#include "mvd/error.hpp"
#include "mvd/lexer.hpp"
#include "mvd/losses.hpp"
#include "mvd/metrics.hpp"
#include "mvd/model.hpp"
#include "mvd/pipeline.hpp"
#include "mvd/subword.hpp"
#include "mvd/synth.hpp"
#include "mvd/train.hpp"
#include "mvd/views.hpp"
