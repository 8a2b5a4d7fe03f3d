#pragma once

#include "opinion/best_response.hpp"
#include "opinion/errors.hpp"
#include "opinion/game.hpp"
#include "opinion/graph.hpp"
#include "opinion/io.hpp"
#include "opinion/logit.hpp"
#include "opinion/random.hpp"
#include "opinion/rational.hpp"
#include "opinion/symmetric_eigen.hpp"

namespace opinion {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opinion
