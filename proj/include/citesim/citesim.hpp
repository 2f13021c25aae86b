#pragma once

#include "citesim/agents.hpp"
#include "citesim/config_io.hpp"
#include "citesim/error.hpp"
#include "citesim/experiments.hpp"
#include "citesim/graph.hpp"
#include "citesim/learning.hpp"
#include "citesim/metrics.hpp"
#include "citesim/report.hpp"
#include "citesim/rng.hpp"
#include "citesim/simulation.hpp"
#include "citesim/stats.hpp"
#include "citesim/walks.hpp"

namespace citesim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace citesim
