#pragma once

#include "koca/analysis.hpp"
#include "koca/config.hpp"
#include "koca/engine.hpp"
#include "koca/experiment.hpp"
#include "koca/metrics.hpp"
#include "koca/oracle.hpp"
#include "koca/protocol.hpp"
#include "koca/rng.hpp"
#include "koca/topology.hpp"
