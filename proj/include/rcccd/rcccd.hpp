#pragma once

// Umbrella header.

#include "rcccd/benchgen.hpp"
#include "rcccd/community.hpp"
#include "rcccd/consensus.hpp"
#include "rcccd/detectors.hpp"
#include "rcccd/graph.hpp"
#include "rcccd/metrics.hpp"
#include "rcccd/recipe.hpp"
