#pragma once

// Umbrella header for the whole library.

#include "dynamics.hpp"
#include "heatmap.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "rabi.hpp"
#include "sweep.hpp"
