#pragma once

// Umbrella header for the survc library: survival data handling, concordance
// estimators, smoothed concordance boosting, marker pre-selection, synthetic
// data generation, and the study harness.

#include "survc/boosting.hpp"
#include "survc/concordance.hpp"
#include "survc/csv.hpp"
#include "survc/errors.hpp"
#include "survc/harness.hpp"
#include "survc/matrix.hpp"
#include "survc/rng.hpp"
#include "survc/selection.hpp"
#include "survc/simulation.hpp"
#include "survc/survival_data.hpp"
