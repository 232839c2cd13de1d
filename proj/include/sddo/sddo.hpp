#pragma once

// Umbrella header for the SDDO trial design engine.

#include "sddo/bounds.hpp"
#include "sddo/calibration.hpp"
#include "sddo/config.hpp"
#include "sddo/design.hpp"
#include "sddo/errors.hpp"
#include "sddo/interim.hpp"
#include "sddo/logrank.hpp"
#include "sddo/normal.hpp"
#include "sddo/operating.hpp"
#include "sddo/patients.hpp"
#include "sddo/priors.hpp"
#include "sddo/quadrature.hpp"
#include "sddo/report.hpp"
#include "sddo/rng.hpp"
#include "sddo/schoenfeld.hpp"
#include "sddo/ssr.hpp"
#include "sddo/trial.hpp"
#include "sddo/version.hpp"
