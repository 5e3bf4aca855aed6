#pragma once

// Everything except the command-line front end (stdmap/cli/app.hpp), which
// needs CLI11, nlohmann/json and OpenSSL.

#include "stdmap/core_maps.hpp"
#include "stdmap/errors.hpp"
#include "stdmap/geometry.hpp"
#include "stdmap/observables.hpp"
#include "stdmap/pairs/curve.hpp"
#include "stdmap/pairs/cuts.hpp"
#include "stdmap/pairs/decomposition.hpp"
#include "stdmap/pairs/integrals.hpp"
#include "stdmap/stats/experiments.hpp"
#include "stdmap/stats/ks.hpp"
