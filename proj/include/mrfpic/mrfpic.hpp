#pragma once

// Neighborhood estimation for finite-alphabet Markov random fields on Z^d by minimizing the
// pseudo-Bayesian information criterion (PIC) over central-symmetric candidate neighborhoods.

#include "block_key.hpp"
#include "counts.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "model.hpp"
#include "pseudolik.hpp"
#include "sampler.hpp"
#include "sweep.hpp"
