#pragma once

#include "bgpolymer/distributions.hpp"
#include "bgpolymer/errors.hpp"
#include "bgpolymer/involution.hpp"
#include "bgpolymer/lattice.hpp"
#include "bgpolymer/models.hpp"
#include "bgpolymer/numeric.hpp"
#include "bgpolymer/parallel.hpp"
#include "bgpolymer/rng.hpp"
#include "bgpolymer/stats.hpp"
#include "bgpolymer/verify.hpp"
#include "bgpolymer/version.hpp"
