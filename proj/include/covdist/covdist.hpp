#pragma once

#include "covdist/distances.hpp"
#include "covdist/experiments.hpp"
#include "covdist/io.hpp"
#include "covdist/kernels.hpp"
#include "covdist/linalg.hpp"
#include "covdist/rkhs.hpp"
#include "covdist/rng.hpp"
