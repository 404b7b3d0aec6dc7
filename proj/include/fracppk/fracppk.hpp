#pragma once

#include "fracppk/combinatorics.hpp"
#include "fracppk/errors.hpp"
#include "fracppk/fields.hpp"
#include "fracppk/io.hpp"
#include "fracppk/parallel.hpp"
#include "fracppk/processes.hpp"
#include "fracppk/rng.hpp"
#include "fracppk/specfun.hpp"
#include "fracppk/subordinators.hpp"
#include "fracppk/verify.hpp"
