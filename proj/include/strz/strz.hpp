// Umbrella header for the Strichartz extremizer laboratory.
#pragma once

#include "strz/bilinear.hpp"
#include "strz/decay.hpp"
#include "strz/euler_lagrange.hpp"
#include "strz/functional.hpp"
#include "strz/gaussian_character.hpp"
#include "strz/grid.hpp"
#include "strz/io.hpp"
#include "strz/quadrature.hpp"
#include "strz/rng.hpp"
#include "strz/spectral.hpp"
