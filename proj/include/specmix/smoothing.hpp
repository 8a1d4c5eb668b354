#pragma once

#include <cstddef>
#include <vector>

#include "specmix/cube.hpp"

namespace specmix {

struct SgParams {
  std::size_t window = 11;  // number of taps, odd, >= 3
  std::size_t order = 3;    // polynomial degree, < window
};

// Central-point weights of the least-squares polynomial fit over the window.
// Weights sum to 1 and are symmetric about the centre. Solved from the normal
// equations on nodes scaled to [-1, 1]; results are cached per (window, order).
std::vector<double> sg_coefficients(const SgParams& params);

// Applies the kernel along the band axis. Boundaries use mirror reflection
// (sample at -k maps to +k). Requires spectrum.size() >= window.
std::vector<double> sg_smooth_spectrum(const std::vector<double>& spectrum,
                                       const SgParams& params);

// Smooths every pixel spectrum independently. Output is bit-identical for any
// thread count.
HyperCube smooth_cube(const HyperCube& cube, const SgParams& params, unsigned threads = 1);

}  // namespace specmix
