#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "specmix/cube.hpp"

namespace specmix {

// Extracted signatures, one endmember per row (k x bands, row-major).
struct EndmemberSet {
  std::size_t k = 0;
  std::size_t bands = 0;
  std::vector<double> spectra;

  const double* row(std::size_t i) const { return spectra.data() + i * bands; }
  double* row(std::size_t i) { return spectra.data() + i * bands; }
};

struct KmeansConfig {
  std::size_t k = 12;
  std::uint64_t seed = 42;
  std::size_t max_iters = 300;
  double tol = 1e-6;  // relative centroid-shift stop
};

struct NnlsSolution {
  std::vector<double> abundance;  // >= 0 elementwise
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

// x / ||x||_2 when the norm exceeds 1e-12, else the zero vector.
std::vector<double> l2_normalize(const std::vector<double>& spectrum);

// Lloyd's algorithm with k-means++ initialisation driven by the library Rng
// (splitmix64). Same seed and input give bit-identical centroids for any
// thread count: assignment may run in parallel, centroid updates accumulate
// in pixel order. Empty clusters are re-seeded to the point farthest from its
// assigned centroid. pixels is n x bands row-major; rows are expected to be
// L2-normalized by the caller.
EndmemberSet kmeans_endmembers(const std::vector<double>& pixels, std::size_t n,
                               std::size_t bands, const KmeansConfig& config,
                               unsigned threads = 1);

struct KmeansTrace {
  std::size_t iterations = 0;
  std::vector<double> objective;  // sum of squared distances after each assignment
};

EndmemberSet kmeans_endmembers(const std::vector<double>& pixels, std::size_t n,
                               std::size_t bands, const KmeansConfig& config,
                               KmeansTrace& trace, unsigned threads);

// min ||x - W^T a||_2^2 over a >= 0 by Lawson-Hanson active sets. endmembers
// holds W (k x bands); the design matrix is its transpose. KKT certificate
// holds at 1e-8 * (1 + ||W x||_inf); throws compute_error if the iteration
// cap (3k outer rounds) is exceeded.
NnlsSolution nnls_solve(const EndmemberSet& endmembers, const std::vector<double>& pixel);

// Per pixel: L2-normalize then NNLS. Zero-norm pixels map to zero abundance.
AbundanceCube unmix_cube(const HyperCube& cube, const EndmemberSet& endmembers,
                         unsigned threads = 1);

}  // namespace specmix
