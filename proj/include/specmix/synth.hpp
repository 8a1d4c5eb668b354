#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "specmix/cube.hpp"
#include "specmix/unmixing.hpp"

namespace specmix {

enum class AbundanceMode { one_hot_regions, dirichlet };

std::string abundance_mode_name(AbundanceMode m);
AbundanceMode parse_abundance_mode(const std::string& name);

// Generator settings. Endmembers are a positive baseline plus 2-4 Gaussian
// bumps, unit-normalized; bump amplitude/width ranges are relative to the
// baseline and default to values where band selection at 15 dB keeps the
// clean bands. junk bands are overwritten with zero-mean noise so their SNR
// collapses.
struct SynthConfig {
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t bands = 100;
  std::size_t k = 4;
  double noise_sigma = 0.005;
  AbundanceMode abundance_mode = AbundanceMode::one_hot_regions;
  double dirichlet_alpha = 1.0;
  std::uint64_t seed = 7;
  double junk_band_fraction = 0.0;  // in [0, 1)

  double bump_amp_lo = 0.12;
  double bump_amp_hi = 0.30;
  double bump_width_lo = 4.0;
  double bump_width_hi = 10.0;
  double junk_sigma = 0.05;
  std::size_t junk_run_length = 10;  // junk bands come in contiguous runs, like
                                     // real water-absorption regions
};

struct SynthTruth {
  EndmemberSet endmembers;       // k x bands, positive rows, unit L2 norm
  AbundanceCube abundances;      // ground truth, rows sum to 1
  std::vector<std::size_t> junk_bands;  // sorted band indices
};

// Deterministic for a given config: pixel spectra are the abundance-weighted
// endmember mix plus Gaussian noise, clipped at zero, then junk bands are
// overwritten. Single-threaded by design.
std::pair<HyperCube, SynthTruth> generate(const SynthConfig& config);

}  // namespace specmix
