#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specmix/cube.hpp"
#include "specmix/band_selection.hpp"
#include "specmix/unmixing.hpp"

namespace specmix {

// <a,b> / (||a|| ||b||), clamped to [-1, 1]. Throws on zero-norm input.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// sqrt(mean squared difference). Throws on length mismatch.
double rmse(const std::vector<double>& a, const std::vector<double>& b);

struct MatchReport {
  struct Pair {
    std::size_t custom_index = 0;
    std::string reference_name;
    double cosine = 0.0;
    double rmse = 0.0;
  };
  std::vector<Pair> assignment;          // injective on both sides
  std::vector<std::size_t> unassigned;   // custom rows left out when k > library size
  double mean_cosine = 0.0;
  double mean_rmse = 0.0;
};

struct MatchOptions {
  bool normalize_before_rmse = false;
};

// Injective assignment maximizing total cosine similarity, solved exactly by
// shortest-augmenting-path bipartite matching. Requires matching band counts.
MatchReport match_endmembers(const EndmemberSet& custom, const SpectralLibrary& reference,
                             const MatchOptions& options = {});

// Restricts every library spectrum (and wavelengths, when present) to the
// retained bands. Mask length must equal the library band count.
SpectralLibrary mask_library(const SpectralLibrary& lib, const BandMask& mask);

// Linear interpolation of each spectrum onto target_wavelengths; used when
// the library band axis differs from the cube's. Both axes must be strictly
// increasing and the target range must lie inside the source range.
SpectralLibrary resample_library(const SpectralLibrary& lib,
                                 const std::vector<double>& target_wavelengths);

}  // namespace specmix
