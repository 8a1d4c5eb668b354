#pragma once

#include <cstddef>
#include <vector>

#include "specmix/cube.hpp"

namespace specmix {

// Band-wise statistics over all pixels. snr_db = 10*log10(mean^2/std^2),
// capped to +120 dB when std == 0 and floored to -120 dB when mean == 0.
struct SnrProfile {
  std::vector<double> snr_db;
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t band_count() const { return snr_db.size(); }
};

constexpr double kSnrCapDb = 120.0;
constexpr double kSnrFloorDb = -120.0;

struct BandMask {
  std::vector<bool> keep;
  std::size_t retained_count = 0;
  double threshold_db = 0.0;
};

// Mean and population standard deviation (divide by N) per band, then SNR in
// dB. Requires at least two pixels. Per-band accumulation runs in a fixed
// pixel order, so results are reproducible for any thread count.
SnrProfile band_snr(const HyperCube& cube, unsigned threads = 1);

// keep[b] <=> snr_db[b] >= threshold_db (ties retained).
BandMask select_bands(const SnrProfile& profile, double threshold_db);

// Drops masked-out bands, preserving order; wavelengths are subset to match.
HyperCube apply_mask(const HyperCube& cube, const BandMask& mask);

}  // namespace specmix
