#include "specmix/band_selection.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "specmix/parallel.hpp"

namespace specmix {

SnrProfile band_snr(const HyperCube& cube, unsigned threads) {
  const std::size_t n = cube.pixel_count();
  if (n < 2)
    throw std::invalid_argument("band_snr needs at least 2 pixels");

  SnrProfile profile;
  profile.mean.assign(cube.bands, 0.0);
  profile.std.assign(cube.bands, 0.0);
  profile.snr_db.assign(cube.bands, 0.0);

  // One band per task; two-pass mean/variance over pixels in index order.
  parallel_for(cube.bands, threads, [&](std::size_t b) {
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      sum += static_cast<double>(cube.data[p * cube.bands + b]);
    const double mean = sum / static_cast<double>(n);

    double sq = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = static_cast<double>(cube.data[p * cube.bands + b]) - mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / static_cast<double>(n));

    std::fprintf(stderr, "DBG band=%zu n=%zu bands=%zu sum=%g mean=%g\n", b, n, cube.bands, sum, mean);
    profile.mean[b] = mean;
    profile.std[b] = sd;
    if (sd == 0.0)
      profile.snr_db[b] = kSnrCapDb;
    else if (mean == 0.0)
      profile.snr_db[b] = kSnrFloorDb;
    else
      profile.snr_db[b] = 10.0 * std::log10((mean * mean) / (sd * sd));
  });
  return profile;
}

BandMask select_bands(const SnrProfile& profile, double threshold_db) {
  BandMask mask;
  mask.threshold_db = threshold_db;
  mask.keep.resize(profile.band_count());
  for (std::size_t b = 0; b < profile.band_count(); ++b) {
    const bool keep = profile.snr_db[b] >= threshold_db;
    mask.keep[b] = keep;
    if (keep) ++mask.retained_count;
  }
  return mask;
}

HyperCube apply_mask(const HyperCube& cube, const BandMask& mask) {
  if (mask.keep.size() != cube.bands)
    throw std::invalid_argument("mask length does not match cube bands");
  if (mask.retained_count == 0)
    throw std::invalid_argument("mask retains no bands");

  std::vector<std::size_t> kept;
  kept.reserve(mask.retained_count);
  for (std::size_t b = 0; b < mask.keep.size(); ++b)
    if (mask.keep[b]) kept.push_back(b);

  HyperCube out;
  out.rows = cube.rows;
  out.cols = cube.cols;
  out.bands = kept.size();
  out.data.resize(cube.pixel_count() * kept.size());
  for (std::size_t p = 0; p < cube.pixel_count(); ++p) {
    const float* src = cube.data.data() + p * cube.bands;
    float* dst = out.data.data() + p * out.bands;
    for (std::size_t i = 0; i < kept.size(); ++i) dst[i] = src[kept[i]];
  }
  if (cube.wavelengths) {
    std::vector<double> wl;
    wl.reserve(kept.size());
    for (std::size_t b : kept) wl.push_back((*cube.wavelengths)[b]);
    out.wavelengths = std::move(wl);
  }
  return out;
}

}  // namespace specmix
