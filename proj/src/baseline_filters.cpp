#include "specmix/baseline_filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specmix/band_selection.hpp"
#include "specmix/errors.hpp"
#include "specmix/metrics.hpp"
#include "specmix/parallel.hpp"

namespace specmix {

std::vector<double> fourier_lowpass(const std::vector<double>& spectrum,
                                    const FourierParams& params) {
  if (!(params.keep_fraction > 0.0) || params.keep_fraction > 1.0)
    throw std::invalid_argument("keep_fraction must be in (0, 1]");
  const std::size_t b = spectrum.size();
  if (b < 2)
    throw std::invalid_argument("fourier_lowpass needs at least 2 samples");

  const auto cutoff = static_cast<std::size_t>(
      std::ceil(params.keep_fraction * (static_cast<double>(b) / 2.0)));

  // Direct O(B^2) transform off a shared twiddle table; exact enough for
  // spectra of a few hundred bands and trivially deterministic.
  std::vector<double> cos_table(b), sin_table(b);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (std::size_t m = 0; m < b; ++m) {
    const double ang = two_pi * static_cast<double>(m) / static_cast<double>(b);
    cos_table[m] = std::cos(ang);
    sin_table[m] = std::sin(ang);
  }

  std::vector<double> re(b, 0.0), im(b, 0.0);
  for (std::size_t f = 0; f < b; ++f) {
    if (std::min(f, b - f) > cutoff) continue;  // zeroed anyway
    double sr = 0.0, si = 0.0;
    for (std::size_t n = 0; n < b; ++n) {
      const std::size_t idx = (f * n) % b;
      sr += spectrum[n] * cos_table[idx];
      si -= spectrum[n] * sin_table[idx];
    }
    re[f] = sr;
    im[f] = si;
  }

  std::vector<double> out(b, 0.0);
  for (std::size_t n = 0; n < b; ++n) {
    double acc = 0.0;
    for (std::size_t f = 0; f < b; ++f) {
      const std::size_t idx = (f * n) % b;
      acc += re[f] * cos_table[idx] - im[f] * sin_table[idx];
    }
    out[n] = acc / static_cast<double>(b);
  }
  return out;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

struct HaarLevel {
  std::vector<double> details;
  bool padded = false;
};

}  // namespace

std::vector<double> wavelet_denoise(const std::vector<double>& spectrum,
                                    const WaveletParams& params) {
  const std::size_t b = spectrum.size();
  if (params.levels < 1)
    throw std::invalid_argument("wavelet levels must be >= 1");
  if (b < 2 || (b >> params.levels) == 0 || b < (std::size_t{1} << params.levels))
    throw std::invalid_argument("too many wavelet levels for spectrum length");
  if (!(params.threshold_scale >= 0.0))
    throw std::invalid_argument("threshold_scale must be >= 0");

  // Decompose.
  std::vector<double> approx = spectrum;
  std::vector<HaarLevel> pyramid;
  pyramid.reserve(params.levels);
  for (std::size_t lvl = 0; lvl < params.levels; ++lvl) {
    HaarLevel level;
    if (approx.size() % 2 != 0) {
      approx.push_back(approx.back());
      level.padded = true;
    }
    const std::size_t half = approx.size() / 2;
    std::vector<double> next(half);
    level.details.resize(half);
    for (std::size_t i = 0; i < half; ++i) {
      next[i] = (approx[2 * i] + approx[2 * i + 1]) * kInvSqrt2;
      level.details[i] = (approx[2 * i] - approx[2 * i + 1]) * kInvSqrt2;
    }
    approx = std::move(next);
    pyramid.push_back(std::move(level));
  }

  // Universal threshold from the finest-level details.
  double threshold = 0.0;
  if (params.threshold_scale > 0.0) {
    std::vector<double> mags(pyramid.front().details.size());
    for (std::size_t i = 0; i < mags.size(); ++i)
      mags[i] = std::abs(pyramid.front().details[i]);
    std::sort(mags.begin(), mags.end());
    const std::size_t n = mags.size();
    const double median =
        (n % 2 == 1) ? mags[n / 2] : 0.5 * (mags[n / 2 - 1] + mags[n / 2]);
    const double sigma = median / 0.6745;
    threshold = params.threshold_scale * sigma *
                std::sqrt(2.0 * std::log(static_cast<double>(b)));
  }

  if (threshold > 0.0) {
    for (auto& level : pyramid) {
      for (double& d : level.details) {
        const double mag = std::abs(d) - threshold;
        d = mag > 0.0 ? (d > 0.0 ? mag : -mag) : 0.0;
      }
    }
  }

  // Reconstruct, trimming the per-level pad.
  for (std::size_t lvl = pyramid.size(); lvl-- > 0;) {
    const auto& level = pyramid[lvl];
    std::vector<double> up(2 * approx.size());
    for (std::size_t i = 0; i < approx.size(); ++i) {
      up[2 * i] = (approx[i] + level.details[i]) * kInvSqrt2;
      up[2 * i + 1] = (approx[i] - level.details[i]) * kInvSqrt2;
    }
    if (level.padded) up.pop_back();
    approx = std::move(up);
  }
  return approx;
}

std::string filter_method_name(FilterMethod m) {
  switch (m) {
    case FilterMethod::phaselock: return "phaselock";
    case FilterMethod::fourier: return "fourier";
    case FilterMethod::wavelet: return "wavelet";
  }
  return "?";
}

FilterMethod parse_filter_method(const std::string& name) {
  if (name == "phaselock") return FilterMethod::phaselock;
  if (name == "fourier") return FilterMethod::fourier;
  if (name == "wavelet") return FilterMethod::wavelet;
  throw std::invalid_argument("unknown filter method '" + name + "'");
}

HyperCube filter_cube(const HyperCube& cube, FilterMethod method, const SgParams& sg,
                      const FourierParams& fourier, const WaveletParams& wavelet,
                      unsigned threads) {
  if (method == FilterMethod::phaselock) return smooth_cube(cube, sg, threads);

  HyperCube out = cube;
  parallel_for(cube.pixel_count(), threads, [&](std::size_t p) {
    const auto spectrum = cube.spectrum(p);
    out.set_spectrum(p, method == FilterMethod::fourier
                            ? fourier_lowpass(spectrum, fourier)
                            : wavelet_denoise(spectrum, wavelet));
  });
  return out;
}

FilterReport compare_filters(const HyperCube& cube, const SpectralLibrary& library,
                             const CompareConfig& config) {
  if (library.band_count() != cube.bands)
    throw std::invalid_argument("library band count does not match cube");

  FilterReport report;
  for (FilterMethod method : config.methods) {
    const HyperCube filtered =
        filter_cube(cube, method, config.sg, config.fourier, config.wavelet, config.threads);

    const SnrProfile profile = band_snr(filtered, config.threads);
    BandMask mask;
    if (config.band_selection) {
      mask = select_bands(profile, config.threshold_db);
      if (mask.retained_count == 0)
        throw compute_error(filter_method_name(method) + ": no bands survive the SNR threshold");
    } else {
      mask = select_bands(profile, -std::numeric_limits<double>::infinity());
    }
    const HyperCube working = apply_mask(filtered, mask);
    const SpectralLibrary refs = mask_library(library, mask);

    // Normalized pixel matrix for clustering.
    std::vector<double> pixels(working.pixel_count() * working.bands);
    parallel_for(working.pixel_count(), config.threads, [&](std::size_t p) {
      const auto norm = l2_normalize(working.spectrum(p));
      std::copy(norm.begin(), norm.end(), pixels.begin() + static_cast<std::ptrdiff_t>(p * working.bands));
    });

    const EndmemberSet endmembers = kmeans_endmembers(
        pixels, working.pixel_count(), working.bands, config.kmeans, config.threads);
    const AbundanceCube abundances = unmix_cube(working, endmembers, config.threads);

    double residual_sum = 0.0;
    for (std::size_t p = 0; p < working.pixel_count(); ++p) {
      const auto norm = l2_normalize(working.spectrum(p));
      double sq = 0.0;
      for (std::size_t bnd = 0; bnd < working.bands; ++bnd) {
        double recon = 0.0;
        for (std::size_t j = 0; j < endmembers.k; ++j)
          recon += static_cast<double>(abundances.data[p * endmembers.k + j]) *
                   endmembers.spectra[j * endmembers.bands + bnd];
        const double d = norm[bnd] - recon;
        sq += d * d;
      }
      residual_sum += std::sqrt(sq);
    }

    MatchOptions mopts;
    mopts.normalize_before_rmse = config.normalize_before_rmse;
    const MatchReport match = match_endmembers(endmembers, refs, mopts);

    double snr_sum = 0.0;
    for (std::size_t bnd = 0; bnd < mask.keep.size(); ++bnd)
      if (mask.keep[bnd]) snr_sum += profile.snr_db[bnd];

    FilterReport::Row row;
    row.method = filter_method_name(method);
    row.retained_bands = mask.retained_count;
    row.mean_cosine = match.mean_cosine;
    row.mean_rmse = match.mean_rmse;
    row.mean_snr_db = snr_sum / static_cast<double>(mask.retained_count);
    row.mean_residual = residual_sum / static_cast<double>(working.pixel_count());
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace specmix
