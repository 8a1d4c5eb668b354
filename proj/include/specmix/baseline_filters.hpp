#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specmix/cube.hpp"
#include "specmix/smoothing.hpp"
#include "specmix/unmixing.hpp"

namespace specmix {

struct FourierParams {
  double keep_fraction = 0.25;  // in (0, 1]
};

struct WaveletParams {
  std::size_t levels = 3;
  double threshold_scale = 1.0;  // multiplier on the universal threshold
};

// Real-input DFT, zero every coefficient with frequency index above
// ceil(keep_fraction * B/2), inverse transform back. keep_fraction = 1 is the
// identity to rounding.
std::vector<double> fourier_lowpass(const std::vector<double>& spectrum,
                                    const FourierParams& params);

// Multi-level Haar decomposition with soft thresholding of the detail
// coefficients at t = threshold_scale * sigma * sqrt(2 ln B), where sigma is
// median(|finest details|)/0.6745. Odd lengths are padded by repeating the
// last sample per level and trimmed on reconstruction. threshold_scale = 0 is
// the identity to rounding.
std::vector<double> wavelet_denoise(const std::vector<double>& spectrum,
                                    const WaveletParams& params);

enum class FilterMethod { phaselock, fourier, wavelet };

std::string filter_method_name(FilterMethod m);
FilterMethod parse_filter_method(const std::string& name);

struct CompareConfig {
  std::vector<FilterMethod> methods{FilterMethod::fourier, FilterMethod::wavelet,
                                    FilterMethod::phaselock};
  SgParams sg;
  FourierParams fourier;
  WaveletParams wavelet;
  bool band_selection = true;
  double threshold_db = 15.0;
  KmeansConfig kmeans;
  bool normalize_before_rmse = false;
  unsigned threads = 1;
};

struct FilterReport {
  struct Row {
    std::string method;
    std::size_t retained_bands = 0;
    double mean_cosine = 0.0;
    double mean_rmse = 0.0;
    double mean_snr_db = 0.0;      // over retained bands
    double mean_residual = 0.0;    // NNLS reconstruction residual per pixel
  };
  std::vector<Row> rows;
};

// Runs filter -> (optional) SNR selection -> kmeans -> NNLS unmix -> library
// match for each configured method. The library must share the cube's band
// axis.
FilterReport compare_filters(const HyperCube& cube, const SpectralLibrary& library,
                             const CompareConfig& config);

// Applies one filtering method to every pixel spectrum.
HyperCube filter_cube(const HyperCube& cube, FilterMethod method, const SgParams& sg,
                      const FourierParams& fourier, const WaveletParams& wavelet,
                      unsigned threads = 1);

}  // namespace specmix
