#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace specmix {

// Reflectance cube, pixel-major with band fastest: value(r, c, b) lives at
// (r * cols + c) * bands + b. Payload dtype on disk is float32, so the
// in-memory store is float as well; math on spectra happens in double.
struct HyperCube {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  std::vector<float> data;
  std::optional<std::vector<double>> wavelengths;  // micrometres, strictly increasing

  std::size_t pixel_count() const { return rows * cols; }

  float& at(std::size_t r, std::size_t c, std::size_t b) {
    return data[(r * cols + c) * bands + b];
  }
  float at(std::size_t r, std::size_t c, std::size_t b) const {
    return data[(r * cols + c) * bands + b];
  }

  // Copies pixel i's spectrum (i = r*cols + c) into a double vector.
  std::vector<double> spectrum(std::size_t pixel) const {
    std::vector<double> s(bands);
    const float* p = data.data() + pixel * bands;
    for (std::size_t b = 0; b < bands; ++b) s[b] = static_cast<double>(p[b]);
    return s;
  }

  void set_spectrum(std::size_t pixel, const std::vector<double>& s) {
    float* p = data.data() + pixel * bands;
    for (std::size_t b = 0; b < bands; ++b) p[b] = static_cast<float>(s[b]);
  }
};

// Throws std::invalid_argument when dims/data length/wavelengths disagree or
// any value is non-finite.
void validate_cube(const HyperCube& cube);

// Per-pixel endmember fractions, pixel-major with class fastest; all >= 0.
struct AbundanceCube {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t classes = 0;
  std::vector<float> data;

  std::size_t pixel_count() const { return rows * cols; }

  float& at(std::size_t r, std::size_t c, std::size_t k) {
    return data[(r * cols + c) * classes + k];
  }
  float at(std::size_t r, std::size_t c, std::size_t k) const {
    return data[(r * cols + c) * classes + k];
  }
};

void validate_abundance(const AbundanceCube& ab);

// Named reference spectra sharing one band axis. Wavelengths are optional and
// come from the CSV header row when it is numeric.
struct SpectralLibrary {
  struct Entry {
    std::string name;
    std::vector<double> spectrum;
  };
  std::vector<Entry> entries;
  std::optional<std::vector<double>> wavelengths;

  std::size_t size() const { return entries.size(); }
  std::size_t band_count() const {
    return entries.empty() ? 0 : entries.front().spectrum.size();
  }
};

void validate_library(const SpectralLibrary& lib);

}  // namespace specmix
