#include "specmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specmix/rng.hpp"

namespace specmix {

namespace {

void check_config(const SynthConfig& c) {
  if (c.rows == 0 || c.cols == 0 || c.bands == 0 || c.k == 0)
    throw std::invalid_argument("synth dims and k must be positive");
  if (c.k > c.rows * c.cols)
    throw std::invalid_argument("synth k exceeds pixel count");
  if (!(c.noise_sigma >= 0.0))
    throw std::invalid_argument("noise_sigma must be >= 0");
  if (!(c.junk_band_fraction >= 0.0) || c.junk_band_fraction >= 1.0)
    throw std::invalid_argument("junk_band_fraction must be in [0, 1)");
  if (!(c.dirichlet_alpha > 0.0))
    throw std::invalid_argument("dirichlet_alpha must be > 0");
  if (!(c.bump_amp_lo > 0.0) || c.bump_amp_hi < c.bump_amp_lo)
    throw std::invalid_argument("bad bump amplitude range");
  if (!(c.bump_width_lo > 0.0) || c.bump_width_hi < c.bump_width_lo)
    throw std::invalid_argument("bad bump width range");
  if (!(c.junk_sigma > 0.0))
    throw std::invalid_argument("junk_sigma must be > 0");
}

// Marsaglia-Tsang; for shape < 1 uses the boost Gamma(shape+1) * U^(1/shape).
double gamma_draw(Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = std::max(rng.next_double(), 0x1.0p-53);
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = rng.next_gaussian();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

std::string abundance_mode_name(AbundanceMode m) {
  return m == AbundanceMode::one_hot_regions ? "one-hot-regions" : "dirichlet";
}

AbundanceMode parse_abundance_mode(const std::string& name) {
  if (name == "one-hot-regions") return AbundanceMode::one_hot_regions;
  if (name == "dirichlet") return AbundanceMode::dirichlet;
  throw std::invalid_argument("unknown abundance mode '" + name + "'");
}

std::pair<HyperCube, SynthTruth> generate(const SynthConfig& config) {
  check_config(config);
  Rng rng(config.seed);

  const std::size_t bands = config.bands;
  const std::size_t pixels = config.rows * config.cols;

  // Endmember shapes.
  SynthTruth truth;
  truth.endmembers.k = config.k;
  truth.endmembers.bands = bands;
  truth.endmembers.spectra.assign(config.k * bands, 0.0);
  for (std::size_t j = 0; j < config.k; ++j) {
    double* row = truth.endmembers.row(j);
    for (std::size_t b = 0; b < bands; ++b) row[b] = 1.0;
    const std::size_t n_bumps = 2 + static_cast<std::size_t>(rng.next_below(3));
    for (std::size_t m = 0; m < n_bumps; ++m) {
      const double center = rng.uniform(0.0, static_cast<double>(bands - 1));
      const double width = rng.uniform(config.bump_width_lo, config.bump_width_hi);
      const double amp = rng.uniform(config.bump_amp_lo, config.bump_amp_hi);
      for (std::size_t b = 0; b < bands; ++b) {
        const double d = (static_cast<double>(b) - center) / width;
        row[b] += amp * std::exp(-0.5 * d * d);
      }
    }
    double sq = 0.0;
    for (std::size_t b = 0; b < bands; ++b) sq += row[b] * row[b];
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t b = 0; b < bands; ++b) row[b] *= inv;
  }

  // Junk bands come in contiguous runs at seeded random positions, the way
  // low-SNR regions appear in real sensors. Isolated junk bands would be
  // partially reconstructed by any smoothing window and stop looking junk.
  const auto junk_count = static_cast<std::size_t>(
      std::llround(config.junk_band_fraction * static_cast<double>(bands)));
  if (junk_count > 0) {
    const std::size_t run_len = std::max<std::size_t>(1, config.junk_run_length);
    std::vector<char> is_junk(bands, 0);
    std::size_t placed = 0;
    std::size_t attempts = 0;
    while (placed < junk_count) {
      const std::size_t len = std::min(run_len, junk_count - placed);
      std::size_t start;
      if (attempts++ < 1000) {
        start = static_cast<std::size_t>(rng.next_below(bands - len + 1));
        bool clash = false;
        for (std::size_t b = start; b < start + len; ++b) clash |= (is_junk[b] != 0);
        if (clash) continue;
      } else {
        // Fall back to the first free slot wide enough.
        start = bands;
        for (std::size_t s = 0; s + len <= bands; ++s) {
          bool clash = false;
          for (std::size_t b = s; b < s + len; ++b) clash |= (is_junk[b] != 0);
          if (!clash) {
            start = s;
            break;
          }
        }
        if (start == bands) {  // fragmented; fill any free bands
          for (std::size_t b = 0; b < bands && placed < junk_count; ++b) {
            if (!is_junk[b]) {
              is_junk[b] = 1;
              ++placed;
            }
          }
          break;
        }
      }
      for (std::size_t b = start; b < start + len; ++b) is_junk[b] = 1;
      placed += len;
    }
    for (std::size_t b = 0; b < bands; ++b)
      if (is_junk[b]) truth.junk_bands.push_back(b);
  }

  // Ground-truth abundances.
  truth.abundances.rows = config.rows;
  truth.abundances.cols = config.cols;
  truth.abundances.classes = config.k;
  truth.abundances.data.assign(pixels * config.k, 0.0f);
  if (config.abundance_mode == AbundanceMode::one_hot_regions) {
    // k contiguous row strips.
    for (std::size_t r = 0; r < config.rows; ++r) {
      std::size_t cls = r * config.k / config.rows;
      if (cls >= config.k) cls = config.k - 1;
      for (std::size_t c = 0; c < config.cols; ++c)
        truth.abundances.at(r, c, cls) = 1.0f;
    }
  } else {
    std::vector<double> g(config.k);
    for (std::size_t p = 0; p < pixels; ++p) {
      double total = 0.0;
      for (std::size_t j = 0; j < config.k; ++j) {
        g[j] = gamma_draw(rng, config.dirichlet_alpha);
        total += g[j];
      }
      float* dst = truth.abundances.data.data() + p * config.k;
      if (total <= 0.0) {
        dst[0] = 1.0f;
        continue;
      }
      for (std::size_t j = 0; j < config.k; ++j)
        dst[j] = static_cast<float>(g[j] / total);
    }
  }

  // Mix, add noise, clip at zero.
  HyperCube cube;
  cube.rows = config.rows;
  cube.cols = config.cols;
  cube.bands = bands;
  cube.data.assign(pixels * bands, 0.0f);
  for (std::size_t p = 0; p < pixels; ++p) {
    float* dst = cube.data.data() + p * bands;
    const float* ab = truth.abundances.data.data() + p * config.k;
    for (std::size_t b = 0; b < bands; ++b) {
      double v = 0.0;
      for (std::size_t j = 0; j < config.k; ++j)
        v += static_cast<double>(ab[j]) * truth.endmembers.spectra[j * bands + b];
      if (config.noise_sigma > 0.0) v += config.noise_sigma * rng.next_gaussian();
      dst[b] = static_cast<float>(std::max(v, 0.0));
    }
  }

  // Overwrite junk bands last; these may go negative, they model dead
  // channels rather than reflectance.
  for (std::size_t b : truth.junk_bands) {
    for (std::size_t p = 0; p < pixels; ++p)
      cube.data[p * bands + b] = static_cast<float>(config.junk_sigma * rng.next_gaussian());
  }

  return {std::move(cube), std::move(truth)};
}

}  // namespace specmix
