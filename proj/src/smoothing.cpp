#include "specmix/smoothing.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "dense_solve.hpp"
#include "specmix/errors.hpp"
#include "specmix/parallel.hpp"

namespace specmix {

namespace {

void check_params(const SgParams& p) {
  if (p.window < 3 || p.window % 2 == 0)
    throw std::invalid_argument("SG window must be odd and >= 3");
  if (p.order >= p.window)
    throw std::invalid_argument("SG order must be < window");
}

std::vector<double> compute_coefficients(const SgParams& p) {
  const std::size_t w = p.window;
  const std::size_t m = p.order + 1;
  const auto half = static_cast<double>(w / 2);

  // Normal equations G z = e0 on nodes t_k = (k - half)/half; the fitted
  // value at t = 0 is then sum_j z_j t_k^j dotted with the samples.
  std::vector<double> powers(w * m);
  for (std::size_t k = 0; k < w; ++k) {
    const double t = (static_cast<double>(k) - half) / half;
    double tj = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      powers[k * m + j] = tj;
      tj *= t;
    }
  }
  std::vector<double> gram(m * m, 0.0);
  for (std::size_t k = 0; k < w; ++k) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b)
        gram[a * m + b] += powers[k * m + a] * powers[k * m + b];
    }
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * m + b] = gram[b * m + a];

  std::vector<double> rhs(m, 0.0);
  rhs[0] = 1.0;
  std::vector<double> z;
  if (!detail::spd_solve(gram, m, rhs, z))
    throw compute_error("SG normal equations are numerically singular");

  std::vector<double> weights(w, 0.0);
  for (std::size_t k = 0; k < w; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += z[j] * powers[k * m + j];
    weights[k] = acc;
  }
  return weights;
}

std::mutex cache_mutex;
std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cache;

}  // namespace

std::vector<double> sg_coefficients(const SgParams& params) {
  check_params(params);
  const auto key = std::make_pair(params.window, params.order);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto weights = compute_coefficients(params);
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache.emplace(key, std::move(weights)).first->second;
}

std::vector<double> sg_smooth_spectrum(const std::vector<double>& spectrum,
                                       const SgParams& params) {
  const auto weights = sg_coefficients(params);
  const std::size_t b = spectrum.size();
  const std::size_t w = params.window;
  if (b < w)
    throw std::invalid_argument("spectrum shorter than SG window");

  const auto half = static_cast<std::ptrdiff_t>(w / 2);
  const auto n = static_cast<std::ptrdiff_t>(b);
  std::vector<double> out(b);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t o = -half; o <= half; ++o) {
      std::ptrdiff_t j = i + o;
      if (j < 0) j = -j;                    // mirror: sample at -k maps to +k
      if (j >= n) j = 2 * (n - 1) - j;
      acc += weights[static_cast<std::size_t>(o + half)] * spectrum[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

HyperCube smooth_cube(const HyperCube& cube, const SgParams& params, unsigned threads) {
  check_params(params);
  if (cube.bands < params.window)
    throw std::invalid_argument("cube has fewer bands than SG window");
  sg_coefficients(params);  // fill the cache before the parallel section

  HyperCube out = cube;
  parallel_for(cube.pixel_count(), threads, [&](std::size_t pixel) {
    out.set_spectrum(pixel, sg_smooth_spectrum(cube.spectrum(pixel), params));
  });
  return out;
}

}  // namespace specmix
