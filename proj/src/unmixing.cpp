#include "specmix/unmixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dense_solve.hpp"
#include "specmix/errors.hpp"
#include "specmix/parallel.hpp"
#include "specmix/rng.hpp"

namespace specmix {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<double> l2_normalize(const std::vector<double>& spectrum) {
  double sq = 0.0;
  for (double v : spectrum) sq += v * v;
  const double norm = std::sqrt(sq);
  std::vector<double> out(spectrum.size(), 0.0);
  if (norm <= 1e-12) return out;
  for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = spectrum[i] / norm;
  return out;
}

EndmemberSet kmeans_endmembers(const std::vector<double>& pixels, std::size_t n,
                               std::size_t bands, const KmeansConfig& config,
                               unsigned threads) {
  KmeansTrace trace;
  return kmeans_endmembers(pixels, n, bands, config, trace, threads);
}

EndmemberSet kmeans_endmembers(const std::vector<double>& pixels, std::size_t n,
                               std::size_t bands, const KmeansConfig& config,
                               KmeansTrace& trace, unsigned threads) {
  if (config.k == 0 || config.max_iters == 0 || !(config.tol > 0.0))
    throw std::invalid_argument("invalid kmeans config");
  if (config.k > n)
    throw std::invalid_argument("kmeans k exceeds point count");
  if (pixels.size() != n * bands)
    throw std::invalid_argument("pixel matrix size mismatch");
  for (double v : pixels) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in kmeans input");
  }

  const auto point = [&](std::size_t i) { return pixels.data() + i * bands; };

  // k-means++ seeding.
  Rng rng(config.seed);
  std::vector<double> centroids(config.k * bands);
  std::vector<char> chosen(n, 0);
  {
    const std::size_t first = static_cast<std::size_t>(rng.next_below(n));
    std::copy_n(point(first), bands, centroids.begin());
    chosen[first] = 1;

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(point(i), point(first), bands);

    for (std::size_t c = 1; c < config.k; ++c) {
      double total = 0.0;
      for (double v : d2) total += v;
      std::size_t pick = n;
      if (total > 0.0) {
        const double r = rng.next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc >= r && d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
        if (pick == n) {  // fell off the end from rounding
          for (std::size_t i = n; i-- > 0;) {
            if (d2[i] > 0.0) {
              pick = i;
              break;
            }
          }
        }
      }
      if (pick == n) {  // all remaining points coincide with a centre
        for (std::size_t i = 0; i < n; ++i) {
          if (!chosen[i]) {
            pick = i;
            break;
          }
        }
      }
      chosen[pick] = 1;
      std::copy_n(point(pick), bands, centroids.begin() + c * bands);
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], squared_distance(point(i), point(pick), bands));
    }
  }

  std::vector<std::size_t> assign(n, 0);
  std::vector<double> best_d2(n, 0.0);
  std::vector<double> sums(config.k * bands);
  std::vector<std::size_t> counts(config.k);
  trace.objective.clear();
  trace.iterations = 0;

  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    trace.iterations = iter + 1;

    // Assignment: independent per point; ties go to the lowest index.
    parallel_for(n, threads, [&](std::size_t i) {
      const double* x = point(i);
      std::size_t best = 0;
      double best_sq = squared_distance(x, centroids.data(), bands);
      for (std::size_t c = 1; c < config.k; ++c) {
        const double sq = squared_distance(x, centroids.data() + c * bands, bands);
        if (sq < best_sq) {
          best_sq = sq;
          best = c;
        }
      }
      assign[i] = best;
      best_d2[i] = best_sq;
    });

    double objective = 0.0;
    for (double v : best_d2) objective += v;
    trace.objective.push_back(objective);

    // Update: sequential accumulation in pixel order keeps centroids
    // bit-stable across thread counts.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = point(i);
      double* s = sums.data() + assign[i] * bands;
      for (std::size_t b = 0; b < bands; ++b) s[b] += x[b];
      ++counts[assign[i]];
    }

    double max_shift = 0.0;
    double max_norm = 0.0;
    for (std::size_t c = 0; c < config.k; ++c) {
      double* dst = centroids.data() + c * bands;
      max_norm = std::max(max_norm, std::sqrt(dot(dst, dst, bands)));
      if (counts[c] == 0) continue;
      double shift_sq = 0.0;
      for (std::size_t b = 0; b < bands; ++b) {
        const double nv = sums[c * bands + b] / static_cast<double>(counts[c]);
        const double d = nv - dst[b];
        shift_sq += d * d;
        dst[b] = nv;
      }
      max_shift = std::max(max_shift, std::sqrt(shift_sq));
    }

    // Re-seed empty clusters to the worst-fit point.
    for (std::size_t c = 0; c < config.k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t worst = 0;
      double worst_d2 = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (best_d2[i] > worst_d2) {
          worst_d2 = best_d2[i];
          worst = i;
        }
      }
      std::copy_n(point(worst), bands, centroids.begin() + c * bands);
      best_d2[worst] = 0.0;  // keep a second empty cluster from taking the same point
      max_shift = std::numeric_limits<double>::infinity();
    }

    if (max_shift <= config.tol * (1.0 + max_norm)) break;
  }

  EndmemberSet out;
  out.k = config.k;
  out.bands = bands;
  out.spectra = std::move(centroids);
  return out;
}

NnlsSolution nnls_solve(const EndmemberSet& endmembers, const std::vector<double>& pixel) {
  const std::size_t k = endmembers.k;
  const std::size_t bands = endmembers.bands;
  if (endmembers.spectra.size() != k * bands)
    throw std::invalid_argument("endmember matrix size mismatch");
  if (pixel.size() != bands)
    throw std::invalid_argument("pixel length does not match endmember bands");
  for (std::size_t i = 0; i < k; ++i) {
    if (dot(endmembers.row(i), endmembers.row(i), bands) == 0.0)
      throw std::invalid_argument("endmember row " + std::to_string(i) + " is all zero");
  }

  // Work on the normal-equations form. With design matrix A = W^T:
  //   gram = A^T A = W W^T,  rhs = A^T b = W b,  dual w = rhs - gram * a.
  std::vector<double> gram(k * k);
  std::vector<double> rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    rhs[i] = dot(endmembers.row(i), pixel.data(), bands);
    for (std::size_t j = i; j < k; ++j) {
      const double g = dot(endmembers.row(i), endmembers.row(j), bands);
      gram[i * k + j] = g;
      gram[j * k + i] = g;
    }
  }

  double rhs_inf = 0.0;
  for (double v : rhs) rhs_inf = std::max(rhs_inf, std::abs(v));
  const double stop_tol = 1e-10 * (1.0 + rhs_inf);

  std::vector<double> a(k, 0.0);
  std::vector<std::size_t> passive;  // insertion order kept for the singular fallback
  std::vector<char> in_passive(k, 0);
  std::vector<char> banned(k, 0);
  std::vector<double> dual(k);

  const std::size_t max_outer = 3 * k + 10;
  std::size_t outer = 0;

  const auto solve_passive = [&](std::vector<double>& z) -> bool {
    const std::size_t m = passive.size();
    std::vector<double> sub_gram(m * m);
    std::vector<double> sub_rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      sub_rhs[i] = rhs[passive[i]];
      for (std::size_t j = 0; j < m; ++j)
        sub_gram[i * m + j] = gram[passive[i] * k + passive[j]];
    }
    return detail::spd_solve(std::move(sub_gram), m, std::move(sub_rhs), z);
  };

  while (true) {
    for (std::size_t j = 0; j < k; ++j) {
      double g = rhs[j];
      for (std::size_t i = 0; i < k; ++i) g -= gram[j * k + i] * a[i];
      dual[j] = g;
    }
    std::size_t candidate = k;
    double best = stop_tol;
    for (std::size_t j = 0; j < k; ++j) {
      if (in_passive[j] || banned[j]) continue;
      if (dual[j] > best) {
        best = dual[j];
        candidate = j;
      }
    }
    if (candidate == k) break;

    if (++outer > max_outer)
      throw compute_error("nnls iteration cap exceeded");

    passive.push_back(candidate);
    in_passive[candidate] = 1;

    std::vector<double> z;
    if (!solve_passive(z)) {
      // Numerically singular passive set: drop the most recently added
      // index and bar it until the passive set changes again.
      in_passive[passive.back()] = 0;
      banned[passive.back()] = 1;
      passive.pop_back();
      continue;
    }
    std::fill(banned.begin(), banned.end(), 0);

    while (true) {
      bool all_positive = true;
      for (double v : z) {
        if (v <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) break;

      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < passive.size(); ++i) {
        if (z[i] <= 0.0) {
          const double ai = a[passive[i]];
          const double step = ai / (ai - z[i]);
          alpha = std::min(alpha, step);
        }
      }
      for (std::size_t i = 0; i < passive.size(); ++i)
        a[passive[i]] += alpha * (z[i] - a[passive[i]]);

      // Retire coordinates driven to the boundary.
      for (std::size_t i = passive.size(); i-- > 0;) {
        const std::size_t j = passive[i];
        if (z[i] <= 0.0 && a[j] <= 1e-14 * (1.0 + rhs_inf)) {
          a[j] = 0.0;
          in_passive[j] = 0;
          passive.erase(passive.begin() + static_cast<std::ptrdiff_t>(i));
        }
      }
      if (passive.empty()) {
        z.clear();
        break;
      }
      if (!solve_passive(z)) {
        in_passive[passive.back()] = 0;
        banned[passive.back()] = 1;
        a[passive.back()] = 0.0;
        passive.pop_back();
        if (passive.empty()) {
          z.clear();
          break;
        }
        continue;
      }
    }

    for (double& v : a) v = 0.0;
    for (std::size_t i = 0; i < passive.size(); ++i) a[passive[i]] = z[i];
  }

  NnlsSolution sol;
  sol.abundance = std::move(a);
  sol.iterations = outer;
  double res_sq = 0.0;
  for (std::size_t b = 0; b < bands; ++b) {
    double recon = 0.0;
    for (std::size_t i = 0; i < k; ++i) recon += sol.abundance[i] * endmembers.spectra[i * bands + b];
    const double d = pixel[b] - recon;
    res_sq += d * d;
  }
  sol.residual_norm = std::sqrt(res_sq);
  return sol;
}

AbundanceCube unmix_cube(const HyperCube& cube, const EndmemberSet& endmembers,
                         unsigned threads) {
  if (cube.bands != endmembers.bands)
    throw std::invalid_argument("cube bands do not match endmember bands");

  AbundanceCube ab;
  ab.rows = cube.rows;
  ab.cols = cube.cols;
  ab.classes = endmembers.k;
  ab.data.assign(cube.pixel_count() * endmembers.k, 0.0f);

  parallel_for(cube.pixel_count(), threads, [&](std::size_t p) {
    const auto normalized = l2_normalize(cube.spectrum(p));
    bool zero = true;
    for (double v : normalized) {
      if (v != 0.0) {
        zero = false;
        break;
      }
    }
    if (zero) return;  // zero-norm pixel: zero abundance without NNLS
    const NnlsSolution sol = nnls_solve(endmembers, normalized);
    float* dst = ab.data.data() + p * endmembers.k;
    for (std::size_t i = 0; i < endmembers.k; ++i)
      dst[i] = static_cast<float>(sol.abundance[i]);
  });
  return ab;
}

}  // namespace specmix
