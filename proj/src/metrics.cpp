#include "specmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specmix {

namespace {

// Shortest-augmenting-path assignment (Jonker-Volgenant flavour) minimizing
// total cost over an n x m matrix with n <= m. Returns, per row, the column
// it is matched to. Exact, O(n^2 m).
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost,
                                          std::size_t n, std::size_t m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, m);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_similarity length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("cosine_similarity on zero-norm input");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("rmse length mismatch");
  if (a.empty())
    throw std::invalid_argument("rmse on empty vectors");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(a.size()));
}

MatchReport match_endmembers(const EndmemberSet& custom, const SpectralLibrary& reference,
                             const MatchOptions& options) {
  const std::size_t k = custom.k;
  const std::size_t m = reference.size();
  if (k == 0 || m == 0)
    throw std::invalid_argument("match_endmembers needs non-empty inputs");
  if (custom.bands != reference.band_count())
    throw std::invalid_argument("endmember and reference band counts differ");

  std::vector<double> cosines(k * m);
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double> row(custom.row(i), custom.row(i) + custom.bands);
    for (std::size_t j = 0; j < m; ++j)
      cosines[i * m + j] = cosine_similarity(row, reference.entries[j].spectrum);
  }

  // Minimize negative cosine; when k exceeds the library, match the library
  // side fully and report leftover customs as unassigned.
  std::vector<std::size_t> custom_to_ref(k, m);
  if (k <= m) {
    std::vector<double> cost(k * m);
    for (std::size_t i = 0; i < k * m; ++i) cost[i] = -cosines[i];
    custom_to_ref = solve_assignment(cost, k, m);
  } else {
    std::vector<double> cost(m * k);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < k; ++i) cost[j * k + i] = -cosines[i * m + j];
    const auto ref_to_custom = solve_assignment(cost, m, k);
    for (std::size_t j = 0; j < m; ++j) custom_to_ref[ref_to_custom[j]] = j;
  }

  MatchReport report;
  for (std::size_t i = 0; i < k; ++i) {
    if (custom_to_ref[i] == m) {
      report.unassigned.push_back(i);
      continue;
    }
    const std::size_t j = custom_to_ref[i];
    std::vector<double> a(custom.row(i), custom.row(i) + custom.bands);
    std::vector<double> b = reference.entries[j].spectrum;
    if (options.normalize_before_rmse) {
      a = l2_normalize(a);
      b = l2_normalize(b);
    }
    MatchReport::Pair pair;
    pair.custom_index = i;
    pair.reference_name = reference.entries[j].name;
    pair.cosine = cosines[i * m + j];
    pair.rmse = rmse(a, b);
    report.assignment.push_back(std::move(pair));
  }

  if (!report.assignment.empty()) {
    double cos_sum = 0.0, rmse_sum = 0.0;
    for (const auto& pr : report.assignment) {
      cos_sum += pr.cosine;
      rmse_sum += pr.rmse;
    }
    report.mean_cosine = cos_sum / static_cast<double>(report.assignment.size());
    report.mean_rmse = rmse_sum / static_cast<double>(report.assignment.size());
  }
  return report;
}

SpectralLibrary mask_library(const SpectralLibrary& lib, const BandMask& mask) {
  if (mask.keep.size() != lib.band_count())
    throw std::invalid_argument("mask length does not match library bands");
  if (mask.retained_count == 0)
    throw std::invalid_argument("mask retains no bands");

  SpectralLibrary out;
  for (const auto& e : lib.entries) {
    SpectralLibrary::Entry masked;
    masked.name = e.name;
    for (std::size_t b = 0; b < e.spectrum.size(); ++b)
      if (mask.keep[b]) masked.spectrum.push_back(e.spectrum[b]);
    out.entries.push_back(std::move(masked));
  }
  if (lib.wavelengths) {
    std::vector<double> wl;
    for (std::size_t b = 0; b < lib.wavelengths->size(); ++b)
      if (mask.keep[b]) wl.push_back((*lib.wavelengths)[b]);
    out.wavelengths = std::move(wl);
  }
  return out;
}

SpectralLibrary resample_library(const SpectralLibrary& lib,
                                 const std::vector<double>& target_wavelengths) {
  if (!lib.wavelengths)
    throw std::invalid_argument("library has no wavelength axis to resample from");
  const auto& src = *lib.wavelengths;
  for (std::size_t i = 1; i < src.size(); ++i)
    if (!(src[i] > src[i - 1]))
      throw std::invalid_argument("library wavelengths must be strictly increasing");
  for (double w : target_wavelengths) {
    if (w < src.front() || w > src.back())
      throw std::invalid_argument("target wavelength outside library range");
  }

  SpectralLibrary out;
  out.wavelengths = target_wavelengths;
  for (const auto& e : lib.entries) {
    SpectralLibrary::Entry r;
    r.name = e.name;
    r.spectrum.reserve(target_wavelengths.size());
    for (double w : target_wavelengths) {
      const auto it = std::lower_bound(src.begin(), src.end(), w);
      const std::size_t hi = static_cast<std::size_t>(it - src.begin());
      if (hi == 0 || src[hi] == w) {
        r.spectrum.push_back(e.spectrum[hi == src.size() ? hi - 1 : hi]);
        continue;
      }
      const std::size_t lo = hi - 1;
      const double t = (w - src[lo]) / (src[hi] - src[lo]);
      r.spectrum.push_back(e.spectrum[lo] + t * (e.spectrum[hi] - e.spectrum[lo]));
    }
    out.entries.push_back(std::move(r));
  }
  return out;
}

}  // namespace specmix
