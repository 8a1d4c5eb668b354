#include "specmix/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "specmix/errors.hpp"
#include "specmix/io.hpp"
#include "specmix/parallel.hpp"
#include "specmix/text.hpp"

namespace specmix {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write: " + path.string());
  return out;
}

std::string flag(bool v) { return v ? "1" : "0"; }

}  // namespace

void write_mask_file(const BandMask& mask, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (bool keep : mask.keep) out << (keep ? '1' : '0') << "\n";
  if (!out) throw io_error("write failed: " + path.string());
}

BandMask read_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("mask file not found: " + path.string());
  BandMask mask;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "1") {
      mask.keep.push_back(true);
      ++mask.retained_count;
    } else if (t == "0") {
      mask.keep.push_back(false);
    } else {
      throw io_error(path.string() + ": mask lines must be 0 or 1, got '" + t + "'");
    }
  }
  if (mask.keep.empty()) throw io_error(path.string() + ": empty mask");
  return mask;
}

void write_snr_profile_csv(const SnrProfile& profile, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "band,mean,std,snr_db\n";
  for (std::size_t b = 0; b < profile.band_count(); ++b) {
    out << b << "," << format_double(profile.mean[b]) << "," << format_double(profile.std[b])
        << "," << format_double(profile.snr_db[b]) << "\n";
  }
  if (!out) throw io_error("write failed: " + path.string());
}

void write_endmembers_csv(const EndmemberSet& endmembers, const std::filesystem::path& path) {
  SpectralLibrary lib;
  for (std::size_t i = 0; i < endmembers.k; ++i) {
    SpectralLibrary::Entry e;
    e.name = "class_" + std::to_string(i);
    e.spectrum.assign(endmembers.row(i), endmembers.row(i) + endmembers.bands);
    lib.entries.push_back(std::move(e));
  }
  write_spectral_library(lib, path);
}

EndmemberSet read_endmembers_csv(const std::filesystem::path& path) {
  const SpectralLibrary lib = read_spectral_library(path);
  EndmemberSet set;
  set.k = lib.size();
  set.bands = lib.band_count();
  set.spectra.reserve(set.k * set.bands);
  for (const auto& e : lib.entries)
    set.spectra.insert(set.spectra.end(), e.spectrum.begin(), e.spectrum.end());
  return set;
}

void write_match_report_csv(const MatchReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "class,reference,cosine,rmse\n";
  for (const auto& pair : report.assignment) {
    out << pair.custom_index << "," << pair.reference_name << ","
        << format_double(pair.cosine) << "," << format_double(pair.rmse) << "\n";
  }
  for (std::size_t i : report.unassigned) out << i << ",unassigned,,\n";
  out << "mean,," << format_double(report.mean_cosine) << ","
      << format_double(report.mean_rmse) << "\n";
  if (!out) throw io_error("write failed: " + path.string());
}

void write_filter_report_csv(const FilterReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "method,retained_bands,mean_cosine,mean_rmse,mean_snr_db,mean_residual\n";
  for (const auto& row : report.rows) {
    out << row.method << "," << row.retained_bands << "," << format_double(row.mean_cosine)
        << "," << format_double(row.mean_rmse) << "," << format_double(row.mean_snr_db) << ","
        << format_double(row.mean_residual) << "\n";
  }
  if (!out) throw io_error("write failed: " + path.string());
}

std::pair<double, double> write_pgm(const std::vector<double>& values, std::size_t width,
                                    std::size_t height, const std::filesystem::path& path) {
  if (values.size() != width * height)
    throw std::invalid_argument("pgm size mismatch");
  double lo = values.empty() ? 0.0 : values.front();
  double hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write: " + path.string());
  out << "P5\n" << width << " " << height << "\n255\n";
  const double span = hi - lo;
  for (double v : values) {
    const double scaled = span > 0.0 ? (v - lo) / span * 255.0 : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled))));
  }
  if (!out) throw io_error("write failed: " + path.string());
  return {lo, hi};
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& [key, value] : manifest) out << key << "=" << value << "\n";
  if (!out) throw io_error("write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("manifest not found: " + path.string());
  Manifest manifest;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw io_error(path.string() + ": expected key=value, got '" + t + "'");
    manifest.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return manifest;
}

Manifest manifest_from_config(const PipelineConfig& config) {
  Manifest m;
  m.emplace_back("cube", config.cube_path.string());
  m.emplace_back("library", config.library_path.string());
  m.emplace_back("filter", filter_method_name(config.filter_method));
  m.emplace_back("window", std::to_string(config.sg.window));
  m.emplace_back("order", std::to_string(config.sg.order));
  m.emplace_back("keep_fraction", format_double(config.fourier.keep_fraction));
  m.emplace_back("levels", std::to_string(config.wavelet.levels));
  m.emplace_back("threshold_scale", format_double(config.wavelet.threshold_scale));
  m.emplace_back("threshold_db", format_double(config.threshold_db));
  m.emplace_back("k", std::to_string(config.kmeans.k));
  m.emplace_back("seed", std::to_string(config.kmeans.seed));
  m.emplace_back("max_iters", std::to_string(config.kmeans.max_iters));
  m.emplace_back("tol", format_double(config.kmeans.tol));
  m.emplace_back("renormalize_endmembers", flag(config.renormalize_endmembers));
  m.emplace_back("normalize_before_rmse", flag(config.normalize_before_rmse));
  m.emplace_back("emit_pgm", flag(config.emit_pgm));
  return m;
}

PipelineConfig config_from_manifest(const Manifest& manifest) {
  PipelineConfig config;
  std::map<std::string, std::string> kv(manifest.begin(), manifest.end());
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const auto want_size = [&](const char* key, std::size_t& dst) {
    if (const auto* s = get(key)) {
      const auto v = parse_int(*s);
      if (!v || *v < 0) throw io_error(std::string("manifest: bad value for ") + key);
      dst = static_cast<std::size_t>(*v);
    }
  };
  const auto want_double = [&](const char* key, double& dst) {
    if (const auto* s = get(key)) {
      const auto v = parse_double(*s);
      if (!v) throw io_error(std::string("manifest: bad value for ") + key);
      dst = *v;
    }
  };
  const auto want_flag = [&](const char* key, bool& dst) {
    if (const auto* s = get(key)) dst = (*s == "1" || *s == "true");
  };

  if (const auto* s = get("cube")) config.cube_path = *s;
  if (const auto* s = get("library")) config.library_path = *s;
  if (const auto* s = get("filter")) config.filter_method = parse_filter_method(*s);
  want_size("window", config.sg.window);
  want_size("order", config.sg.order);
  want_double("keep_fraction", config.fourier.keep_fraction);
  want_size("levels", config.wavelet.levels);
  want_double("threshold_scale", config.wavelet.threshold_scale);
  want_double("threshold_db", config.threshold_db);
  want_size("k", config.kmeans.k);
  if (const auto* s = get("seed")) {
    const auto v = parse_int(*s);
    if (!v) throw io_error("manifest: bad value for seed");
    config.kmeans.seed = static_cast<std::uint64_t>(*v);
  }
  want_size("max_iters", config.kmeans.max_iters);
  want_double("tol", config.kmeans.tol);
  want_flag("renormalize_endmembers", config.renormalize_endmembers);
  want_flag("normalize_before_rmse", config.normalize_before_rmse);
  want_flag("emit_pgm", config.emit_pgm);
  return config;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  std::filesystem::path hdr = config.cube_path;
  hdr += ".hdr";
  if (!std::filesystem::exists(hdr))
    throw io_error("cube not found: " + config.cube_path.string());

  const HyperCube cube = read_cube(config.cube_path);
  const SpectralLibrary library = read_spectral_library(config.library_path);

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (!std::filesystem::is_directory(config.out_dir))
    throw io_error("cannot create output directory: " + config.out_dir.string());

  // Stage 1: filter, band SNR, selection.
  const HyperCube filtered = filter_cube(cube, config.filter_method, config.sg,
                                         config.fourier, config.wavelet, config.threads);
  const SnrProfile profile = band_snr(filtered, config.threads);
  const BandMask mask = select_bands(profile, config.threshold_db);
  if (mask.retained_count == 0)
    throw compute_error("band selection: no bands survive the SNR threshold");
  write_snr_profile_csv(profile, config.out_dir / "snr.csv");
  write_mask_file(mask, config.out_dir / "mask.txt");

  const HyperCube working = apply_mask(filtered, mask);

  // Stage 2: normalize, cluster, unmix.
  std::vector<double> pixels(working.pixel_count() * working.bands);
  parallel_for(working.pixel_count(), config.threads, [&](std::size_t p) {
    const auto norm = l2_normalize(working.spectrum(p));
    std::copy(norm.begin(), norm.end(),
              pixels.begin() + static_cast<std::ptrdiff_t>(p * working.bands));
  });
  EndmemberSet endmembers = kmeans_endmembers(pixels, working.pixel_count(), working.bands,
                                              config.kmeans, config.threads);
  if (config.renormalize_endmembers) {
    for (std::size_t i = 0; i < endmembers.k; ++i) {
      const std::vector<double> row(endmembers.row(i), endmembers.row(i) + endmembers.bands);
      const auto normed = l2_normalize(row);
      std::copy(normed.begin(), normed.end(), endmembers.row(i));
    }
  }
  write_endmembers_csv(endmembers, config.out_dir / "w_custom.csv");

  const AbundanceCube abundances = unmix_cube(working, endmembers, config.threads);
  write_abundance_maps(abundances, config.out_dir / "abundance");

  // Stage 3: match against the reference library.
  SpectralLibrary refs;
  if (library.band_count() == cube.bands) {
    refs = mask_library(library, mask);
  } else if (library.wavelengths && working.wavelengths) {
    refs = resample_library(library, *working.wavelengths);
  } else {
    throw io_error("library band count does not match cube and no wavelength axes to resample");
  }
  MatchOptions mopts;
  mopts.normalize_before_rmse = config.normalize_before_rmse;
  const MatchReport match = match_endmembers(endmembers, refs, mopts);
  write_match_report_csv(match, config.out_dir / "eval.csv");

  Manifest manifest = manifest_from_config(config);
  manifest.emplace_back("retained_count", std::to_string(mask.retained_count));
  manifest.emplace_back("mean_cosine", format_double(match.mean_cosine));
  manifest.emplace_back("mean_rmse", format_double(match.mean_rmse));

  if (config.emit_pgm) {
    // SNR profile as a simple bar plot, one column per band.
    const std::size_t height = 64;
    std::vector<double> plot(profile.band_count() * height, 0.0);
    double lo = profile.snr_db[0], hi = profile.snr_db[0];
    for (double v : profile.snr_db) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t b = 0; b < profile.band_count(); ++b) {
      const auto bar = static_cast<std::size_t>(
          std::lround((profile.snr_db[b] - lo) / span * static_cast<double>(height - 1)));
      for (std::size_t y = 0; y <= bar; ++y)
        plot[(height - 1 - y) * profile.band_count() + b] = 1.0;
    }
    write_pgm(plot, profile.band_count(), height, config.out_dir / "snr_profile.pgm");
    manifest.emplace_back("pgm_snr_profile_min", format_double(lo));
    manifest.emplace_back("pgm_snr_profile_max", format_double(hi));

    for (std::size_t k = 0; k < abundances.classes; ++k) {
      std::vector<double> grid(abundances.pixel_count());
      for (std::size_t p = 0; p < grid.size(); ++p)
        grid[p] = static_cast<double>(abundances.data[p * abundances.classes + k]);
      const auto [gmin, gmax] =
          write_pgm(grid, abundances.cols, abundances.rows,
                    config.out_dir / ("abundance_class_" + std::to_string(k) + ".pgm"));
      manifest.emplace_back("pgm_abundance_class_" + std::to_string(k) + "_min",
                            format_double(gmin));
      manifest.emplace_back("pgm_abundance_class_" + std::to_string(k) + "_max",
                            format_double(gmax));
    }
  }
  write_manifest(manifest, config.out_dir / "run_manifest.txt");

  PipelineResult result;
  result.retained_count = mask.retained_count;
  result.mean_cosine = match.mean_cosine;
  result.mean_rmse = match.mean_rmse;
  return result;
}

}  // namespace specmix
