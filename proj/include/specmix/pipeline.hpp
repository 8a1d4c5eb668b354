#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "specmix/band_selection.hpp"
#include "specmix/baseline_filters.hpp"
#include "specmix/cube.hpp"
#include "specmix/metrics.hpp"
#include "specmix/smoothing.hpp"
#include "specmix/unmixing.hpp"

namespace specmix {

// Full run: filter -> band SNR -> selection -> mask -> normalize -> kmeans ->
// NNLS unmix -> library match, with every artifact written under out_dir.
struct PipelineConfig {
  std::filesystem::path cube_path;     // stem of .hdr/.raw pair
  std::filesystem::path library_path;  // CSV
  std::filesystem::path out_dir;

  FilterMethod filter_method = FilterMethod::phaselock;
  SgParams sg;
  FourierParams fourier;
  WaveletParams wavelet;
  double threshold_db = 15.0;
  KmeansConfig kmeans;
  bool renormalize_endmembers = false;
  bool normalize_before_rmse = false;
  bool emit_pgm = true;
  unsigned threads = 1;
};

struct PipelineResult {
  std::size_t retained_count = 0;
  double mean_cosine = 0.0;
  double mean_rmse = 0.0;
};

PipelineResult run_pipeline(const PipelineConfig& config);

// Ordered key=value list, one per line on disk. Values are verbatim strings.
using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

// Fills config from a run manifest (inverse of the keys run_pipeline
// records); unknown keys are ignored so result entries can live alongside.
PipelineConfig config_from_manifest(const Manifest& manifest);
Manifest manifest_from_config(const PipelineConfig& config);

// Artifact formats shared by the CLI subcommands.
void write_mask_file(const BandMask& mask, const std::filesystem::path& path);
BandMask read_mask_file(const std::filesystem::path& path);
void write_snr_profile_csv(const SnrProfile& profile, const std::filesystem::path& path);
void write_endmembers_csv(const EndmemberSet& endmembers, const std::filesystem::path& path);
EndmemberSet read_endmembers_csv(const std::filesystem::path& path);
void write_match_report_csv(const MatchReport& report, const std::filesystem::path& path);
void write_filter_report_csv(const FilterReport& report, const std::filesystem::path& path);

// 8-bit binary PGM, min-max scaled; returns the (min, max) used.
std::pair<double, double> write_pgm(const std::vector<double>& values, std::size_t width,
                                    std::size_t height, const std::filesystem::path& path);

}  // namespace specmix
