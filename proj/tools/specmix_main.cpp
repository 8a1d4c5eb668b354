#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specmix/band_selection.hpp"
#include "specmix/baseline_filters.hpp"
#include "specmix/errors.hpp"
#include "specmix/io.hpp"
#include "specmix/metrics.hpp"
#include "specmix/parallel.hpp"
#include "specmix/pipeline.hpp"
#include "specmix/smoothing.hpp"
#include "specmix/synth.hpp"
#include "specmix/text.hpp"
#include "specmix/unmixing.hpp"

namespace fs = std::filesystem;
using namespace specmix;

namespace {

// Exit codes: 0 success, 1 computation error, 2 usage or IO error.
constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

void add_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic cube with known ground truth");
  auto cfg = std::make_shared<SynthConfig>();
  auto out = std::make_shared<std::string>();
  auto out_truth = std::make_shared<std::string>();
  auto mode = std::make_shared<std::string>("one-hot-regions");

  cmd->add_option("--rows", cfg->rows, "Spatial rows")->capture_default_str();
  cmd->add_option("--cols", cfg->cols, "Spatial cols")->capture_default_str();
  cmd->add_option("--bands", cfg->bands, "Spectral bands")->capture_default_str();
  cmd->add_option("--k", cfg->k, "Ground-truth endmember count")->capture_default_str();
  cmd->add_option("--noise", cfg->noise_sigma, "Additive Gaussian noise sigma")->capture_default_str();
  cmd->add_option("--junk", cfg->junk_band_fraction, "Fraction of bands replaced with noise")->capture_default_str();
  cmd->add_option("--seed", cfg->seed, "Generator seed")->capture_default_str();
  cmd->add_option("--mode", *mode, "Abundance mode: one-hot-regions or dirichlet")->capture_default_str();
  cmd->add_option("--alpha", cfg->dirichlet_alpha, "Dirichlet concentration")->capture_default_str();
  cmd->add_option("--amp-lo", cfg->bump_amp_lo, "Min bump amplitude")->capture_default_str();
  cmd->add_option("--amp-hi", cfg->bump_amp_hi, "Max bump amplitude")->capture_default_str();
  cmd->add_option("--width-lo", cfg->bump_width_lo, "Min bump width in bands")->capture_default_str();
  cmd->add_option("--width-hi", cfg->bump_width_hi, "Max bump width in bands")->capture_default_str();
  cmd->add_option("--junk-sigma", cfg->junk_sigma, "Noise sigma for junk bands")->capture_default_str();
  cmd->add_option("--out", *out, "Output cube stem")->required();
  cmd->add_option("--out-truth", *out_truth, "Directory for ground-truth artifacts");

  cmd->callback([cfg, out, out_truth, mode]() {
    cfg->abundance_mode = parse_abundance_mode(*mode);
    const auto [cube, truth] = generate(*cfg);
    write_cube(cube, *out);
    if (!out_truth->empty()) {
      fs::create_directories(*out_truth);
      write_endmembers_csv(truth.endmembers, fs::path(*out_truth) / "endmembers.csv");
      write_abundance_maps(truth.abundances, fs::path(*out_truth) / "abundance");
      std::ofstream jb(fs::path(*out_truth) / "junk_bands.txt", std::ios::trunc);
      for (std::size_t b : truth.junk_bands) jb << b << "\n";
      if (!jb) throw io_error("write failed: junk_bands.txt");
    }
    std::cout << "wrote " << cube.rows << "x" << cube.cols << "x" << cube.bands
              << " cube to " << *out << "\n";
  });
}

void add_smooth(CLI::App& app) {
  auto* cmd = app.add_subcommand("smooth", "Savitzky-Golay smooth every pixel spectrum");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto params = std::make_shared<SgParams>();
  auto threads = std::make_shared<unsigned>(1);

  cmd->add_option("--in", *in, "Input cube stem")->required();
  cmd->add_option("--out", *out, "Output cube stem")->required();
  cmd->add_option("--window", params->window, "Filter window (odd)")->capture_default_str();
  cmd->add_option("--order", params->order, "Polynomial order")->capture_default_str();
  cmd->add_option("--threads", *threads, "Worker threads (0 = auto)")->capture_default_str();

  cmd->callback([in, out, params, threads]() {
    const HyperCube cube = read_cube(*in);
    write_cube(smooth_cube(cube, *params, *threads), *out);
  });
}

void add_select_bands(CLI::App& app) {
  auto* cmd = app.add_subcommand("select-bands", "Band-wise SNR profile and threshold mask");
  auto in = std::make_shared<std::string>();
  auto threshold = std::make_shared<double>(15.0);
  auto out_mask = std::make_shared<std::string>();
  auto out_profile = std::make_shared<std::string>();
  auto threads = std::make_shared<unsigned>(1);

  cmd->add_option("--in", *in, "Input cube stem (typically smoothed)")->required();
  cmd->add_option("--threshold-db", *threshold, "Retention threshold in dB")->capture_default_str();
  cmd->add_option("--out-mask", *out_mask, "Mask file, one 0/1 per band")->required();
  cmd->add_option("--out-profile", *out_profile, "SNR profile CSV");
  cmd->add_option("--threads", *threads, "Worker threads (0 = auto)")->capture_default_str();

  cmd->callback([in, threshold, out_mask, out_profile, threads]() {
    const HyperCube cube = read_cube(*in);
    const SnrProfile profile = band_snr(cube, *threads);
    const BandMask mask = select_bands(profile, *threshold);
    write_mask_file(mask, *out_mask);
    if (!out_profile->empty()) write_snr_profile_csv(profile, *out_profile);
    std::cout << "retained " << mask.retained_count << " of " << mask.keep.size()
              << " bands at " << *threshold << " dB\n";
  });
}

void add_unmix(CLI::App& app) {
  auto* cmd = app.add_subcommand("unmix", "KMeans endmembers + NNLS abundances");
  auto in = std::make_shared<std::string>();
  auto mask_path = std::make_shared<std::string>();
  auto cfg = std::make_shared<KmeansConfig>();
  auto renorm = std::make_shared<bool>(false);
  auto out_endmembers = std::make_shared<std::string>();
  auto out_abundance = std::make_shared<std::string>();
  auto threads = std::make_shared<unsigned>(1);

  cmd->add_option("--in", *in, "Input cube stem")->required();
  cmd->add_option("--mask", *mask_path, "Band mask to apply first");
  cmd->add_option("--k", cfg->k, "Cluster count")->capture_default_str();
  cmd->add_option("--seed", cfg->seed, "KMeans seed")->capture_default_str();
  cmd->add_option("--max-iters", cfg->max_iters, "Lloyd iteration cap")->capture_default_str();
  cmd->add_option("--tol", cfg->tol, "Relative centroid-shift stop")->capture_default_str();
  cmd->add_flag("--renormalize-endmembers", *renorm, "L2-normalize centroids before NNLS");
  cmd->add_option("--out-endmembers", *out_endmembers, "Endmember CSV")->required();
  cmd->add_option("--out-abundance", *out_abundance, "Abundance output directory")->required();
  cmd->add_option("--threads", *threads, "Worker threads (0 = auto)")->capture_default_str();

  cmd->callback([in, mask_path, cfg, renorm, out_endmembers, out_abundance, threads]() {
    HyperCube cube = read_cube(*in);
    if (!mask_path->empty()) cube = apply_mask(cube, read_mask_file(*mask_path));

    std::vector<double> pixels(cube.pixel_count() * cube.bands);
    parallel_for(cube.pixel_count(), *threads, [&](std::size_t p) {
      const auto norm = l2_normalize(cube.spectrum(p));
      std::copy(norm.begin(), norm.end(),
                pixels.begin() + static_cast<std::ptrdiff_t>(p * cube.bands));
    });
    EndmemberSet endmembers =
        kmeans_endmembers(pixels, cube.pixel_count(), cube.bands, *cfg, *threads);
    if (*renorm) {
      for (std::size_t i = 0; i < endmembers.k; ++i) {
        const std::vector<double> row(endmembers.row(i), endmembers.row(i) + endmembers.bands);
        const auto normed = l2_normalize(row);
        std::copy(normed.begin(), normed.end(), endmembers.row(i));
      }
    }
    write_endmembers_csv(endmembers, *out_endmembers);
    write_abundance_maps(unmix_cube(cube, endmembers, *threads), *out_abundance);
  });
}

void add_evaluate(CLI::App& app) {
  auto* cmd = app.add_subcommand("evaluate", "Match endmembers against a reference library");
  auto endmembers_path = std::make_shared<std::string>();
  auto library_path = std::make_shared<std::string>();
  auto mask_path = std::make_shared<std::string>();
  auto report_path = std::make_shared<std::string>();
  auto normalize_rmse = std::make_shared<bool>(false);

  cmd->add_option("--endmembers", *endmembers_path, "Extracted endmember CSV")->required();
  cmd->add_option("--library", *library_path, "Reference library CSV")->required();
  cmd->add_option("--mask", *mask_path, "Band mask to apply to the library");
  cmd->add_option("--report", *report_path, "Report CSV")->required();
  cmd->add_flag("--normalize-before-rmse", *normalize_rmse,
                "L2-normalize both spectra before RMSE");

  cmd->callback([endmembers_path, library_path, mask_path, report_path, normalize_rmse]() {
    const EndmemberSet custom = read_endmembers_csv(*endmembers_path);
    SpectralLibrary library = read_spectral_library(*library_path);
    if (!mask_path->empty()) library = mask_library(library, read_mask_file(*mask_path));
    MatchOptions opts;
    opts.normalize_before_rmse = *normalize_rmse;
    const MatchReport report = match_endmembers(custom, library, opts);
    write_match_report_csv(report, *report_path);
    std::cout << "mean cosine " << report.mean_cosine << ", mean rmse " << report.mean_rmse
              << "\n";
  });
}

void add_compare(CLI::App& app) {
  auto* cmd = app.add_subcommand("compare", "Compare filtering methods through the pipeline");
  auto in = std::make_shared<std::string>();
  auto library_path = std::make_shared<std::string>();
  auto methods = std::make_shared<std::string>("fourier,wavelet,phaselock");
  auto cfg = std::make_shared<CompareConfig>();
  auto no_selection = std::make_shared<bool>(false);
  auto report_path = std::make_shared<std::string>();

  cmd->add_option("--in", *in, "Input cube stem")->required();
  cmd->add_option("--library", *library_path, "Reference library CSV")->required();
  cmd->add_option("--methods", *methods, "Comma list of fourier,wavelet,phaselock")->capture_default_str();
  cmd->add_option("--threshold-db", cfg->threshold_db, "SNR retention threshold")->capture_default_str();
  cmd->add_flag("--no-band-selection", *no_selection, "Skip SNR band selection");
  cmd->add_option("--window", cfg->sg.window, "SG window")->capture_default_str();
  cmd->add_option("--order", cfg->sg.order, "SG order")->capture_default_str();
  cmd->add_option("--keep-fraction", cfg->fourier.keep_fraction, "Fourier keep fraction")->capture_default_str();
  cmd->add_option("--levels", cfg->wavelet.levels, "Wavelet levels")->capture_default_str();
  cmd->add_option("--threshold-scale", cfg->wavelet.threshold_scale, "Wavelet threshold scale")->capture_default_str();
  cmd->add_option("--k", cfg->kmeans.k, "Cluster count")->capture_default_str();
  cmd->add_option("--seed", cfg->kmeans.seed, "KMeans seed")->capture_default_str();
  cmd->add_flag("--normalize-before-rmse", cfg->normalize_before_rmse,
                "L2-normalize both spectra before RMSE");
  cmd->add_option("--threads", cfg->threads, "Worker threads (0 = auto)")->capture_default_str();
  cmd->add_option("--report", *report_path, "Report CSV")->required();

  cmd->callback([in, library_path, methods, cfg, no_selection, report_path]() {
    cfg->band_selection = !*no_selection;
    cfg->methods.clear();
    for (const auto& name : specmix::split(*methods, ',')) {
      const std::string t = specmix::trim(name);
      if (!t.empty()) cfg->methods.push_back(parse_filter_method(t));
    }
    if (cfg->methods.empty()) throw std::invalid_argument("no filter methods given");
    const HyperCube cube = read_cube(*in);
    const SpectralLibrary library = read_spectral_library(*library_path);
    const FilterReport report = compare_filters(cube, library, *cfg);
    write_filter_report_csv(report, *report_path);
    for (const auto& row : report.rows) {
      std::cout << row.method << ": retained " << row.retained_bands << ", cosine "
                << row.mean_cosine << ", rmse " << row.mean_rmse << ", snr "
                << row.mean_snr_db << " dB\n";
    }
  });
}

void add_pipeline(CLI::App& app) {
  auto* cmd = app.add_subcommand("pipeline", "Run the full three-stage pipeline");
  auto cfg = std::make_shared<PipelineConfig>();
  auto manifest_path = std::make_shared<std::string>();
  auto in = std::make_shared<std::string>();
  auto library = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto filter_name = std::make_shared<std::string>("phaselock");
  auto no_pgm = std::make_shared<bool>(false);

  auto* in_opt = cmd->add_option("--in", *in, "Input cube stem");
  auto* lib_opt = cmd->add_option("--library", *library, "Reference library CSV");
  cmd->add_option("--out", *out, "Output directory")->required();
  cmd->add_option("--manifest", *manifest_path, "Load parameters from a run manifest");
  auto* filter_opt = cmd->add_option("--filter", *filter_name, "phaselock, fourier or wavelet");
  auto* window_opt = cmd->add_option("--window", cfg->sg.window, "SG window")->capture_default_str();
  auto* order_opt = cmd->add_option("--order", cfg->sg.order, "SG order")->capture_default_str();
  auto* keep_opt = cmd->add_option("--keep-fraction", cfg->fourier.keep_fraction, "Fourier keep fraction");
  auto* levels_opt = cmd->add_option("--levels", cfg->wavelet.levels, "Wavelet levels");
  auto* scale_opt = cmd->add_option("--threshold-scale", cfg->wavelet.threshold_scale, "Wavelet threshold scale");
  auto* thresh_opt = cmd->add_option("--threshold-db", cfg->threshold_db, "SNR retention threshold")->capture_default_str();
  auto* k_opt = cmd->add_option("--k", cfg->kmeans.k, "Cluster count")->capture_default_str();
  auto* seed_opt = cmd->add_option("--seed", cfg->kmeans.seed, "KMeans seed")->capture_default_str();
  auto* iters_opt = cmd->add_option("--max-iters", cfg->kmeans.max_iters, "Lloyd iteration cap");
  auto* tol_opt = cmd->add_option("--tol", cfg->kmeans.tol, "Relative centroid-shift stop");
  auto* renorm_opt = cmd->add_flag("--renormalize-endmembers", cfg->renormalize_endmembers,
                                   "L2-normalize centroids before NNLS");
  auto* nrmse_opt = cmd->add_flag("--normalize-before-rmse", cfg->normalize_before_rmse,
                                  "L2-normalize both spectra before RMSE");
  cmd->add_flag("--no-pgm", *no_pgm, "Skip PGM image emission");
  cmd->add_option("--threads", cfg->threads, "Worker threads (0 = auto)")->capture_default_str();

  cmd->callback([=]() {
    PipelineConfig config;
    if (!manifest_path->empty()) config = config_from_manifest(read_manifest(*manifest_path));

    // Explicit flags override manifest values.
    if (manifest_path->empty() || in_opt->count()) config.cube_path = *in;
    if (manifest_path->empty() || lib_opt->count()) config.library_path = *library;
    if (manifest_path->empty() || filter_opt->count())
      config.filter_method = parse_filter_method(*filter_name);
    if (manifest_path->empty() || window_opt->count()) config.sg.window = cfg->sg.window;
    if (manifest_path->empty() || order_opt->count()) config.sg.order = cfg->sg.order;
    if (manifest_path->empty() || keep_opt->count())
      config.fourier.keep_fraction = cfg->fourier.keep_fraction;
    if (manifest_path->empty() || levels_opt->count()) config.wavelet.levels = cfg->wavelet.levels;
    if (manifest_path->empty() || scale_opt->count())
      config.wavelet.threshold_scale = cfg->wavelet.threshold_scale;
    if (manifest_path->empty() || thresh_opt->count()) config.threshold_db = cfg->threshold_db;
    if (manifest_path->empty() || k_opt->count()) config.kmeans.k = cfg->kmeans.k;
    if (manifest_path->empty() || seed_opt->count()) config.kmeans.seed = cfg->kmeans.seed;
    if (manifest_path->empty() || iters_opt->count()) config.kmeans.max_iters = cfg->kmeans.max_iters;
    if (manifest_path->empty() || tol_opt->count()) config.kmeans.tol = cfg->kmeans.tol;
    if (manifest_path->empty() || renorm_opt->count())
      config.renormalize_endmembers = cfg->renormalize_endmembers;
    if (manifest_path->empty() || nrmse_opt->count())
      config.normalize_before_rmse = cfg->normalize_before_rmse;
    if (*no_pgm) config.emit_pgm = false;
    config.out_dir = *out;
    config.threads = cfg->threads;

    if (config.cube_path.empty()) throw io_error("cube not found: no cube path given");
    if (config.library_path.empty()) throw io_error("library path missing");

    const PipelineResult result = run_pipeline(config);
    std::cout << "retained " << result.retained_count << " bands, mean cosine "
              << result.mean_cosine << ", mean rmse " << result.mean_rmse << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specmix: SNR-guided band selection and spectral unmixing"};
  app.require_subcommand(1);

  add_synth(app);
  add_smooth(app);
  add_select_bands(app);
  add_unmix(app);
  add_evaluate(app);
  add_compare(app);
  add_pipeline(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const compute_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitOk;
}
