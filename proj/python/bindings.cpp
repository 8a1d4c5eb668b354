#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "specmix/band_selection.hpp"
#include "specmix/baseline_filters.hpp"
#include "specmix/errors.hpp"
#include "specmix/io.hpp"
#include "specmix/metrics.hpp"
#include "specmix/pipeline.hpp"
#include "specmix/smoothing.hpp"
#include "specmix/synth.hpp"
#include "specmix/unmixing.hpp"

namespace py = pybind11;
using namespace specmix;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

HyperCube cube_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& values,
    const std::optional<std::vector<double>>& wavelengths) {
  if (values.ndim() != 3) throw py::value_error("cube values must be (rows, cols, bands)");
  HyperCube cube;
  cube.rows = static_cast<std::size_t>(values.shape(0));
  cube.cols = static_cast<std::size_t>(values.shape(1));
  cube.bands = static_cast<std::size_t>(values.shape(2));
  cube.data.resize(cube.rows * cube.cols * cube.bands);
  const double* src = values.data();
  for (std::size_t i = 0; i < cube.data.size(); ++i)
    cube.data[i] = static_cast<float>(src[i]);
  if (wavelengths) cube.wavelengths = *wavelengths;
  validate_cube(cube);
  return cube;
}

py::array_t<float> cube_values(const HyperCube& cube) {
  py::array_t<float> out({static_cast<py::ssize_t>(cube.rows),
                          static_cast<py::ssize_t>(cube.cols),
                          static_cast<py::ssize_t>(cube.bands)});
  std::copy(cube.data.begin(), cube.data.end(), out.mutable_data());
  return out;
}

py::array_t<float> abundance_values(const AbundanceCube& ab) {
  py::array_t<float> out({static_cast<py::ssize_t>(ab.rows),
                          static_cast<py::ssize_t>(ab.cols),
                          static_cast<py::ssize_t>(ab.classes)});
  std::copy(ab.data.begin(), ab.data.end(), out.mutable_data());
  return out;
}

EndmemberSet endmembers_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& values) {
  if (values.ndim() != 2) throw py::value_error("endmembers must be (k, bands)");
  EndmemberSet set;
  set.k = static_cast<std::size_t>(values.shape(0));
  set.bands = static_cast<std::size_t>(values.shape(1));
  set.spectra.assign(values.data(), values.data() + values.size());
  return set;
}

py::array_t<double> endmember_values(const EndmemberSet& set) {
  py::array_t<double> out({static_cast<py::ssize_t>(set.k),
                           static_cast<py::ssize_t>(set.bands)});
  std::copy(set.spectra.begin(), set.spectra.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_specmix, m) {
  m.doc() = "SNR-guided band selection and spectral unmixing core";

  py::register_exception<specmix::io_error>(m, "IoError", PyExc_IOError);
  py::register_exception<specmix::compute_error>(m, "ComputeError", PyExc_RuntimeError);

  py::class_<HyperCube>(m, "HyperCube")
      .def(py::init(&cube_from_array), py::arg("values"),
           py::arg("wavelengths") = std::nullopt)
      .def_readonly("rows", &HyperCube::rows)
      .def_readonly("cols", &HyperCube::cols)
      .def_readonly("bands", &HyperCube::bands)
      .def_property_readonly("wavelengths",
                             [](const HyperCube& c) -> py::object {
                               if (!c.wavelengths) return py::none();
                               return to_array(*c.wavelengths);
                             })
      .def("values", &cube_values)
      .def("__repr__", [](const HyperCube& c) {
        return "HyperCube(" + std::to_string(c.rows) + "x" + std::to_string(c.cols) +
               "x" + std::to_string(c.bands) + ")";
      });

  py::class_<AbundanceCube>(m, "AbundanceCube")
      .def_readonly("rows", &AbundanceCube::rows)
      .def_readonly("cols", &AbundanceCube::cols)
      .def_readonly("classes", &AbundanceCube::classes)
      .def("values", &abundance_values);

  py::class_<SpectralLibrary>(m, "SpectralLibrary")
      .def(py::init([](const std::vector<std::string>& names,
                       const py::array_t<double, py::array::c_style | py::array::forcecast>& spectra,
                       const std::optional<std::vector<double>>& wavelengths) {
             if (spectra.ndim() != 2) throw py::value_error("spectra must be (n, bands)");
             if (static_cast<std::size_t>(spectra.shape(0)) != names.size())
               throw py::value_error("names and spectra row count differ");
             SpectralLibrary lib;
             const auto bands = static_cast<std::size_t>(spectra.shape(1));
             for (std::size_t i = 0; i < names.size(); ++i) {
               SpectralLibrary::Entry e;
               e.name = names[i];
               e.spectrum.assign(spectra.data() + i * bands, spectra.data() + (i + 1) * bands);
               lib.entries.push_back(std::move(e));
             }
             if (wavelengths) lib.wavelengths = *wavelengths;
             validate_library(lib);
             return lib;
           }),
           py::arg("names"), py::arg("spectra"), py::arg("wavelengths") = std::nullopt)
      .def_property_readonly("names",
                             [](const SpectralLibrary& lib) {
                               std::vector<std::string> names;
                               for (const auto& e : lib.entries) names.push_back(e.name);
                               return names;
                             })
      .def("values",
           [](const SpectralLibrary& lib) {
             py::array_t<double> out({static_cast<py::ssize_t>(lib.size()),
                                      static_cast<py::ssize_t>(lib.band_count())});
             double* dst = out.mutable_data();
             for (const auto& e : lib.entries)
               dst = std::copy(e.spectrum.begin(), e.spectrum.end(), dst);
             return out;
           })
      .def("__len__", &SpectralLibrary::size);

  py::class_<SnrProfile>(m, "SnrProfile")
      .def_property_readonly("snr_db", [](const SnrProfile& p) { return to_array(p.snr_db); })
      .def_property_readonly("mean", [](const SnrProfile& p) { return to_array(p.mean); })
      .def_property_readonly("std", [](const SnrProfile& p) { return to_array(p.std); });

  py::class_<BandMask>(m, "BandMask")
      .def_property_readonly("keep",
                             [](const BandMask& m_) {
                               py::array_t<bool> out(static_cast<py::ssize_t>(m_.keep.size()));
                               bool* dst = out.mutable_data();
                               for (std::size_t i = 0; i < m_.keep.size(); ++i) dst[i] = m_.keep[i];
                               return out;
                             })
      .def_readonly("retained_count", &BandMask::retained_count)
      .def_readonly("threshold_db", &BandMask::threshold_db);

  py::class_<EndmemberSet>(m, "EndmemberSet")
      .def(py::init(&endmembers_from_array), py::arg("values"))
      .def_readonly("k", &EndmemberSet::k)
      .def_readonly("bands", &EndmemberSet::bands)
      .def("values", &endmember_values);

  py::class_<NnlsSolution>(m, "NnlsSolution")
      .def_property_readonly("abundance",
                             [](const NnlsSolution& s) { return to_array(s.abundance); })
      .def_readonly("residual_norm", &NnlsSolution::residual_norm)
      .def_readonly("iterations", &NnlsSolution::iterations);

  py::class_<MatchReport>(m, "MatchReport")
      .def_property_readonly("assignment",
                             [](const MatchReport& r) {
                               py::list out;
                               for (const auto& p : r.assignment)
                                 out.append(py::make_tuple(p.custom_index, p.reference_name,
                                                           p.cosine, p.rmse));
                               return out;
                             })
      .def_readonly("unassigned", &MatchReport::unassigned)
      .def_readonly("mean_cosine", &MatchReport::mean_cosine)
      .def_readonly("mean_rmse", &MatchReport::mean_rmse);

  py::class_<SynthTruth>(m, "SynthTruth")
      .def_readonly("endmembers", &SynthTruth::endmembers)
      .def_readonly("abundances", &SynthTruth::abundances)
      .def_readonly("junk_bands", &SynthTruth::junk_bands);

  m.def("read_cube", &read_cube, py::arg("stem"));
  m.def("write_cube", &write_cube, py::arg("cube"), py::arg("stem"));
  m.def("read_spectral_library", &read_spectral_library, py::arg("path"));
  m.def("write_spectral_library", &write_spectral_library, py::arg("library"), py::arg("path"));
  m.def("write_abundance_maps", &write_abundance_maps, py::arg("abundances"), py::arg("dir"));
  m.def("read_abundance_maps", &read_abundance_maps, py::arg("dir"));

  m.def(
      "sg_coefficients",
      [](std::size_t window, std::size_t order) {
        return to_array(sg_coefficients({window, order}));
      },
      py::arg("window"), py::arg("order"));
  m.def(
      "sg_smooth",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& spectrum,
         std::size_t window, std::size_t order) {
        return to_array(sg_smooth_spectrum(to_vector(spectrum), {window, order}));
      },
      py::arg("spectrum"), py::arg("window") = 11, py::arg("order") = 3);
  m.def(
      "smooth_cube",
      [](const HyperCube& cube, std::size_t window, std::size_t order, unsigned threads) {
        return smooth_cube(cube, {window, order}, threads);
      },
      py::arg("cube"), py::arg("window") = 11, py::arg("order") = 3, py::arg("threads") = 1);

  m.def("band_snr", &band_snr, py::arg("cube"), py::arg("threads") = 1);
  m.def("select_bands", &select_bands, py::arg("profile"), py::arg("threshold_db"));
  m.def("apply_mask", &apply_mask, py::arg("cube"), py::arg("mask"));

  m.def(
      "fourier_lowpass",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& spectrum,
         double keep_fraction) {
        return to_array(fourier_lowpass(to_vector(spectrum), {keep_fraction}));
      },
      py::arg("spectrum"), py::arg("keep_fraction") = 0.25);
  m.def(
      "wavelet_denoise",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& spectrum,
         std::size_t levels, double threshold_scale) {
        return to_array(wavelet_denoise(to_vector(spectrum), {levels, threshold_scale}));
      },
      py::arg("spectrum"), py::arg("levels") = 3, py::arg("threshold_scale") = 1.0);

  m.def(
      "l2_normalize",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        return to_array(l2_normalize(to_vector(x)));
      },
      py::arg("spectrum"));
  m.def(
      "kmeans_endmembers",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pixels,
         std::size_t k, std::uint64_t seed, std::size_t max_iters, double tol,
         unsigned threads) {
        if (pixels.ndim() != 2) throw py::value_error("pixels must be (n, bands)");
        const std::vector<double> data(pixels.data(), pixels.data() + pixels.size());
        KmeansConfig cfg;
        cfg.k = k;
        cfg.seed = seed;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        return kmeans_endmembers(data, static_cast<std::size_t>(pixels.shape(0)),
                                 static_cast<std::size_t>(pixels.shape(1)), cfg, threads);
      },
      py::arg("pixels"), py::arg("k") = 12, py::arg("seed") = 42,
      py::arg("max_iters") = 300, py::arg("tol") = 1e-6, py::arg("threads") = 1);
  m.def(
      "nnls_solve",
      [](const EndmemberSet& endmembers,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& pixel) {
        return nnls_solve(endmembers, to_vector(pixel));
      },
      py::arg("endmembers"), py::arg("pixel"));
  m.def("unmix_cube", &unmix_cube, py::arg("cube"), py::arg("endmembers"),
        py::arg("threads") = 1);

  m.def(
      "cosine_similarity",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
        return cosine_similarity(to_vector(a), to_vector(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "rmse",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
        return rmse(to_vector(a), to_vector(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "match_endmembers",
      [](const EndmemberSet& custom, const SpectralLibrary& reference,
         bool normalize_before_rmse) {
        MatchOptions opts;
        opts.normalize_before_rmse = normalize_before_rmse;
        return match_endmembers(custom, reference, opts);
      },
      py::arg("custom"), py::arg("reference"), py::arg("normalize_before_rmse") = false);
  m.def("mask_library", &mask_library, py::arg("library"), py::arg("mask"));

  m.def(
      "generate_synthetic",
      [](std::size_t rows, std::size_t cols, std::size_t bands, std::size_t k,
         double noise_sigma, const std::string& abundance_mode, double dirichlet_alpha,
         std::uint64_t seed, double junk_band_fraction, double bump_amp_lo,
         double bump_amp_hi, double bump_width_lo, double bump_width_hi, double junk_sigma) {
        SynthConfig cfg;
        cfg.rows = rows;
        cfg.cols = cols;
        cfg.bands = bands;
        cfg.k = k;
        cfg.noise_sigma = noise_sigma;
        cfg.abundance_mode = parse_abundance_mode(abundance_mode);
        cfg.dirichlet_alpha = dirichlet_alpha;
        cfg.seed = seed;
        cfg.junk_band_fraction = junk_band_fraction;
        cfg.bump_amp_lo = bump_amp_lo;
        cfg.bump_amp_hi = bump_amp_hi;
        cfg.bump_width_lo = bump_width_lo;
        cfg.bump_width_hi = bump_width_hi;
        cfg.junk_sigma = junk_sigma;
        return generate(cfg);
      },
      py::arg("rows") = 64, py::arg("cols") = 64, py::arg("bands") = 100, py::arg("k") = 4,
      py::arg("noise_sigma") = 0.005, py::arg("abundance_mode") = "one-hot-regions",
      py::arg("dirichlet_alpha") = 1.0, py::arg("seed") = 7,
      py::arg("junk_band_fraction") = 0.0, py::arg("bump_amp_lo") = 0.12,
      py::arg("bump_amp_hi") = 0.30, py::arg("bump_width_lo") = 4.0,
      py::arg("bump_width_hi") = 10.0, py::arg("junk_sigma") = 0.05);

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& cube, const std::filesystem::path& library,
         const std::filesystem::path& out_dir, const std::string& filter,
         std::size_t window, std::size_t order, double keep_fraction, std::size_t levels,
         double threshold_scale, double threshold_db, std::size_t k, std::uint64_t seed,
         std::size_t max_iters, double tol, bool renormalize_endmembers,
         bool normalize_before_rmse, bool emit_pgm, unsigned threads) {
        PipelineConfig cfg;
        cfg.cube_path = cube;
        cfg.library_path = library;
        cfg.out_dir = out_dir;
        cfg.filter_method = parse_filter_method(filter);
        cfg.sg = {window, order};
        cfg.fourier = {keep_fraction};
        cfg.wavelet = {levels, threshold_scale};
        cfg.threshold_db = threshold_db;
        cfg.kmeans.k = k;
        cfg.kmeans.seed = seed;
        cfg.kmeans.max_iters = max_iters;
        cfg.kmeans.tol = tol;
        cfg.renormalize_endmembers = renormalize_endmembers;
        cfg.normalize_before_rmse = normalize_before_rmse;
        cfg.emit_pgm = emit_pgm;
        cfg.threads = threads;
        const PipelineResult res = run_pipeline(cfg);
        py::dict out;
        out["retained_count"] = res.retained_count;
        out["mean_cosine"] = res.mean_cosine;
        out["mean_rmse"] = res.mean_rmse;
        return out;
      },
      py::arg("cube"), py::arg("library"), py::arg("out_dir"),
      py::arg("filter") = "phaselock", py::arg("window") = 11, py::arg("order") = 3,
      py::arg("keep_fraction") = 0.25, py::arg("levels") = 3,
      py::arg("threshold_scale") = 1.0, py::arg("threshold_db") = 15.0, py::arg("k") = 12,
      py::arg("seed") = 42, py::arg("max_iters") = 300, py::arg("tol") = 1e-6,
      py::arg("renormalize_endmembers") = false, py::arg("normalize_before_rmse") = false,
      py::arg("emit_pgm") = true, py::arg("threads") = 1);
}
