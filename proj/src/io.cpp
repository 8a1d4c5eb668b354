#include "specmix/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "specmix/errors.hpp"
#include "specmix/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "payload IO assumes a little-endian host");

namespace specmix {

namespace {

constexpr const char* kHeaderExt = ".hdr";
constexpr const char* kPayloadExt = ".raw";
constexpr const char* kWavelengthExt = ".wl";

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  std::filesystem::path p = stem;
  p += ext;
  return p;
}

struct CubeHeader {
  std::size_t rows = 0, cols = 0, bands = 0;
};

CubeHeader parse_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cube header not found: " + path.string());

  static const std::set<std::string> known = {"rows", "cols", "bands",
                                              "dtype", "byteorder", "interleave"};
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!known.count(key))
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (kv.count(key))
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }
  for (const auto& key : known) {
    if (!kv.count(key)) throw io_error(path.string() + ": missing key '" + key + "'");
  }
  if (kv["dtype"] != "float32")
    throw io_error(path.string() + ": unsupported dtype '" + kv["dtype"] + "'");
  if (kv["byteorder"] != "little")
    throw io_error(path.string() + ": unsupported byteorder '" + kv["byteorder"] + "'");
  if (kv["interleave"] != "pixel")
    throw io_error(path.string() + ": unsupported interleave '" + kv["interleave"] + "'");

  CubeHeader h;
  for (auto [field, dst] : {std::pair{"rows", &h.rows}, {"cols", &h.cols}, {"bands", &h.bands}}) {
    const auto v = parse_int(kv[field]);
    if (!v || *v <= 0)
      throw io_error(path.string() + ": '" + field + "' must be a positive integer");
    *dst = static_cast<std::size_t>(*v);
  }
  return h;
}

std::vector<float> read_payload(const std::filesystem::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cube payload not found: " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::uint64_t>(in.tellg());
  if (size != count * sizeof(float))
    throw io_error(path.string() + ": payload size mismatch (header declares " +
                   std::to_string(count * sizeof(float)) + " bytes, file has " +
                   std::to_string(size) + ")");
  in.seekg(0);
  std::vector<float> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw io_error(path.string() + ": short read");
  return values;
}

void write_payload(const std::filesystem::path& path, const std::vector<float>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write payload: " + path.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw io_error("write failed: " + path.string());
}

void check_finite(const std::vector<float>& values, std::size_t cols, std::size_t bands,
                  const std::string& origin) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const std::size_t pixel = i / bands;
      const std::size_t band = i % bands;
      throw io_error(origin + ": non-finite value at pixel (" +
                     std::to_string(pixel / cols) + "," + std::to_string(pixel % cols) +
                     ") band " + std::to_string(band));
    }
  }
}

}  // namespace

void validate_cube(const HyperCube& cube) {
  if (cube.rows == 0 || cube.cols == 0 || cube.bands == 0)
    throw std::invalid_argument("cube dims must be positive");
  if (cube.data.size() != cube.rows * cube.cols * cube.bands)
    throw std::invalid_argument("cube data length does not match dims");
  for (std::size_t i = 0; i < cube.data.size(); ++i) {
    if (!std::isfinite(cube.data[i]))
      throw std::invalid_argument("cube contains a non-finite value");
  }
  if (cube.wavelengths) {
    if (cube.wavelengths->size() != cube.bands)
      throw std::invalid_argument("wavelength count does not match bands");
    for (std::size_t b = 1; b < cube.wavelengths->size(); ++b) {
      if (!((*cube.wavelengths)[b] > (*cube.wavelengths)[b - 1]))
        throw std::invalid_argument("wavelengths must be strictly increasing");
    }
  }
}

void validate_abundance(const AbundanceCube& ab) {
  if (ab.rows == 0 || ab.cols == 0 || ab.classes == 0)
    throw std::invalid_argument("abundance dims must be positive");
  if (ab.data.size() != ab.rows * ab.cols * ab.classes)
    throw std::invalid_argument("abundance data length does not match dims");
  for (float v : ab.data) {
    if (!std::isfinite(v) || v < 0.0f)
      throw std::invalid_argument("abundance values must be finite and non-negative");
  }
}

void validate_library(const SpectralLibrary& lib) {
  if (lib.entries.empty()) throw std::invalid_argument("library has no entries");
  const std::size_t b = lib.entries.front().spectrum.size();
  std::set<std::string> names;
  for (const auto& e : lib.entries) {
    if (e.name.empty()) throw std::invalid_argument("library entry with empty name");
    if (!names.insert(e.name).second)
      throw std::invalid_argument("duplicate library name '" + e.name + "'");
    if (e.spectrum.size() != b)
      throw std::invalid_argument("inconsistent spectrum length for '" + e.name + "'");
    for (double v : e.spectrum) {
      if (!std::isfinite(v))
        throw std::invalid_argument("non-finite value in spectrum '" + e.name + "'");
    }
  }
  if (lib.wavelengths && lib.wavelengths->size() != b)
    throw std::invalid_argument("library wavelength count does not match spectra");
}

HyperCube read_cube(const std::filesystem::path& stem) {
  const auto hdr_path = with_ext(stem, kHeaderExt);
  const auto raw_path = with_ext(stem, kPayloadExt);
  const CubeHeader h = parse_header(hdr_path);

  HyperCube cube;
  cube.rows = h.rows;
  cube.cols = h.cols;
  cube.bands = h.bands;
  cube.data = read_payload(raw_path, h.rows * h.cols * h.bands);
  check_finite(cube.data, cube.cols, cube.bands, raw_path.string());

  const auto wl_path = with_ext(stem, kWavelengthExt);
  if (std::filesystem::exists(wl_path)) {
    std::ifstream in(wl_path);
    std::vector<double> wl;
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto v = parse_double(t);
      if (!v) throw io_error(wl_path.string() + ": bad wavelength '" + t + "'");
      wl.push_back(*v);
    }
    cube.wavelengths = std::move(wl);
  }

  validate_cube(cube);
  return cube;
}

void write_cube(const HyperCube& cube, const std::filesystem::path& stem) {
  validate_cube(cube);
  const auto hdr_path = with_ext(stem, kHeaderExt);
  {
    std::ofstream out(hdr_path, std::ios::trunc);
    if (!out) throw io_error("cannot write header: " + hdr_path.string());
    out << "rows=" << cube.rows << "\n"
        << "cols=" << cube.cols << "\n"
        << "bands=" << cube.bands << "\n"
        << "dtype=float32\n"
        << "byteorder=little\n"
        << "interleave=pixel\n";
    if (!out) throw io_error("write failed: " + hdr_path.string());
  }
  write_payload(with_ext(stem, kPayloadExt), cube.data);
  if (cube.wavelengths) {
    const auto wl_path = with_ext(stem, kWavelengthExt);
    std::ofstream out(wl_path, std::ios::trunc);
    if (!out) throw io_error("cannot write wavelengths: " + wl_path.string());
    for (double w : *cube.wavelengths) out << format_double(w) << "\n";
    if (!out) throw io_error("write failed: " + wl_path.string());
  }
}

SpectralLibrary read_spectral_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("spectral library not found: " + path.string());

  SpectralLibrary lib;
  std::string line;
  if (!std::getline(in, line)) throw io_error(path.string() + ": empty file");

  // Header row: name column then band labels; numeric labels are wavelengths.
  {
    const auto cells = split(line, ',');
    if (cells.size() >= 2) {
      std::vector<double> wl;
      bool all_numeric = true;
      for (std::size_t i = 1; i < cells.size(); ++i) {
        const auto v = parse_double(cells[i]);
        if (!v) {
          all_numeric = false;
          break;
        }
        wl.push_back(*v);
      }
      if (all_numeric) lib.wavelengths = std::move(wl);
    }
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 2)
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": row needs a name and at least one value");
    SpectralLibrary::Entry e;
    e.name = trim(cells[0]);
    if (e.name.empty())
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": empty name");
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto v = parse_double(cells[i]);
      if (!v)
        throw io_error(path.string() + ":" + std::to_string(lineno) + ": non-numeric cell '" +
                       trim(cells[i]) + "'");
      e.spectrum.push_back(*v);
    }
    if (!lib.entries.empty() && e.spectrum.size() != lib.entries.front().spectrum.size())
      throw io_error(path.string() + ":" + std::to_string(lineno) + ": inconsistent spectrum length");
    for (const auto& prev : lib.entries) {
      if (prev.name == e.name)
        throw io_error(path.string() + ":" + std::to_string(lineno) + ": duplicate name '" + e.name + "'");
    }
    lib.entries.push_back(std::move(e));
  }
  if (lib.wavelengths && !lib.entries.empty() &&
      lib.wavelengths->size() != lib.entries.front().spectrum.size())
    throw io_error(path.string() + ": header column count does not match rows");
  validate_library(lib);
  return lib;
}

void write_spectral_library(const SpectralLibrary& lib, const std::filesystem::path& path) {
  validate_library(lib);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write library: " + path.string());
  out << "name";
  const std::size_t b = lib.band_count();
  for (std::size_t i = 0; i < b; ++i) {
    if (lib.wavelengths)
      out << "," << format_double((*lib.wavelengths)[i]);
    else
      out << ",b" << i;
  }
  out << "\n";
  for (const auto& e : lib.entries) {
    out << e.name;
    for (double v : e.spectrum) out << "," << format_double(v);
    out << "\n";
  }
  if (!out) throw io_error("write failed: " + path.string());
}

void write_abundance_maps(const AbundanceCube& ab, const std::filesystem::path& dir) {
  validate_abundance(ab);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir))
    throw io_error("cannot create abundance directory: " + dir.string());

  for (std::size_t k = 0; k < ab.classes; ++k) {
    HyperCube grid;
    grid.rows = ab.rows;
    grid.cols = ab.cols;
    grid.bands = 1;
    grid.data.resize(ab.rows * ab.cols);
    for (std::size_t p = 0; p < grid.data.size(); ++p)
      grid.data[p] = ab.data[p * ab.classes + k];
    write_cube(grid, dir / ("class_" + std::to_string(k)));
  }

  const auto manifest = dir / "abundance_manifest.txt";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw io_error("cannot write manifest: " + manifest.string());
  out << "classes=" << ab.classes << "\n"
      << "rows=" << ab.rows << "\n"
      << "cols=" << ab.cols << "\n";
  for (std::size_t k = 0; k < ab.classes; ++k)
    out << "class_" << k << "=class_" << k << "\n";
  if (!out) throw io_error("write failed: " + manifest.string());
}

AbundanceCube read_abundance_maps(const std::filesystem::path& dir) {
  const auto manifest = dir / "abundance_manifest.txt";
  std::ifstream in(manifest);
  if (!in) throw io_error("abundance manifest not found: " + manifest.string());

  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw io_error(manifest.string() + ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  const auto classes = parse_int(kv["classes"]);
  if (!classes || *classes <= 0) throw io_error(manifest.string() + ": bad 'classes'");

  AbundanceCube ab;
  ab.classes = static_cast<std::size_t>(*classes);
  for (std::size_t k = 0; k < ab.classes; ++k) {
    const auto it = kv.find("class_" + std::to_string(k));
    if (it == kv.end())
      throw io_error(manifest.string() + ": missing entry for class " + std::to_string(k));
    const HyperCube grid = read_cube(dir / it->second);
    if (grid.bands != 1) throw io_error("abundance grid must be single-band");
    if (k == 0) {
      ab.rows = grid.rows;
      ab.cols = grid.cols;
      ab.data.assign(ab.rows * ab.cols * ab.classes, 0.0f);
    } else if (grid.rows != ab.rows || grid.cols != ab.cols) {
      throw io_error("abundance grids disagree on spatial dims");
    }
    for (std::size_t p = 0; p < grid.data.size(); ++p)
      ab.data[p * ab.classes + k] = grid.data[p];
  }
  validate_abundance(ab);
  return ab;
}

}  // namespace specmix
