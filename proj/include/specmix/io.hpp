#pragma once

#include <filesystem>
#include <string>

#include "specmix/cube.hpp"

namespace specmix {

// Cube on disk is a pair of files derived from a path stem:
//   <stem>.hdr  ASCII key=value header (rows, cols, bands, dtype, byteorder,
//               interleave; '#' starts a comment; order-insensitive)
//   <stem>.raw  rows*cols*bands little-endian float32, pixel-major, band fastest
// and, when wavelengths are known, <stem>.wl with one value per line.
HyperCube read_cube(const std::filesystem::path& stem);
void write_cube(const HyperCube& cube, const std::filesystem::path& stem);

// Comma-delimited text, one header line, then one row per spectrum:
// name,v0,v1,...  If every header cell after the first parses as a number the
// header is taken as the wavelength axis.
SpectralLibrary read_spectral_library(const std::filesystem::path& path);
void write_spectral_library(const SpectralLibrary& lib, const std::filesystem::path& path);

// One single-band grid (header+payload, same scheme as cubes) per class under
// dir, stems class_0..class_{K-1}, plus abundance_manifest.txt listing them.
void write_abundance_maps(const AbundanceCube& ab, const std::filesystem::path& dir);
AbundanceCube read_abundance_maps(const std::filesystem::path& dir);

}  // namespace specmix
