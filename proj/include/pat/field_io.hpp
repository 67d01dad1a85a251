#pragma once

#include <filesystem>

#include "pat/grid.hpp"
#include "pat/record.hpp"

namespace pat::io {

// PATF: 32-byte little-endian header
//   [0,4)  "PATF"  [4,8) u32 nx  [8,12) u32 ny  [12,16) zero padding
//   [16,24) f64 dx  [24,32) f64 dy
// followed by nx*ny f64 values, index i + nx*j.
void write_field(const std::filesystem::path& path, const ScalarField2D& f);
/// The grid origin is not stored; x0/y0 of the result are taken from `origin`.
ScalarField2D read_field(const std::filesystem::path& path, Point origin = {0.0, 0.0});

// PATR: "PATR", u32 n_nodes, u32 n_steps, f64 dt (20 bytes), then n_steps*n_nodes f64
// samples step-major. Node geometry goes to a CSV sidecar `<path>.nodes.csv`.
void write_record(const std::filesystem::path& path, const ObservationRecord& r);
ObservationRecord read_record(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& record_path);

/// 8-bit binary PGM, values clamped to [lo, hi]; the top row is the largest y.
void write_pgm(const std::filesystem::path& path, const ScalarField2D& f, double lo, double hi);

}  // namespace pat::io
