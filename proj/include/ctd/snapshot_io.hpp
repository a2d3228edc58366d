#pragma once

#include <string>

#include "ctd/field.hpp"
#include "ctd/simulation.hpp"

namespace ctd {

struct Snapshot {
  FullField field;
  double time = 0.0;
};

// Byte layouts are documented in docs/formats.md. All numbers are written
// with 17 significant digits, so csv and modes files round-trip exactly.

void write_csv(const FullField& field, double time, const std::string& path);
Snapshot read_csv(const std::string& path);

/// Legacy VTK, ASCII STRUCTURED_POINTS with one scalar array "u".
void write_vtk(const FullField& field, double time, const std::string& path);
Snapshot read_vtk(const std::string& path);

void write_modes(const SeparatedField& field, double time, const std::string& path);
SeparatedField read_modes(const std::string& path, double* time = nullptr);

/// 8-bit binary PGM of a 2D field (the middle z-slice of a 3D field),
/// grey levels scaled linearly from the field's min to max.
void write_pgm(const FullField& field, const std::string& path);

/// Reads .csv, .vtk or .modes by extension; modes files are reconstructed.
Snapshot read_snapshot(const std::string& path);

void write_energy_trace(const EnergyTrace& trace, const std::string& path);
void write_mode_counts(const EnergyTrace& trace, const std::string& path);

}  // namespace ctd
