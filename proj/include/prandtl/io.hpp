#pragma once

// Snapshot, CSV and JSON output plus the on-disk corrector cache.
//
// Binary field snapshot: four little-endian f64 header values Nx, Ny, L, Ymax,
// then Nx*Ny f64 samples a(x_n, y_i), x-major (index n*Ny + i).
//
// Corrector cache file: the same header with Nx replaced by the snapshot count
// S and L by the horizon T, followed by S times and S*Ny values of Gˢ.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "prandtl/config.hpp"
#include "prandtl/corrector.hpp"
#include "prandtl/diagnostics.hpp"
#include "prandtl/field.hpp"
#include "prandtl/simulation.hpp"

namespace prandtl {

void write_snapshot(const std::string& path, const Field2D& a);
Field2D read_snapshot(const std::string& path);

/// Columns x, y, value.
void write_field_csv(const std::string& path, const Field2D& a);

/// Column names of the diagnostics CSV in order.
std::vector<std::string> diagnostics_columns();
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

std::uint64_t fnv1a(const std::string& text);

/// Cache file name for a corrector trajectory.
std::string corrector_cache_key(const std::string& f_spec, double epsilon, const VerticalGrid& grid, double dt,
                                double t_final, double spacing);

void write_corrector(const std::string& path, const CorrectorTrajectory& traj);
/// Returns false when the file is missing; throws GridMismatchError when it does not match the grid.
bool read_corrector(const std::string& path, const OutflowProfile& f, double epsilon, double dt, double t_final,
                    std::shared_ptr<const VerticalGrid> grid, std::unique_ptr<CorrectorTrajectory>& out);

/// Summary report: status, fitted exponents, fitted constants, breach flag and the resolved config.
std::string summary_json(const SimulationResult& result);

/// diagnostics.csv, summary.json, config.resolved and final_state.bin (last_good.bin after a numeric fault).
void write_run_outputs(const SimulationResult& result, const std::string& dir);

}  // namespace prandtl
