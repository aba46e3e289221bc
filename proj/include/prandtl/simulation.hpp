#pragma once

// Drives one scenario: initial data, corrector, time stepping, radius tracking
// and diagnostics at the configured cadence.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "prandtl/config.hpp"
#include "prandtl/corrector.hpp"
#include "prandtl/diagnostics.hpp"
#include "prandtl/reduction.hpp"

namespace prandtl {

enum class RunStatus { Completed, Breach, Cfl, NumericFault, Truncation };

/// 0 completed, 2 breach, 3 CFL, 4 numeric fault or truncation (tail_abort).
int exit_code(RunStatus status) noexcept;
const char* status_name(RunStatus status) noexcept;

struct SimulationResult {
  ScenarioConfig config;
  RunStatus status = RunStatus::Completed;
  std::string message;
  double t_end = 0.0;
  long steps = 0;
  std::unique_ptr<Field2D> final_u;  ///< last good state
  std::vector<DiagnosticsRecord> records;
  InitialDataReport initial;
  InitialNorms initial_norms;
  TheoremReport theorem;
  std::array<double, 3> theta_integrals{};      ///< ∫_0^T of the corrector, outflow and bulk parts of θ̇
  std::array<double, 3> theta_late_increment{}; ///< the same over [T/2, T]
  bool corrector_cache_hit = false;
};

/// Solves for Gˢ over [0, T] (or loads it from cfg.cache_dir). Null when ε = 0 or f ≡ 0.
std::shared_ptr<const CorrectorTrajectory> build_corrector(const ScenarioConfig& cfg,
                                                           std::shared_ptr<const VerticalGrid> grid,
                                                           bool* cache_hit = nullptr);

using RecordObserver = std::function<void(const DiagnosticsRecord&)>;

/// Throws ConfigError / ConstraintError for inadmissible input; every other outcome is a status.
SimulationResult run_simulation(const ScenarioConfig& cfg, const RecordObserver& observer = {});

}  // namespace prandtl
