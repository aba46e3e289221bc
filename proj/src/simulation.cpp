#include "prandtl/simulation.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "prandtl/errors.hpp"
#include "prandtl/io.hpp"
#include "prandtl/stepper.hpp"

namespace prandtl {

int exit_code(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Completed: return 0;
    case RunStatus::Breach: return 2;
    case RunStatus::Cfl: return 3;
    case RunStatus::NumericFault: return 4;
    case RunStatus::Truncation: return 4;
  }
  return 4;
}

const char* status_name(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Breach: return "breach";
    case RunStatus::Cfl: return "cfl";
    case RunStatus::NumericFault: return "numeric_fault";
    case RunStatus::Truncation: return "truncation";
  }
  return "numeric_fault";
}

std::shared_ptr<const CorrectorTrajectory> build_corrector(const ScenarioConfig& cfg,
                                                           std::shared_ptr<const VerticalGrid> grid,
                                                           bool* cache_hit) {
  if (cache_hit) *cache_hit = false;
  auto f = OutflowProfile::from_spec(cfg.f);
  if (cfg.epsilon == 0.0 || f.identically_zero()) return nullptr;
  f.validate();
  const double spacing = cfg.corrector_spacing > 0.0 ? cfg.corrector_spacing : 5.0 * cfg.dt;
  std::string path;
  if (!cfg.cache_dir.empty()) {
    std::filesystem::create_directories(cfg.cache_dir);
    path = (std::filesystem::path(cfg.cache_dir) /
            corrector_cache_key(cfg.f, cfg.epsilon, *grid, cfg.dt, cfg.t_final, spacing))
               .string();
    std::unique_ptr<CorrectorTrajectory> loaded;
    if (read_corrector(path, f, cfg.epsilon, cfg.dt, cfg.t_final, grid, loaded)) {
      if (cache_hit) *cache_hit = true;
      return std::shared_ptr<const CorrectorTrajectory>(std::move(loaded));
    }
  }
  auto traj = std::make_shared<const CorrectorTrajectory>(solve_Gs(f, cfg.epsilon, cfg.t_final, cfg.dt, grid, spacing));
  if (!path.empty()) write_corrector(path, *traj);
  return traj;
}

namespace {

Field2D good_unknown_of(const Field2D& u, double t) {
  const auto phi = recover_phi_unchecked(u);
  return good_unknown(u, phi, t).G;
}

}  // namespace

SimulationResult run_simulation(const ScenarioConfig& cfg, const RecordObserver& observer) {
  validate_config(cfg);
  SimulationResult res;
  res.config = cfg;
  const auto grid = Grid::make(cfg.nx, cfg.length, cfg.ny, cfg.ymax);
  const auto bank = build_filter_bank(cfg.length, cfg.nx);
  const auto f = OutflowProfile::from_spec(cfg.f);

  Field2D u0 = preset_initial_velocity(grid, cfg.eta, cfg.k0);
  InitialDataTolerances tol;
  tol.zero_integral = cfg.zero_integral_tol;
  res.initial = validate_initial_data(bank, u0, cfg.delta, tol);
  if (!res.initial.ok()) {
    std::ostringstream os;
    os << "initial data rejected:";
    for (const auto& v : res.initial.violations) os << ' ' << v << ';';
    throw ConstraintError(os.str());
  }
  res.initial_norms = {res.initial.weighted_u_norm, res.initial.weighted_u_norm + res.initial.weighted_phi_norm,
                       res.initial.weighted_G_norm};

  const auto corrector = build_corrector(cfg, grid->vertical_ptr(), &res.corrector_cache_hit);
  StepperOptions opts;
  opts.products = cfg.products;
  opts.cfl_limit = cfg.cfl_limit;
  PrandtlStepper stepper(grid, opts);
  AnalyticState state{0.0, std::move(u0), cfg.epsilon, cfg.delta, cfg.lambda, 0.0, corrector};
  RadiusTracker tracker(cfg.delta, cfg.lambda);

  auto advance_theta = [&](const Field2D& G, double t) {
    std::optional<CorrectorState> cs;
    if (corrector) cs = corrector->state_at(t);
    theta_advance(tracker, bank, t, cs ? &*cs : nullptr, G, f.f(t), cfg.epsilon);
    state.theta = tracker.theta();
  };
  auto emit = [&](const Field2D& u, double t) {
    res.records.push_back(make_record(bank, u, t, tracker.theta(), tracker.radius(), cfg.delta,
                                      tracker.rates().back(), cfg.relations));
    if (observer) observer(res.records.back());
  };

  advance_theta(good_unknown_of(state.u, 0.0), 0.0);
  emit(state.u, 0.0);

  const long steps = std::max(1L, std::lround(cfg.t_final / cfg.dt));
  const double h = cfg.t_final / static_cast<double>(steps);
  for (long n = 1; n <= steps; ++n) {
    try {
      stepper.step(state, h);
    } catch (const CflError& e) {
      res.status = RunStatus::Cfl;
      res.message = e.what();
      break;
    } catch (const NumericFault& e) {
      res.status = RunStatus::NumericFault;
      res.message = e.what();
      break;
    }
    state.t = n * h;
    ++res.steps;
    advance_theta(good_unknown_of(state.u, state.t), state.t);
    if (!std::isfinite(tracker.theta())) {
      res.status = RunStatus::NumericFault;
      res.message = "non-finite radius loss at t = " + std::to_string(state.t);
      break;
    }
    const bool breach = tracker.breached();
    const bool emitted = n % cfg.output_every == 0 || n == steps || breach;
    if (emitted) emit(state.u, state.t);
    if (emitted && cfg.tail_abort > 0.0 && res.records.back().tail_indicator > cfg.tail_abort) {
      res.status = RunStatus::Truncation;
      std::ostringstream os;
      os << "truncation: tail indicator " << res.records.back().tail_indicator << " > " << cfg.tail_abort
         << " at t = " << state.t << " (raise ymax)";
      res.message = os.str();
      break;
    }
    if (breach) {
      res.status = RunStatus::Breach;
      std::ostringstream os;
      os << "analytic radius exhausted: theta = " << tracker.theta() << " >= delta/lambda = "
         << cfg.delta / cfg.lambda << " at t = " << state.t;
      res.message = os.str();
      break;
    }
  }
  res.t_end = state.t;
  res.final_u = std::make_unique<Field2D>(state.u);

  const double T = res.t_end;
  for (int c = 0; c < 3; ++c) {
    res.theta_integrals[static_cast<std::size_t>(c)] = tracker.component_integral(c, T);
    res.theta_late_increment[static_cast<std::size_t>(c)] =
        tracker.component_integral(c, T) - tracker.component_integral(c, 0.5 * T);
  }
  res.theorem = theorem_monitor(bank, res.records, res.initial_norms, cfg.delta, cfg.lambda, cfg.fit_lo, cfg.fit_hi);
  if (res.status == RunStatus::Completed) res.message = "completed";
  return res;
}

}  // namespace prandtl
