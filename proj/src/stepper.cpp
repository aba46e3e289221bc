#include "prandtl/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "prandtl/errors.hpp"
#include "prandtl/reduction.hpp"
#include "prandtl/tridiag.hpp"

namespace prandtl {

ShearField shear_at(const std::shared_ptr<const VerticalGrid>& grid, const CorrectorTrajectory* corrector,
                    double epsilon, double t) {
  ShearField s{VProfile(grid), VProfile(grid)};
  if (corrector == nullptr || epsilon == 0.0) return s;
  const auto cs = corrector->state_at(t);
  const double ef = epsilon * corrector->profile().f(t);
  for (int i = 0; i < s.U.size(); ++i) {
    const double y = grid->node(i);
    s.U[i] = cs.us[i] + ef * boundary_cutoff(y);
    s.dU[i] = cs.dus[i] + ef * boundary_cutoff_d1(y);
  }
  return s;
}

Field2D preset_initial_velocity(std::shared_ptr<const Grid> grid, double eta, int k0) {
  if (k0 < 1 || k0 >= grid->nyquist()) throw ConfigError("k0 must lie in 1..Nx/2-1", "k0");
  const auto profile = VProfile::from_function(
      grid->vertical_ptr(), [](double y) { return y * (1.0 - 0.25 * y * y) * std::exp(-0.25 * y * y); });
  // η sin(ξx) = 2 Re((-iη/2) e^{iξx}).
  return Field2D::single_mode(grid, k0, Complex(0.0, -0.5 * eta), profile.values());
}

namespace {

// One θ-scheme/AB2 step per mode: M(x⁺ - x)/dt = θ K x⁺/dy² + (1-θ) K x/dy² - M N_eff.
class ImexCore {
 public:
  ImexCore(std::shared_ptr<const Grid> grid, WallRow wall) : grid_(std::move(grid)), wall_(wall) {}

  Field2D advance(const Field2D& x, const Field2D& n_now, const std::optional<Field2D>& n_prev, double dt,
                  bool euler) {
    const double theta = euler ? 1.0 : 0.5;
    const auto& solver = matrix(dt, theta);
    const int ny = grid_->ny();
    const double dy = grid_->dy();
    std::vector<Complex> mass(static_cast<std::size_t>(ny));
    std::vector<Complex> stiff(static_cast<std::size_t>(ny));
    std::vector<Complex> forcing(static_cast<std::size_t>(ny));
    std::vector<Complex> mforce(static_cast<std::size_t>(ny));
    Field2D out(grid_);
    for (int j = 0; j < grid_->modes(); ++j) {
      auto col = x.mode(j);
      auto now = n_now.mode(j);
      apply_compact_mass<Complex>(col, mass, wall_);
      apply_compact_stiffness<Complex>(col, dy, stiff, wall_);
      if (euler) {
        std::copy(now.begin(), now.end(), forcing.begin());
      } else {
        auto prev = n_prev->mode(j);
        for (std::size_t i = 0; i < forcing.size(); ++i) forcing[i] = 1.5 * now[i] - 0.5 * prev[i];
      }
      apply_compact_mass<Complex>(forcing, mforce, wall_);
      auto dst = out.mode(j);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = mass[i] / dt + (1.0 - theta) * stiff[i] - mforce[i];
      dst[0] = wall_ == WallRow::Neumann ? dst[0] : Complex{};
      dst[dst.size() - 1] = Complex{};
      solver.solve<Complex>(dst);
    }
    std::ranges::fill(out.mode(grid_->nyquist()), Complex{});
    return out;
  }

 private:
  const TridiagonalSolver& matrix(double dt, double theta) {
    auto& slot = theta == 1.0 ? euler_ : cn_;
    if (!slot || slot->first != dt) slot.emplace(dt, compact_theta_matrix(grid_->ny(), grid_->dy(), dt, 0.0, theta, wall_));
    return slot->second;
  }

  std::shared_ptr<const Grid> grid_;
  WallRow wall_;
  std::optional<std::pair<double, TridiagonalSolver>> euler_;
  std::optional<std::pair<double, TridiagonalSolver>> cn_;
};

}  // namespace

// ---------------------------------------------------------------------------

PrandtlStepper::PrandtlStepper(std::shared_ptr<const Grid> grid, StepperOptions options)
    : grid_(std::move(grid)), options_(options) {}

Field2D PrandtlStepper::transport(const Field2D& u, const ShearField& shear) const {
  if (!options_.transport) return Field2D(grid_);
  const auto ux = ddx(u);
  const auto v = recover_v(u);
  Field2D n = multiply(u, ux, options_.products);
  n += multiply(v, ddy(u), options_.products);
  n += shear.U * ux;
  n += shear.dU * v;
  return n;
}

double PrandtlStepper::cfl_number(const Field2D& u, const ShearField& shear, double dt) const {
  const auto up = u.to_physical();
  const auto vp = recover_v(u).to_physical();
  const int ny = grid_->ny();
  double horizontal = 0.0;
  double vertical = 0.0;
  for (std::size_t k = 0; k < up.size(); ++k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(ny));
    horizontal = std::max(horizontal, std::abs(up[k] + shear.U[i]));
    vertical = std::max(vertical, std::abs(vp[k]));
  }
  return dt * std::max(horizontal / grid_->dx(), vertical / grid_->dy());
}

void PrandtlStepper::step(AnalyticState& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive", "dt");
  require_same_grid(state.u, Field2D(grid_));
  const auto shear = shear_at(grid_->vertical_ptr(), state.corrector.get(), state.epsilon, state.t);
  if (options_.transport) {
    const double cfl = cfl_number(state.u, shear, dt);
    if (cfl > options_.cfl_limit) {
      std::ostringstream os;
      os << "CFL number " << cfl << " exceeds " << options_.cfl_limit << " at t = " << state.t
         << "; reduce dt";
      throw CflError(os.str());
    }
  }
  auto n_now = transport(state.u, shear);
  const bool euler = !previous_ || previous_dt_ != dt;
  ImexCore core(grid_, WallRow::Dirichlet);
  auto next = core.advance(state.u, n_now, previous_, dt, euler);
  if (!next.is_finite()) {
    std::ostringstream os;
    os << "non-finite velocity produced at t = " << state.t + dt;
    throw NumericFault(os.str());
  }
  state.u = std::move(next);
  state.t += dt;
  previous_ = std::move(n_now);
  previous_dt_ = dt;
}

// ---------------------------------------------------------------------------

PhiStepper::PhiStepper(std::shared_ptr<const Grid> grid, StepperOptions options)
    : grid_(std::move(grid)), options_(options) {}

Field2D PhiStepper::transport(const Field2D& phi, const ShearField& shear) const {
  if (!options_.transport) return Field2D(grid_);
  const auto u = ddy(phi);
  const auto phix = ddx(phi);
  Field2D a = multiply(u, phix, options_.products);
  a += shear.U * phix;
  Field2D b = multiply(ddy(u), phix, options_.products);
  b += shear.dU * phix;
  auto tail = int_y_to_inf(b);
  tail *= 2.0;
  a += tail;
  return a;
}

void PhiStepper::step(Field2D& phi, double t, double dt, double epsilon, const CorrectorTrajectory* corrector) {
  const auto shear = shear_at(grid_->vertical_ptr(), corrector, epsilon, t);
  auto n_now = transport(phi, shear);
  const bool euler = !previous_ || previous_dt_ != dt;
  ImexCore core(grid_, WallRow::Neumann);
  auto next = core.advance(phi, n_now, previous_, dt, euler);
  if (!next.is_finite()) throw NumericFault("non-finite primitive produced in the phi route");
  phi = std::move(next);
  previous_ = std::move(n_now);
  previous_dt_ = dt;
}

PhiRouteReport phi_route_check(const Field2D& u0, double epsilon, const CorrectorTrajectory* corrector, double dt,
                               double t_end, StepperOptions options) {
  const auto grid = u0.grid_ptr();
  PrandtlStepper us(grid, options);
  PhiStepper ps(grid, options);
  AnalyticState state{0.0, u0, epsilon, 0.0, 1.0, 0.0, nullptr};
  if (corrector != nullptr) {
    state.corrector = std::shared_ptr<const CorrectorTrajectory>(corrector, [](const CorrectorTrajectory*) {});
  }
  Field2D phi = recover_phi_unchecked(u0);
  PhiRouteReport rep;
  const long steps = std::max(1L, std::lround(t_end / dt));
  const double h = t_end / static_cast<double>(steps);
  for (long n = 0; n < steps; ++n) {
    const double t = state.t;
    us.step(state, h);
    ps.step(phi, t, h, epsilon, corrector);
    const double nu = l2_norm(state.u);
    const double diff = l2_norm(ddy(phi) - state.u);
    const double rel = nu > 0.0 ? diff / nu : diff;
    rep.max_relative_disagreement = std::max(rep.max_relative_disagreement, rel);
    rep.final_relative_disagreement = rel;
    ++rep.steps;
  }
  rep.t_end = state.t;
  return rep;
}

}  // namespace prandtl
