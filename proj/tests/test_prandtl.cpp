#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "prandtl/errors.hpp"
#include "prandtl/reduction.hpp"
#include "prandtl/stepper.hpp"

using namespace prandtl;
using std::numbers::pi;

namespace {

std::shared_ptr<const Grid> torus(int nx = 16, int ny = 481, double ymax = 24.0) {
  return Grid::make(nx, 2.0 * pi, ny, ymax);
}

AnalyticState state_for(const Field2D& u, double epsilon = 0.0,
                        std::shared_ptr<const CorrectorTrajectory> corrector = nullptr) {
  return AnalyticState{0.0, u, epsilon, 0.2, 4.0, 0.0, std::move(corrector)};
}

}  // namespace

TEST_CASE("preset data: wall value, zero integral and the closed-form G0") {
  const auto g = torus(16, 1201, 24.0);
  const double eta = 1e-3;
  const auto u0 = preset_initial_velocity(g, eta, 1);
  CHECK(wall_residual(u0) == 0.0);
  CHECK(zero_integral_residual(u0) <= 1e-11 * l2_norm(u0));

  const auto phi = recover_phi(u0, 1e-5);
  const auto gu = good_unknown(u0, phi, 0.0);
  const auto G = gu.G.to_physical();
  const auto ph = phi.to_physical();
  double g_err = 0.0, phi_err = 0.0;
  for (int n = 0; n < g->nx(); ++n) {
    for (int i = 0; i < g->ny(); ++i) {
      const double x = n * g->dx(), y = g->vertical().node(i), e = std::exp(-y * y / 4.0);
      const std::size_t k = static_cast<std::size_t>(n) * g->ny() + i;
      g_err = std::max(g_err, std::abs(G[k] - eta * std::sin(x) * y * e));
      phi_err = std::max(phi_err, std::abs(ph[k] - eta * std::sin(x) * 0.5 * y * y * e));
    }
  }
  CHECK(g_err <= 1e-10);
  CHECK(phi_err <= 1e-10);

  const auto bank = build_filter_bank(2.0 * pi, 16);
  const auto report = validate_initial_data(bank, u0, 0.2);
  CHECK(report.ok());
  CHECK(report.weighted_G_norm > 0.0);
  CHECK(report.weighted_u_norm > report.weighted_G_norm);
}

TEST_CASE("zero data: every companion is zero") {
  const auto g = torus();
  const Field2D u(g);
  CHECK(l2_norm(recover_phi(u, 1e-5)) == 0.0);
  CHECK(l2_norm(recover_v(u)) == 0.0);
  const auto gu = good_unknown(u, recover_phi(u, 1e-5), 1.0);
  CHECK(l2_norm(gu.G) == 0.0);
  CHECK(l2_norm(gu.g) == 0.0);
  const auto bank = build_filter_bank(2.0 * pi, 16);
  const auto report = validate_initial_data(bank, u, 0.2);
  CHECK(report.ok());
  CHECK(report.weighted_u_norm == 0.0);
}

TEST_CASE("admissibility rejects a wall value, a drifting integral and a mean") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 16);
  const auto wall = Field2D::from_function(g, [](double x, double y) { return std::sin(x) * std::exp(-y * y); });
  CHECK_FALSE(validate_initial_data(bank, wall, 0.2).ok());
  const auto drift = Field2D::from_function(g, [](double x, double y) { return std::sin(x) * y * std::exp(-y * y); });
  const auto report = validate_initial_data(bank, drift, 0.2);
  CHECK_FALSE(report.ok());
  CHECK(report.zero_integral_residual > 1e-5);
  CHECK_THROWS_AS(recover_phi(drift, 1e-5), ConstraintError);
  const auto mean = Field2D::from_function(g, [](double, double y) { return y * (1.0 - y * y / 4.0) * std::exp(-y * y / 4.0); });
  CHECK_FALSE(validate_initial_data(bank, mean, 0.2).ok());
}

TEST_CASE("normal velocity of a single mode and the stream relation") {
  const auto g = torus(16, 481, 24.0);
  const int k = 3;
  std::vector<double> p(g->ny());
  for (int i = 0; i < g->ny(); ++i) {
    const double y = g->vertical().node(i);
    p[i] = y * (1.0 - y * y / 4.0) * std::exp(-y * y / 4.0);
  }
  const auto u = Field2D::single_mode(g, k, Complex(0.5, 0.0), p);  // cos(3x) p(y)
  const auto v = recover_v(u).to_physical();
  double err = 0.0;
  for (int n = 0; n < g->nx(); ++n) {
    for (int i = 0; i < g->ny(); ++i) {
      const double x = n * g->dx(), y = g->vertical().node(i);
      const double exact = k * std::sin(k * x) * 0.5 * y * y * std::exp(-y * y / 4.0);
      err = std::max(err, std::abs(v[static_cast<std::size_t>(n) * g->ny() + i] - exact));
    }
  }
  // Sixth-order quadrature at dy = 0.05.
  CHECK(err <= 1e-8);
  const auto phi = recover_phi(u, 1e-5);
  CHECK(l2_norm(recover_v(u) + ddx(phi)) <= 1e-7);
  CHECK(l2_norm(ddy(phi) - u) <= 1e-5 * l2_norm(u));
  const auto x_only = Field2D::from_function(g, [](double, double y) { return y * std::exp(-y); });
  CHECK(l2_norm(recover_v(x_only)) == 0.0);
}

TEST_CASE("good unknown: phi round trip and the mean-value bound") {
  const auto g = torus(16, 961, 24.0);
  const auto u = preset_initial_velocity(g, 1.0, 2);
  for (double t : {0.0, 1.0, 5.0}) {
    const auto phi = recover_phi(u, 1e-5);
    const auto gu = good_unknown(u, phi, t);
    CHECK(l2_norm(phi_from_good_unknown(gu.G, t) - phi) <= 1e-9 * l2_norm(phi));
    CHECK(l2_norm(gu.g - gu.g_expanded) <= 1e-5 * l2_norm(gu.g));
    // ‖G - u‖ = ‖yφ‖/(2⟨t⟩) exactly.
    auto yphi = phi;
    yphi.scale_rows(VProfile::from_function(g->vertical_ptr(), [](double y) { return y; }));
    CHECK(l2_norm(gu.G - u) == doctest::Approx(l2_norm(yphi) / (2.0 * (1.0 + t))).epsilon(1e-12));
  }
  CHECK(l2_norm(good_unknown(u, Field2D(g), 0.0).G - u) == 0.0);
}

TEST_CASE("shear at a time: zero without outflow, epsilon f chi plus the corrector otherwise") {
  const auto vg = std::make_shared<const VerticalGrid>(241, 24.0);
  const auto none = shear_at(vg, nullptr, 0.0, 1.0);
  for (int i = 0; i < vg->ny(); ++i) CHECK(none.U[i] == 0.0);
  const auto traj = std::make_shared<const CorrectorTrajectory>(
      solve_Gs(OutflowProfile::texp(), 1e-3, 2.0, 1e-2, vg, 0.01));
  const auto sh = shear_at(vg, traj.get(), 1e-3, 1.0);
  const auto st = traj->state_at(1.0);
  for (int i = 0; i < vg->ny(); ++i) {
    const double y = vg->node(i);
    CHECK(sh.U[i] == doctest::Approx(st.us[i] + 1e-3 * std::exp(-1.0) * boundary_cutoff(y)).scale(1e-15));
  }
  CHECK(sh.U[0] == 0.0);
}

TEST_CASE("stepper: zero stays zero with and without outflow") {
  const auto g = torus(16, 241, 24.0);
  const auto traj = std::make_shared<const CorrectorTrajectory>(
      solve_Gs(OutflowProfile::texp(), 1e-3, 1.0, 1e-2, g->vertical_ptr(), 0.01));
  for (double eps : {0.0, 1e-3}) {
    auto state = state_for(Field2D(g), eps, eps > 0.0 ? traj : nullptr);
    PrandtlStepper stepper(g);
    for (int n = 0; n < 50; ++n) stepper.step(state, 1e-2);
    CHECK(state.t == doctest::Approx(0.5));
    CHECK(l2_norm(state.u) == 0.0);
  }
}

TEST_CASE("stepper: separable heat solution without transport") {
  const double ymax = 6.0, kappa = 2.0 * pi / ymax;
  const auto g = Grid::make(8, 2.0 * pi, 101, ymax);
  auto exact = [&](double t) {
    return Field2D::from_function(g, [&](double x, double y) {
      return std::sin(x) * std::sin(kappa * y) * std::exp(-kappa * kappa * t);
    });
  };
  StepperOptions opts;
  opts.transport = false;
  PrandtlStepper stepper(g, opts);
  auto state = state_for(exact(0.0));
  for (int n = 0; n < 1000; ++n) stepper.step(state, 1e-3);
  const auto ref = exact(1.0);
  CHECK(l2_norm(state.u - ref) <= 1e-4 * l2_norm(ref));
  CHECK(wall_residual(state.u) == 0.0);
}

TEST_CASE("stepper: second order in time with transport") {
  const auto g = torus(16, 121, 12.0);
  const auto u0 = preset_initial_velocity(g, 0.5, 1);
  auto run = [&](double dt) {
    auto state = state_for(u0);
    PrandtlStepper stepper(g);
    const int steps = static_cast<int>(std::lround(0.5 / dt));
    for (int n = 0; n < steps; ++n) stepper.step(state, dt);
    return state.u;
  };
  const auto ref = run(0.5 / 800.0);
  const double e1 = l2_norm(run(0.5 / 50.0) - ref), e2 = l2_norm(run(0.5 / 100.0) - ref);
  MESSAGE("temporal errors " << e1 << " " << e2);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("stepper: products, wall condition and mean mode") {
  const auto g = torus(32, 241, 24.0);
  const auto u0 = preset_initial_velocity(g, 0.1, 2);
  StepperOptions exact;
  exact.products = ProductMode::Exact;
  PrandtlStepper a(g), b(g, exact);
  auto sa = state_for(u0), sb = state_for(u0);
  for (int n = 0; n < 100; ++n) {
    a.step(sa, 5e-3);
    b.step(sb, 5e-3);
    CHECK(wall_residual(sa.u) == 0.0);
  }
  // k0 = 2 with a dozen resolved harmonics: the de-aliased and exact products barely differ.
  CHECK(l2_norm(sa.u - sb.u) <= 1e-6 * l2_norm(sa.u));
  CHECK(sa.u.is_finite());
}

TEST_CASE("stepper: CFL breach and numeric fault leave the state untouched") {
  const auto g = torus(16, 241, 24.0);
  const auto u0 = preset_initial_velocity(g, 1.0, 1);
  PrandtlStepper stepper(g);
  auto state = state_for(u0);
  CHECK_THROWS_AS(stepper.step(state, 10.0), CflError);
  CHECK(state.t == 0.0);
  CHECK(l2_norm(state.u - u0) == 0.0);

  auto bad = u0;
  bad(1, 10) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  auto faulty = state_for(bad);
  PrandtlStepper other(g);
  CHECK_THROWS_AS(other.step(faulty, 1e-3), NumericFault);
  CHECK(faulty.t == 0.0);

  ShearField none{VProfile(g->vertical_ptr()), VProfile(g->vertical_ptr())};
  const double c = stepper.cfl_number(u0, none, 1e-2);
  CHECK(c > 0.0);
  CHECK(stepper.cfl_number(u0, none, 2e-2) == doctest::Approx(2.0 * c));
}

TEST_CASE("phi route agrees with the velocity route on short times") {
  const auto g = torus(16, 241, 24.0);
  const auto u0 = preset_initial_velocity(g, 1e-2, 1);
  const auto traj = std::make_shared<const CorrectorTrajectory>(
      solve_Gs(OutflowProfile::texp(), 1e-3, 1.0, 2e-3, g->vertical_ptr(), 2e-3));
  const auto coarse = phi_route_check(u0, 1e-3, traj.get(), 2e-3, 1.0);
  CHECK(coarse.steps == 500);
  MESSAGE("phi route disagreement " << coarse.max_relative_disagreement);
  CHECK(coarse.max_relative_disagreement < 1e-3);
}

