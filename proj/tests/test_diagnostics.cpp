#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "prandtl/diagnostics.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/reduction.hpp"
#include "prandtl/stepper.hpp"

using namespace prandtl;
using std::numbers::pi;

namespace {

std::shared_ptr<const Grid> torus(int nx = 32, int ny = 481, double ymax = 24.0) {
  return Grid::make(nx, 2.0 * pi, ny, ymax);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

DiagnosticsRecord synthetic(const DyadicFilterBank& bank, double t, double u, double G, double theta, double radius) {
  DiagnosticsRecord r;
  r.t = t;
  r.theta = theta;
  r.radius = radius;
  r.norms.fill(u);
  r.norms[4] = G;
  r.norms[1] = G;
  r.norms[2] = G;
  r.norms[6] = G;
  r.u_blocks.assign(static_cast<std::size_t>(bank.block_count()), 0.0);
  r.u_blocks.front() = u;
  r.dyu_blocks = r.u_blocks;
  return r;
}

}  // namespace

TEST_CASE("decay fit recovers exact power laws") {
  std::vector<double> t, v, w;
  for (int n = 0; n <= 100; ++n) {
    t.push_back(n);
    v.push_back(3.0 * std::pow(1.0 + n, -0.75));
    w.push_back(std::pow(1.0 + n, -1.25) * (1.0 + 0.01 * std::sin(n)));
  }
  const auto fit = decay_fit(t, v, 10.0, 100.0);
  CHECK(fit.exponent == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.samples == 91);
  const auto noisy = decay_fit(t, w, 10.0, 100.0);
  CHECK(noisy.exponent == doctest::Approx(-1.25).epsilon(1e-2));
  CHECK(noisy.r2 < 1.0);
  CHECK_THROWS_AS(decay_fit(t, v, 10.0, 15.0), ConfigError);
  v[50] = 0.0;
  CHECK_THROWS_AS(decay_fit(t, v, 10.0, 100.0), ConstraintError);
}

TEST_CASE("weighted analytic norm: zero, radius zero, closed-form scaling, monotonicity") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 32);
  CHECK(weighted_analytic_norm(bank, Field2D(g), 1.0, 1.0, 0.2) == 0.0);

  std::vector<double> p(g->ny());
  for (int i = 0; i < g->ny(); ++i) p[i] = g->vertical().node(i) * std::exp(-g->vertical().node(i) * g->vertical().node(i) / 2.0);
  const auto a = Field2D::single_mode(g, 8, Complex(0.5, 0.0), p);
  const auto w = gaussian_weight(g->vertical_ptr(), 2.0, 1.0);
  CHECK(weighted_analytic_norm(bank, a, 2.0, 1.0, 0.0) == doctest::Approx(besov_norm(bank, a, 0.5, &w)).epsilon(1e-13));
  CHECK(weighted_analytic_norm(bank, a, 2.0, 1.0, 0.1) ==
        doctest::Approx(std::exp(0.8) * besov_norm(bank, a, 0.5, &w)).epsilon(1e-13));
  CHECK_THROWS_AS(weighted_analytic_norm(bank, a, 0.0, 1.0, -0.01), NegativeRadiusError);

  std::mt19937_64 rng(29);
  std::normal_distribution<double> n(0.0, 1.0);
  Field2D b(g);
  for (int j = 1; j < 12; ++j) {
    const Complex c(n(rng), n(rng));
    for (int i = 0; i < g->ny(); ++i) b(j, i) = c * p[i];
  }
  double previous = 0.0;
  for (double r : {0.0, 0.05, 0.1, 0.2}) {
    const double value = weighted_analytic_norm(bank, b, 1.0, 1.0, r);
    CHECK(value > previous);
    previous = value;
  }
  CHECK(weighted_analytic_norm(bank, b, 1.0, 0.5, 0.1) < weighted_analytic_norm(bank, b, 1.0, 0.75, 0.1));
  CHECK(weighted_analytic_norm(bank, b, 1.0, 0.75, 0.1) < weighted_analytic_norm(bank, b, 1.0, 1.0, 0.1));
}

TEST_CASE("theta integrand: zero solution, outflow term and its Gaussian bound") {
  const auto g = torus(16, 961, 24.0);
  const auto bank = build_filter_bank(2.0 * pi, 16);
  const auto none = theta_integrand(bank, nullptr, Field2D(g), 1.0, 0.0, 0.0, 0.2);
  CHECK(none.total() == 0.0);

  const double chi1_norm = std::sqrt(simpson([](double y) { return std::pow(boundary_cutoff_d1(y), 2); }, 1.0, 2.0, 4000));
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const auto c = theta_integrand(bank, nullptr, Field2D(g), t, 1.0, 1.0, 0.2);
    const double scale = std::pow(1.0 + t, 0.25);
    CHECK(c.corrector == 0.0);
    CHECK(c.bulk == 0.0);
    CHECK(c.outflow >= scale * chi1_norm * (1.0 - 1e-6));
    CHECK(c.outflow <= scale * std::exp(0.5 / (1.0 + t)) * chi1_norm * (1.0 + 1e-6));
  }
  const auto u = preset_initial_velocity(g, 1e-3, 1);
  const auto G = good_unknown(u, recover_phi(u, 1e-5), 0.0).G;
  const auto c = theta_integrand(bank, nullptr, G, 0.0, 0.0, 1e-3, 0.2);
  CHECK(c.bulk == doctest::Approx(weighted_analytic_norm(bank, ddy(G), 0.0, 1.0, 0.2)));
  CHECK(theta_integrand(bank, nullptr, G, 0.0, 0.0, 1e-3, -0.3).bulk ==
        doctest::Approx(weighted_analytic_norm(bank, ddy(G), 0.0, 1.0, 0.0)));
}

TEST_CASE("radius tracker integrates with the trapezoid rule and flags the breach") {
  RadiusTracker tr(0.2, 4.0);
  CHECK_FALSE(tr.started());
  CHECK_THROWS_AS(tr.advance(1.0, {}), ConfigError);
  tr.start(0.0, {0.01, 0.0, 0.0});
  tr.advance(0.5, {0.03, 0.02, 0.0});
  CHECK(tr.theta() == doctest::Approx(0.5 * 0.5 * (0.01 + 0.05)));
  CHECK(tr.component_integral(1, 0.5) == doctest::Approx(0.005));
  CHECK(tr.radius() == doctest::Approx(0.2 - 4.0 * 0.015));
  CHECK_FALSE(tr.breached());
  tr.advance(1.5, {0.03, 0.02, 0.0});
  CHECK(tr.theta() == doctest::Approx(0.065));
  CHECK(tr.breached());
  CHECK(tr.thetas().size() == 3);
  for (std::size_t n = 1; n < tr.thetas().size(); ++n) CHECK(tr.thetas()[n] >= tr.thetas()[n - 1]);
  CHECK_THROWS_AS(RadiusTracker(0.2, 0.0), ConfigError);
}

TEST_CASE("relation checks on the preset data") {
  const auto g = torus(16, 961, 24.0);
  const auto bank = build_filter_bank(2.0 * pi, 16);
  const auto u = preset_initial_velocity(g, 1e-3, 1);
  const auto phi = recover_phi(u, 1e-5);
  for (double t : {0.0, 2.0}) {
    const auto G = good_unknown(u, phi, t).G;
    const auto rel = relation_checks(bank, u, phi, G, t, 0.2);
    CHECK(rel.phi_reconstruction_error <= 1e-8);
    CHECK(rel.dyu_reconstruction_error <= 1e-5);
    CHECK(rel.g_identity_error <= 1e-5 * weighted_analytic_norm(bank, phi, t, 1.0, 0.2));
    for (int k = 0; k < 2; ++k) {
      CHECK(std::isfinite(rel.u_vs_G[k]));
      CHECK(rel.u_vs_G[k] > 0.0);
      CHECK(rel.dyu_vs_dyG[k] > 0.0);
      CHECK(rel.yphi_vs_dyG[k] > 0.0);
    }
    CHECK(rel.u_vs_G[0] <= rel.u_vs_G[1]);
  }
  const Field2D zero(g);
  const auto rel = relation_checks(bank, zero, zero, zero, 1.0, 0.2);
  CHECK(std::isnan(rel.u_vs_G[0]));
  CHECK(std::isnan(rel.dyu_vs_dyG[1]));
}

TEST_CASE("records from a consistent snapshot") {
  const auto g = torus(16, 481, 24.0);
  const auto bank = build_filter_bank(2.0 * pi, 16);
  const auto u = preset_initial_velocity(g, 1e-3, 1);
  const auto rec = make_record(bank, u, 0.0, 0.0, 0.2, 0.2, {});
  CHECK(rec.finite_and_nonnegative());
  CHECK(rec.wall_residual == 0.0);
  CHECK(rec.mean_mode == 0.0);
  CHECK(rec.norms[10] == doctest::Approx(l2_norm(u)));
  CHECK(rec.norms[0] == doctest::Approx(weighted_analytic_norm(bank, u, 0.0, 1.0, 0.2)));
  CHECK(rec.norms[0] == doctest::Approx(besov_from_blocks(bank, rec.u_blocks, 0.5)));
  CHECK(rec.tail_indicator < 1e-10);
  CHECK(rec.amplification_flags == 0);

  const auto zero = make_record(bank, Field2D(g), 0.0, 0.0, 0.2, 0.2, {});
  CHECK(zero.finite_and_nonnegative());
  for (double v : zero.norms) CHECK(v == 0.0);
}

TEST_CASE("theorem monitor on synthetic power laws") {
  const auto bank = build_filter_bank(2.0 * pi, 16);
  std::vector<DiagnosticsRecord> recs;
  for (int n = 0; n <= 100; ++n) {
    const double t = n;
    recs.push_back(synthetic(bank, t, 2.0 * std::pow(1.0 + t, -0.75), std::pow(1.0 + t, -1.25), 1e-4 * t, 0.2 - 4e-4 * t));
  }
  const auto rep = theorem_monitor(bank, recs, {2.0, 4.0, 1.0}, 0.2, 4.0, 10.0, 100.0);
  CHECK(rep.exponents_defined);
  CHECK(rep.u_fit.exponent == doctest::Approx(-0.75));
  CHECK(rep.G_fit.exponent == doctest::Approx(-1.25));
  CHECK(rep.max_theta == doctest::Approx(0.01));
  CHECK_FALSE(rep.breach);
  for (const auto& c : rep.constants) {
    if (c.name == "u_Linf_B_evolving") CHECK(c.sup_ratio == doctest::Approx(1.0));
    if (c.name == "t34_u_evolving") CHECK(c.sup_ratio == doctest::Approx(0.5));
    if (c.name == "t54_G_evolving") CHECK(c.sup_ratio == doctest::Approx(1.0));
  }

  // The half-radius constants are undefined once the radius drops below δ/2.
  recs.back().radius = 0.05;
  const auto shrunk = theorem_monitor(bank, recs, {2.0, 4.0, 1.0}, 0.2, 4.0, 10.0, 100.0);
  for (const auto& c : shrunk.constants) {
    if (c.name.find("half_radius") != std::string::npos) CHECK(std::isnan(c.sup_ratio));
  }

  // Too few samples in the window leaves the exponents undefined.
  const auto short_window = theorem_monitor(bank, recs, {2.0, 4.0, 1.0}, 0.2, 4.0, 95.0, 100.0);
  CHECK_FALSE(short_window.exponents_defined);

  // A zero solution gives zero constants.
  std::vector<DiagnosticsRecord> zeros;
  for (int n = 0; n <= 20; ++n) zeros.push_back(synthetic(bank, n, 0.0, 0.0, 0.0, 0.2));
  const auto z = theorem_monitor(bank, zeros, {}, 0.2, 4.0);
  CHECK_FALSE(z.exponents_defined);
  for (const auto& c : z.constants) {
    INFO(c.name);
    CHECK(c.sup_ratio == 0.0);
  }
}
