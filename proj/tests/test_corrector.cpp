#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "prandtl/corrector.hpp"
#include "prandtl/errors.hpp"

using namespace prandtl;
using std::numbers::pi;

namespace {

std::shared_ptr<const VerticalGrid> vgrid(int ny, double ymax) { return std::make_shared<const VerticalGrid>(ny, ymax); }

// Composite Simpson on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double max_abs(const VProfile& p) {
  double m = 0.0;
  for (int i = 0; i < p.size(); ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

}  // namespace

TEST_CASE("boundary cutoff: values, support of the derivative, unit mass") {
  CHECK(boundary_cutoff(0.0) == 0.0);
  CHECK(boundary_cutoff(1.0) == 0.0);
  CHECK(boundary_cutoff(1.5) == doctest::Approx(0.5));
  CHECK(boundary_cutoff(2.0) == 1.0);
  CHECK(boundary_cutoff(7.0) == 1.0);
  CHECK(boundary_cutoff_d1(0.5) == 0.0);
  CHECK(boundary_cutoff_d1(2.5) == 0.0);
  for (double y = 1.0; y <= 2.0; y += 0.01) CHECK(boundary_cutoff_d1(y) >= 0.0);
  CHECK(simpson(boundary_cutoff_d1, 1.0, 2.0, 2000) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(simpson(boundary_cutoff_d2, 1.0, 2.0, 2000) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("tail integral of 1 - chi") {
  CHECK(cutoff_tail_integral(2.0) == 0.0);
  CHECK(cutoff_tail_integral(5.0) == 0.0);
  CHECK(cutoff_tail_integral(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cutoff_tail_integral(0.0) == doctest::Approx(1.5).epsilon(1e-12));
  const double h = 1e-6;
  for (double y : {0.5, 1.2, 1.5, 1.9}) {
    const double d = (cutoff_tail_integral(y + h) - cutoff_tail_integral(y - h)) / (2.0 * h);
    CHECK(d == doctest::Approx(-(1.0 - boundary_cutoff(y))).epsilon(1e-7));
  }
}

TEST_CASE("outflow profiles") {
  const auto texp = OutflowProfile::texp();
  CHECK(texp.f(0.0) == 0.0);
  CHECK(texp.f(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(texp.df(2.0) == doctest::Approx(-std::exp(-2.0)));
  CHECK_NOTHROW(texp.validate());
  CHECK(OutflowProfile::from_spec("texp:2").f(1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(OutflowProfile::from_spec("zero").identically_zero());
  CHECK_THROWS_AS(OutflowProfile::inv_bracket().validate(), ConstraintError);
  CHECK_THROWS_AS(OutflowProfile::from_spec("sine"), ConfigError);
  CHECK_THROWS_AS(OutflowProfile::from_spec("texp:-1"), ConfigError);

  const auto dir = std::filesystem::temp_directory_path() / "prandtl_corrector_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "f.txt");
    out << "# t f\n0 0\n1 2\n3 0\n";
  }
  const auto table = OutflowProfile::from_spec("table:" + (dir / "f.txt").string());
  CHECK(table.f(0.5) == doctest::Approx(1.0));
  CHECK(table.f(2.0) == doctest::Approx(1.0));
  CHECK(table.df(2.0) == doctest::Approx(-1.0));
  CHECK(table.f(10.0) == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrector sources: M' = m, support in y <= 2, zero for zero outflow") {
  const auto vg = vgrid(1201, 12.0);
  const auto f = OutflowProfile::texp();
  // χ has large high derivatives near y = 1 and 2, so check the fourth-order convergence of M' - m.
  auto derivative_gap = [&](int ny, double t) {
    const auto g = vgrid(ny, 12.0);
    const auto s = sources(f, t, g);
    const auto dM = ddy(s.M);
    double err = 0.0;
    for (int i = 0; i < g->ny(); ++i) err = std::max(err, std::abs(dM[i] - s.m[i]));
    return err;
  };
  for (double t : {0.3, 1.0, 4.0}) {
    const double coarse = derivative_gap(1201, t), fine = derivative_gap(2401, t);
    MESSAGE("M' - m at t = " << t << ": " << coarse << " -> " << fine);
    CHECK(coarse / fine > 10.0);
    CHECK(fine < 1e-4 * std::abs(f.df(t)) + 1e-4 * f.f(t));
    const auto s = sources(f, t, vg);
    for (int i = 0; i < vg->ny(); ++i) {
      const double y = vg->node(i);
      if (y > 2.0) {
        CHECK(s.m[i] == 0.0);
        CHECK(s.M[i] == 0.0);
      }
      CHECK(s.H[i] == doctest::Approx(s.m[i] + y / (2.0 * (1.0 + t)) * s.M[i]));
    }
  }
  const auto z = sources(OutflowProfile::zero(), 1.0, vg);
  CHECK(max_abs(z.H) == 0.0);
}

TEST_CASE("damped heat solver reproduces a decaying sine") {
  const double ymax = 6.0, c = 0.5;
  const auto vg = vgrid(101, ymax);
  const double kappa = pi / ymax;
  auto G = VProfile::from_function(vg, [&](double y) { return std::sin(kappa * y); });
  DampedHeatSolver solver(vg);
  const double dt = 1e-3;
  for (int n = 0; n < 1000; ++n) solver.step(G, dt, c, nullptr);
  const double decay = std::exp(-(kappa * kappa + c));
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < vg->ny(); ++i) {
    const double exact = decay * std::sin(kappa * vg->node(i));
    err = std::max(err, std::abs(G[i] - exact));
    ref = std::max(ref, std::abs(exact));
  }
  CHECK(err / ref < 1e-6);
  CHECK(G[0] == 0.0);
  CHECK(G[vg->ny() - 1] == 0.0);
}

TEST_CASE("reconstruction: psi in closed form and the defining identity") {
  const auto vg = vgrid(1201, 24.0);
  const auto Gs = VProfile::from_function(vg, [](double y) { return y * std::exp(-y * y / 4.0); });
  const auto rec = reconstruct_us(Gs, 0.0);
  double psi_err = 0.0, u_err = 0.0;
  for (int i = 0; i < vg->ny(); ++i) {
    const double y = vg->node(i), e = std::exp(-y * y / 4.0);
    psi_err = std::max(psi_err, std::abs(rec.psis[i] - 0.5 * y * y * e));
    u_err = std::max(u_err, std::abs(rec.us[i] - (y - 0.25 * y * y * y) * e));
  }
  CHECK(psi_err < 1e-10);
  CHECK(u_err < 1e-10);
  CHECK(rec.us[0] == 0.0);

  const auto dpsi = ddy(rec.psis);
  double d_err = 0.0;
  for (int i = 0; i < vg->ny(); ++i) d_err = std::max(d_err, std::abs(dpsi[i] - rec.us[i]));
  CHECK(d_err < 1e-6);

  const auto zero = reconstruct_us(VProfile(vg), 3.0);
  CHECK(max_abs(zero.psis) == 0.0);
  CHECK(max_abs(zero.us) == 0.0);
}

TEST_CASE("corrector trajectory: zero amplitude, linearity in epsilon, interpolation") {
  const auto vg = vgrid(241, 24.0);
  const auto f = OutflowProfile::texp();
  const auto none = solve_Gs(f, 0.0, 5.0, 1e-2, vg);
  for (const auto& s : none.snapshots()) CHECK(max_abs(s) == 0.0);

  const auto one = solve_Gs(f, 1e-3, 5.0, 1e-2, vg, 0.1);
  const auto two = solve_Gs(f, 2e-3, 5.0, 1e-2, vg, 0.1);
  CHECK(one.times().front() == 0.0);
  CHECK(one.times().back() == doctest::Approx(5.0));
  CHECK(max_abs(one.snapshots().front()) == 0.0);
  for (std::size_t n = 0; n < one.snapshots().size(); ++n) {
    for (int i = 0; i < vg->ny(); ++i) {
      CHECK(two.snapshots()[n][i] == doctest::Approx(2.0 * one.snapshots()[n][i]).epsilon(1e-12).scale(1e-15));
    }
  }
  const auto mid = one.Gs_at(0.15);
  const auto& a = one.snapshots()[1];
  const auto& b = one.snapshots()[2];
  for (int i = 0; i < vg->ny(); ++i) CHECK(mid[i] == doctest::Approx(0.5 * (a[i] + b[i])));
  CHECK_THROWS_AS(one.Gs_at(6.0), ConfigError);

  const auto st = one.state_at(2.0);
  CHECK(st.us[0] == doctest::Approx(0.0).scale(1e-14));
  for (int i = 0; i < vg->ny(); ++i) {
    const double y = vg->node(i);
    CHECK(st.us[i] + y / 6.0 * st.psis[i] == doctest::Approx(st.Gs[i]).scale(1e-14));
  }
}

TEST_CASE("C_f: texp against Simpson, divergence of 1/(1+t)") {
  const auto f = OutflowProfile::texp();
  auto first = [](double t) { return std::pow(1.0 + t, 1.25) * (t + std::abs(1.0 - t)) * std::exp(-t); };
  auto second = [](double t) { return std::pow(1.0 + t, 3.5) * (t * t + (1.0 - t) * (1.0 - t)) * std::exp(-2.0 * t); };
  const double i1 = simpson(first, 0.0, 1.0, 2000) + simpson(first, 1.0, 80.0, 200000);
  const double i2 = simpson(second, 0.0, 80.0, 200000);
  const auto terms = cf_terms(f);
  CHECK(terms.first == doctest::Approx(i1).epsilon(1e-9));
  CHECK(terms.second == doctest::Approx(i2).epsilon(1e-9));
  CHECK(cf_constant(f) == doctest::Approx(i1 + std::sqrt(i2)).epsilon(1e-9));
  CHECK(cf_constant(f) == doctest::Approx(10.4602138621342118).epsilon(1e-10));
  CHECK(cf_constant(OutflowProfile::zero()) == 0.0);
  CHECK_THROWS_WITH_AS(cf_constant(OutflowProfile::inv_bracket()), doctest::Contains("C_f term"), DivergenceError);
}

TEST_CASE("decay report: zero corrector, scaling with epsilon, decaying tail") {
  const auto vg = vgrid(241, 24.0);
  const auto f = OutflowProfile::texp();
  const auto zero = corrector_decay_report(solve_Gs(f, 0.0, 20.0, 1e-2, vg, 0.1));
  CHECK(zero.total_integral == 0.0);
  CHECK(zero.lemma_ratio == 0.0);

  const auto one = corrector_decay_report(solve_Gs(f, 1e-3, 40.0, 1e-2, vg, 0.1), 4.0, 40.0);
  const auto two = corrector_decay_report(solve_Gs(f, 2e-3, 40.0, 1e-2, vg, 0.1), 4.0, 40.0);
  CHECK(two.total_integral == doctest::Approx(2.0 * one.total_integral).epsilon(1e-10));
  CHECK(two.lemma_ratio == doctest::Approx(one.lemma_ratio).epsilon(1e-10));
  CHECK(one.fit_defined);
  CHECK(one.fitted_exponent < -1.1);
  CHECK(one.lemma_ratio > 0.0);
  CHECK(std::isfinite(one.lemma_ratio));
  for (std::size_t n = 1; n < one.running_integral.size(); ++n) CHECK(one.running_integral[n] >= one.running_integral[n - 1]);
  CHECK(one.windows.starts.front() == 1.0);
  for (std::size_t j = 1; j < one.windows.ratios.size(); ++j) CHECK(one.windows.ratios[j] <= std::sqrt(0.5) * 1.3);
  CHECK(one.us_total[0] > 0.0);
  CHECK(one.us_total[1] >= one.us_total[0]);
}

TEST_CASE("energy inequality holds step by step within the time-discretisation slack") {
  const auto vg = vgrid(241, 24.0);
  const auto report = energy_inequality_check(OutflowProfile::texp(), 1e-3, 10.0, 1e-2, vg);
  CHECK(report.steps == 1000);
  CHECK(report.max_scaled_violation <= 1.0);
}
