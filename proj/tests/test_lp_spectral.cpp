#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "prandtl/errors.hpp"
#include "prandtl/lp_spectral.hpp"

using namespace prandtl;
using std::numbers::pi;

namespace {

std::shared_ptr<const Grid> torus(int nx = 64, int ny = 241, double ymax = 12.0) {
  return Grid::make(nx, 2.0 * pi, ny, ymax);
}

std::vector<double> gaussian_profile(const Grid& g, double a) {
  std::vector<double> p(g.ny());
  for (int i = 0; i < g.ny(); ++i) p[i] = std::exp(-a * g.vertical().node(i) * g.vertical().node(i));
  return p;
}

Field2D random_field(const std::shared_ptr<const Grid>& g, int max_mode, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field2D a(g);
  for (int j = 1; j <= max_mode; ++j) {
    const Complex c(n(rng), n(rng));
    const double s = 0.5 + 0.5 * std::abs(n(rng));
    for (int i = 0; i < g->ny(); ++i) {
      const double y = g->vertical().node(i);
      a(j, i) = c * y * std::exp(-y * y / (2.0 * s));
    }
  }
  return a;
}

}  // namespace

TEST_CASE("bumps: supports, flat regions and partition of unity") {
  CHECK(chi_lp(0.0) == 1.0);
  CHECK(chi_lp(0.75) == 1.0);
  CHECK(chi_lp(4.0 / 3.0) == 0.0);
  CHECK(chi_lp(2.0) == 0.0);
  CHECK(phi_lp(0.5) == 0.0);
  CHECK(phi_lp(0.74) == 0.0);
  CHECK(phi_lp(2.7) == 0.0);
  CHECK(phi_lp(1.0) > 0.0);
  for (double tau = 0.0; tau <= 1.0; tau += 0.01) {
    CHECK(smoothstep(tau) >= 0.0);
    CHECK(smoothstep(tau) <= 1.0);
    CHECK(smoothstep(1.0 - tau) == doctest::Approx(1.0 - smoothstep(tau)).epsilon(1e-14));
  }
  for (double xi = 0.8; xi < 40.0; xi *= 1.07) {
    double sum = chi_lp(xi);
    for (int k = 0; k < 10; ++k) sum += phi_lp(std::ldexp(xi, -k));
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    int active = 0;
    for (int k = -3; k < 10; ++k) active += phi_lp(std::ldexp(xi, -k)) > 0.0;
    CHECK(active <= 2);
  }
}

TEST_CASE("smoothstep derivatives match finite differences") {
  const double h = 1e-6;
  for (double t : {0.1, 0.35, 0.5, 0.8}) {
    CHECK(smoothstep_d1(t) == doctest::Approx((smoothstep(t + h) - smoothstep(t - h)) / (2 * h)).epsilon(1e-7));
    CHECK(smoothstep_d2(t) == doctest::Approx((smoothstep_d1(t + h) - smoothstep_d1(t - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("filter bank on the 2pi torus covers the resolved band") {
  const auto bank = build_filter_bank(2.0 * pi, 64);
  CHECK(bank.k_min() <= -1);
  CHECK(bank.k_max() >= 5);
  CHECK(bank.matches(*torus()));
  CHECK_FALSE(bank.matches(*torus(32)));
  for (int j = 1; j < 32; ++j) {
    double sum = 0.0;
    for (int k = bank.k_min(); k <= bank.k_max(); ++k) sum += bank.block_weight(k, j);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(bank.active_blocks(j).size() <= 2);
  }
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) CHECK(bank.block_weight(k, 0) == 0.0);
  CHECK_THROWS_AS(build_filter_bank(2.0 * pi, 12), ConfigError);
}

TEST_CASE("blocks of cos 8x sit in k = 2 and k = 3") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 64);
  const auto a = Field2D::single_mode(g, 8, Complex(0.5, 0.0), gaussian_profile(*g, 1.0));
  const double total = l2_norm(a);
  CHECK(total == doctest::Approx(std::sqrt(pi * std::sqrt(pi / 8.0))).epsilon(1e-8));
  const auto norms = block_norms(bank, a);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    const double expected = (k == 2 || k == 3) ? phi_lp(8.0 / std::ldexp(1.0, k)) * total : 0.0;
    CHECK(norms[k - bank.k_min()] == doctest::Approx(expected).epsilon(1e-12));
  }
  Field2D sum(g);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) sum += dyadic_block(bank, a, k);
  CHECK(l2_norm(sum - a) <= 1e-13 * total);

  double besov = 0.0;
  for (int k : {2, 3}) besov += std::pow(2.0, 0.5 * k) * phi_lp(8.0 / std::ldexp(1.0, k)) * total;
  CHECK(besov_norm(bank, a, 0.5) == doctest::Approx(besov).epsilon(1e-12));
  CHECK(besov_norm(bank, Field2D(g), 0.5) == 0.0);
}

TEST_CASE("low pass keeps the mean and the blocks below k") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 64);
  std::mt19937_64 rng(3);
  auto a = random_field(g, 20, rng);
  for (int i = 0; i < g->ny(); ++i) a(0, i) = Complex(std::exp(-g->vertical().node(i)), 0.0);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    auto expected = a;
    for (int kk = k; kk <= bank.k_max(); ++kk) expected -= dyadic_block(bank, a, kk);
    CHECK(l2_norm(low_pass(bank, a, k) - expected) <= 1e-12 * l2_norm(a));
  }
}

TEST_CASE("Besov norm for s above one half uses a tangential derivative") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 64);
  std::mt19937_64 rng(11);
  const auto a = random_field(g, 12, rng);
  CHECK(besov_norm(bank, a, 1.0) == doctest::Approx(besov_norm(bank, ddx(a), 0.0)).epsilon(1e-12));
  CHECK(besov_norm(bank, a, 1.5) == doctest::Approx(besov_norm(bank, ddx(a), 0.5)).epsilon(1e-12));

  // Triangle inequality and homogeneity.
  const auto b = random_field(g, 12, rng);
  CHECK(besov_norm(bank, a + b, 0.5) <= besov_norm(bank, a, 0.5) + besov_norm(bank, b, 0.5) + 1e-12);
  CHECK(besov_norm(bank, -2.0 * a, 0.5) == doctest::Approx(2.0 * besov_norm(bank, a, 0.5)).epsilon(1e-13));
}

TEST_CASE("Bernstein bounds on random block fields") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 64);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_field(g, 31, rng);
    for (int k = 0; k <= 3; ++k) {
      const auto blk = dyadic_block(bank, a, k);
      const double n = l2_norm(blk);
      if (n == 0.0) continue;
      const double r = l2_norm(ddx(blk)) / (std::ldexp(1.0, k) * n);
      CHECK(r >= 0.75);
      CHECK(r <= 8.0 / 3.0);
    }
  }
}

TEST_CASE("Bony parts reconstruct the product") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 64);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_field(g, 15, rng), h = random_field(g, 15, rng);
    const auto parts = bony_parts(bank, f, h);
    const auto exact = multiply(f, h, ProductMode::Exact);
    CHECK(l2_norm(parts.Tfg + parts.Tgf + parts.R - exact) <= 1e-12 * l2_norm(exact));
  }
  // A function of y alone has no dyadic blocks, so T_g f vanishes and the mean product lands in R.
  Field2D mean(g);
  for (int i = 0; i < g->ny(); ++i) mean(0, i) = Complex(std::exp(-g->vertical().node(i)), 0.0);
  const auto f = random_field(g, 10, rng);
  const auto parts = bony_parts(bank, mean, f);
  CHECK(l2_norm(parts.Tgf) == 0.0);
  CHECK(l2_norm(parts.Tfg + parts.R - multiply(mean, f)) <= 1e-12 * l2_norm(f));
}

TEST_CASE("analytic multiplier: identity, closed form, semigroup, sign") {
  const auto g = torus();
  const auto a = Field2D::single_mode(g, 4, Complex(0.5, 0.0), gaussian_profile(*g, 1.0));
  CHECK(l2_norm(analytic_multiplier(a, 0.0) - a) == 0.0);
  CHECK(l2_norm(analytic_multiplier(a, 0.25)) == doctest::Approx(std::exp(1.0) * l2_norm(a)).epsilon(1e-14));
  std::mt19937_64 rng(23);
  const auto b = random_field(g, 20, rng);
  const auto twice = analytic_multiplier(analytic_multiplier(b, 0.1), 0.2);
  CHECK(l2_norm(twice - analytic_multiplier(b, 0.3)) <= 1e-13 * l2_norm(twice));
  CHECK_THROWS_AS(analytic_multiplier(a, -1e-3), NegativeRadiusError);

  const auto bank = build_filter_bank(2.0 * pi, 64);
  const auto lhs = dyadic_block(bank, analytic_multiplier(b, 0.2), 3);
  const auto rhs = analytic_multiplier(dyadic_block(bank, b, 3), 0.2);
  CHECK(l2_norm(lhs - rhs) <= 1e-14 * l2_norm(lhs));

  AmplificationReport report;
  (void)analytic_multiplier(a, 10.0, &report);
  CHECK(report.flagged_modes == 1);
  CHECK(report.max_exponent == doctest::Approx(40.0));
}

TEST_CASE("Chemin-Lerner norms of simple time series") {
  const auto g = torus();
  const auto bank = build_filter_bank(2.0 * pi, 64);
  const auto a = Field2D::single_mode(g, 8, Complex(0.5, 0.0), gaussian_profile(*g, 1.0));
  const double b = besov_norm(bank, a, 0.5);
  std::vector<double> times;
  std::vector<Field2D> constant, linear;
  for (int n = 0; n <= 400; ++n) {
    const double t = n / 400.0;
    times.push_back(t);
    constant.push_back(a);
    linear.push_back(t * a);
  }
  CHECK(chemin_lerner_norm(bank, times, constant, TimeNorm::L2, 0.5, 0.0, 1.0) == doctest::Approx(b).epsilon(1e-12));
  CHECK(chemin_lerner_norm(bank, times, constant, TimeNorm::L1, 0.5, 0.0, 1.0) == doctest::Approx(b).epsilon(1e-12));
  CHECK(chemin_lerner_norm(bank, times, linear, TimeNorm::Linf, 0.5, 0.0, 1.0) == doctest::Approx(b).epsilon(1e-12));
  CHECK(chemin_lerner_norm(bank, times, linear, TimeNorm::L2, 0.5, 0.0, 1.0) ==
        doctest::Approx(b / std::sqrt(3.0)).epsilon(1e-5));
  const std::vector<double> zero_weight(times.size(), 0.0);
  CHECK(chemin_lerner_norm(bank, times, constant, TimeNorm::L1, 0.5, 0.0, 1.0, zero_weight) == 0.0);
  // Weighted L² with w = θ̇ ≡ 4 scales by 2.
  const std::vector<double> four(times.size(), 4.0);
  CHECK(chemin_lerner_norm(bank, times, constant, TimeNorm::L2, 0.5, 0.0, 1.0, four) ==
        doctest::Approx(2.0 * b).epsilon(1e-12));
}

TEST_CASE("Chemin-Lerner rejects block samples from another bank") {
  const auto bank = build_filter_bank(2.0 * pi, 64);
  BlockNormSeries series{{0.0, 1.0}, {{1.0}, {1.0}}};
  CHECK_THROWS_AS(chemin_lerner_norm(bank, series, TimeNorm::L2, 0.5, 0.0, 1.0), GridMismatchError);
}
