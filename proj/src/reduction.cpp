#include "prandtl/reduction.hpp"

#include <cmath>
#include <sstream>

#include "prandtl/corrector.hpp"
#include "prandtl/errors.hpp"

namespace prandtl {

double zero_integral_residual(const Field2D& u) {
  const auto integrals = integrate_y(u);
  const auto& g = u.grid();
  double acc = 0.0;
  for (int j = 0; j < g.modes(); ++j) acc += g.mode_multiplicity(j) * std::norm(integrals[static_cast<std::size_t>(j)]);
  return std::sqrt(g.length() * acc);
}

double wall_residual(const Field2D& u) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (int j = 0; j < g.modes(); ++j) acc += g.mode_multiplicity(j) * std::abs(u(j, 0));
  return acc;
}

Field2D recover_phi_unchecked(const Field2D& u, std::vector<TailWarning>* warnings) {
  auto phi = int_y_to_inf(u, warnings);
  phi *= -1.0;
  return phi;
}

Field2D recover_phi(const Field2D& u, double tolerance) {
  auto phi = recover_phi_unchecked(u);
  const double drift = zero_integral_residual(u);
  const double scale = l2_norm(u);
  if (drift > 10.0 * tolerance * scale) {
    std::ostringstream os;
    os << "zero vertical-integral constraint drifted: ||phi(.,0)|| = " << drift << " exceeds 10 x " << tolerance
       << " x ||u|| = " << 10.0 * tolerance * scale;
    throw ConstraintError(os.str());
  }
  return phi;
}

Field2D recover_v(const Field2D& u) {
  auto v = int_0_to_y(ddx(u));
  v *= -1.0;
  return v;
}

GoodUnknown good_unknown(const Field2D& u, const Field2D& phi, double t) {
  require_same_grid(u, phi);
  const double tau = 1.0 + t;
  const auto& vg = u.grid().vertical_ptr();
  const auto y_over = VProfile::from_function(vg, [tau](double y) { return y / (2.0 * tau); });
  Field2D G = u + y_over * phi;
  Field2D g = ddy(G);
  Field2D ge = ddy(u) + y_over * u;
  Field2D half_phi = phi;
  half_phi *= 1.0 / (2.0 * tau);
  ge += half_phi;
  return {std::move(G), std::move(g), std::move(ge)};
}

Field2D phi_from_good_unknown(const Field2D& G, double t) {
  Field2D phi(G.grid_ptr());
  for (int j = 0; j < G.modes(); ++j) {
    integrating_factor_primitive<Complex>(G.grid().vertical(), G.mode(j), t, phi.mode(j));
  }
  return phi;
}

InitialDataReport validate_initial_data(const DyadicFilterBank& bank, const Field2D& u0, double delta,
                                        const InitialDataTolerances& tol) {
  InitialDataReport r;
  const double norm = l2_norm(u0);
  const double peak = u0.max_abs_coefficient();

  r.wall_residual = wall_residual(u0);
  r.zero_integral_residual = norm > 0.0 ? zero_integral_residual(u0) / norm : zero_integral_residual(u0);
  {
    Field2D mean(u0.grid_ptr());
    std::copy(u0.mode(0).begin(), u0.mode(0).end(), mean.mode(0).begin());
    r.mean_residual = norm > 0.0 ? l2_norm(mean) / norm : 0.0;
  }

  if (r.wall_residual > tol.wall * std::max(1.0, peak)) r.violations.emplace_back("boundary value u0(x,0) = 0");
  if (r.zero_integral_residual > tol.zero_integral) r.violations.emplace_back("zero vertical integral");
  if (r.mean_residual > tol.mean) r.violations.emplace_back("zero x-mean");
  if (!u0.is_finite()) r.violations.emplace_back("finite data");

  if (!(delta >= 0.0)) {
    r.violations.emplace_back("nonnegative analytic radius delta");
    return r;
  }
  const auto phi = recover_phi_unchecked(u0);
  const auto G = good_unknown(u0, phi, 0.0).G;
  const auto w = gaussian_weight(u0.grid().vertical_ptr(), 0.0, 1.0);
  r.weighted_u_norm = besov_norm(bank, analytic_multiplier(u0, delta), 0.5, &w);
  r.weighted_phi_norm = besov_norm(bank, analytic_multiplier(phi, delta), 0.5, &w);
  r.weighted_G_norm = besov_norm(bank, analytic_multiplier(G, delta), 0.5, &w);
  if (!std::isfinite(r.weighted_u_norm) || !std::isfinite(r.weighted_phi_norm)) {
    r.violations.emplace_back("finite weighted analytic norm of (phi0, u0)");
  }
  return r;
}

}  // namespace prandtl
