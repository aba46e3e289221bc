#include "prandtl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prandtl/errors.hpp"
#include "prandtl/reduction.hpp"

namespace prandtl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio_or_sentinel(double num, double den) {
  if (den > 0.0) return num / den;
  if (num == 0.0) return kNaN;
  return std::numeric_limits<double>::infinity();
}

// max_k num[k]/den[k], NaN when every pair is 0/0.
double max_block_ratio(const std::vector<double>& num, const std::vector<double>& den) {
  double best = kNaN;
  for (std::size_t k = 0; k < num.size(); ++k) {
    const double r = ratio_or_sentinel(num[k], den[k]);
    if (std::isnan(r)) continue;
    best = std::isnan(best) ? r : std::max(best, r);
  }
  return best;
}

// sup_y ‖w Δ_k a(·, y)‖_{L²_h} per block.
std::vector<double> block_sup_norms(const DyadicFilterBank& bank, const Field2D& a, const VProfile& w) {
  const auto& g = a.grid();
  std::vector<double> out(static_cast<std::size_t>(bank.block_count()), 0.0);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    double sup = 0.0;
    for (int i = 0; i < a.ny(); ++i) {
      double acc = 0.0;
      for (int j = 1; j < g.modes(); ++j) {
        const double bw = bank.block_weight(k, j);
        if (bw == 0.0) continue;
        acc += g.mode_multiplicity(j) * bw * bw * std::norm(a(j, i));
      }
      sup = std::max(sup, w[i] * std::sqrt(g.length() * acc));
    }
    out[static_cast<std::size_t>(k - bank.k_min())] = sup;
  }
  return out;
}

}  // namespace

DecayFit decay_fit(std::span<const double> t, std::span<const double> values, double lo, double hi) {
  if (t.size() != values.size()) throw ConfigError("decay fit needs matching time and value series", "series");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo || t[i] > hi) continue;
    if (!(values[i] > 0.0)) {
      std::ostringstream os;
      os << "decay fit needs positive values; got " << values[i] << " at t = " << t[i];
      throw ConstraintError(os.str());
    }
    const double x = std::log1p(t[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < 10) {
    std::ostringstream os;
    os << "decay fit needs at least 10 samples in [" << lo << ", " << hi << "], found " << n;
    throw ConfigError(os.str(), "window");
  }
  const double mx = sx / n;
  const double my = sy / n;
  const double cxx = sxx / n - mx * mx;
  const double cxy = sxy / n - mx * my;
  const double cyy = syy / n - my * my;
  if (!(cxx > 0.0)) throw ConfigError("decay fit window has no spread in time", "window");
  DecayFit fit;
  fit.samples = n;
  fit.exponent = cxy / cxx;
  fit.r2 = cyy > 1e-300 * std::max(1.0, my * my) ? std::clamp(cxy * cxy / (cxx * cyy), 0.0, 1.0) : 1.0;
  return fit;
}

double weighted_analytic_norm(const DyadicFilterBank& bank, const Field2D& a, double t, double gamma, double radius,
                              AmplificationReport* report) {
  const auto w = gaussian_weight(a.grid().vertical_ptr(), t, gamma);
  return besov_norm(bank, analytic_multiplier(a, radius, report), 0.5, &w);
}

std::vector<double> weighted_analytic_blocks(const DyadicFilterBank& bank, const Field2D& a, double t, double gamma,
                                             double radius) {
  const auto w = gaussian_weight(a.grid().vertical_ptr(), t, gamma);
  return block_norms(bank, analytic_multiplier(a, radius), &w);
}

ThetaComponents theta_integrand(const DyadicFilterBank& bank, const CorrectorState* corrector, const Field2D& G,
                                double t, double f_value, double epsilon, double radius) {
  const auto& vg = G.grid().vertical_ptr();
  const auto w = gaussian_weight(vg, t, 1.0);
  const double scale = std::pow(1.0 + t, 0.25);
  ThetaComponents c;
  if (corrector != nullptr) c.corrector = scale * weighted_l2(ddy(corrector->Gs), w);
  if (epsilon != 0.0 && f_value != 0.0) {
    const auto chi1 = VProfile::from_function(vg, boundary_cutoff_d1);
    c.outflow = scale * epsilon * f_value * weighted_l2(chi1, w);
  }
  c.bulk = scale * weighted_analytic_norm(bank, ddy(G), t, 1.0, std::max(radius, 0.0));
  return c;
}

RadiusTracker::RadiusTracker(double delta, double lambda) : delta_(delta), lambda_(lambda) {
  if (!(delta >= 0.0)) throw ConfigError("initial analytic radius must be nonnegative", "delta");
  if (!(lambda > 0.0)) throw ConfigError("radius gain must be positive", "lambda");
}

void RadiusTracker::start(double t0, const ThetaComponents& rate) {
  times_.assign(1, t0);
  rates_.assign(1, rate);
  thetas_.assign(1, 0.0);
  theta_ = 0.0;
}

void RadiusTracker::advance(double t_next, const ThetaComponents& rate) {
  if (times_.empty()) throw ConfigError("radius tracker advanced before start", "theta");
  const double h = t_next - times_.back();
  theta_ += 0.5 * h * (rates_.back().total() + rate.total());
  times_.push_back(t_next);
  rates_.push_back(rate);
  thetas_.push_back(theta_);
}

double RadiusTracker::component_integral(int which, double t) const {
  auto pick = [which](const ThetaComponents& c) {
    return which == 0 ? c.corrector : which == 1 ? c.outflow : c.bulk;
  };
  double acc = 0.0;
  for (std::size_t n = 1; n < times_.size() && times_[n] <= t; ++n) {
    acc += 0.5 * (times_[n] - times_[n - 1]) * (pick(rates_[n - 1]) + pick(rates_[n]));
  }
  return acc;
}

void theta_advance(RadiusTracker& tracker, const DyadicFilterBank& bank, double t_next,
                   const CorrectorState* corrector, const Field2D& G, double f_value, double epsilon) {
  const auto rate = theta_integrand(bank, corrector, G, t_next, f_value, epsilon, tracker.radius());
  if (!tracker.started()) {
    tracker.start(t_next, rate);
    return;
  }
  tracker.advance(t_next, rate);
}

RelationReport relation_checks(const DyadicFilterBank& bank, const Field2D& u, const Field2D& phi, const Field2D& G,
                               double t, double radius) {
  RelationReport rep;
  const double tau = 1.0 + t;
  const double r = std::max(radius, 0.0);
  const auto& vg = u.grid().vertical_ptr();
  const auto dyu = ddy(u);
  const auto dyG = ddy(G);
  const auto y = VProfile::from_function(vg, [](double s) { return s; });
  const auto dy_yphi = ddy(y * phi);

  const auto G_blocks = weighted_analytic_blocks(bank, G, t, 1.0, r);
  const auto dyG_blocks = weighted_analytic_blocks(bank, dyG, t, 1.0, r);
  for (std::size_t n = 0; n < rep.gammas.size(); ++n) {
    const double gamma = rep.gammas[n];
    rep.u_vs_G[n] = max_block_ratio(weighted_analytic_blocks(bank, u, t, gamma, r), G_blocks);
    rep.dyu_vs_dyG[n] = max_block_ratio(weighted_analytic_blocks(bank, dyu, t, gamma, r), dyG_blocks);
    const auto w = gaussian_weight(vg, t, gamma);
    const auto yphi_r = analytic_multiplier(dy_yphi, r);
    auto l2 = block_norms(bank, yphi_r, &w);
    const auto sup = block_sup_norms(bank, yphi_r, w);
    for (std::size_t k = 0; k < l2.size(); ++k) l2[k] = l2[k] / tau + sup[k] * std::pow(tau, -0.75);
    rep.yphi_vs_dyG[n] = max_block_ratio(l2, dyG_blocks);
  }

  const auto phi_G = phi_from_good_unknown(G, t);
  rep.phi_reconstruction_error = ratio_or_sentinel(l2_norm(phi_G - phi), l2_norm(phi));

  // ∂_y u = -(y/2⟨t⟩)G + ∂_y G + (-1/(2⟨t⟩) + y²/(4⟨t⟩²)) φ_G
  const auto a = VProfile::from_function(vg, [tau](double s) { return -s / (2.0 * tau); });
  const auto b = VProfile::from_function(vg, [tau](double s) { return -1.0 / (2.0 * tau) + s * s / (4.0 * tau * tau); });
  const Field2D dyu_G = a * G + dyG + b * phi_G;
  rep.dyu_reconstruction_error = ratio_or_sentinel(l2_norm(dyu_G - dyu), l2_norm(dyu));

  const auto gu = good_unknown(u, phi, t);
  const auto yhalf = VProfile::from_function(vg, [tau](double s) { return s / (2.0 * tau); });
  const Field2D frakg = dyu + yhalf * u;
  Field2D half_phi = phi;
  half_phi *= 1.0 / (2.0 * tau);
  const double lhs = weighted_analytic_norm(bank, gu.g_expanded - frakg, t, 1.0, r);
  const double rhs = weighted_analytic_norm(bank, half_phi, t, 1.0, r);
  rep.g_identity_error = std::abs(lhs - rhs);
  return rep;
}

bool DiagnosticsRecord::finite_and_nonnegative() const noexcept {
  for (double v : norms) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  return ok(theta) && ok(theta_rate.corrector) && ok(theta_rate.bulk) && std::isfinite(theta_rate.outflow) &&
         ok(zero_integral_residual) && ok(wall_residual) && ok(mean_mode) && ok(tail_indicator);
}

DiagnosticsRecord make_record(const DyadicFilterBank& bank, const Field2D& u, double t, double theta, double radius,
                              double delta, const ThetaComponents& rate, bool with_relations) {
  DiagnosticsRecord rec;
  rec.t = t;
  rec.theta = theta;
  rec.radius = radius;
  rec.theta_rate = rate;
  const double r = std::max(radius, 0.0);
  const double tau = 1.0 + t;
  const auto& vg = u.grid().vertical_ptr();

  const auto phi = recover_phi_unchecked(u);
  const auto gu = good_unknown(u, phi, t);
  const auto dyu = ddy(u);
  const auto yhalf = VProfile::from_function(vg, [tau](double s) { return s / (2.0 * tau); });
  const Field2D frakg = dyu + yhalf * u;

  const auto w1 = gaussian_weight(vg, t, 1.0);
  AmplificationReport amp;
  const auto u_r = analytic_multiplier(u, r, &amp);
  const auto dyu_r = analytic_multiplier(dyu, r);
  const auto G_r = analytic_multiplier(gu.G, r);
  const auto dyG_r = analytic_multiplier(ddy(gu.G), r);
  rec.amplification_flags = amp.flagged_modes;

  rec.u_blocks = block_norms(bank, u_r, &w1);
  rec.dyu_blocks = block_norms(bank, dyu_r, &w1);
  rec.G_blocks = block_norms(bank, G_r, &w1);
  rec.dyG_blocks = block_norms(bank, dyG_r, &w1);

  const auto w050 = gaussian_weight(vg, t, 0.5);
  const auto w075 = gaussian_weight(vg, t, 0.75);
  const double half = 0.5 * delta;
  auto& n = rec.norms;
  n[0] = besov_from_blocks(bank, rec.u_blocks, 0.5);
  n[1] = besov_norm(bank, u_r, 0.5, &w050);
  n[2] = besov_norm(bank, u_r, 0.5, &w075);
  n[3] = besov_from_blocks(bank, rec.dyu_blocks, 0.5);
  n[4] = besov_from_blocks(bank, rec.G_blocks, 0.5);
  n[5] = besov_from_blocks(bank, rec.dyG_blocks, 0.5);
  n[6] = weighted_analytic_norm(bank, frakg, t, 1.0, r);
  n[7] = weighted_analytic_norm(bank, u, t, 1.0, half);
  n[8] = weighted_analytic_norm(bank, gu.G, t, 1.0, half);
  n[9] = weighted_analytic_norm(bank, dyu, t, 1.0, half);
  n[10] = l2_norm(u);

  const double norm_u = n[10];
  rec.zero_integral_residual = ratio_or_sentinel(zero_integral_residual(u), norm_u);
  if (std::isnan(rec.zero_integral_residual)) rec.zero_integral_residual = 0.0;
  rec.wall_residual = wall_residual(u);
  rec.mean_mode = std::sqrt(u.grid().length() * mode_energies(u)[0]);

  const double cut = 0.9 * vg->ymax();
  VProfile top = w1;
  for (int i = 0; i < top.size(); ++i) {
    if (vg->node(i) < cut) top[i] = 0.0;
  }
  const double total = weighted_l2(u_r, w1);
  rec.tail_indicator = total > 0.0 ? weighted_l2(u_r, top) / total : 0.0;

  if (with_relations) rec.relations = relation_checks(bank, u, phi, gu.G, t, r);
  return rec;
}

namespace {

DecayFit try_fit(const std::vector<double>& t, const std::vector<double>& v, double lo, double hi, bool& ok) {
  try {
    return decay_fit(t, v, lo, hi);
  } catch (const Error&) {
    ok = false;
    return {};
  }
}

double sup_ratio(double num, double den) {
  if (std::isnan(num)) return num;
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

TheoremReport theorem_monitor(const DyadicFilterBank& bank, const std::vector<DiagnosticsRecord>& records,
                              const InitialNorms& initial, double delta, double lambda, double fit_lo,
                              double fit_hi) {
  TheoremReport rep;
  if (records.empty()) return rep;
  const double T = records.back().t;
  rep.fit_lo = fit_lo >= 0.0 ? fit_lo : T / 10.0;
  rep.fit_hi = fit_hi >= 0.0 ? fit_hi : T;

  std::vector<double> t;
  std::array<std::vector<double>, kNormKeys.size()> series;
  for (const auto& r : records) {
    t.push_back(r.t);
    for (std::size_t k = 0; k < kNormKeys.size(); ++k) series[k].push_back(r.norms[k]);
    rep.max_theta = std::max(rep.max_theta, r.theta);
  }
  rep.breach = rep.max_theta >= delta / lambda;

  bool ok = true;
  rep.u_fit = try_fit(t, series[0], rep.fit_lo, rep.fit_hi, ok);
  rep.u_g050_fit = try_fit(t, series[1], rep.fit_lo, rep.fit_hi, ok);
  rep.u_g075_fit = try_fit(t, series[2], rep.fit_lo, rep.fit_hi, ok);
  rep.G_fit = try_fit(t, series[4], rep.fit_lo, rep.fit_hi, ok);
  rep.frakg_fit = try_fit(t, series[6], rep.fit_lo, rep.fit_hi, ok);
  rep.exponents_defined = ok;

  BlockNormSeries u_series{t, {}};
  BlockNormSeries dyu_series{t, {}};
  for (const auto& r : records) {
    u_series.norms.push_back(r.u_blocks);
    dyu_series.norms.push_back(r.dyu_blocks);
  }
  const double t0 = records.front().t;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // A run stopped at its first record has no time interval for the Chemin-Lerner norms.
  const bool has_interval = records.size() >= 2 && T > t0;
  const double cl_u = has_interval ? chemin_lerner_norm(bank, u_series, TimeNorm::Linf, 0.5, t0, T) : nan;
  const double cl_dyu = has_interval ? chemin_lerner_norm(bank, dyu_series, TimeNorm::L2, 0.5, t0, T) : nan;

  double sup_u = 0.0, sup_u_half = 0.0, sup_u_decay = 0.0, sup_u_decay_r = 0.0, sup_G = 0.0, sup_G_r = 0.0;
  double sup_g050 = 0.0, sup_g075 = 0.0;
  double l2_dyu_half = 0.0;
  bool half_valid = true;
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& r = records[n];
    const double tau = 1.0 + r.t;
    sup_u = std::max(sup_u, r.norms[0]);
    sup_u_decay_r = std::max(sup_u_decay_r, std::pow(tau, 0.75) * r.norms[0]);
    sup_G_r = std::max(sup_G_r, std::pow(tau, 1.25) * r.norms[4]);
    sup_g050 = std::max(sup_g050, std::pow(tau, 1.25) * r.norms[1]);
    sup_g075 = std::max(sup_g075, std::pow(tau, 1.25) * r.norms[2]);
    if (r.radius < 0.5 * delta) half_valid = false;
    sup_u_half = std::max(sup_u_half, r.norms[7]);
    sup_u_decay = std::max(sup_u_decay, std::pow(tau, 0.75) * r.norms[7]);
    sup_G = std::max(sup_G, std::pow(tau, 1.25) * r.norms[8]);
    if (n > 0) {
      const auto& p = records[n - 1];
      l2_dyu_half += 0.5 * (r.t - p.t) * (r.norms[9] * r.norms[9] + p.norms[9] * p.norms[9]);
    }
    if (r.t >= 1.0) {
      rep.relation_sup_u_vs_G = std::max(rep.relation_sup_u_vs_G, std::isnan(r.relations.u_vs_G[1]) ? 0.0 : r.relations.u_vs_G[1]);
      rep.relation_sup_dyu_vs_dyG =
          std::max(rep.relation_sup_dyu_vs_dyG, std::isnan(r.relations.dyu_vs_dyG[1]) ? 0.0 : r.relations.dyu_vs_dyG[1]);
    }
  }
  rep.constants = {
      {"u_Linf_B_evolving", sup_ratio(sup_u, initial.u0)},
      {"u_CL_Linf_plus_dyu_CL_L2", sup_ratio(cl_u + cl_dyu, initial.u0)},
      {"u_Linf_plus_dyu_L2_half_radius", half_valid ? sup_ratio(sup_u_half + std::sqrt(l2_dyu_half), initial.u0) : nan},
      {"t34_u_half_radius", half_valid ? sup_ratio(sup_u_decay, initial.phi_u0) : nan},
      {"t34_u_evolving", sup_ratio(sup_u_decay_r, initial.phi_u0)},
      {"t54_G_half_radius", half_valid ? sup_ratio(sup_G, initial.G0) : nan},
      {"t54_G_evolving", sup_ratio(sup_G_r, initial.G0)},
      {"t54_u_gamma050", sup_ratio(sup_g050, initial.G0)},
      {"t54_u_gamma075", sup_ratio(sup_g075, initial.G0)},
  };
  return rep;
}

}  // namespace prandtl
