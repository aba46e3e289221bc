#include "prandtl/corrector.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "prandtl/diagnostics.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/lp_spectral.hpp"
#include "prandtl/tridiag.hpp"

namespace prandtl {

double boundary_cutoff(double y) noexcept { return smoothstep(y - 1.0); }
double boundary_cutoff_d1(double y) noexcept { return smoothstep_d1(y - 1.0); }
double boundary_cutoff_d2(double y) noexcept { return smoothstep_d2(y - 1.0); }

double cutoff_tail_integral(double y) {
  if (y >= 2.0) return 0.0;
  // s(1-t) = 1 - s(t), so ∫_1^2 (1-χ) = 1/2.
  if (y <= 1.0) return (1.0 - y) + 0.5;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate([](double x) { return 1.0 - boundary_cutoff(x); }, y, 2.0, 15, 1e-14);
}

// ---------------------------------------------------------------------------
// Outflow profiles

OutflowProfile::OutflowProfile(std::string spec, std::function<double(double)> f, std::function<double(double)> df,
                               bool identically_zero)
    : spec_(std::move(spec)), f_(std::move(f)), df_(std::move(df)), zero_(identically_zero) {}

OutflowProfile OutflowProfile::zero() {
  return OutflowProfile("zero", [](double) { return 0.0; }, [](double) { return 0.0; }, true);
}

OutflowProfile OutflowProfile::texp(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("texp rate must be positive", "f_spec");
  std::ostringstream name;
  name.precision(17);
  name << "texp:" << rate;
  return OutflowProfile(
      name.str(), [rate](double t) { return t * std::exp(-rate * t); },
      [rate](double t) { return (1.0 - rate * t) * std::exp(-rate * t); });
}

OutflowProfile OutflowProfile::inv_bracket() {
  return OutflowProfile(
      "inv_bracket", [](double t) { return 1.0 / (1.0 + t); },
      [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); });
}

OutflowProfile OutflowProfile::from_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open outflow table '" + path + "'", "f_spec");
  std::vector<double> ts;
  std::vector<double> fs;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0;
    double v = 0.0;
    if (!(row >> t)) continue;
    if (!(row >> v)) throw ConfigError("outflow table row needs two columns: " + line, "f_spec");
    if (!ts.empty() && t <= ts.back()) throw ConfigError("outflow table times must increase", "f_spec");
    ts.push_back(t);
    fs.push_back(v);
  }
  if (ts.size() < 2) throw ConfigError("outflow table needs at least two rows", "f_spec");
  auto locate = [ts](double t) -> std::ptrdiff_t {
    if (t < ts.front() || t >= ts.back()) return -1;
    return std::upper_bound(ts.begin(), ts.end(), t) - ts.begin() - 1;
  };
  auto f = [ts, fs, locate](double t) {
    if (t == ts.back()) return fs.back();
    const auto i = locate(t);
    if (i < 0) return 0.0;
    const auto k = static_cast<std::size_t>(i);
    const double a = (t - ts[k]) / (ts[k + 1] - ts[k]);
    return (1.0 - a) * fs[k] + a * fs[k + 1];
  };
  auto df = [ts, fs, locate](double t) {
    const auto i = locate(t);
    if (i < 0) return 0.0;
    const auto k = static_cast<std::size_t>(i);
    return (fs[k + 1] - fs[k]) / (ts[k + 1] - ts[k]);
  };
  return OutflowProfile("table:" + path, f, df);
}

OutflowProfile OutflowProfile::from_spec(const std::string& spec) {
  if (spec == "zero") return zero();
  if (spec == "inv_bracket") return inv_bracket();
  if (spec == "texp") return texp(1.0);
  if (spec.rfind("texp:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double rate = std::stod(spec.substr(5), &used);
      if (used != spec.size() - 5) throw std::invalid_argument("trailing");
      return texp(rate);
    } catch (const std::logic_error&) {
      throw ConfigError("malformed texp rate in '" + spec + "'", "f_spec");
    }
  }
  if (spec.rfind("table:", 0) == 0) return from_table(spec.substr(6));
  throw ConfigError("unknown outflow profile '" + spec + "'", "f_spec");
}

void OutflowProfile::validate() const {
  if (f(0.0) != 0.0) throw ConstraintError("outflow profile must satisfy f(0) = 0 (" + spec_ + ")");
}

// ---------------------------------------------------------------------------
// Sources

CutoffProfiles cutoff_profiles(const std::shared_ptr<const VerticalGrid>& grid) {
  return {VProfile::from_function(grid, boundary_cutoff), VProfile::from_function(grid, boundary_cutoff_d1),
          VProfile::from_function(grid, boundary_cutoff_d2), VProfile::from_function(grid, cutoff_tail_integral)};
}

CorrectorSources sources(const OutflowProfile& f, double t, const CutoffProfiles& cutoff) {
  const auto& grid = cutoff.chi.grid_ptr();
  CorrectorSources out{VProfile(grid), VProfile(grid), VProfile(grid)};
  if (f.identically_zero()) return out;
  const double fv = f.f(t);
  const double dfv = f.df(t);
  const double tau = 1.0 + t;
  for (int i = 0; i < out.m.size(); ++i) {
    const double y = grid->node(i);
    out.m[i] = (1.0 - cutoff.chi[i]) * dfv + fv * cutoff.chi_d2[i];
    out.M[i] = -cutoff.tail[i] * dfv + fv * cutoff.chi_d1[i];
    out.H[i] = out.m[i] + y / (2.0 * tau) * out.M[i];
  }
  return out;
}

CorrectorSources sources(const OutflowProfile& f, double t, const std::shared_ptr<const VerticalGrid>& grid) {
  return sources(f, t, cutoff_profiles(grid));
}

// ---------------------------------------------------------------------------
// Heat solver

DampedHeatSolver::DampedHeatSolver(std::shared_ptr<const VerticalGrid> grid) : grid_(std::move(grid)) {}

void DampedHeatSolver::step(VProfile& G, double dt, double c, const VProfile* source) const {
  require_same_grid(G, VProfile(grid_));
  const int n = grid_->ny();
  const double dy = grid_->dy();
  const auto solver = compact_cn_matrix(n, dy, dt, c);
  std::vector<double> mass(static_cast<std::size_t>(n));
  std::vector<double> stiff(static_cast<std::size_t>(n));
  apply_compact_mass<double>(G.values(), mass);
  apply_compact_stiffness<double>(G.values(), dy, stiff);
  std::vector<double> rhs(static_cast<std::size_t>(n));
  const double a = 1.0 / dt - 0.5 * c;
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * mass[i] + 0.5 * stiff[i];
  if (source != nullptr) {
    require_same_grid(G, *source);
    apply_compact_mass<double>(source->values(), mass);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += mass[i];
  }
  rhs.front() = 0.0;
  rhs.back() = 0.0;
  solver.solve<double>(rhs);
  std::copy(rhs.begin(), rhs.end(), G.values().begin());
}

// ---------------------------------------------------------------------------
// Reconstruction

template <typename T>
void integrating_factor_primitive(const VerticalGrid& grid, std::span<const T> g, double t, std::span<T> out) {
  const double q = 1.0 / (4.0 * (1.0 + t));
  // P_{c+1} = e^{-(y_{c+1}² - y_c²)q} P_c + ∫_{cell} e^{(y'² - y_{c+1}²)q} g dy'.
  T acc{};
  out[0] = acc;
  for (int c = 0; c + 1 < grid.ny(); ++c) {
    const double y0 = grid.node(c);
    const double y1 = grid.node(c + 1);
    const auto rule = grid.cell_rule(c);
    T cell{};
    for (int m = 0; m < VerticalGrid::kCellPoints; ++m) {
      const double ym = grid.node(rule.first + m);
      cell += (rule.w[m] * std::exp((ym * ym - y1 * y1) * q)) * g[static_cast<std::size_t>(rule.first + m)];
    }
    acc = std::exp(-(y1 * y1 - y0 * y0) * q) * acc + grid.dy() * cell;
    out[static_cast<std::size_t>(c + 1)] = acc;
  }
}

template void integrating_factor_primitive<double>(const VerticalGrid&, std::span<const double>, double,
                                                   std::span<double>);
template void integrating_factor_primitive<Complex>(const VerticalGrid&, std::span<const Complex>, double,
                                                    std::span<Complex>);

Reconstruction reconstruct_us(const VProfile& Gs, double t) {
  const auto& grid = Gs.grid();
  Reconstruction r{VProfile(Gs.grid_ptr()), VProfile(Gs.grid_ptr())};
  integrating_factor_primitive<double>(grid, Gs.values(), t, r.psis.values());
  const double tau = 1.0 + t;
  for (int i = 0; i < grid.ny(); ++i) r.us[i] = Gs[i] - grid.node(i) / (2.0 * tau) * r.psis[i];
  return r;
}

// ---------------------------------------------------------------------------
// Trajectory

CorrectorTrajectory::CorrectorTrajectory(std::shared_ptr<const VerticalGrid> grid, OutflowProfile f, double epsilon,
                                         double dt, double t_final, std::vector<double> times,
                                         std::vector<VProfile> snapshots)
    : grid_(std::move(grid)),
      f_(std::move(f)),
      epsilon_(epsilon),
      dt_(dt),
      t_final_(t_final),
      times_(std::move(times)),
      snapshots_(std::move(snapshots)) {
  if (times_.size() != snapshots_.size() || times_.empty()) {
    throw ConfigError("corrector trajectory needs matching, nonempty time and snapshot lists", "corrector");
  }
}

VProfile CorrectorTrajectory::Gs_at(double t) const {
  const double slack = 1e-9 * std::max(1.0, t_final_);
  if (t < times_.front() - slack || t > times_.back() + slack) {
    throw ConfigError("time lies outside the corrector horizon", "t_final");
  }
  if (t <= times_.front()) return snapshots_.front();
  if (t >= times_.back()) return snapshots_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin() - 1);
  const double a = (t - times_[k]) / (times_[k + 1] - times_[k]);
  VProfile out(grid_);
  for (int i = 0; i < out.size(); ++i) out[i] = (1.0 - a) * snapshots_[k][i] + a * snapshots_[k + 1][i];
  return out;
}

CorrectorState CorrectorTrajectory::state_at(double t) const {
  auto G = Gs_at(t);
  auto rec = reconstruct_us(G, t);
  auto dus = ddy(rec.us);
  return {t, std::move(G), std::move(rec.psis), std::move(rec.us), std::move(dus)};
}

CorrectorTrajectory solve_Gs(const OutflowProfile& f, double epsilon, double t_final, double dt,
                             std::shared_ptr<const VerticalGrid> grid, double store_spacing,
                             const CorrectorObserver& observer) {
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw ConfigError("corrector needs dt > 0 and T >= 0", "dt");
  const long steps = std::max(1L, std::lround(t_final / dt));
  const double h = t_final > 0.0 ? t_final / static_cast<double>(steps) : dt;
  const long stride = store_spacing > h ? std::max(1L, std::lround(store_spacing / h)) : 1L;

  const auto cutoff = cutoff_profiles(grid);
  DampedHeatSolver solver(grid);
  VProfile G(grid);
  std::vector<double> times{0.0};
  std::vector<VProfile> snaps{G};
  const bool forced = epsilon != 0.0 && !f.identically_zero();
  for (long n = 0; n < steps && t_final > 0.0; ++n) {
    const double t0 = static_cast<double>(n) * h;
    const double t1 = static_cast<double>(n + 1) * h;
    const double tm = 0.5 * (t0 + t1);
    if (forced) {
      auto src = sources(f, tm, cutoff).H;
      src *= epsilon;
      if (observer) {
        VProfile before = G;
        solver.step(G, h, 1.0 / (1.0 + tm), &src);
        observer(t0, before, t1, G);
      } else {
        solver.step(G, h, 1.0 / (1.0 + tm), &src);
      }
    } else if (observer) {
      observer(t0, G, t1, G);
    }
    if ((n + 1) % stride == 0 || n + 1 == steps) {
      times.push_back(t1);
      snaps.push_back(G);
    }
  }
  return CorrectorTrajectory(std::move(grid), f, epsilon, h, t_final, std::move(times), std::move(snaps));
}

// ---------------------------------------------------------------------------
// C_f

namespace {

double integrate_piece(const std::function<double(double)>& g, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(g, a, b, 20, 1e-14);
}

// ∫_0^∞ g over [0,1], [1,2], [2,4], ...
double half_line_integral(const std::function<double(double)>& g, const char* name) {
  constexpr int kMinDoublings = 4;
  constexpr int kTestDoublings = 40;
  constexpr int kMaxDoublings = 62;
  double total = integrate_piece(g, 0.0, 1.0);
  bool tail_ok = false;
  for (int k = 0; k < kMaxDoublings; ++k) {
    const double a = std::ldexp(1.0, k);
    const double piece = integrate_piece(g, a, 2.0 * a);
    if (!std::isfinite(piece)) break;
    total += piece;
    if (k >= kMinDoublings && std::abs(piece) <= 1e-3 * std::abs(total)) tail_ok = true;
    if (tail_ok && std::abs(piece) <= 1e-17 * std::abs(total)) return total;
    if (!tail_ok && k >= kTestDoublings) break;
  }
  if (tail_ok) return total;
  throw DivergenceError(std::string("C_f term ") + name + " diverges: tail over [T, 2T] does not vanish");
}

}  // namespace

CfTerms cf_terms(const OutflowProfile& f) {
  CfTerms out;
  if (f.identically_zero()) return out;
  out.first = half_line_integral(
      [&](double t) { return std::pow(1.0 + t, 1.25) * (std::abs(f.f(t)) + std::abs(f.df(t))); },
      "int <t>^{5/4}(|f|+|f'|)");
  out.second = half_line_integral(
      [&](double t) {
        const double a = f.f(t);
        const double b = f.df(t);
        return std::pow(1.0 + t, 3.5) * (a * a + b * b);
      },
      "int <t>^{7/2}(f^2+f'^2)");
  out.value = out.first + std::sqrt(out.second);
  return out;
}

double cf_constant(const OutflowProfile& f) { return cf_terms(f).value; }

// ---------------------------------------------------------------------------
// Decay report

namespace {

std::vector<double> running_trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t n = 1; n < t.size(); ++n) out[n] = out[n - 1] + 0.5 * (t[n] - t[n - 1]) * (v[n] + v[n - 1]);
  return out;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto k = static_cast<std::size_t>(it - t.begin() - 1);
  const double a = (x - t[k]) / (t[k + 1] - t[k]);
  return (1.0 - a) * v[k] + a * v[k + 1];
}

DyadicWindows dyadic_windows(const std::vector<double>& t, const std::vector<double>& running) {
  DyadicWindows w;
  const double horizon = t.back() * (1.0 + 1e-12);
  for (int j = 0; std::ldexp(1.0, j + 1) <= horizon; ++j) {
    const double a = std::ldexp(1.0, j);
    w.starts.push_back(a);
    w.integrals.push_back(interpolate(t, running, 2.0 * a) - interpolate(t, running, a));
  }
  for (std::size_t j = 0; j + 1 < w.integrals.size(); ++j) {
    w.ratios.push_back(w.integrals[j] > 0.0 ? w.integrals[j + 1] / w.integrals[j] : 0.0);
  }
  return w;
}

}  // namespace

CorrectorDecayReport corrector_decay_report(const CorrectorTrajectory& traj, double fit_lo, double fit_hi) {
  CorrectorDecayReport r;
  const auto& grid = traj.grid_ptr();
  const auto cutoff = cutoff_profiles(grid);
  r.times = traj.times();
  const std::size_t n = r.times.size();
  r.weighted_Gs.resize(n);
  r.dGs_integrand.resize(n);
  std::array<std::vector<double>, 2> us_integrand{std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> source_integrand(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double t = r.times[k];
    const double tau = 1.0 + t;
    const auto& G = traj.snapshots()[k];
    const auto w = gaussian_weight(grid, t, 1.0);
    r.weighted_Gs[k] = weighted_l2(G, w);
    r.dGs_integrand[k] = std::pow(tau, 0.25) * weighted_l2(ddy(G), w);
    const auto rec = reconstruct_us(G, t);
    const auto dus = ddy(rec.us);
    for (std::size_t g = 0; g < 2; ++g) {
      us_integrand[g][k] = std::pow(tau, 0.25) * weighted_l2(dus, gaussian_weight(grid, t, r.us_gammas[g]));
    }
    r.sup_weighted_Gs = std::max(r.sup_weighted_Gs, std::pow(tau, 1.25) * r.weighted_Gs[k]);
    source_integrand[k] = std::pow(tau, 1.25) * l2_norm(sources(traj.profile(), t, cutoff).H);
  }

  r.running_integral = running_trapezoid(r.times, r.dGs_integrand);
  r.total_integral = r.running_integral.back();
  r.tail_decrement = r.total_integral - interpolate(r.times, r.running_integral, 0.5 * r.times.back());
  r.windows = dyadic_windows(r.times, r.running_integral);
  for (std::size_t g = 0; g < 2; ++g) {
    r.us_running[g] = running_trapezoid(r.times, us_integrand[g]);
    r.us_total[g] = r.us_running[g].back();
    r.us_windows[g] = dyadic_windows(r.times, r.us_running[g]);
  }

  r.source_l1 = running_trapezoid(r.times, source_integrand).back();
  const double scale = std::abs(traj.epsilon()) * r.source_l1;
  r.lemma_ratio = scale > 0.0 ? r.sup_weighted_Gs / scale : 0.0;

  r.fit_lo = fit_lo >= 0.0 ? fit_lo : 0.1 * r.times.back();
  r.fit_hi = fit_hi >= 0.0 ? fit_hi : r.times.back();
  try {
    const auto fit = decay_fit(r.times, r.weighted_Gs, r.fit_lo, r.fit_hi);
    r.fit_defined = true;
    r.fitted_exponent = fit.exponent;
    r.fit_r2 = fit.r2;
  } catch (const Error&) {
    r.fit_defined = false;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Energy inequality

EnergyCheckReport energy_inequality_check(const OutflowProfile& f, double epsilon, double t_final, double dt,
                                          std::shared_ptr<const VerticalGrid> grid) {
  EnergyCheckReport rep;
  const auto cutoff = cutoff_profiles(grid);
  bool first = true;
  auto observer = [&](double t0, const VProfile& G0, double t1, const VProfile& G1) {
    const double h = t1 - t0;
    const double tm = 0.5 * (t0 + t1);
    const auto w0 = gaussian_weight(grid, t0, 1.0);
    const auto w1 = gaussian_weight(grid, t1, 1.0);
    const auto wm = gaussian_weight(grid, tm, 1.0);
    const double e0 = std::pow(weighted_l2(G0, w0), 2);
    const double e1 = std::pow(weighted_l2(G1, w1), 2);
    VProfile Gm = 0.5 * (G0 + G1);
    const double em = weighted_l2(Gm, wm);
    const double dissipation = std::pow(weighted_l2(ddy(Gm), wm), 2);
    const double damping = 2.0 / (1.0 + tm) * em * em;
    const double forcing = 2.0 * std::abs(epsilon) * em * weighted_l2(sources(f, tm, cutoff).H, wm);
    const double rate = (e1 - e0) / h;
    const double violation = rate + dissipation + damping - forcing;
    const double scale = std::abs(rate) + dissipation + damping + forcing;
    ++rep.steps;
    const double scaled = scale > 0.0 ? violation / (h * h * scale) : 0.0;
    if (first || violation > rep.max_violation) {
      rep.max_violation = violation;
      rep.worst_time = tm;
    }
    if (first || scaled > rep.max_scaled_violation) rep.max_scaled_violation = scaled;
    first = false;
  };
  solve_Gs(f, epsilon, t_final, dt, grid, t_final, observer);
  return rep;
}

}  // namespace prandtl
