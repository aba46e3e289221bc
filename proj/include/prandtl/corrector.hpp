#pragma once

// Shear corrector driven by a flat outflow εf(t): sources m, M, H, the damped
// heat problem for Gˢ, and reconstruction of ψˢ, uˢ from Gˢ.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "prandtl/field.hpp"

namespace prandtl {

/// χ(y): 0 for y <= 1, 1 for y >= 2, smooth monotone in between.
double boundary_cutoff(double y) noexcept;
double boundary_cutoff_d1(double y) noexcept;
double boundary_cutoff_d2(double y) noexcept;
/// ∫_y^∞ (1 - χ(y')) dy'.
double cutoff_tail_integral(double y);

/// f(t) with its derivative. Specs: "zero", "texp[:rate]" (t e^{-rate t}),
/// "inv_bracket" (1/(1+t)), "table:path" (two columns t, f; piecewise linear, zero past the end).
class OutflowProfile {
 public:
  OutflowProfile(std::string spec, std::function<double(double)> f, std::function<double(double)> df,
                 bool identically_zero = false);

  static OutflowProfile zero();
  static OutflowProfile texp(double rate = 1.0);
  static OutflowProfile inv_bracket();
  static OutflowProfile from_table(const std::string& path);
  static OutflowProfile from_spec(const std::string& spec);

  double f(double t) const { return f_(t); }
  double df(double t) const { return df_(t); }
  const std::string& spec() const noexcept { return spec_; }
  bool identically_zero() const noexcept { return zero_; }

  /// Throws ConstraintError unless f(0) = 0.
  void validate() const;

 private:
  std::string spec_;
  std::function<double(double)> f_;
  std::function<double(double)> df_;
  bool zero_;
};

/// χ, χ', χ'' and ∫_y^∞(1-χ) sampled on a vertical grid.
struct CutoffProfiles {
  VProfile chi;
  VProfile chi_d1;
  VProfile chi_d2;
  VProfile tail;
};

CutoffProfiles cutoff_profiles(const std::shared_ptr<const VerticalGrid>& grid);

struct CorrectorSources {
  VProfile m;  ///< (1-χ)f' + fχ''
  VProfile M;  ///< -∫_y^∞(1-χ) f' + fχ'
  VProfile H;  ///< m + y/(2⟨t⟩) M
};

CorrectorSources sources(const OutflowProfile& f, double t, const CutoffProfiles& cutoff);
CorrectorSources sources(const OutflowProfile& f, double t, const std::shared_ptr<const VerticalGrid>& grid);

/// Crank-Nicolson for ∂_t G = ∂_y² G - c G + s with the compact fourth-order ∂_y²
/// and homogeneous Dirichlet rows at y = 0 and y = Ymax.
class DampedHeatSolver {
 public:
  explicit DampedHeatSolver(std::shared_ptr<const VerticalGrid> grid);

  /// Advances G by dt; c and the optional source are taken at the step midpoint.
  void step(VProfile& G, double dt, double c, const VProfile* source) const;

 private:
  std::shared_ptr<const VerticalGrid> grid_;
};

struct CorrectorState {
  double t = 0.0;
  VProfile Gs;
  VProfile psis;
  VProfile us;
  VProfile dus;  ///< ∂_y uˢ
};

/// out(y) = e^{-y²/4⟨t⟩} ∫_0^y e^{y'²/4⟨t⟩} g(y') dy', accumulated cell by cell so no
/// exponential is ever formed at full height.
template <typename T>
void integrating_factor_primitive(const VerticalGrid& grid, std::span<const T> g, double t, std::span<T> out);

/// ψˢ = e^{-y²/4⟨t⟩} ∫_0^y e^{y'²/4⟨t⟩} Gˢ dy' and uˢ = Gˢ - y/(2⟨t⟩) ψˢ (which equals ∂_y ψˢ).
struct Reconstruction {
  VProfile psis;
  VProfile us;
};

Reconstruction reconstruct_us(const VProfile& Gs, double t);

/// Gˢ snapshots on [0, T] with linear interpolation in time.
class CorrectorTrajectory {
 public:
  CorrectorTrajectory(std::shared_ptr<const VerticalGrid> grid, OutflowProfile f, double epsilon, double dt,
                      double t_final, std::vector<double> times, std::vector<VProfile> snapshots);

  const VerticalGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const VerticalGrid>& grid_ptr() const noexcept { return grid_; }
  const OutflowProfile& profile() const noexcept { return f_; }
  double epsilon() const noexcept { return epsilon_; }
  double dt() const noexcept { return dt_; }
  double t_final() const noexcept { return t_final_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<VProfile>& snapshots() const noexcept { return snapshots_; }

  VProfile Gs_at(double t) const;
  CorrectorState state_at(double t) const;

 private:
  std::shared_ptr<const VerticalGrid> grid_;
  OutflowProfile f_;
  double epsilon_;
  double dt_;
  double t_final_;
  std::vector<double> times_;
  std::vector<VProfile> snapshots_;
};

/// Called after every step with (t_n, G^n, t_{n+1}, G^{n+1}).
using CorrectorObserver = std::function<void(double, const VProfile&, double, const VProfile&)>;

/// Solves ∂_t Gˢ - ∂_y² Gˢ + ⟨t⟩^{-1} Gˢ = εH, Gˢ(0) = 0, on [0, T]. Snapshots are kept every
/// `store_spacing` time units (every step when <= dt) plus the final time.
CorrectorTrajectory solve_Gs(const OutflowProfile& f, double epsilon, double t_final, double dt,
                             std::shared_ptr<const VerticalGrid> grid, double store_spacing = 0.0,
                             const CorrectorObserver& observer = {});

struct CfTerms {
  double first = 0.0;   ///< ∫⟨t⟩^{5/4}(|f|+|f'|)
  double second = 0.0;  ///< ∫⟨t⟩^{7/2}(f²+f'²), before the square root
  double value = 0.0;   ///< first + sqrt(second)
};

/// Adaptive quadrature on doubling intervals; throws DivergenceError naming the term whose
/// tail over [T, 2T] never drops below 0.1% of the accumulated value.
CfTerms cf_terms(const OutflowProfile& f);
double cf_constant(const OutflowProfile& f);

struct DyadicWindows {
  std::vector<double> starts;     ///< 2^j
  std::vector<double> integrals;  ///< ∫_{2^j}^{2^{j+1}}
  std::vector<double> ratios;     ///< integrals[j+1]/integrals[j] (0 when the earlier one is 0)
};

struct CorrectorDecayReport {
  std::vector<double> times;
  std::vector<double> weighted_Gs;       ///< ‖e^Ψ Gˢ‖_{L²_v}
  std::vector<double> dGs_integrand;     ///< ⟨t⟩^{1/4}‖e^Ψ ∂_y Gˢ‖_{L²_v}
  std::vector<double> running_integral;  ///< ∫_0^t of the integrand
  double total_integral = 0.0;
  double tail_decrement = 0.0;           ///< I(T) - I(T/2)
  DyadicWindows windows;

  std::array<double, 2> us_gammas{0.5, 0.75};
  std::array<std::vector<double>, 2> us_running;  ///< ∫_0^t ⟨t'⟩^{1/4}‖e^{γΨ}∂_y uˢ‖
  std::array<double, 2> us_total{0.0, 0.0};
  std::array<DyadicWindows, 2> us_windows;

  bool fit_defined = false;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double fitted_exponent = 0.0;  ///< slope of log‖e^Ψ Gˢ‖ against log⟨t⟩
  double fit_r2 = 0.0;

  double sup_weighted_Gs = 0.0;  ///< sup ⟨t⟩^{5/4}‖e^Ψ Gˢ‖
  double source_l1 = 0.0;        ///< ∫⟨t⟩^{5/4}‖H‖_{L²_v} dt
  double lemma_ratio = 0.0;      ///< sup / (ε source_l1), 0 when ε source_l1 = 0
};

/// Decay quantities from the stored snapshots. The fit window defaults to [T/10, T].
CorrectorDecayReport corrector_decay_report(const CorrectorTrajectory& traj, double fit_lo = -1.0,
                                            double fit_hi = -1.0);

/// d/dt‖e^ΨGˢ‖² + ‖e^Ψ∂_yGˢ‖² + 2⟨t⟩^{-1}‖e^ΨGˢ‖² <= 2ε‖e^ΨGˢ‖‖e^ΨH‖ checked per step.
struct EnergyCheckReport {
  int steps = 0;
  double max_violation = 0.0;        ///< max over steps of lhs - rhs
  double max_scaled_violation = 0.0; ///< max of (lhs - rhs)/(dt² scale)
  double worst_time = 0.0;
};

EnergyCheckReport energy_inequality_check(const OutflowProfile& f, double epsilon, double t_final, double dt,
                                          std::shared_ptr<const VerticalGrid> grid);

}  // namespace prandtl
