#pragma once

// Analytic-radius bookkeeping θ(t), weighted analytic Besov norms, decay-rate
// regression and the monitors that compare a run against the decay estimates.

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "prandtl/corrector.hpp"
#include "prandtl/field.hpp"
#include "prandtl/lp_spectral.hpp"

namespace prandtl {

struct DecayFit {
  double exponent = 0.0;  ///< slope of log(value) against log⟨t⟩
  double r2 = 0.0;
  int samples = 0;
};

/// Least squares on samples with t in [lo, hi]. Needs at least 10 samples, all positive.
DecayFit decay_fit(std::span<const double> t, std::span<const double> values, double lo, double hi);

/// ‖e^{γΨ(t)} e^{radius|D_x|} a‖_{B^{1/2,0}}.
double weighted_analytic_norm(const DyadicFilterBank& bank, const Field2D& a, double t, double gamma, double radius,
                              AmplificationReport* report = nullptr);

/// Block norms ‖e^{γΨ(t)} Δ_k e^{radius|D_x|} a‖_{L²} (index k - k_min).
std::vector<double> weighted_analytic_blocks(const DyadicFilterBank& bank, const Field2D& a, double t, double gamma,
                                             double radius);

/// The three terms of θ̇ without the common ⟨t⟩^{1/4} factor applied separately:
/// each entry already includes it.
struct ThetaComponents {
  double corrector = 0.0;  ///< ⟨t⟩^{1/4}‖e^Ψ ∂_y Gˢ‖_{L²_v}
  double outflow = 0.0;    ///< ⟨t⟩^{1/4} ε f(t) ‖e^Ψ χ'‖_{L²_v}
  double bulk = 0.0;       ///< ⟨t⟩^{1/4}‖e^Ψ ∂_y G_Φ‖_{B^{1/2,0}}
  double total() const noexcept { return corrector + outflow + bulk; }
};

/// Evaluates θ̇ at time t with the given radius. `corrector` may be null (no shear).
ThetaComponents theta_integrand(const DyadicFilterBank& bank, const CorrectorState* corrector, const Field2D& G,
                                double t, double f_value, double epsilon, double radius);

class RadiusTracker {
 public:
  RadiusTracker(double delta, double lambda);

  double delta() const noexcept { return delta_; }
  double lambda() const noexcept { return lambda_; }
  double theta() const noexcept { return theta_; }
  double radius() const noexcept { return delta_ - lambda_ * theta_; }
  bool breached() const noexcept { return theta_ >= delta_ / lambda_; }
  bool started() const noexcept { return !times_.empty(); }

  /// Records θ̇ at the initial time (θ stays 0).
  void start(double t0, const ThetaComponents& rate);
  /// θ ← θ + (t_next - t_prev)(θ̇_prev + θ̇_next)/2.
  void advance(double t_next, const ThetaComponents& rate);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<ThetaComponents>& rates() const noexcept { return rates_; }
  const std::vector<double>& thetas() const noexcept { return thetas_; }

  /// ∫_0^t of one component (0 corrector, 1 outflow, 2 bulk) by the trapezoid rule up to time t.
  double component_integral(int which, double t) const;

 private:
  double delta_;
  double lambda_;
  double theta_ = 0.0;
  std::vector<double> times_;
  std::vector<ThetaComponents> rates_;
  std::vector<double> thetas_;
};

/// Evaluates θ̇ at t_next with the radius lagged to the tracker's current value and advances.
void theta_advance(RadiusTracker& tracker, const DyadicFilterBank& bank, double t_next,
                   const CorrectorState* corrector, const Field2D& G, double f_value, double epsilon);

/// Lemma-type block ratios. NaN marks a 0/0 entry.
struct RelationReport {
  std::array<double, 2> gammas{0.5, 0.75};
  std::array<double, 2> u_vs_G{};        ///< max_k ‖e^{γΨ}Δ_k u_Φ‖/‖e^ΨΔ_k G_Φ‖
  std::array<double, 2> dyu_vs_dyG{};    ///< max_k ‖e^{γΨ}Δ_k ∂_y u_Φ‖/‖e^ΨΔ_k ∂_y G_Φ‖
  std::array<double, 2> yphi_vs_dyG{};   ///< max_k ⟨t⟩^{-1}‖e^{γΨ}Δ_k∂_y(yφ)_Φ‖ + ⟨t⟩^{-3/4}sup_y‖…‖_{L²_h}, over ‖e^ΨΔ_k∂_yG_Φ‖
  double phi_reconstruction_error = 0.0; ///< ‖φ_G - φ‖/‖φ‖ with φ_G = e^{-y²/4⟨t⟩}∫_0^y e^{y'²/4⟨t⟩}G
  double dyu_reconstruction_error = 0.0; ///< ∂_y u against its expression through G, relative
  double g_identity_error = 0.0;         ///< |‖e^Ψ(g - 𝔤)_Φ‖ - ‖e^Ψ(φ/2⟨t⟩)_Φ‖|, g in expanded form
};

RelationReport relation_checks(const DyadicFilterBank& bank, const Field2D& u, const Field2D& phi, const Field2D& G,
                               double t, double radius);

/// Column keys of the norm table, in output order.
inline constexpr std::array<const char*, 11> kNormKeys{
    "u_B",          // ‖e^Ψ u_Φ‖_{B^{1/2,0}}
    "u_B_g050",     // ‖e^{Ψ/2} u_Φ‖_{B^{1/2,0}}
    "u_B_g075",     // ‖e^{3Ψ/4} u_Φ‖_{B^{1/2,0}}
    "dyu_B",        // ‖e^Ψ ∂_y u_Φ‖_{B^{1/2,0}}
    "G_B",          // ‖e^Ψ G_Φ‖_{B^{1/2,0}}
    "dyG_B",        // ‖e^Ψ ∂_y G_Φ‖_{B^{1/2,0}}
    "frakg_B",      // ‖e^Ψ 𝔤_Φ‖_{B^{1/2,0}}, 𝔤 = ∂_y u + y u/(2⟨t⟩)
    "u_B_half",     // ‖e^Ψ e^{δ/2|D_x|} u‖_{B^{1/2,0}}
    "G_B_half",     // ‖e^Ψ e^{δ/2|D_x|} G‖_{B^{1/2,0}}
    "dyu_B_half",   // ‖e^Ψ e^{δ/2|D_x|} ∂_y u‖_{B^{1/2,0}}
    "u_L2",         // ‖u‖_{L²}
};

struct DiagnosticsRecord {
  double t = 0.0;
  double theta = 0.0;
  double radius = 0.0;
  std::array<double, kNormKeys.size()> norms{};
  ThetaComponents theta_rate;
  double zero_integral_residual = 0.0;  ///< ‖∫u dy‖_{L²_x}/‖u‖
  double wall_residual = 0.0;           ///< Σ_j mult_j |û_j(0)|
  double mean_mode = 0.0;               ///< ‖x-mean of u‖_{L²}
  double tail_indicator = 0.0;          ///< share of ‖e^Ψ u_Φ‖_{L²} carried by the top 10% of [0, Ymax]
  int amplification_flags = 0;
  RelationReport relations;
  std::vector<double> u_blocks;         ///< ‖e^Ψ Δ_k u_Φ‖
  std::vector<double> dyu_blocks;       ///< ‖e^Ψ Δ_k ∂_y u_Φ‖
  std::vector<double> G_blocks;         ///< ‖e^Ψ Δ_k G_Φ‖
  std::vector<double> dyG_blocks;       ///< ‖e^Ψ Δ_k ∂_y G_Φ‖

  bool finite_and_nonnegative() const noexcept;
};

/// Builds a record from a consistent snapshot; `corrector` may be null.
DiagnosticsRecord make_record(const DyadicFilterBank& bank, const Field2D& u, double t, double theta, double radius,
                              double delta, const ThetaComponents& rate, bool with_relations = true);

struct InitialNorms {
  double u0 = 0.0;        ///< ‖e^{y²/8}e^{δ|D_x|}u₀‖_{B^{1/2,0}}
  double phi_u0 = 0.0;    ///< ‖e^{y²/8}e^{δ|D_x|}(φ₀,u₀)‖_{B^{1/2,0}} as the sum of both norms
  double G0 = 0.0;        ///< ‖e^{y²/8}e^{δ|D_x|}G₀‖_{B^{1/2,0}}
};

struct MonitorEntry {
  std::string name;
  double sup_ratio = std::numeric_limits<double>::quiet_NaN();  ///< fitted constant C; NaN when undefined
};

struct TheoremReport {
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  bool exponents_defined = false;
  DecayFit u_fit;         ///< ‖e^Ψ u_Φ‖
  DecayFit G_fit;         ///< ‖e^Ψ G_Φ‖
  DecayFit u_g050_fit;    ///< ‖e^{Ψ/2} u_Φ‖
  DecayFit u_g075_fit;
  DecayFit frakg_fit;
  std::vector<MonitorEntry> constants;
  double relation_sup_u_vs_G = 0.0;     ///< γ = 3/4, t in [1, T]
  double relation_sup_dyu_vs_dyG = 0.0;
  double max_theta = 0.0;
  bool breach = false;
};

/// Runs the inequality monitors over the recorded series. The fit window defaults to [T/10, T].
TheoremReport theorem_monitor(const DyadicFilterBank& bank, const std::vector<DiagnosticsRecord>& records,
                              const InitialNorms& initial, double delta, double lambda, double fit_lo = -1.0,
                              double fit_hi = -1.0);

}  // namespace prandtl
