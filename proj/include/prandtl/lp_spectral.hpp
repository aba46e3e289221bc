#pragma once

// Tangential Littlewood-Paley machinery on the torus: dyadic blocks,
// anisotropic Besov and Chemin-Lerner norms, Bony paraproducts and the
// analytic multiplier e^{r|D_x|}.

#include <span>
#include <vector>

#include "prandtl/field.hpp"

namespace prandtl {

/// Smooth step 0 -> 1 on [0, 1] built from exp(-1/t); flat at both ends.
double smoothstep(double t) noexcept;
double smoothstep_d1(double t) noexcept;
double smoothstep_d2(double t) noexcept;

/// Low-pass bump: 1 on |τ| <= 3/4, 0 on |τ| >= 4/3.
double chi_lp(double tau) noexcept;
/// Annular bump chi_lp(τ/2) - chi_lp(τ), supported in 3/4 <= |τ| <= 8/3.
double phi_lp(double tau) noexcept;

class DyadicFilterBank {
 public:
  DyadicFilterBank(double length, int nx);

  int k_min() const noexcept { return k_min_; }
  int k_max() const noexcept { return k_max_; }
  int block_count() const noexcept { return k_max_ - k_min_ + 1; }
  double length() const noexcept { return length_; }
  int nx() const noexcept { return nx_; }

  /// ξ_j for the resolved half spectrum j = 0..Nx/2.
  const std::vector<double>& wavenumbers() const noexcept { return wavenumbers_; }

  /// phi_lp(2^{-k}|ξ_j|); zero for j = 0 and for k outside the bank.
  double block_weight(int k, int mode) const noexcept;

  /// Blocks k with a nonzero weight at mode j.
  std::vector<int> active_blocks(int mode) const;

  bool matches(const Grid& grid) const noexcept;

 private:
  double length_;
  int nx_;
  int k_min_;
  int k_max_;
  std::vector<double> wavenumbers_;
  std::vector<double> weights_;  // (k - k_min) * modes + j
};

DyadicFilterBank build_filter_bank(double length, int nx);

/// Δ_k^h a.
Field2D dyadic_block(const DyadicFilterBank& bank, const Field2D& a, int k);

/// S_k^h a = mean mode + Σ_{k' <= k-1} Δ_{k'}^h a.
Field2D low_pass(const DyadicFilterBank& bank, const Field2D& a, int k);

/// ‖w Δ_k a‖_{L²} for k = k_min..k_max (index k - k_min). Unweighted when w is null.
std::vector<double> block_norms(const DyadicFilterBank& bank, const Field2D& a, const VProfile* weight = nullptr);

/// ‖w a‖_{B^{s,0}}. For s > 1/2 the norm is ‖w ∂_x^ℓ a‖_{B^{s-ℓ,0}} with ℓ - 1/2 < s <= ℓ + 1/2.
double besov_norm(const DyadicFilterBank& bank, const Field2D& a, double s, const VProfile* weight = nullptr);

/// Σ_k 2^{ks} c_k for precomputed block norms c_k.
double besov_from_blocks(const DyadicFilterBank& bank, std::span<const double> blocks, double s);

enum class TimeNorm { L1, L2, Linf };

/// Sampled block norms: norms[n][k - k_min] at times[n], uniform in time.
struct BlockNormSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> norms;
};

/// Σ_k 2^{ks} (∫_{t0}^{t1} w(t) ‖Δ_k a(t)‖^p dt)^{1/p} by the trapezoid rule over the samples in
/// the window; Linf takes the supremum of w‖Δ_k a‖. An empty `weight` means w ≡ 1, otherwise it
/// is sampled at the same times as the series.
double chemin_lerner_norm(const DyadicFilterBank& bank, const BlockNormSeries& series, TimeNorm p, double s,
                          double t0, double t1, std::span<const double> weight = {});

double chemin_lerner_norm(const DyadicFilterBank& bank, std::span<const double> times,
                          std::span<const Field2D> fields, TimeNorm p, double s, double t0, double t1,
                          std::span<const double> weight = {});

struct BonyParts {
  Field2D Tfg;  ///< Σ_k S_{k-1} f Δ_k g
  Field2D Tgf;  ///< Σ_k S_{k-1} g Δ_k f
  Field2D R;    ///< Σ_{|k-k'|<=1} Δ_k f Δ_{k'} g plus the product of the means
};

/// Bony decomposition of fg; the three parts sum to the exact band-limited product.
BonyParts bony_parts(const DyadicFilterBank& bank, const Field2D& f, const Field2D& g);

struct AmplificationReport {
  int flagged_modes = 0;          ///< modes with e^{r|ξ|} > 1/machine epsilon
  double max_exponent = 0.0;      ///< max r|ξ| over modes carrying nonzero data
};

/// Scales each coefficient by e^{radius |ξ|}. Negative radius throws NegativeRadiusError.
Field2D analytic_multiplier(const Field2D& a, double radius, AmplificationReport* report = nullptr);

}  // namespace prandtl
