#pragma once

// Relations between the evolved velocity u and its companions: the stream-type
// primitive φ, the normal velocity v and the good unknown G = u + y φ/(2⟨t⟩).

#include <string>
#include <vector>

#include "prandtl/field.hpp"
#include "prandtl/lp_spectral.hpp"

namespace prandtl {

/// ‖∫_0^{Ymax} u dy‖_{L²_x}: the x-profile of the vertical integral measured in L².
double zero_integral_residual(const Field2D& u);

/// max over x-nodes (in spectral form: Σ_j |û_j(0)| mult_j) of |u(x, 0)|.
double wall_residual(const Field2D& u);

/// φ = -∫_y^∞ u dy'. Throws ConstraintError when ‖φ(·,0)‖ > 10 tolerance ‖u‖.
Field2D recover_phi(const Field2D& u, double tolerance);
Field2D recover_phi_unchecked(const Field2D& u, std::vector<TailWarning>* warnings = nullptr);

/// v = -∫_0^y ∂_x u dy'.
Field2D recover_v(const Field2D& u);

struct GoodUnknown {
  Field2D G;            ///< u + y/(2⟨t⟩) φ
  Field2D g;            ///< ∂_y G by finite differences
  Field2D g_expanded;   ///< ∂_y u + y/(2⟨t⟩) u + φ/(2⟨t⟩)
};

GoodUnknown good_unknown(const Field2D& u, const Field2D& phi, double t);

/// φ = e^{-y²/4⟨t⟩} ∫_0^y e^{y'²/4⟨t⟩} G dy' applied mode by mode.
Field2D phi_from_good_unknown(const Field2D& G, double t);

struct InitialDataReport {
  double wall_residual = 0.0;
  double zero_integral_residual = 0.0;  ///< relative to ‖u₀‖
  double mean_residual = 0.0;           ///< ‖x-mean of u₀‖_{L²}
  double weighted_u_norm = 0.0;         ///< ‖e^{y²/8} e^{δ|D_x|} u₀‖_{B^{1/2,0}}
  double weighted_phi_norm = 0.0;       ///< same for φ₀
  double weighted_G_norm = 0.0;         ///< same for G₀
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

struct InitialDataTolerances {
  double wall = 1e-12;           ///< absolute, relative to max|u₀| when nonzero
  double zero_integral = 1e-5;   ///< relative to ‖u₀‖
  double mean = 1e-12;           ///< relative to ‖u₀‖
};

InitialDataReport validate_initial_data(const DyadicFilterBank& bank, const Field2D& u0, double delta,
                                        const InitialDataTolerances& tol = {});

}  // namespace prandtl
