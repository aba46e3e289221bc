#pragma once

// IMEX time integration of
//   ∂_t u + (u + uˢ + εfχ) ∂_x u + v ∂_y(u + uˢ + εfχ) - ∂_y² u = 0,  u|_{y=0} = 0,
// with v = -∫_0^y ∂_x u. ∂_y² is Crank-Nicolson with the compact fourth-order
// operator; transport is second-order Adams-Bashforth after an Euler start.

#include <memory>
#include <optional>

#include "prandtl/corrector.hpp"
#include "prandtl/field.hpp"

namespace prandtl {

struct AnalyticState {
  double t = 0.0;
  Field2D u;
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda = 1.0;
  double theta = 0.0;
  std::shared_ptr<const CorrectorTrajectory> corrector;

  double radius() const noexcept { return delta - lambda * theta; }
};

struct StepperOptions {
  bool transport = true;
  ProductMode products = ProductMode::Dealiased23;
  double cfl_limit = 0.5;
};

/// U = uˢ + εf(t)χ(y) and ∂_y U at one instant.
struct ShearField {
  VProfile U;
  VProfile dU;
};

ShearField shear_at(const std::shared_ptr<const VerticalGrid>& grid, const CorrectorTrajectory* corrector,
                    double epsilon, double t);

/// η sin(k₀x) y(1 - y²/4) e^{-y²/4}: zero at the wall, zero vertical integral.
Field2D preset_initial_velocity(std::shared_ptr<const Grid> grid, double eta, int k0);

class PrandtlStepper {
 public:
  PrandtlStepper(std::shared_ptr<const Grid> grid, StepperOptions options = {});

  /// Advances the state by dt. On CflError or NumericFault the state is left untouched.
  void step(AnalyticState& state, double dt);

  /// Transport terms (u + U)∂_x u + v ∂_y(u + U).
  Field2D transport(const Field2D& u, const ShearField& shear) const;

  /// dt max(|u + U|/dx, |v|/dy) over the collocation grid.
  double cfl_number(const Field2D& u, const ShearField& shear, double dt) const;

  /// Forget the previous transport term (next step is an Euler start).
  void reset() noexcept { previous_.reset(); }

 private:
  std::shared_ptr<const Grid> grid_;
  StepperOptions options_;
  std::optional<Field2D> previous_;
  double previous_dt_ = 0.0;
};

/// Independent evolution of φ by
///   ∂_t φ + (u + U)∂_x φ + 2∫_y^∞ ∂_y(u + U) ∂_x φ dy' - ∂_y² φ = 0,  ∂_y φ|_{y=0} = 0,
/// with u = ∂_y φ, φ(Ymax) = 0, the same IMEX scheme and a third-order Neumann closure row.
class PhiStepper {
 public:
  PhiStepper(std::shared_ptr<const Grid> grid, StepperOptions options = {});

  void step(Field2D& phi, double t, double dt, double epsilon, const CorrectorTrajectory* corrector);

  Field2D transport(const Field2D& phi, const ShearField& shear) const;

 private:
  std::shared_ptr<const Grid> grid_;
  StepperOptions options_;
  std::optional<Field2D> previous_;
  double previous_dt_ = 0.0;
};

struct PhiRouteReport {
  double t_end = 0.0;
  int steps = 0;
  double max_relative_disagreement = 0.0;  ///< max over steps of ‖∂_y φ - u‖/‖u‖
  double final_relative_disagreement = 0.0;
};

/// Runs both routes from u₀ and φ₀ = -∫_y^∞ u₀ up to t_end.
PhiRouteReport phi_route_check(const Field2D& u0, double epsilon, const CorrectorTrajectory* corrector, double dt,
                               double t_end, StepperOptions options = {});

}  // namespace prandtl
