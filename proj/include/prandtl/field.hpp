#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prandtl/grid.hpp"

namespace prandtl {

/// Real function of y alone (shear profiles, weights, sources).
class VProfile {
 public:
  explicit VProfile(std::shared_ptr<const VerticalGrid> grid);
  VProfile(std::shared_ptr<const VerticalGrid> grid, std::vector<double> values);
  static VProfile from_function(std::shared_ptr<const VerticalGrid> grid, const std::function<double(double)>& f);

  const VerticalGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const VerticalGrid>& grid_ptr() const noexcept { return grid_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return values_[static_cast<std::size_t>(i)]; }

  VProfile& operator+=(const VProfile& other);
  VProfile& operator-=(const VProfile& other);
  VProfile& operator*=(double c);

 private:
  std::shared_ptr<const VerticalGrid> grid_;
  std::vector<double> values_;
};

VProfile operator+(VProfile a, const VProfile& b);
VProfile operator-(VProfile a, const VProfile& b);
VProfile operator*(double c, VProfile a);
/// Node-wise product.
VProfile operator*(const VProfile& a, const VProfile& b);

/// Real field on the half plane stored as tangential Fourier coefficients per y node.
///
/// Mode-major storage: coefficient (j, i) at index j*Ny + i for j = 0..Nx/2.
/// Real-valuedness is implicit in the half spectrum; the Nyquist mode stays zero.
class Field2D {
 public:
  explicit Field2D(std::shared_ptr<const Grid> grid);

  /// From samples a(x_n, y_i), x-major (n*Ny + i), n = 0..Nx-1.
  static Field2D from_physical(std::shared_ptr<const Grid> grid, std::span<const double> samples);
  static Field2D from_function(std::shared_ptr<const Grid> grid, const std::function<double(double, double)>& f);
  /// Separable field: Re(c e^{iξ_j x}) * profile(y) summed over both ±j, i.e. 2 Re(ĉ_j e^{iξ_j x}) p(y).
  static Field2D single_mode(std::shared_ptr<const Grid> grid, int mode, Complex coefficient,
                             std::span<const double> profile);

  std::vector<double> to_physical() const;

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  int modes() const noexcept { return grid_->modes(); }
  int ny() const noexcept { return grid_->ny(); }

  std::span<Complex> mode(int j) noexcept;
  std::span<const Complex> mode(int j) const noexcept;
  Complex& operator()(int j, int i) noexcept { return coeffs_[index(j, i)]; }
  const Complex& operator()(int j, int i) const noexcept { return coeffs_[index(j, i)]; }
  std::span<Complex> coefficients() noexcept { return coeffs_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  Field2D& operator+=(const Field2D& other);
  Field2D& operator-=(const Field2D& other);
  Field2D& operator*=(double c);
  /// Multiply node-wise by a function of y.
  Field2D& scale_rows(const VProfile& w);

  bool is_finite() const;
  double max_abs_coefficient() const;

 private:
  std::size_t index(int j, int i) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_->ny()) + static_cast<std::size_t>(i);
  }

  std::shared_ptr<const Grid> grid_;
  std::vector<Complex> coeffs_;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator-(Field2D a, const Field2D& b);
Field2D operator*(double c, Field2D a);
Field2D operator*(const VProfile& w, Field2D a);

void require_same_grid(const Field2D& a, const Field2D& b);
void require_same_grid(const Field2D& a, const VProfile& b);
void require_same_grid(const VProfile& a, const VProfile& b);

// ---------------------------------------------------------------------------
// Differential and integral operators

/// Spectral tangential derivative (multiply by iξ).
Field2D ddx(const Field2D& a);

Field2D ddy(const Field2D& a);
VProfile ddy(const VProfile& a);

/// Emitted by the half-line integrals when the integrand has not decayed at Ymax.
struct TailWarning {
  double value_at_top = 0.0;
  double tolerance = 0.0;
  std::string message() const;
};

/// ∫_y^{Ymax} a dy' (zero at the top). A non-decayed integrand appends a warning.
Field2D int_y_to_inf(const Field2D& a, std::vector<TailWarning>* warnings = nullptr,
                     double tail_tolerance = 1e-8);
VProfile int_y_to_inf(const VProfile& a, std::vector<TailWarning>* warnings = nullptr,
                      double tail_tolerance = 1e-8);

/// ∫_0^y a dy'.
Field2D int_0_to_y(const Field2D& a);
VProfile int_0_to_y(const VProfile& a);

/// ∫_0^{Ymax} per mode: returns one coefficient per mode (the x-Fourier series of ∫ a dy).
std::vector<Complex> integrate_y(const Field2D& a);
double integrate_y(const VProfile& a);

// ---------------------------------------------------------------------------
// Weights and norms

/// e^{γ y²/(8(1+t))}; entries are capped at 1e300 and `capped` is set when that happens.
VProfile gaussian_weight(const std::shared_ptr<const VerticalGrid>& grid, double t, double gamma,
                         bool* capped = nullptr);

/// Squared y-L² norm of each mode column, optionally weighted: ∫ |w â_j|² dy.
std::vector<double> mode_energies(const Field2D& a, const VProfile* weight = nullptr);

/// ‖w a‖_{L²(torus × [0,Ymax])} via Parseval in x and the grid quadrature in y.
double weighted_l2(const Field2D& a, const VProfile& w);
double weighted_l2(const VProfile& a, const VProfile& w);
double l2_norm(const Field2D& a);
double l2_norm(const VProfile& a);

struct TrevesResult {
  double lhs = 0.0;    ///< ∫ |∂_y a|² e^{2Ψ}
  double rhs = 0.0;    ///< (1/(2⟨t⟩)) ∫ |a|² e^{2Ψ}
  double ratio = 0.0;  ///< lhs/rhs, +∞ when rhs = 0
};

TrevesResult treves_check(const Field2D& a, double t);
TrevesResult treves_check(const VProfile& a, double t);

// ---------------------------------------------------------------------------
// Products

enum class ProductMode {
  Exact,       ///< zero-padded to 2Nx points, product projected onto the resolved band
  Dealiased23  ///< 2/3 rule: inputs and output truncated to |j| <= Nx/3
};

Field2D multiply(const Field2D& a, const Field2D& b, ProductMode mode = ProductMode::Exact);

/// Highest mode kept by the 2/3 rule.
int dealias_cutoff(const Grid& grid) noexcept;

}  // namespace prandtl
