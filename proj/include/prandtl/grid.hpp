#pragma once

// Discretisation of the half plane: a periodic tangential direction of length L
// resolved by Nx Fourier modes, and a uniform wall-normal grid on [0, Ymax].

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace prandtl {

using Complex = std::complex<double>;

/// Uniform nodes y_i = i*dy on [0, Ymax] with a quintic-exact composite quadrature.
///
/// Integrals over each cell [y_i, y_{i+1}] use the quintic through six
/// neighbouring nodes (shifted inward near the ends). Summing cells gives the
/// full-range rule, so half-line integrals and norms share one quadrature.
class VerticalGrid {
 public:
  VerticalGrid(int ny, double ymax);

  int ny() const noexcept { return ny_; }
  double ymax() const noexcept { return ymax_; }
  double dy() const noexcept { return dy_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double node(int i) const noexcept { return nodes_[static_cast<std::size_t>(i)]; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool operator==(const VerticalGrid& other) const noexcept {
    return ny_ == other.ny_ && ymax_ == other.ymax_;
  }

  /// d/dy: fourth-order centred stencil inside, fourth-order one-sided near both ends.
  template <typename T>
  void derivative(std::span<const T> in, std::span<T> out) const;

  /// Second derivative with matching fourth-order stencils.
  template <typename T>
  void second_derivative(std::span<const T> in, std::span<T> out) const;

  template <typename T>
  T integrate(std::span<const T> values) const;

  /// out[i] = ∫_0^{y_i} values dy.
  template <typename T>
  void cumulative_from_wall(std::span<const T> values, std::span<T> out) const;

  /// out[i] = ∫_{y_i}^{Ymax} values dy.
  template <typename T>
  void cumulative_to_top(std::span<const T> values, std::span<T> out) const;

  static constexpr int kCellPoints = 6;

  /// Quintic-exact rule for cell [y_c, y_{c+1}]: ∫ ≈ dy Σ_m w[m] f(y_{first+m}), m < kCellPoints.
  struct CellRule {
    int first;
    const double* w;
  };
  CellRule cell_rule(int cell) const noexcept;

 private:
  template <typename T>
  T cell_integral(std::span<const T> v, int cell) const;

  int ny_;
  double ymax_;
  double dy_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Tangential torus [0, L) with Nx collocation points times a vertical grid.
///
/// Spectral storage keeps modes j = 0..Nx/2 (real-to-complex half spectrum) with
/// wavenumber ξ_j = 2πj/L. The Nyquist mode j = Nx/2 is kept identically zero.
class Grid {
 public:
  static std::shared_ptr<const Grid> make(int nx, double length, int ny, double ymax);

  Grid(int nx, double length, int ny, double ymax);

  int nx() const noexcept { return nx_; }
  int modes() const noexcept { return nx_ / 2 + 1; }
  int nyquist() const noexcept { return nx_ / 2; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / nx_; }
  int ny() const noexcept { return vertical_->ny(); }
  double ymax() const noexcept { return vertical_->ymax(); }
  double dy() const noexcept { return vertical_->dy(); }
  const VerticalGrid& vertical() const noexcept { return *vertical_; }
  const std::shared_ptr<const VerticalGrid>& vertical_ptr() const noexcept { return vertical_; }

  double wavenumber(int mode) const noexcept;

  /// Multiplicity of mode j in the full spectrum: 1 for j = 0 and Nyquist, 2 otherwise.
  double mode_multiplicity(int mode) const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return nx_ == other.nx_ && length_ == other.length_ && *vertical_ == *other.vertical_;
  }

 private:
  int nx_;
  double length_;
  std::shared_ptr<const VerticalGrid> vertical_;
};

/// Batched real<->complex transforms along x for all y nodes at once.
///
/// Spectral layout is mode-major (j*Ny + i), physical layout is x-major
/// (n*Ny + i). `points` may exceed Nx for zero-padded (de-aliased) products.
/// Plans are cached process-wide; execution is thread-safe.
class TangentialTransform {
 public:
  TangentialTransform(int points, int ny);

  int points() const noexcept { return points_; }

  /// Physical samples at x_n = n L / points from the first `modes` coefficients.
  void to_physical(std::span<const Complex> coeffs, int modes, std::span<double> physical) const;

  /// Coefficients of the first `modes` modes, normalised so a(x) = Σ â_j e^{iξ_j x}.
  void to_spectral(std::span<const double> physical, int modes, std::span<Complex> coeffs) const;

 private:
  int points_;
  int ny_;
  void* forward_;
  void* backward_;
};

}  // namespace prandtl
