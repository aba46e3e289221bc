#pragma once

// Tridiagonal algebra for the fourth-order compact (Numerov) discretisation of
// ∂_y² on a uniform grid: M_c f'' = K f / dy², with M_c = tridiag(1,10,1)/12 and
// K = tridiag(1,-2,1).

#include <span>
#include <vector>

#include "prandtl/errors.hpp"

namespace prandtl {

/// Thomas algorithm with the elimination coefficients precomputed.
class TridiagonalSolver {
 public:
  TridiagonalSolver() = default;

  /// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]; lower[0] and upper[n-1] are ignored.
  TridiagonalSolver(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
      : lower_(std::move(lower)), cprime_(diag.size()), inv_(diag.size()) {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = diag[i] - (i > 0 ? lower_[i] * cprime_[i - 1] : 0.0);
      if (denom == 0.0) throw NumericFault("singular tridiagonal system");
      inv_[i] = 1.0 / denom;
      cprime_[i] = upper[i] * inv_[i];
    }
  }

  std::size_t size() const noexcept { return inv_.size(); }

  /// Solves in place.
  template <typename T>
  void solve(std::span<T> rhs) const {
    const std::size_t n = inv_.size();
    rhs[0] = rhs[0] * inv_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime_[i] * rhs[i + 1];
  }

 private:
  std::vector<double> lower_;
  std::vector<double> cprime_;
  std::vector<double> inv_;
};

enum class WallRow {
  Dirichlet,  ///< f(0) prescribed
  Neumann     ///< f'(0) = 0 closed by (f_1 - f_0)/dy² = f''_0/3 + f''_1/6
};

/// θ-scheme matrix for ∂_t f = ∂_y² f - c f: M_c (1/dt + θc) - θ K/dy² on interior rows,
/// the chosen wall row at i = 0 and a Dirichlet row at the top.
inline TridiagonalSolver compact_theta_matrix(int ny, double dy, double dt, double c, double theta,
                                              WallRow wall = WallRow::Dirichlet) {
  const auto n = static_cast<std::size_t>(ny);
  const double a = 1.0 / dt + theta * c;
  const double k = theta / (dy * dy);
  std::vector<double> lower(n, a / 12.0 - k);
  std::vector<double> diag(n, 10.0 * a / 12.0 + 2.0 * k);
  std::vector<double> upper(n, a / 12.0 - k);
  if (wall == WallRow::Neumann) {
    diag.front() = a / 3.0 + k;
    upper.front() = a / 6.0 - k;
  } else {
    diag.front() = 1.0;
    upper.front() = 0.0;
  }
  diag.back() = 1.0;
  lower.back() = 0.0;
  return TridiagonalSolver(std::move(lower), std::move(diag), std::move(upper));
}

/// Crank-Nicolson step matrix with Dirichlet rows at both ends.
inline TridiagonalSolver compact_cn_matrix(int ny, double dy, double dt, double c) {
  return compact_theta_matrix(ny, dy, dt, c, 0.5);
}

/// (M_c f)_i on interior rows and the wall row; the top entry is zero (Dirichlet rows read zero).
template <typename T>
void apply_compact_mass(std::span<const T> f, std::span<T> out, WallRow wall = WallRow::Dirichlet) {
  const std::size_t n = f.size();
  out[0] = wall == WallRow::Neumann ? f[0] / 3.0 + f[1] / 6.0 : T{};
  out[n - 1] = T{};
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] + 10.0 * f[i] + f[i + 1]) / 12.0;
}

/// (K f)_i / dy² on interior rows and the wall row; the top entry is zero.
template <typename T>
void apply_compact_stiffness(std::span<const T> f, double dy, std::span<T> out, WallRow wall = WallRow::Dirichlet) {
  const std::size_t n = f.size();
  const double s = 1.0 / (dy * dy);
  out[0] = wall == WallRow::Neumann ? s * (f[1] - f[0]) : T{};
  out[n - 1] = T{};
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = s * (f[i - 1] - 2.0 * f[i] + f[i + 1]);
}

}  // namespace prandtl
