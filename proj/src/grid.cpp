#include "prandtl/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "prandtl/errors.hpp"

namespace prandtl {

namespace {

constexpr double kCell[5][6] = {
    {475.0 / 1440, 1427.0 / 1440, -798.0 / 1440, 482.0 / 1440, -173.0 / 1440, 27.0 / 1440},
    {-27.0 / 1440, 637.0 / 1440, 1022.0 / 1440, -258.0 / 1440, 77.0 / 1440, -11.0 / 1440},
    {11.0 / 1440, -93.0 / 1440, 802.0 / 1440, 802.0 / 1440, -93.0 / 1440, 11.0 / 1440},
    {-11.0 / 1440, 77.0 / 1440, -258.0 / 1440, 1022.0 / 1440, 637.0 / 1440, -27.0 / 1440},
    {27.0 / 1440, -173.0 / 1440, 482.0 / 1440, -798.0 / 1440, 1427.0 / 1440, 475.0 / 1440},
};

// (first node of the six-point stencil, weights) for cell [y_c, y_{c+1}].
std::pair<int, const double*> cell_stencil(int cell, int ny) {
  if (cell < 2) return {0, kCell[cell]};
  if (cell > ny - 4) return {ny - 6, kCell[cell - (ny - 6)]};
  return {cell - 2, kCell[2]};
}

}  // namespace

VerticalGrid::VerticalGrid(int ny, double ymax) : ny_(ny), ymax_(ymax) {
  if (ny < 8) throw ConfigError("vertical grid needs at least 8 nodes", "ny");
  if (!(ymax > 0.0) || !std::isfinite(ymax)) throw ConfigError("Ymax must be positive", "ymax");
  dy_ = ymax / (ny - 1);
  nodes_.resize(static_cast<std::size_t>(ny));
  for (int i = 0; i < ny; ++i) nodes_[static_cast<std::size_t>(i)] = i * dy_;
  nodes_.back() = ymax;
  weights_.assign(static_cast<std::size_t>(ny), 0.0);
  for (int c = 0; c + 1 < ny; ++c) {
    auto [first, w] = cell_stencil(c, ny);
    for (int m = 0; m < kCellPoints; ++m) weights_[static_cast<std::size_t>(first + m)] += w[m] * dy_;
  }
}

template <typename T>
void VerticalGrid::derivative(std::span<const T> f, std::span<T> out) const {
  const int n = ny_;
  const double s = 1.0 / (12.0 * dy_);
  auto at = [&](int i) -> const T& { return f[static_cast<std::size_t>(i)]; };
  out[0] = s * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
  out[1] = s * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
  for (int i = 2; i < n - 2; ++i) {
    out[static_cast<std::size_t>(i)] = s * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
  }
  out[static_cast<std::size_t>(n - 2)] =
      -s * (-3.0 * at(n - 1) - 10.0 * at(n - 2) + 18.0 * at(n - 3) - 6.0 * at(n - 4) + at(n - 5));
  out[static_cast<std::size_t>(n - 1)] =
      -s * (-25.0 * at(n - 1) + 48.0 * at(n - 2) - 36.0 * at(n - 3) + 16.0 * at(n - 4) - 3.0 * at(n - 5));
}

template <typename T>
void VerticalGrid::second_derivative(std::span<const T> f, std::span<T> out) const {
  const int n = ny_;
  const double s = 1.0 / (12.0 * dy_ * dy_);
  auto at = [&](int i) -> const T& { return f[static_cast<std::size_t>(i)]; };
  auto edge0 = [&](int i0, int dir) {
    auto g = [&](int m) -> const T& { return at(i0 + dir * m); };
    return s * (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5));
  };
  auto edge1 = [&](int i0, int dir) {
    auto g = [&](int m) -> const T& { return at(i0 + dir * m); };
    return s * (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5));
  };
  out[0] = edge0(0, 1);
  out[1] = edge1(0, 1);
  for (int i = 2; i < n - 2; ++i) {
    out[static_cast<std::size_t>(i)] =
        s * (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2));
  }
  out[static_cast<std::size_t>(n - 2)] = edge1(n - 1, -1);
  out[static_cast<std::size_t>(n - 1)] = edge0(n - 1, -1);
}

VerticalGrid::CellRule VerticalGrid::cell_rule(int cell) const noexcept {
  auto [first, w] = cell_stencil(cell, ny_);
  return {first, w};
}

template <typename T>
T VerticalGrid::integrate(std::span<const T> values) const {
  T sum{};
  for (int i = 0; i < ny_; ++i) sum += weights_[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i)];
  return sum;
}

template <typename T>
T VerticalGrid::cell_integral(std::span<const T> v, int cell) const {
  auto [first, w] = cell_stencil(cell, ny_);
  T acc{};
  for (int m = 0; m < kCellPoints; ++m) acc += w[m] * v[static_cast<std::size_t>(first + m)];
  return acc * dy_;
}

template <typename T>
void VerticalGrid::cumulative_from_wall(std::span<const T> values, std::span<T> out) const {
  T acc{};
  out[0] = acc;
  for (int c = 0; c + 1 < ny_; ++c) {
    acc += cell_integral(values, c);
    out[static_cast<std::size_t>(c + 1)] = acc;
  }
}

template <typename T>
void VerticalGrid::cumulative_to_top(std::span<const T> values, std::span<T> out) const {
  T acc{};
  out[static_cast<std::size_t>(ny_ - 1)] = acc;
  for (int c = ny_ - 2; c >= 0; --c) {
    acc += cell_integral(values, c);
    out[static_cast<std::size_t>(c)] = acc;
  }
}

template void VerticalGrid::derivative<double>(std::span<const double>, std::span<double>) const;
template void VerticalGrid::derivative<Complex>(std::span<const Complex>, std::span<Complex>) const;
template void VerticalGrid::second_derivative<double>(std::span<const double>, std::span<double>) const;
template void VerticalGrid::second_derivative<Complex>(std::span<const Complex>, std::span<Complex>) const;
template double VerticalGrid::integrate<double>(std::span<const double>) const;
template Complex VerticalGrid::integrate<Complex>(std::span<const Complex>) const;
template void VerticalGrid::cumulative_from_wall<double>(std::span<const double>, std::span<double>) const;
template void VerticalGrid::cumulative_from_wall<Complex>(std::span<const Complex>, std::span<Complex>) const;
template void VerticalGrid::cumulative_to_top<double>(std::span<const double>, std::span<double>) const;
template void VerticalGrid::cumulative_to_top<Complex>(std::span<const Complex>, std::span<Complex>) const;

Grid::Grid(int nx, double length, int ny, double ymax)
    : nx_(nx), length_(length), vertical_(std::make_shared<const VerticalGrid>(ny, ymax)) {
  if (nx < 8 || (nx & (nx - 1)) != 0) {
    throw ConfigError("Nx must be a power of two >= 8", "nx");
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("torus length must be positive", "length");
}

std::shared_ptr<const Grid> Grid::make(int nx, double length, int ny, double ymax) {
  return std::make_shared<const Grid>(nx, length, ny, ymax);
}

double Grid::wavenumber(int mode) const noexcept {
  return 2.0 * std::numbers::pi * mode / length_;
}

double Grid::mode_multiplicity(int mode) const noexcept {
  return (mode == 0 || mode == nyquist()) ? 1.0 : 2.0;
}

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// FFTW planning is not thread-safe; plans are created once per shape and kept.
PlanPair cached_plans(int points, int ny) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> plans;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(points, ny);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  const int half = points / 2 + 1;
  auto* real = fftw_alloc_real(static_cast<std::size_t>(points) * ny);
  auto* cplx = fftw_alloc_complex(static_cast<std::size_t>(half) * ny);
  int n[1] = {points};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair pair{};
  pair.forward = fftw_plan_many_dft_r2c(1, n, ny, real, nullptr, ny, 1, cplx, nullptr, ny, 1, flags);
  pair.backward = fftw_plan_many_dft_c2r(1, n, ny, cplx, nullptr, ny, 1, real, nullptr, ny, 1, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (pair.forward == nullptr || pair.backward == nullptr) throw NumericFault("FFTW planning failed");
  plans.emplace(key, pair);
  return pair;
}

}  // namespace

TangentialTransform::TangentialTransform(int points, int ny) : points_(points), ny_(ny) {
  auto plans = cached_plans(points, ny);
  forward_ = plans.forward;
  backward_ = plans.backward;
}

void TangentialTransform::to_physical(std::span<const Complex> coeffs, int modes,
                                      std::span<double> physical) const {
  const int half = points_ / 2 + 1;
  std::vector<Complex> buffer(static_cast<std::size_t>(half) * ny_, Complex{});
  const int copy = std::min(modes, half);
  std::copy_n(coeffs.begin(), static_cast<std::size_t>(copy) * ny_, buffer.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), reinterpret_cast<fftw_complex*>(buffer.data()),
                       physical.data());
}

void TangentialTransform::to_spectral(std::span<const double> physical, int modes,
                                      std::span<Complex> coeffs) const {
  const int half = points_ / 2 + 1;
  std::vector<Complex> buffer(static_cast<std::size_t>(half) * ny_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(physical.data()),
                       reinterpret_cast<fftw_complex*>(buffer.data()));
  const double scale = 1.0 / points_;
  const int copy = std::min(modes, half);
  std::fill(coeffs.begin(), coeffs.end(), Complex{});
  for (std::size_t k = 0; k < static_cast<std::size_t>(copy) * ny_; ++k) coeffs[k] = buffer[k] * scale;
}

}  // namespace prandtl
