#include "prandtl/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prandtl/errors.hpp"

namespace prandtl {

// ---------------------------------------------------------------------------
// VProfile

VProfile::VProfile(std::shared_ptr<const VerticalGrid> grid)
    : grid_(std::move(grid)), values_(static_cast<std::size_t>(grid_->ny()), 0.0) {}

VProfile::VProfile(std::shared_ptr<const VerticalGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_->ny()) {
    throw GridMismatchError("profile length does not match the vertical grid");
  }
}

VProfile VProfile::from_function(std::shared_ptr<const VerticalGrid> grid, const std::function<double(double)>& f) {
  VProfile p(std::move(grid));
  for (int i = 0; i < p.size(); ++i) p[i] = f(p.grid().node(i));
  return p;
}

VProfile& VProfile::operator+=(const VProfile& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

VProfile& VProfile::operator-=(const VProfile& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

VProfile& VProfile::operator*=(double c) {
  for (auto& v : values_) v *= c;
  return *this;
}

VProfile operator+(VProfile a, const VProfile& b) { return a += b; }
VProfile operator-(VProfile a, const VProfile& b) { return a -= b; }
VProfile operator*(double c, VProfile a) { return a *= c; }

VProfile operator*(const VProfile& a, const VProfile& b) {
  require_same_grid(a, b);
  VProfile out(a.grid_ptr());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// ---------------------------------------------------------------------------
// Field2D

Field2D::Field2D(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)),
      coeffs_(static_cast<std::size_t>(grid_->modes()) * static_cast<std::size_t>(grid_->ny()), Complex{}) {}

Field2D Field2D::from_physical(std::shared_ptr<const Grid> grid, std::span<const double> samples) {
  if (samples.size() != static_cast<std::size_t>(grid->nx()) * static_cast<std::size_t>(grid->ny())) {
    throw GridMismatchError("physical sample count does not match the grid");
  }
  Field2D f(grid);
  TangentialTransform transform(grid->nx(), grid->ny());
  transform.to_spectral(samples, grid->modes(), f.coeffs_);
  std::ranges::fill(f.mode(grid->nyquist()), Complex{});
  return f;
}

Field2D Field2D::from_function(std::shared_ptr<const Grid> grid, const std::function<double(double, double)>& f) {
  const int nx = grid->nx();
  const int ny = grid->ny();
  std::vector<double> samples(static_cast<std::size_t>(nx) * ny);
  for (int n = 0; n < nx; ++n) {
    const double x = n * grid->dx();
    for (int i = 0; i < ny; ++i) samples[static_cast<std::size_t>(n) * ny + i] = f(x, grid->vertical().node(i));
  }
  return from_physical(grid, samples);
}

Field2D Field2D::single_mode(std::shared_ptr<const Grid> grid, int mode, Complex coefficient,
                             std::span<const double> profile) {
  if (mode < 0 || mode >= grid->nyquist()) throw ConfigError("mode index out of the resolved band", "mode");
  if (static_cast<int>(profile.size()) != grid->ny()) throw GridMismatchError("profile length mismatch");
  Field2D f(grid);
  // Mode 0 is its own conjugate partner.
  const Complex c = mode == 0 ? Complex(2.0 * coefficient.real(), 0.0) : coefficient;
  auto column = f.mode(mode);
  for (std::size_t i = 0; i < profile.size(); ++i) column[i] = c * profile[i];
  return f;
}

std::vector<double> Field2D::to_physical() const {
  std::vector<double> samples(static_cast<std::size_t>(grid_->nx()) * grid_->ny());
  TangentialTransform transform(grid_->nx(), grid_->ny());
  transform.to_physical(coeffs_, grid_->modes(), samples);
  return samples;
}

std::span<Complex> Field2D::mode(int j) noexcept {
  return std::span<Complex>(coeffs_).subspan(index(j, 0), static_cast<std::size_t>(grid_->ny()));
}

std::span<const Complex> Field2D::mode(int j) const noexcept {
  return std::span<const Complex>(coeffs_).subspan(index(j, 0), static_cast<std::size_t>(grid_->ny()));
}

Field2D& Field2D::operator+=(const Field2D& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Field2D& Field2D::operator*=(double c) {
  for (auto& v : coeffs_) v *= c;
  return *this;
}

Field2D& Field2D::scale_rows(const VProfile& w) {
  require_same_grid(*this, w);
  const int ny = grid_->ny();
  for (int j = 0; j < grid_->modes(); ++j) {
    auto column = mode(j);
    for (int i = 0; i < ny; ++i) column[static_cast<std::size_t>(i)] *= w[i];
  }
  return *this;
}

bool Field2D::is_finite() const {
  return std::ranges::all_of(coeffs_, [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double Field2D::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
Field2D operator*(double c, Field2D a) { return a *= c; }
Field2D operator*(const VProfile& w, Field2D a) { return a.scale_rows(w); }

void require_same_grid(const Field2D& a, const Field2D& b) {
  if (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid())) throw GridMismatchError("fields live on different grids");
}

void require_same_grid(const Field2D& a, const VProfile& b) {
  if (!(a.grid().vertical() == b.grid())) throw GridMismatchError("profile and field use different vertical grids");
}

void require_same_grid(const VProfile& a, const VProfile& b) {
  if (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid())) {
    throw GridMismatchError("profiles use different vertical grids");
  }
}

// ---------------------------------------------------------------------------
// Operators

Field2D ddx(const Field2D& a) {
  Field2D out(a.grid_ptr());
  const auto& g = a.grid();
  for (int j = 1; j < g.nyquist(); ++j) {
    const Complex factor(0.0, g.wavenumber(j));
    auto src = a.mode(j);
    auto dst = out.mode(j);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = factor * src[i];
  }
  return out;
}

Field2D ddy(const Field2D& a) {
  Field2D out(a.grid_ptr());
  for (int j = 0; j < a.modes(); ++j) a.grid().vertical().derivative<Complex>(a.mode(j), out.mode(j));
  return out;
}

VProfile ddy(const VProfile& a) {
  VProfile out(a.grid_ptr());
  a.grid().derivative<double>(a.values(), out.values());
  return out;
}

std::string TailWarning::message() const {
  std::ostringstream os;
  os << "integrand not decayed at Ymax: |value| = " << value_at_top << " > " << tolerance;
  return os.str();
}

Field2D int_y_to_inf(const Field2D& a, std::vector<TailWarning>* warnings, double tail_tolerance) {
  Field2D out(a.grid_ptr());
  double top = 0.0;
  for (int j = 0; j < a.modes(); ++j) {
    a.grid().vertical().cumulative_to_top<Complex>(a.mode(j), out.mode(j));
    top = std::max(top, std::abs(a(j, a.ny() - 1)));
  }
  if (warnings != nullptr && top > tail_tolerance) warnings->push_back({top, tail_tolerance});
  return out;
}

VProfile int_y_to_inf(const VProfile& a, std::vector<TailWarning>* warnings, double tail_tolerance) {
  VProfile out(a.grid_ptr());
  a.grid().cumulative_to_top<double>(a.values(), out.values());
  const double top = std::abs(a[a.size() - 1]);
  if (warnings != nullptr && top > tail_tolerance) warnings->push_back({top, tail_tolerance});
  return out;
}

Field2D int_0_to_y(const Field2D& a) {
  Field2D out(a.grid_ptr());
  for (int j = 0; j < a.modes(); ++j) a.grid().vertical().cumulative_from_wall<Complex>(a.mode(j), out.mode(j));
  return out;
}

VProfile int_0_to_y(const VProfile& a) {
  VProfile out(a.grid_ptr());
  a.grid().cumulative_from_wall<double>(a.values(), out.values());
  return out;
}

std::vector<Complex> integrate_y(const Field2D& a) {
  std::vector<Complex> out(static_cast<std::size_t>(a.modes()));
  for (int j = 0; j < a.modes(); ++j) out[static_cast<std::size_t>(j)] = a.grid().vertical().integrate<Complex>(a.mode(j));
  return out;
}

double integrate_y(const VProfile& a) { return a.grid().integrate<double>(a.values()); }

// ---------------------------------------------------------------------------
// Weights and norms

VProfile gaussian_weight(const std::shared_ptr<const VerticalGrid>& grid, double t, double gamma, bool* capped) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("weight exponent gamma must lie in (0, 1]", "gamma");
  if (!(t >= 0.0)) throw ConfigError("weight time must be nonnegative", "t");
  constexpr double kCap = 1e300;
  const double log_cap = std::log(kCap);
  VProfile w(grid);
  bool hit = false;
  for (int i = 0; i < w.size(); ++i) {
    const double y = grid->node(i);
    const double exponent = gamma * y * y / (8.0 * (1.0 + t));
    if (exponent >= log_cap) {
      w[i] = kCap;
      hit = true;
    } else {
      w[i] = std::exp(exponent);
    }
  }
  if (capped != nullptr) *capped = hit;
  return w;
}

std::vector<double> mode_energies(const Field2D& a, const VProfile* weight) {
  if (weight != nullptr) require_same_grid(a, *weight);
  const auto& vg = a.grid().vertical();
  const auto q = vg.weights();
  std::vector<double> out(static_cast<std::size_t>(a.modes()), 0.0);
  for (int j = 0; j < a.modes(); ++j) {
    auto column = a.mode(j);
    double acc = 0.0;
    for (int i = 0; i < vg.ny(); ++i) {
      const double w = weight != nullptr ? (*weight)[i] : 1.0;
      acc += q[static_cast<std::size_t>(i)] * std::norm(w * column[static_cast<std::size_t>(i)]);
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

namespace {

double parseval_sum(const Grid& g, const std::vector<double>& energies) {
  double total = 0.0;
  for (int j = 0; j < g.modes(); ++j) total += g.mode_multiplicity(j) * energies[static_cast<std::size_t>(j)];
  return g.length() * total;
}

}  // namespace

double weighted_l2(const Field2D& a, const VProfile& w) {
  return std::sqrt(parseval_sum(a.grid(), mode_energies(a, &w)));
}

double weighted_l2(const VProfile& a, const VProfile& w) {
  require_same_grid(a, w);
  const auto q = a.grid().weights();
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) acc += q[static_cast<std::size_t>(i)] * (w[i] * a[i]) * (w[i] * a[i]);
  return std::sqrt(acc);
}

double l2_norm(const Field2D& a) { return std::sqrt(parseval_sum(a.grid(), mode_energies(a))); }

double l2_norm(const VProfile& a) {
  const auto q = a.grid().weights();
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) acc += q[static_cast<std::size_t>(i)] * a[i] * a[i];
  return std::sqrt(acc);
}

namespace {

TrevesResult treves_from(double lhs, double rhs) {
  TrevesResult r{lhs, rhs, 0.0};
  r.ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

TrevesResult treves_check(const Field2D& a, double t) {
  const auto w = gaussian_weight(a.grid().vertical_ptr(), t, 1.0);
  const double d = weighted_l2(ddy(a), w);
  const double n = weighted_l2(a, w);
  return treves_from(d * d, n * n / (2.0 * (1.0 + t)));
}

TrevesResult treves_check(const VProfile& a, double t) {
  const auto w = gaussian_weight(a.grid_ptr(), t, 1.0);
  const double d = weighted_l2(ddy(a), w);
  const double n = weighted_l2(a, w);
  return treves_from(d * d, n * n / (2.0 * (1.0 + t)));
}

// ---------------------------------------------------------------------------
// Products

int dealias_cutoff(const Grid& grid) noexcept { return grid.nx() / 3; }

Field2D multiply(const Field2D& a, const Field2D& b, ProductMode mode) {
  require_same_grid(a, b);
  const auto& g = a.grid();
  const int ny = g.ny();
  const int points = mode == ProductMode::Exact ? 2 * g.nx() : g.nx();
  const int keep = mode == ProductMode::Exact ? g.nyquist() : dealias_cutoff(g) + 1;

  auto truncated = [&](const Field2D& f) {
    std::vector<Complex> c(f.coefficients().begin(), f.coefficients().end());
    std::fill(c.begin() + static_cast<std::ptrdiff_t>(keep) * ny, c.end(), Complex{});
    return c;
  };

  TangentialTransform transform(points, ny);
  std::vector<double> pa(static_cast<std::size_t>(points) * ny);
  std::vector<double> pb(pa.size());
  transform.to_physical(truncated(a), g.modes(), pa);
  transform.to_physical(truncated(b), g.modes(), pb);
  for (std::size_t k = 0; k < pa.size(); ++k) pa[k] *= pb[k];

  Field2D out(a.grid_ptr());
  transform.to_spectral(pa, g.modes(), out.coefficients());
  std::fill(out.coefficients().begin() + static_cast<std::ptrdiff_t>(keep) * ny, out.coefficients().end(), Complex{});
  return out;
}

}  // namespace prandtl
