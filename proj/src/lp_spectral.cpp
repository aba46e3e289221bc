#include "prandtl/lp_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "prandtl/errors.hpp"

namespace prandtl {

namespace {

constexpr double kStepEdge = 1e-3;
constexpr double kChiInner = 0.75;
constexpr double kChiOuter = 4.0 / 3.0;

struct Logistic {
  double s;   // 1/(1+e^q)
  double sc;  // 1 - s, computed without cancellation
};

Logistic logistic(double q) noexcept {
  if (q > 0) {
    const double e = std::exp(-q);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
  }
  const double e = std::exp(q);
  return {1.0 / (1.0 + e), e / (1.0 + e)};
}

}  // namespace

double smoothstep(double t) noexcept {
  if (t <= kStepEdge) return 0.0;
  if (t >= 1.0 - kStepEdge) return 1.0;
  return logistic(1.0 / t - 1.0 / (1.0 - t)).s;
}

double smoothstep_d1(double t) noexcept {
  if (t <= kStepEdge || t >= 1.0 - kStepEdge) return 0.0;
  const double q1 = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
  const auto l = logistic(1.0 / t - 1.0 / (1.0 - t));
  return -q1 * l.s * l.sc;
}

double smoothstep_d2(double t) noexcept {
  if (t <= kStepEdge || t >= 1.0 - kStepEdge) return 0.0;
  const double q1 = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
  const double q2 = 2.0 / (t * t * t) - 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
  const auto l = logistic(1.0 / t - 1.0 / (1.0 - t));
  const double d1 = -q1 * l.s * l.sc;
  return -q2 * l.s * l.sc - q1 * d1 * (l.sc - l.s);
}

double chi_lp(double tau) noexcept {
  const double a = std::abs(tau);
  if (a <= kChiInner) return 1.0;
  if (a >= kChiOuter) return 0.0;
  return 1.0 - smoothstep((a - kChiInner) / (kChiOuter - kChiInner));
}

double phi_lp(double tau) noexcept { return chi_lp(0.5 * tau) - chi_lp(tau); }

// ---------------------------------------------------------------------------

DyadicFilterBank::DyadicFilterBank(double length, int nx) : length_(length), nx_(nx) {
  if (nx < 8 || (nx & (nx - 1)) != 0) throw ConfigError("filter bank needs Nx a power of two >= 8", "nx");
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("torus length must be positive", "length");
  const double xi_min = 2.0 * std::numbers::pi / length;
  const double xi_max = std::numbers::pi * nx / length;
  k_min_ = static_cast<int>(std::floor(std::log2(xi_min))) - 1;
  k_max_ = static_cast<int>(std::ceil(std::log2(xi_max))) + 1;

  const int modes = nx / 2 + 1;
  wavenumbers_.resize(static_cast<std::size_t>(modes));
  for (int j = 0; j < modes; ++j) wavenumbers_[static_cast<std::size_t>(j)] = xi_min * j;
  weights_.assign(static_cast<std::size_t>(block_count()) * modes, 0.0);
  for (int k = k_min_; k <= k_max_; ++k) {
    for (int j = 1; j < modes; ++j) {
      weights_[static_cast<std::size_t>(k - k_min_) * modes + j] =
          phi_lp(std::ldexp(wavenumbers_[static_cast<std::size_t>(j)], -k));
    }
  }
}

double DyadicFilterBank::block_weight(int k, int mode) const noexcept {
  if (k < k_min_ || k > k_max_ || mode <= 0 || mode >= static_cast<int>(wavenumbers_.size())) return 0.0;
  return weights_[static_cast<std::size_t>(k - k_min_) * wavenumbers_.size() + static_cast<std::size_t>(mode)];
}

std::vector<int> DyadicFilterBank::active_blocks(int mode) const {
  std::vector<int> out;
  for (int k = k_min_; k <= k_max_; ++k) {
    if (block_weight(k, mode) != 0.0) out.push_back(k);
  }
  return out;
}

bool DyadicFilterBank::matches(const Grid& grid) const noexcept {
  return grid.nx() == nx_ && grid.length() == length_;
}

DyadicFilterBank build_filter_bank(double length, int nx) { return DyadicFilterBank(length, nx); }

namespace {

void require_bank(const DyadicFilterBank& bank, const Grid& grid) {
  if (!bank.matches(grid)) throw GridMismatchError("filter bank built for a different tangential grid");
}

// Multiplies every mode column by w(j).
template <typename W>
Field2D mode_filter(const Field2D& a, W&& w) {
  Field2D out(a.grid_ptr());
  for (int j = 0; j < a.modes(); ++j) {
    const double c = w(j);
    if (c == 0.0) continue;
    auto src = a.mode(j);
    auto dst = out.mode(j);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = c * src[i];
  }
  return out;
}

}  // namespace

Field2D dyadic_block(const DyadicFilterBank& bank, const Field2D& a, int k) {
  require_bank(bank, a.grid());
  return mode_filter(a, [&](int j) { return bank.block_weight(k, j); });
}

Field2D low_pass(const DyadicFilterBank& bank, const Field2D& a, int k) {
  require_bank(bank, a.grid());
  return mode_filter(a, [&](int j) {
    if (j == 0) return 1.0;
    double w = 0.0;
    for (int kk = bank.k_min(); kk <= k - 1; ++kk) w += bank.block_weight(kk, j);
    return w;
  });
}

std::vector<double> block_norms(const DyadicFilterBank& bank, const Field2D& a, const VProfile* weight) {
  require_bank(bank, a.grid());
  const auto energies = mode_energies(a, weight);
  const auto& g = a.grid();
  std::vector<double> out(static_cast<std::size_t>(bank.block_count()), 0.0);
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    double acc = 0.0;
    for (int j = 1; j < g.modes(); ++j) {
      const double w = bank.block_weight(k, j);
      acc += g.mode_multiplicity(j) * w * w * energies[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(k - bank.k_min())] = std::sqrt(g.length() * acc);
  }
  return out;
}

double besov_from_blocks(const DyadicFilterBank& bank, std::span<const double> blocks, double s) {
  double total = 0.0;
  for (int k = bank.k_min(); k <= bank.k_max(); ++k) {
    total += std::exp2(k * s) * blocks[static_cast<std::size_t>(k - bank.k_min())];
  }
  return total;
}

double besov_norm(const DyadicFilterBank& bank, const Field2D& a, double s, const VProfile* weight) {
  if (s <= 0.5) return besov_from_blocks(bank, block_norms(bank, a, weight), s);
  const int ell = static_cast<int>(std::ceil(s - 0.5));
  Field2D d = ddx(a);
  for (int m = 1; m < ell; ++m) d = ddx(d);
  return besov_from_blocks(bank, block_norms(bank, d, weight), s - ell);
}

double chemin_lerner_norm(const DyadicFilterBank& bank, const BlockNormSeries& series, TimeNorm p, double s,
                          double t0, double t1, std::span<const double> weight) {
  const auto& times = series.times;
  if (series.norms.size() != times.size()) throw ConfigError("block-norm series length mismatch", "series");
  if (!weight.empty() && weight.size() != times.size()) throw ConfigError("weight samples do not match series", "weight");
  for (const auto& row : series.norms) {
    if (row.size() != static_cast<std::size_t>(bank.block_count())) {
      throw GridMismatchError("block-norm sample does not match the filter bank");
    }
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(t1));
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (times[n] >= t0 - slack && times[n] <= t1 + slack) idx.push_back(n);
  }
  if (!(t1 > t0) || idx.empty() || (p != TimeNorm::Linf && idx.size() < 2)) {
    throw ConfigError("Chemin-Lerner window contains no time interval", "window");
  }
  auto w_at = [&](std::size_t n) { return weight.empty() ? 1.0 : weight[n]; };

  std::vector<double> per_block(static_cast<std::size_t>(bank.block_count()), 0.0);
  for (std::size_t b = 0; b < per_block.size(); ++b) {
    if (p == TimeNorm::Linf) {
      double m = 0.0;
      for (auto n : idx) m = std::max(m, w_at(n) * series.norms[n][b]);
      per_block[b] = m;
      continue;
    }
    const double power = p == TimeNorm::L1 ? 1.0 : 2.0;
    double integral = 0.0;
    for (std::size_t q = 0; q + 1 < idx.size(); ++q) {
      const auto n0 = idx[q];
      const auto n1 = idx[q + 1];
      const double v0 = w_at(n0) * std::pow(series.norms[n0][b], power);
      const double v1 = w_at(n1) * std::pow(series.norms[n1][b], power);
      integral += 0.5 * (times[n1] - times[n0]) * (v0 + v1);
    }
    per_block[b] = std::pow(std::max(integral, 0.0), 1.0 / power);
  }
  return besov_from_blocks(bank, per_block, s);
}

double chemin_lerner_norm(const DyadicFilterBank& bank, std::span<const double> times,
                          std::span<const Field2D> fields, TimeNorm p, double s, double t0, double t1,
                          std::span<const double> weight) {
  if (times.size() != fields.size()) throw ConfigError("time samples do not match field series", "series");
  BlockNormSeries series;
  series.times.assign(times.begin(), times.end());
  for (const auto& f : fields) series.norms.push_back(block_norms(bank, f));
  return chemin_lerner_norm(bank, series, p, s, t0, t1, weight);
}

BonyParts bony_parts(const DyadicFilterBank& bank, const Field2D& f, const Field2D& g) {
  require_same_grid(f, g);
  require_bank(bank, f.grid());
  const auto& grid = f.grid();
  const int ny = grid.ny();
  const int points = 2 * grid.nx();
  TangentialTransform transform(points, ny);
  const std::size_t size = static_cast<std::size_t>(points) * ny;

  auto physical = [&](const Field2D& a) {
    std::vector<double> out(size);
    transform.to_physical(a.coefficients(), grid.modes(), out);
    return out;
  };
  auto mean_only = [&](const Field2D& a) { return mode_filter(a, [](int j) { return j == 0 ? 1.0 : 0.0; }); };

  const int nb = bank.block_count();
  std::vector<std::vector<double>> df(static_cast<std::size_t>(nb));
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    df[static_cast<std::size_t>(b)] = physical(dyadic_block(bank, f, bank.k_min() + b));
    dg[static_cast<std::size_t>(b)] = physical(dyadic_block(bank, g, bank.k_min() + b));
  }
  const auto f0 = physical(mean_only(f));
  const auto g0 = physical(mean_only(g));

  std::vector<double> tfg(size, 0.0);
  std::vector<double> tgf(size, 0.0);
  std::vector<double> rem(size, 0.0);
  for (std::size_t n = 0; n < size; ++n) rem[n] = f0[n] * g0[n];

  // Running low-pass S_{k-1} = mean + Σ_{k' <= k-2} Δ_{k'}.
  std::vector<double> sf = f0;
  std::vector<double> sg = g0;
  for (int b = 0; b < nb; ++b) {
    if (b >= 2) {
      for (std::size_t n = 0; n < size; ++n) {
        sf[n] += df[static_cast<std::size_t>(b - 2)][n];
        sg[n] += dg[static_cast<std::size_t>(b - 2)][n];
      }
    }
    const auto& dfb = df[static_cast<std::size_t>(b)];
    const auto& dgb = dg[static_cast<std::size_t>(b)];
    for (std::size_t n = 0; n < size; ++n) {
      tfg[n] += sf[n] * dgb[n];
      tgf[n] += sg[n] * dfb[n];
    }
    for (int c = std::max(0, b - 1); c <= std::min(nb - 1, b + 1); ++c) {
      const auto& dgc = dg[static_cast<std::size_t>(c)];
      for (std::size_t n = 0; n < size; ++n) rem[n] += dfb[n] * dgc[n];
    }
  }

  auto spectral = [&](const std::vector<double>& phys) {
    Field2D out(f.grid_ptr());
    transform.to_spectral(phys, grid.modes(), out.coefficients());
    std::ranges::fill(out.mode(grid.nyquist()), Complex{});
    return out;
  };
  return {spectral(tfg), spectral(tgf), spectral(rem)};
}

Field2D analytic_multiplier(const Field2D& a, double radius, AmplificationReport* report) {
  if (radius < 0.0 || std::isnan(radius)) throw NegativeRadiusError("analytic radius is negative: strip has closed");
  const auto& g = a.grid();
  const double limit = std::log(1.0 / std::numeric_limits<double>::epsilon());
  AmplificationReport rep;
  Field2D out(a.grid_ptr());
  for (int j = 0; j < a.modes(); ++j) {
    const double exponent = radius * g.wavenumber(j);
    auto src = a.mode(j);
    auto dst = out.mode(j);
    bool nonzero = false;
    const double c = std::exp(exponent);
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = c * src[i];
      nonzero = nonzero || src[i] != Complex{};
    }
    if (nonzero) {
      rep.max_exponent = std::max(rep.max_exponent, exponent);
      if (exponent > limit) ++rep.flagged_modes;
    }
  }
  if (report != nullptr) *report = rep;
  return out;
}

}  // namespace prandtl
