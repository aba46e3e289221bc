#include "prandtl/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prandtl/errors.hpp"
#include "json.hpp"

namespace prandtl {

namespace {

double to_le(double x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    auto bits = std::bit_cast<std::uint64_t>(x);
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((bits >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return std::bit_cast<double>(r);
  }
}

void put(std::ofstream& out, double x) {
  const double v = to_le(x);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

double get(std::ifstream& in, const std::string& path) {
  double v = 0.0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("truncated file '" + path + "'", "path");
  return to_le(v);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'", "path");
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_snapshot(const std::string& path, const Field2D& a) {
  auto out = open_out(path, std::ios::binary);
  const auto& g = a.grid();
  put(out, g.nx());
  put(out, g.ny());
  put(out, g.length());
  put(out, g.ymax());
  for (double v : a.to_physical()) put(out, v);
}

Field2D read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'", "path");
  const double nx = get(in, path);
  const double ny = get(in, path);
  const double length = get(in, path);
  const double ymax = get(in, path);
  const auto grid = Grid::make(static_cast<int>(nx), length, static_cast<int>(ny), ymax);
  std::vector<double> samples(static_cast<std::size_t>(grid->nx()) * static_cast<std::size_t>(grid->ny()));
  for (auto& v : samples) v = get(in, path);
  return Field2D::from_physical(grid, samples);
}

void write_field_csv(const std::string& path, const Field2D& a) {
  auto out = open_out(path);
  const auto& g = a.grid();
  const auto phys = a.to_physical();
  out << "x,y,value\n";
  for (int n = 0; n < g.nx(); ++n) {
    for (int i = 0; i < g.ny(); ++i) {
      out << num(n * g.dx()) << ',' << num(g.vertical().node(i)) << ','
          << num(phys[static_cast<std::size_t>(n) * static_cast<std::size_t>(g.ny()) + static_cast<std::size_t>(i)])
          << '\n';
    }
  }
}

std::vector<std::string> diagnostics_columns() {
  std::vector<std::string> cols{"t", "theta", "radius"};
  for (const char* k : kNormKeys) cols.emplace_back(k);
  for (const char* k : {"theta_dot_corrector", "theta_dot_outflow", "theta_dot_bulk", "zero_integral_residual",
                        "wall_residual", "mean_mode", "tail_indicator", "amplification_flags",
                        "rel_u_G_g050", "rel_u_G_g075", "rel_dyu_dyG_g050", "rel_dyu_dyG_g075",
                        "rel_yphi_dyG_g050", "rel_yphi_dyG_g075", "phi_reconstruction_error",
                        "dyu_reconstruction_error", "g_identity_error"}) {
    cols.emplace_back(k);
  }
  return cols;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  auto out = open_out(path);
  const auto cols = diagnostics_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& r : records) {
    out << num(r.t) << ',' << num(r.theta) << ',' << num(r.radius);
    for (double v : r.norms) out << ',' << num(v);
    const auto& rel = r.relations;
    for (double v : {r.theta_rate.corrector, r.theta_rate.outflow, r.theta_rate.bulk, r.zero_integral_residual,
                     r.wall_residual, r.mean_mode, r.tail_indicator, static_cast<double>(r.amplification_flags),
                     rel.u_vs_G[0], rel.u_vs_G[1], rel.dyu_vs_dyG[0], rel.dyu_vs_dyG[1], rel.yphi_vs_dyG[0],
                     rel.yphi_vs_dyG[1], rel.phi_reconstruction_error, rel.dyu_reconstruction_error,
                     rel.g_identity_error}) {
      out << ',' << num(v);
    }
    out << '\n';
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string corrector_cache_key(const std::string& f_spec, double epsilon, const VerticalGrid& grid, double dt,
                                double t_final, double spacing) {
  std::ostringstream os;
  os << "f=" << f_spec << "|eps=" << num(epsilon) << "|ny=" << grid.ny() << "|ymax=" << num(grid.ymax())
     << "|dt=" << num(dt) << "|T=" << num(t_final) << "|spacing=" << num(spacing);
  char buf[40];
  std::snprintf(buf, sizeof buf, "corrector-%016llx.bin", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

void write_corrector(const std::string& path, const CorrectorTrajectory& traj) {
  const std::string tmp = path + ".tmp";
  {
    auto out = open_out(tmp, std::ios::binary);
    const auto& g = traj.grid();
    put(out, static_cast<double>(traj.times().size()));
    put(out, g.ny());
    put(out, traj.t_final());
    put(out, g.ymax());
    for (double t : traj.times()) put(out, t);
    for (const auto& s : traj.snapshots()) {
      for (double v : s.values()) put(out, v);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ConfigError("cannot move cache file into '" + path + "'", "cache_dir");
}

bool read_corrector(const std::string& path, const OutflowProfile& f, double epsilon, double dt, double t_final,
                    std::shared_ptr<const VerticalGrid> grid, std::unique_ptr<CorrectorTrajectory>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  const auto count = static_cast<std::size_t>(get(in, path));
  const int ny = static_cast<int>(get(in, path));
  const double horizon = get(in, path);
  const double ymax = get(in, path);
  if (ny != grid->ny() || ymax != grid->ymax() || horizon != t_final) {
    throw GridMismatchError("cached corrector '" + path + "' does not match the requested grid or horizon");
  }
  std::vector<double> times(count);
  for (auto& t : times) t = get(in, path);
  std::vector<VProfile> snaps;
  snaps.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    VProfile p(grid);
    for (int i = 0; i < ny; ++i) p[i] = get(in, path);
    snaps.push_back(std::move(p));
  }
  out = std::make_unique<CorrectorTrajectory>(grid, f, epsilon, dt, t_final, std::move(times), std::move(snaps));
  return true;
}

namespace {

nlohmann::ordered_json fit_json(const DecayFit& f, bool defined) {
  if (!defined) return nullptr;
  return {{"exponent", f.exponent}, {"r2", f.r2}, {"samples", f.samples}};
}

}  // namespace

std::string summary_json(const SimulationResult& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["status"] = status_name(r.status);
  j["exit_code"] = exit_code(r.status);
  j["message"] = r.message;
  j["t_end"] = r.t_end;
  j["steps"] = r.steps;
  j["records"] = r.records.size();
  const auto& th = r.theorem;
  j["breach"] = th.breach;
  j["max_theta"] = th.max_theta;
  j["theta_final"] = r.records.empty() ? 0.0 : r.records.back().theta;
  j["radius_final"] = r.records.empty() ? r.config.delta : r.records.back().radius;
  j["half_radius_threshold"] = r.config.delta / (2.0 * r.config.lambda);
  j["fit_window"] = {th.fit_lo, th.fit_hi};
  j["exponents_defined"] = th.exponents_defined;
  j["exponents"] = {{"u_B", fit_json(th.u_fit, th.exponents_defined)},
                    {"G_B", fit_json(th.G_fit, th.exponents_defined)},
                    {"u_B_g050", fit_json(th.u_g050_fit, th.exponents_defined)},
                    {"u_B_g075", fit_json(th.u_g075_fit, th.exponents_defined)},
                    {"frakg_B", fit_json(th.frakg_fit, th.exponents_defined)}};
  ordered_json constants = ordered_json::object();
  for (const auto& c : th.constants) {
    if (std::isfinite(c.sup_ratio)) {
      constants[c.name] = c.sup_ratio;
    } else {
      constants[c.name] = nullptr;
    }
  }
  j["fitted_constants"] = constants;
  j["relation_sup"] = {{"u_vs_G_g075", th.relation_sup_u_vs_G}, {"dyu_vs_dyG_g075", th.relation_sup_dyu_vs_dyG}};
  j["theta_integrals"] = {{"corrector", r.theta_integrals[0]}, {"outflow", r.theta_integrals[1]},
                          {"bulk", r.theta_integrals[2]}};
  j["theta_late_increment"] = {{"corrector", r.theta_late_increment[0]}, {"outflow", r.theta_late_increment[1]},
                               {"bulk", r.theta_late_increment[2]}};
  j["initial"] = {{"wall_residual", r.initial.wall_residual},
                  {"zero_integral_residual", r.initial.zero_integral_residual},
                  {"weighted_u_norm", r.initial.weighted_u_norm},
                  {"weighted_phi_norm", r.initial.weighted_phi_norm},
                  {"weighted_G_norm", r.initial.weighted_G_norm}};
  double max_zero = 0.0, max_wall = 0.0;
  for (const auto& rec : r.records) {
    max_zero = std::max(max_zero, rec.zero_integral_residual);
    max_wall = std::max(max_wall, rec.wall_residual);
  }
  j["constraints"] = {{"max_zero_integral_residual", max_zero}, {"max_wall_residual", max_wall}};
  j["config"] = to_text(r.config);
  return j.dump(2) + "\n";
}

void write_run_outputs(const SimulationResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_diagnostics_csv((base / "diagnostics.csv").string(), r.records);
  {
    auto out = open_out((base / "summary.json").string());
    out << summary_json(r);
  }
  {
    auto out = open_out((base / "config.resolved").string());
    out << to_text(r.config);
  }
  if (r.final_u) {
    const char* name = r.status == RunStatus::NumericFault ? "last_good.bin" : "final_state.bin";
    write_snapshot((base / name).string(), *r.final_u);
  }
}

}  // namespace prandtl
