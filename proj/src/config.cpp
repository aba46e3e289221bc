#include "prandtl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "prandtl/corrector.hpp"
#include "prandtl/errors.hpp"

namespace prandtl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("value '" + v + "' for key '" + key + "' is not a number", key);
  }
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("value '" + v + "' for key '" + key + "' is not an integer", key);
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("value '" + v + "' for key '" + key + "' is not a boolean", key);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void fail(const std::string& key, const std::string& constraint) {
  throw ConfigError("invalid '" + key + "': " + constraint, key);
}

}  // namespace

const std::vector<Preset>& preset_table() {
  static const std::vector<Preset> table = [] {
    std::vector<Preset> t;
    {
      ScenarioConfig c;
      c.preset = "zero-data";
      c.eta = 0.0;
      c.epsilon = 0.0;
      c.f = "zero";
      c.t_final = 1.0;
      t.push_back({"zero-data", "null solution: u and the corrector stay identically zero", c});
    }
    {
      ScenarioConfig c;
      c.preset = "smalldata-decay";
      t.push_back({"smalldata-decay",
                   "global small-data run: theta stays below delta/(2 lambda); decay rates t^-3/4 (u) and t^-5/4 (G)",
                   c});
    }
    {
      ScenarioConfig c;
      c.preset = "largedata-breach";
      c.eta = 1.0;
      c.t_final = 10.0;
      t.push_back({"largedata-breach", "large data: the analytic radius is expected to be exhausted (T* breach)", c});
    }
    return t;
  }();
  return table;
}

ScenarioConfig preset_config(const std::string& name) {
  for (const auto& p : preset_table()) {
    if (p.name == name) return p.config;
  }
  throw ConfigError("unknown preset '" + name + "'", "preset");
}

void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& v) {
  if (key == "preset") {
    c = preset_config(v);
  } else if (key == "nx") {
    c.nx = to_int(key, v);
  } else if (key == "length") {
    c.length = to_double(key, v);
  } else if (key == "ny") {
    c.ny = to_int(key, v);
  } else if (key == "ymax") {
    c.ymax = to_double(key, v);
  } else if (key == "dt") {
    c.dt = to_double(key, v);
  } else if (key == "t_final") {
    c.t_final = to_double(key, v);
  } else if (key == "eta") {
    c.eta = to_double(key, v);
  } else if (key == "k0") {
    c.k0 = to_int(key, v);
  } else if (key == "epsilon") {
    c.epsilon = to_double(key, v);
  } else if (key == "delta") {
    c.delta = to_double(key, v);
  } else if (key == "lambda") {
    c.lambda = to_double(key, v);
  } else if (key == "f_spec") {
    c.f = v;
  } else if (key == "output_every") {
    c.output_every = to_int(key, v);
  } else if (key == "products") {
    if (v == "dealiased") {
      c.products = ProductMode::Dealiased23;
    } else if (v == "exact") {
      c.products = ProductMode::Exact;
    } else {
      fail(key, "expected 'dealiased' or 'exact'");
    }
  } else if (key == "cfl_limit") {
    c.cfl_limit = to_double(key, v);
  } else if (key == "zero_integral_tol") {
    c.zero_integral_tol = to_double(key, v);
  } else if (key == "fit_lo") {
    c.fit_lo = to_double(key, v);
  } else if (key == "fit_hi") {
    c.fit_hi = to_double(key, v);
  } else if (key == "corrector_spacing") {
    c.corrector_spacing = to_double(key, v);
  } else if (key == "cache_dir") {
    c.cache_dir = v;
  } else if (key == "relations") {
    c.relations = to_bool(key, v);
  } else if (key == "tail_abort") {
    c.tail_abort = to_double(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'", key);
  }
}

void validate_config(const ScenarioConfig& c) {
  if (c.nx < 8 || (c.nx & (c.nx - 1)) != 0) fail("nx", "must be a power of two >= 8");
  if (!(c.length > 0.0) || !std::isfinite(c.length)) fail("length", "must be positive");
  if (c.ny < 8) fail("ny", "must be >= 8");
  if (!(c.ymax > 0.0) || !std::isfinite(c.ymax)) fail("ymax", "must be positive");
  if (!(c.dt > 0.0)) fail("dt", "must be positive");
  if (!(c.t_final > 0.0) || !std::isfinite(c.t_final)) fail("t_final", "must be positive");
  if (!(c.eta >= 0.0) || !std::isfinite(c.eta)) fail("eta", "must be nonnegative");
  if (c.k0 < 1 || c.k0 >= c.nx / 2) fail("k0", "must lie in 1..nx/2-1");
  if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) fail("epsilon", "must be nonnegative");
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) fail("delta", "must be positive");
  if (!(c.lambda >= 1.0) || !std::isfinite(c.lambda)) fail("lambda", "must be >= 1");
  if (c.output_every < 1) fail("output_every", "must be >= 1");
  if (!(c.cfl_limit > 0.0)) fail("cfl_limit", "must be positive");
  if (!(c.zero_integral_tol > 0.0)) fail("zero_integral_tol", "must be positive");
  if (c.fit_lo >= 0.0 && c.fit_hi >= 0.0 && !(c.fit_lo < c.fit_hi)) fail("fit_lo", "must be below fit_hi");
  if (!(c.corrector_spacing >= 0.0)) fail("corrector_spacing", "must be nonnegative");
  if (!(c.tail_abort >= 0.0)) fail("tail_abort", "must be nonnegative");
  if (c.f.empty()) fail("f_spec", "must name an outflow profile");
  (void)OutflowProfile::from_spec(c.f);
}

ScenarioConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> entries;
  std::vector<std::string> order;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + " is not of the form key = value", "line");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (entries.count(key)) throw ConfigError("key '" + key + "' given twice", key);
    entries[key] = value;
    order.push_back(key);
  }
  ScenarioConfig c;
  if (auto it = entries.find("preset"); it != entries.end()) apply_setting(c, "preset", it->second);
  for (const auto& key : order) {
    if (key != "preset") apply_setting(c, key, entries[key]);
  }
  validate_config(c);
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'", "path");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str());
}

std::string to_text(const ScenarioConfig& c) {
  std::ostringstream os;
  if (!c.preset.empty()) os << "# resolved from preset " << c.preset << "\n";
  os << "nx = " << c.nx << "\n"
     << "length = " << fmt(c.length) << "\n"
     << "ny = " << c.ny << "\n"
     << "ymax = " << fmt(c.ymax) << "\n"
     << "dt = " << fmt(c.dt) << "\n"
     << "t_final = " << fmt(c.t_final) << "\n"
     << "eta = " << fmt(c.eta) << "\n"
     << "k0 = " << c.k0 << "\n"
     << "epsilon = " << fmt(c.epsilon) << "\n"
     << "delta = " << fmt(c.delta) << "\n"
     << "lambda = " << fmt(c.lambda) << "\n"
     << "f_spec = " << c.f << "\n"
     << "output_every = " << c.output_every << "\n"
     << "products = " << (c.products == ProductMode::Exact ? "exact" : "dealiased") << "\n"
     << "cfl_limit = " << fmt(c.cfl_limit) << "\n"
     << "zero_integral_tol = " << fmt(c.zero_integral_tol) << "\n"
     << "fit_lo = " << fmt(c.fit_lo) << "\n"
     << "fit_hi = " << fmt(c.fit_hi) << "\n"
     << "corrector_spacing = " << fmt(c.corrector_spacing) << "\n"
     << "relations = " << (c.relations ? "true" : "false") << "\n"
     << "tail_abort = " << fmt(c.tail_abort) << "\n";
  if (!c.cache_dir.empty()) os << "cache_dir = " << c.cache_dir << "\n";
  return os.str();
}

}  // namespace prandtl
