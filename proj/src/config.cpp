#include "nsch/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nsch/error.hpp"

namespace nsch {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ConfigError("expected a number, got '" + t + "'");
  return v;
}

long long to_int(const std::string& s) {
  const std::string t = trim(s);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ConfigError("expected an integer, got '" + t + "'");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("expected true/false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(to_double(item));
  if (out.empty()) throw ConfigError("expected a comma-separated list of numbers");
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += format_double(v[k]);
  }
  return out;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

template <class E>
E to_enum(const std::string& s, const std::vector<std::pair<std::string, E>>& names) {
  const std::string t = trim(s);
  std::string all;
  for (const auto& [name, e] : names) {
    if (name == t) return e;
    all += (all.empty() ? "" : ", ") + name;
  }
  throw ConfigError("unknown value '" + t + "' (expected one of: " + all + ")");
}

template <class E>
std::string from_enum(E e, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [name, x] : names)
    if (x == e) return name;
  return "?";
}

const std::vector<std::pair<std::string, Boundary>> kBoundary = {
    {"neumann", Boundary::NeumannNoSlip}, {"periodic", Boundary::Periodic}};
const std::vector<std::pair<std::string, SourceKind>> kSources = {
    {"zero", SourceKind::Zero},
    {"prescribed", SourceKind::Prescribed},
    {"proliferation", SourceKind::Proliferation},
    {"lipschitz-growth", SourceKind::LipschitzGrowth}};
const std::vector<std::pair<std::string, InitialKind>> kInitial = {
    {"uniform", InitialKind::Uniform},
    {"random", InitialKind::Random},
    {"disk", InitialKind::Disk},
    {"tanh-strip", InitialKind::TanhStrip},
    {"file", InitialKind::File}};
const std::vector<std::pair<std::string, SnapshotFormat>> kFormat = {
    {"csv", SnapshotFormat::Csv}, {"vtk", SnapshotFormat::Vtk}};
const std::vector<std::pair<std::string, bool>> kProfile = {{"constant", false},
                                                            {"polynomial", true}};
const std::vector<std::pair<std::string, bool>> kPotential = {{"quartic", false},
                                                              {"polynomial", true}};

struct Entry {
  std::string key;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define NUM(key, field)                                                         \
  Entry {                                                                       \
    key, [](SimConfig& c, const std::string& v) { c.field = to_double(v); },    \
        [](const SimConfig& c) { return format_double(c.field); }               \
  }
#define INT(key, field)                                                                  \
  Entry {                                                                                \
    key,                                                                                 \
        [](SimConfig& c, const std::string& v) {                                         \
          c.field = static_cast<decltype(c.field)>(to_int(v));                           \
        },                                                                               \
        [](const SimConfig& c) { return std::to_string(c.field); }                       \
  }
#define STR(key, field)                                                       \
  Entry {                                                                     \
    key, [](SimConfig& c, const std::string& v) { c.field = trim(v); },       \
        [](const SimConfig& c) { return c.field; }                            \
  }
#define BOOL(key, field)                                                      \
  Entry {                                                                     \
    key, [](SimConfig& c, const std::string& v) { c.field = to_bool(v); },    \
        [](const SimConfig& c) { return from_bool(c.field); }                 \
  }
#define ENUM(key, field, table)                                                        \
  Entry {                                                                              \
    key, [](SimConfig& c, const std::string& v) { c.field = to_enum(v, table); },      \
        [](const SimConfig& c) { return from_enum(c.field, table); }                   \
  }
#define LIST(key, field)                                                      \
  Entry {                                                                     \
    key, [](SimConfig& c, const std::string& v) { c.field = to_list(v); },    \
        [](const SimConfig& c) { return from_list(c.field); }                 \
  }
#define COEFF(section, member)                                   \
  ENUM(section ".kind", member.polynomial, kProfile),            \
      NUM(section ".value", member.value),                       \
      LIST(section ".coefficients", member.coefficients),        \
      NUM(section ".lower", member.lower), NUM(section ".upper", member.upper)

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      INT("grid.nx", grid.nx),
      INT("grid.ny", grid.ny),
      NUM("grid.Lx", grid.lx),
      NUM("grid.Ly", grid.ly),
      ENUM("grid.bc", grid.bc, kBoundary),
      NUM("model.A", params.A),
      NUM("model.B", params.B),
      NUM("model.chi", params.chi),
      NUM("model.beta", beta),
      NUM("model.epsilon", epsilon),
      ENUM("potential.kind", potential.polynomial, kPotential),
      LIST("potential.coefficients", potential.coefficients),
      NUM("potential.s_max", potential.s_max),
      NUM("potential.stabilization", potential.stabilization),
      NUM("potential.c0", potential.growth.c0),
      NUM("potential.c1", potential.growth.c1),
      NUM("potential.c2", potential.growth.c2),
      NUM("potential.c3", potential.growth.c3),
      NUM("potential.c4", potential.growth.c4),
      NUM("potential.r", potential.growth.r),
      COEFF("mobility", mobility),
      COEFF("nutrient_mobility", nutrient_mobility),
      COEFF("viscosity", viscosity),
      ENUM("sources.kind", sources.kind, kSources),
      NUM("sources.proliferation", sources.proliferation),
      NUM("sources.apoptosis", sources.apoptosis),
      NUM("sources.consumption", sources.consumption),
      NUM("sources.saturation", sources.ramp_saturation),
      STR("sources.path", sources.path),
      ENUM("initial.kind", initial.kind, kInitial),
      NUM("initial.phi", initial.phi_value),
      NUM("initial.amplitude", initial.amplitude),
      INT("initial.seed", initial.seed),
      NUM("initial.radius", initial.radius),
      NUM("initial.center_x", initial.center_x),
      NUM("initial.center_y", initial.center_y),
      NUM("initial.width", initial.width),
      NUM("initial.sigma", initial.sigma_value),
      STR("initial.phi_file", initial.phi_file),
      STR("initial.sigma_file", initial.sigma_file),
      NUM("time.T_end", time.t_end),
      NUM("time.dt_init", time.dt_init),
      NUM("time.dt_min", time.dt_min),
      NUM("time.dt_max", time.dt_max),
      NUM("time.cfl", time.cfl),
      INT("output.snapshot_every", output.snapshot_every),
      STR("output.series_path", output.series_path),
      STR("output.snapshot_dir", output.snapshot_dir),
      ENUM("output.format", output.format, kFormat),
      INT("output.checkpoint_every", output.checkpoint_every),
      NUM("solver.krylov_tol", solver.krylov_tol),
      INT("solver.krylov_maxit", solver.krylov_maxit),
      NUM("solver.poisson_tol", solver.poisson_tol),
      BOOL("solver.override_validation", solver.override_validation),
      BOOL("solver.stabilized_coupling", solver.stabilized_coupling),
  };
  return entries;
}

#undef NUM
#undef INT
#undef STR
#undef BOOL
#undef ENUM
#undef LIST
#undef COEFF

const Entry* find_entry(const std::string& key) {
  for (const auto& e : registry())
    if (e.key == key) return &e;
  return nullptr;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

CoeffSpec CoeffConfig::build() const {
  return polynomial ? CoeffSpec::clamped_polynomial(coefficients, lower, upper)
                    : CoeffSpec::constant(value);
}

PotentialSpec PotentialConfig::build() const {
  PotentialSpec spec = polynomial ? PotentialSpec::polynomial(coefficients, growth, s_max)
                                  : PotentialSpec::quartic(s_max);
  if (stabilization > 0.0) spec.stabilization = stabilization;
  return spec;
}

SimConfig::SimConfig() { finalize(); }

void SimConfig::finalize() {
  if (beta != 0.0 || epsilon != 0.0) {
    const InterfaceScaling s = epsilon_beta_map(beta, epsilon);
    params.A = s.A;
    params.B = s.B;
  }
  params.potential = potential.build();
  params.mobility_m = mobility.build();
  params.mobility_n = nutrient_mobility.build();
  params.viscosity_eta = viscosity.build();
}

void SimConfig::validate() const {
  grid.validate();
  if (!(time.t_end >= 0.0)) throw ConfigError("time.T_end must be non-negative");
  if (!(time.dt_min > 0.0) || !(time.dt_min <= time.dt_init) || !(time.dt_init <= time.dt_max))
    throw ConfigError("time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
  if (!(time.cfl > 0.0) || time.cfl > 1.0) throw ConfigError("time.cfl must lie in (0, 1]");
  if (!(solver.krylov_tol > 0.0) || solver.krylov_tol >= 1.0)
    throw ConfigError("solver.krylov_tol must lie in (0, 1)");
  if (solver.krylov_maxit <= 0) throw ConfigError("solver.krylov_maxit must be positive");
  if (!(solver.poisson_tol > 0.0)) throw ConfigError("solver.poisson_tol must be positive");
  if (output.snapshot_every < 0 || output.checkpoint_every < 0)
    throw ConfigError("output intervals must be non-negative");
  sources.validate();
  if (!(initial.amplitude >= 0.0)) throw ConfigError("initial.amplitude must be non-negative");
  if (initial.kind == InitialKind::Disk && !(initial.radius > 0.0))
    throw ConfigError("initial.radius must be positive");
  if (!(initial.width >= 0.0)) throw ConfigError("initial.width must be non-negative");
  if (initial.kind == InitialKind::File && initial.phi_file.empty())
    throw ConfigError("initial.kind = file needs initial.phi_file");
}

SimConfig parse_config(const std::string& text, const std::string& origin) {
  SimConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Entry* e = find_entry(key);
    if (!e)
      throw ConfigError(where + "unknown key '" + key + "' (did you mean '" + nearest_key(key) +
                        "'?)");
    if (!seen.insert(key).second) throw ConfigError(where + "key '" + key + "' given twice");
    try {
      e->set(cfg, value);
    } catch (const ConfigError& err) {
      throw ConfigError(where + key + ": " + err.what());
    }
  }
  cfg.finalize();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string save_config(const SimConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& e : registry()) {
    const std::string sec = e.key.substr(0, e.key.find('.'));
    if (sec != section) {
      if (!section.empty()) out += '\n';
      out += "# " + sec + "\n";
      section = sec;
    }
    out += e.key + " = " + e.get(cfg) + "\n";
  }
  return out;
}

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value) {
  const Entry* e = find_entry(key);
  if (!e)
    throw ConfigError("unknown key '" + key + "' (did you mean '" + nearest_key(key) + "'?)");
  e->set(cfg, value);
  cfg.finalize();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : registry()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

std::string nearest_key(const std::string& key) {
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& k : config_keys()) {
    const std::size_t d = edit_distance(key, k);
    if (d < best_d) best_d = d, best = k;
  }
  return best;
}

std::string config_hash(const SimConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : save_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nsch
