#include "nsch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "nsch/ch_solver.hpp"
#include "nsch/error.hpp"
#include "nsch/grid_ops.hpp"
#include "nsch/ns_solver.hpp"
#include "nsch/state.hpp"

namespace nsch {
namespace {

constexpr const char* kHeaderNames = "# field,t,nx,ny,Lx,Ly,seed";
constexpr char kCheckpointMagic[8] = {'N', 'S', 'C', 'H', 'C', 'K', 'P', '1'};

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw IoError(where + ": not a number: '" + t + "'");
  return v;
}

std::string step_tag(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06ld", step);
  return buf;
}

template <class T>
void put(std::ostream& out, const T& x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
void get(std::istream& in, T& x) {
  in.read(reinterpret_cast<char*>(&x), sizeof(T));
  if (!in) throw IoError("checkpoint truncated");
}

void put_vec(std::ostream& out, const std::vector<double>& v) {
  put(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void get_vec(std::istream& in, std::vector<double>& v) {
  std::uint64_t n = 0;
  get(in, n);
  if (n != v.size()) throw IoError("checkpoint field size mismatch");
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("checkpoint truncated");
}

void put_report(std::ostream& out, const EnergyReport& r) {
  for (double x : {r.t, r.dt, r.E_total, r.E_kinetic, r.E_ginzburg_landau, r.E_chemical, r.D_mu,
                   r.D_sigma, r.D_visc, r.W_sources, r.imbalance, r.mass_phi, r.mass_sigma,
                   r.div_max})
    put(out, x);
  put(out, static_cast<std::int32_t>(r.krylov_iters));
}

void get_report(std::istream& in, EnergyReport& r) {
  for (double* x : {&r.t, &r.dt, &r.E_total, &r.E_kinetic, &r.E_ginzburg_landau, &r.E_chemical,
                    &r.D_mu, &r.D_sigma, &r.D_visc, &r.W_sources, &r.imbalance, &r.mass_phi,
                    &r.mass_sigma, &r.div_max})
    get(in, *x);
  std::int32_t it = 0;
  get(in, it);
  r.krylov_iters = it;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_field_csv(const std::filesystem::path& path, const std::string& field, double t,
                     std::uint64_t seed, const ScalarField& f) {
  const Grid2D& g = f.grid();
  std::ofstream out = open_out(path);
  out << kHeaderNames << '\n'
      << "# " << field << ',' << format_double(t) << ',' << g.nx << ',' << g.ny << ','
      << format_double(g.lx) << ',' << format_double(g.ly) << ',' << seed << '\n';
  std::string line;
  for (int j = 0; j < g.ny; ++j) {
    line.clear();
    for (int i = 0; i < g.nx; ++i) {
      if (i) line += ',';
      line += format_double(f(i, j));
    }
    out << line << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

FieldFile read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  FieldFile file;
  bool have_header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (trim(line).empty()) continue;
    if (line[0] == '#') {
      if (trim(line) == kHeaderNames) continue;
      const auto parts = split(trim(line.substr(1)), ',');
      if (parts.size() != 7) throw IoError(where + ": malformed header");
      file.header.field = trim(parts[0]);
      file.header.t = parse_double(parts[1], where);
      file.header.nx = static_cast<int>(parse_double(parts[2], where));
      file.header.ny = static_cast<int>(parse_double(parts[3], where));
      file.header.lx = parse_double(parts[4], where);
      file.header.ly = parse_double(parts[5], where);
      file.header.seed = std::stoull(trim(parts[6]));
      have_header = true;
      continue;
    }
    if (!have_header) throw IoError(where + ": data before header");
    const auto parts = split(line, ',');
    if (static_cast<int>(parts.size()) != file.header.nx)
      throw IoError(where + ": expected " + std::to_string(file.header.nx) + " values");
    for (const auto& s : parts) file.values.push_back(parse_double(s, where));
  }
  if (!have_header) throw IoError(path.string() + ": missing header");
  if (file.values.size() != static_cast<std::size_t>(file.header.nx) * file.header.ny)
    throw IoError(path.string() + ": expected " + std::to_string(file.header.ny) + " rows");
  return file;
}

ScalarField read_scalar_field(const std::filesystem::path& path, const Grid2D& grid) {
  const FieldFile file = read_field_csv(path);
  const auto& h = file.header;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  if (h.nx != grid.nx || h.ny != grid.ny || !close(h.lx, grid.lx) || !close(h.ly, grid.ly))
    throw ConfigError(path.string() + ": field grid " + std::to_string(h.nx) + "x" +
                      std::to_string(h.ny) + " does not match the run grid " +
                      std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
  ScalarField f(grid);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = file.values[k];
  if (!f.all_finite()) throw ConfigError(path.string() + ": non-finite values");
  return f;
}

void write_snapshot(const SimState& s, const std::filesystem::path& dir, SnapshotFormat format,
                    const ModelParams& params) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const ScalarField mu = chemical_potential(s.phi, s.sigma, params);
  const ScalarField p = recover_physical_pressure(s.q, s.phi, params);
  const CellVector vel = face_to_cc(s.v);
  const std::pair<const char*, const ScalarField*> fields[] = {
      {"phi", &s.phi}, {"mu", &mu}, {"sigma", &s.sigma}, {"q", &s.q}, {"p", &p}};
  const std::string tag = step_tag(s.step);
  if (format == SnapshotFormat::Csv) {
    for (const auto& [name, f] : fields)
      write_field_csv(dir / (std::string(name) + "_" + tag + ".csv"), name, s.t, s.seed, *f);
    write_field_csv(dir / ("vel_x_" + tag + ".csv"), "vel_x", s.t, s.seed, vel.x);
    write_field_csv(dir / ("vel_y_" + tag + ".csv"), "vel_y", s.t, s.seed, vel.y);
    return;
  }
  const Grid2D& g = s.grid();
  const auto path = dir / ("snapshot_" + tag + ".vtk");
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << "nsch t=" << format_double(s.t) << " seed=" << s.seed << "\n"
      << "ASCII\nDATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n"
      << "ORIGIN " << format_double(0.5 * g.hx()) << ' ' << format_double(0.5 * g.hy()) << " 0\n"
      << "SPACING " << format_double(g.hx()) << ' ' << format_double(g.hy()) << " 1\n"
      << "POINT_DATA " << g.cells() << '\n';
  for (const auto& [name, f] : fields) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t k = 0; k < f->size(); ++k) out << format_double((*f)[k]) << '\n';
  }
  out << "VECTORS velocity double\n";
  for (std::size_t k = 0; k < vel.x.size(); ++k)
    out << format_double(vel.x[k]) << ' ' << format_double(vel.y[k]) << " 0\n";
  if (!out) throw IoError("write failed: " + path.string());
}

SeriesWriter::SeriesWriter(const std::filesystem::path& path, std::uint64_t seed,
                           const std::string& config_hash, bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_ = open_out(path, append ? std::ios::app : std::ios::trunc);
  if (!append) out_ << "# seed=" << seed << " config_hash=" << config_hash << '\n' << kColumns << '\n';
}

void SeriesWriter::write_row(const EnergyReport& r) {
  std::string line;
  for (double x : {r.t, r.dt, r.E_total, r.E_kinetic, r.E_ginzburg_landau, r.E_chemical, r.D_mu,
                   r.D_sigma, r.D_visc, r.W_sources, r.imbalance, r.mass_phi, r.mass_sigma,
                   r.div_max}) {
    line += format_double(x);
    line += ',';
  }
  line += std::to_string(r.krylov_iters);
  out_ << line << '\n';
  if (!out_) throw IoError("series write failed");
}

void write_checkpoint(const std::filesystem::path& path, const SimState& s) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  const Grid2D& g = s.grid();
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put(out, static_cast<std::int32_t>(g.nx));
  put(out, static_cast<std::int32_t>(g.ny));
  put(out, static_cast<std::int32_t>(g.bc));
  put(out, g.lx);
  put(out, g.ly);
  put(out, s.t);
  put(out, static_cast<std::int64_t>(s.step));
  put(out, s.dt_prev);
  put(out, s.seed);
  for (const ScalarField* f : {&s.phi, &s.mu, &s.sigma, &s.q}) put_vec(out, f->raw());
  put_vec(out, s.v.u_raw());
  put_vec(out, s.v.v_raw());
  put_report(out, s.last);
  if (!out) throw IoError("checkpoint write failed: " + path.string());
}

SimState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[sizeof kCheckpointMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw IoError(path.string() + ": not a checkpoint file");
  std::int32_t nx = 0, ny = 0, bc = 0;
  double lx = 0.0, ly = 0.0;
  get(in, nx);
  get(in, ny);
  get(in, bc);
  get(in, lx);
  get(in, ly);
  const Grid2D g(nx, ny, lx, ly, static_cast<Boundary>(bc));
  SimState s(g);
  std::int64_t step = 0;
  get(in, s.t);
  get(in, step);
  s.step = static_cast<long>(step);
  get(in, s.dt_prev);
  get(in, s.seed);
  for (ScalarField* f : {&s.phi, &s.mu, &s.sigma, &s.q}) get_vec(in, f->raw());
  get_vec(in, s.v.u_raw());
  get_vec(in, s.v.v_raw());
  get_report(in, s.last);
  return s;
}

}  // namespace nsch
