#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsch/config.hpp"
#include "nsch/error.hpp"
#include "nsch/io.hpp"
#include "nsch/simulation.hpp"

using namespace nsch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nsch_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empty config gives defaults") {
  const SimConfig c = parse_config("# nothing\n\n");
  const SimConfig d;
  CHECK(save_config(c) == save_config(d));
  CHECK(config_hash(c) == config_hash(d));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_config("model.chii = 1\n"), ConfigError);
  CHECK(nearest_key("model.chii") == "model.chi");
  CHECK(nearest_key("grid.nz") == "grid.nx");
  CHECK_THROWS_AS(parse_config("model.chi = 1\nmodel.chi = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid.nx = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid.bc = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("time.dt_min = 1\ntime.dt_init = 0.1\n").validate(), ConfigError);
  try {
    parse_config("a = 1\nmodel.chii = 1\n", "x.cfg");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x.cfg") != std::string::npos);
  }
}

TEST_CASE("epsilon and beta set A and B") {
  const SimConfig c = parse_config("model.beta = 2\nmodel.epsilon = 0.05\nmodel.chi = 0.1\n");
  CHECK(c.params.A == doctest::Approx(40.0));
  CHECK(c.params.B == doctest::Approx(0.1));
  CHECK(c.params.chi == 0.1);
}

TEST_CASE("save/load round trip") {
  SimConfig c = parse_config(
      "grid.nx = 48\ngrid.bc = periodic\nmobility.kind = polynomial\n"
      "mobility.coefficients = 0.01, 0, 0.005\nmobility.lower = 0.005\nmobility.upper = 0.05\n"
      "sources.kind = proliferation\nsources.proliferation = 0.5\ninitial.kind = disk\n"
      "time.dt_init = 0.00123456789012345\n");
  const fs::path dir = scratch("cfg");
  {
    std::ofstream out(dir / "a.cfg");
    out << save_config(c);
  }
  const SimConfig back = load_config(dir / "a.cfg");
  CHECK(save_config(back) == save_config(c));
  CHECK(back.time.dt_init == c.time.dt_init);
  CHECK(back.params.mobility_m(0.0) == doctest::Approx(0.01));
  set_config_value(c, "model.chi", "0.3");
  CHECK(c.params.chi == 0.3);
  CHECK(config_hash(c) != config_hash(back));
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), std::exception);
  fs::remove_all(dir);
}

TEST_CASE("field CSV round trip") {
  const Grid2D g(5, 3, 1.25, 0.75, Boundary::NeumannNoSlip);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = 1.0 / (3.0 + k) - 0.1 * k;
  const fs::path dir = scratch("csv");
  write_field_csv(dir / "phi.csv", "phi", 0.375, 42, f);
  const FieldFile r = read_field_csv(dir / "phi.csv");
  CHECK(r.header.field == "phi");
  CHECK(r.header.t == 0.375);
  CHECK(r.header.nx == 5);
  CHECK(r.header.ny == 3);
  CHECK(r.header.seed == 42);
  CHECK(r.values == f.raw());
  CHECK(read_scalar_field(dir / "phi.csv", g).raw() == f.raw());
  CHECK_THROWS(read_scalar_field(dir / "phi.csv", Grid2D(5, 4, 1.25, 1.0, Boundary::NeumannNoSlip)));
  CHECK(std::stod(format_double(0.1)) == 0.1);
  fs::remove_all(dir);
}

TEST_CASE("snapshots, series and checkpoints") {
  SimConfig cfg = parse_config(
      "grid.nx = 8\ngrid.ny = 8\ninitial.kind = random\ninitial.amplitude = 0.1\n"
      "initial.sigma = 0.5\nmodel.chi = 0.1\n");
  const SimState s = initial_state(cfg);
  const fs::path dir = scratch("snap");

  write_snapshot(s, dir / "csv", SnapshotFormat::Csv, cfg.params);
  for (const char* f : {"phi", "mu", "sigma", "q", "p", "vel_x", "vel_y"})
    CHECK(fs::exists(dir / "csv" / (std::string(f) + "_000000.csv")));

  write_snapshot(s, dir / "vtk", SnapshotFormat::Vtk, cfg.params);
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir / "vtk")) {
    const std::string text = slurp(e.path());
    CHECK(text.rfind("# vtk DataFile", 0) == 0);
    CHECK(text.find("DIMENSIONS") != std::string::npos);
    found = true;
  }
  CHECK(found);

  {
    SeriesWriter w(dir / "series.csv", 9, config_hash(cfg), false);
    w.write_row(s.last);
    w.write_row(s.last);
  }
  {
    SeriesWriter w(dir / "series.csv", 9, config_hash(cfg), true);
    w.write_row(s.last);
  }
  std::istringstream lines(slurp(dir / "series.csv"));
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(lines, line)) {
    if (line == SeriesWriter::kColumns) header = true;
    else if (!line.empty() && line[0] != '#') ++rows;
  }
  CHECK(header);
  CHECK(rows == 3);

  write_checkpoint(dir / "c.bin", s);
  const SimState r = read_checkpoint(dir / "c.bin");
  CHECK(r.phi.raw() == s.phi.raw());
  CHECK(r.sigma.raw() == s.sigma.raw());
  CHECK(r.v.u_raw() == s.v.u_raw());
  CHECK(r.t == s.t);
  CHECK(r.seed == s.seed);
  fs::remove_all(dir);
}
