#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "nsch/error.hpp"
#include "nsch/io.hpp"
#include "nsch/sources.hpp"

using namespace nsch;
using doctest::Approx;

namespace {

SourceSpec preset(SourceKind kind) {
  SourceSpec s;
  s.kind = kind;
  s.proliferation = 0.5;
  s.apoptosis = 0.1;
  s.consumption = 1.0;
  s.ramp_saturation = 1.5;
  return s;
}

std::pair<double, double> point(const SourceSpec& spec, double phi, double sigma) {
  const Grid2D g(1, 1, 1.0, 1.0, Boundary::NeumannNoSlip);
  const SourceFields f = eval_sources(ScalarField(g, phi), ScalarField(g, sigma), 0.0, spec);
  return {f.gamma[0], f.s[0]};
}

}  // namespace

TEST_CASE("zero sources") {
  const auto [gm, s] = point(SourceSpec{}, 0.3, 2.0);
  CHECK(gm == 0.0);
  CHECK(s == 0.0);
}

TEST_CASE("proliferation preset") {
  const SourceSpec spec = preset(SourceKind::Proliferation);
  for (double phi : {-1.0, -0.2, 0.7, 1.0})
    for (double sigma : {0.0, 0.4, 1.0}) {
      const auto [gm, s] = point(spec, phi, sigma);
      CHECK(gm == Approx((0.5 * sigma - 0.1) * (phi + 1.0)));
      CHECK(s == Approx(-1.0 * sigma * (phi + 1.0) / 2.0));
    }
  // Host region phi = -1 is inert.
  const auto [g0, s0] = point(spec, -1.0, 0.8);
  CHECK(g0 == 0.0);
  CHECK(s0 == 0.0);
}

TEST_CASE("lipschitz-growth preset") {
  const SourceSpec spec = preset(SourceKind::LipschitzGrowth);
  CHECK(interface_indicator(-3.0) == 0.0);
  CHECK(interface_indicator(0.0) == 0.5);
  CHECK(interface_indicator(5.0) == 1.0);
  CHECK(growth_ramp(-1.0, spec) == 0.0);
  CHECK(growth_ramp(1.0, spec) == Approx(0.5));
  CHECK(growth_ramp(9.0, spec) == Approx(0.75));
  const auto [gm, s] = point(spec, 0.2, 1.0);
  CHECK(gm == Approx(0.6 * 0.5));
  CHECK(s == Approx(-0.6 * 1.0));
}

TEST_CASE("analytic Lipschitz and sup bounds dominate sampled values") {
  for (SourceKind kind : {SourceKind::Proliferation, SourceKind::LipschitzGrowth}) {
    const SourceSpec spec = preset(kind);
    const double pb = 1.5, sb = 2.0;
    const LipschitzBound lip = analytic_lipschitz(spec, pb, sb);
    const LipschitzBound sup = analytic_sup(spec, pb, sb);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> up(-pb, pb), us(-sb, sb);
    double lg = 0.0, ls = 0.0, mg = 0.0, ms = 0.0;
    for (int k = 0; k < 4000; ++k) {
      const double p1 = up(rng), s1 = us(rng), p2 = up(rng), s2 = us(rng);
      const auto [g1, r1] = point(spec, p1, s1);
      const auto [g2, r2] = point(spec, p2, s2);
      const double d = std::hypot(p1 - p2, s1 - s2);
      if (d > 1e-9) {
        lg = std::max(lg, std::abs(g1 - g2) / d);
        ls = std::max(ls, std::abs(r1 - r2) / d);
      }
      mg = std::max(mg, std::abs(g1));
      ms = std::max(ms, std::abs(r1));
    }
    CHECK(lg <= lip.gamma * (1 + 1e-12));
    CHECK(ls <= lip.s * (1 + 1e-12));
    CHECK(mg <= sup.gamma * (1 + 1e-12));
    CHECK(ms <= sup.s * (1 + 1e-12));
    // Bounds are not wildly loose.
    CHECK(lg >= 0.5 * lip.gamma);
    CHECK(mg >= 0.8 * sup.gamma);
  }
}

TEST_CASE("source validation") {
  SourceSpec s = preset(SourceKind::Proliferation);
  s.apoptosis = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  SourceSpec p;
  p.kind = SourceKind::Prescribed;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(preset(SourceKind::Proliferation).state_dependent());
  CHECK_FALSE(p.state_dependent());
}

TEST_CASE("prescribed frames interpolate in time") {
  const Grid2D g(4, 3, 1.0, 0.75, Boundary::NeumannNoSlip);
  const PrescribedSources src({{0.0, ScalarField(g, 1.0), ScalarField(g, -1.0)},
                               {1.0, ScalarField(g, 3.0), ScalarField(g, 1.0)}});
  CHECK(src.at(-1.0).gamma[0] == 1.0);
  CHECK(src.at(0.25).gamma[5] == Approx(1.5));
  CHECK(src.at(0.5).s[2] == Approx(0.0));
  CHECK(src.at(7.0).gamma[0] == 3.0);

  const auto dir = std::filesystem::temp_directory_path() / "nsch_prescribed_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_field_csv(dir / "Gamma_0.csv", "Gamma", 0.0, 0, ScalarField(g, 1.0));
  write_field_csv(dir / "S_0.csv", "S", 0.0, 0, ScalarField(g, -1.0));
  write_field_csv(dir / "Gamma_1.csv", "Gamma", 2.0, 0, ScalarField(g, 5.0));
  write_field_csv(dir / "S_1.csv", "S", 2.0, 0, ScalarField(g, 1.0));
  const PrescribedSources loaded = PrescribedSources::load(dir.string(), g);
  CHECK(loaded.size() == 2);
  SourceSpec spec;
  spec.kind = SourceKind::Prescribed;
  spec.path = dir.string();
  const SourceFields f = eval_sources(ScalarField(g), ScalarField(g), 1.0, spec, &loaded);
  CHECK(f.gamma[3] == Approx(3.0));
  CHECK(f.s[3] == Approx(0.0));
  const Grid2D other(5, 3, 1.0, 0.75, Boundary::NeumannNoSlip);
  CHECK_THROWS(PrescribedSources::load(dir.string(), other));
  std::filesystem::remove_all(dir);
}
