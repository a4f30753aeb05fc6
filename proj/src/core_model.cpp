#include "nsch/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsch/error.hpp"

namespace nsch {
namespace {

double horner(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

// k-th derivative of sum_j c[j] s^j.
double horner_derivative(const std::vector<double>& c, double s, int k) {
  double acc = 0.0;
  for (int j = static_cast<int>(c.size()) - 1; j >= k; --j) {
    double falling = 1.0;
    for (int m = 0; m < k; ++m) falling *= static_cast<double>(j - m);
    acc = acc * s + falling * c[static_cast<std::size_t>(j)];
  }
  return acc;
}

double sample_point(double s_max, int i, int samples) {
  return -s_max + 2.0 * s_max * static_cast<double>(i) /
                      static_cast<double>(samples - 1);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

PotentialSpec PotentialSpec::quartic(double s_max) {
  PotentialSpec spec;
  spec.kind = PotentialKind::Quartic;
  spec.s_max = s_max;
  spec.growth.c0 = 3.0;
  spec.growth.c1 = 4.0;
  spec.growth.c2 = 1.0;
  spec.growth.r = 2.0;
  spec.growth.c3 = 0.125;
  spec.growth.c4 = certify_c4(spec, spec.growth.c3);
  spec.stabilization = sup_psi_second(spec);
  return spec;
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coefficients,
                                        GrowthConstants growth, double s_max) {
  PotentialSpec spec;
  spec.kind = PotentialKind::Polynomial;
  spec.coefficients = std::move(coefficients);
  spec.growth = growth;
  spec.s_max = s_max;
  spec.stabilization = sup_psi_second(spec);
  return spec;
}

PsiValues psi_eval(double s, const PotentialSpec& spec) {
  return {psi(s, spec), psi_prime(s, spec), psi_second(s, spec)};
}

double psi(double s, const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::Quartic) {
    const double w = s * s - 1.0;
    return 0.25 * w * w;
  }
  return horner(spec.coefficients, s);
}

double psi_prime(double s, const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::Quartic) return s * s * s - s;
  return horner_derivative(spec.coefficients, s, 1);
}

double psi_second(double s, const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::Quartic) return 3.0 * s * s - 1.0;
  return horner_derivative(spec.coefficients, s, 2);
}

double psi_third(double s, const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::Quartic) return 6.0 * s;
  return horner_derivative(spec.coefficients, s, 3);
}

double sup_psi_second(const PotentialSpec& spec, int samples) {
  double sup = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
    sup = std::max(sup, psi_second(sample_point(spec.s_max, i, samples), spec));
  return sup;
}

double certify_c4(const PotentialSpec& spec, double c3) {
  const auto gap = [&](double s) { return psi(s, spec) - c3 * s * s; };
  constexpr int kScan = 4001;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double v = gap(sample_point(spec.s_max, i, kScan));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = 2.0 * spec.s_max / (kScan - 1);
  double a = std::max(-spec.s_max, sample_point(spec.s_max, best, kScan) - step);
  double b = std::min(spec.s_max, sample_point(spec.s_max, best, kScan) + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = gap(x1), f2 = gap(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = gap(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = gap(x2);
    }
  }
  const double minimum = std::min({best_val, f1, f2});
  const double c4 = std::max(0.0, -minimum);
  return c4 + 1e-12 * std::max(1.0, c4);
}

CoeffSpec CoeffSpec::constant(double value) {
  return CoeffSpec{CoeffKind::Constant, value, value, {value}};
}

CoeffSpec CoeffSpec::clamped_polynomial(std::vector<double> coefficients,
                                        double lower, double upper) {
  return CoeffSpec{CoeffKind::ClampedPolynomial, lower, upper,
                   std::move(coefficients)};
}

double CoeffSpec::operator()(double s) const {
  if (kind == CoeffKind::Constant) return coefficients.empty() ? lower : coefficients[0];
  return std::clamp(horner(coefficients, s), lower, upper);
}

double CoeffSpec::derivative(double s) const {
  if (kind == CoeffKind::Constant) return 0.0;
  const double raw = horner(coefficients, s);
  if (raw <= lower || raw >= upper) return 0.0;
  return horner_derivative(coefficients, s, 1);
}

std::string ValidationReport::summary() const {
  if (ok()) return "all structural assumptions hold";
  std::ostringstream os;
  for (const auto& v : violations) os << v.assumption << ": " << v.detail << '\n';
  return os.str();
}

ValidationReport validate_params(const ModelParams& p, int samples) {
  ValidationReport report;
  auto fail = [&](std::string what, std::string detail) {
    report.violations.push_back({std::move(what), std::move(detail)});
  };

  if (!(p.A > 0.0)) fail("A > 0", "A = " + fmt(p.A));
  if (!(p.B > 0.0)) fail("B > 0", "B = " + fmt(p.B));
  if (!(p.chi >= 0.0)) fail("chi >= 0", "chi = " + fmt(p.chi));

  const auto check_coeff = [&](const char* name, const CoeffSpec& c) {
    if (!(c.lower > 0.0))
      fail(std::string(name) + " lower bound > 0", "lower = " + fmt(c.lower));
    if (!(c.lower <= c.upper))
      fail(std::string(name) + " bounds ordered",
           "lower = " + fmt(c.lower) + ", upper = " + fmt(c.upper));
    if (c.kind == CoeffKind::Constant && !c.coefficients.empty() &&
        (c.coefficients[0] < c.lower || c.coefficients[0] > c.upper))
      fail(std::string(name) + " constant within bounds",
           "value = " + fmt(c.coefficients[0]));
  };
  check_coeff("mobility m", p.mobility_m);
  check_coeff("mobility n", p.mobility_n);
  check_coeff("viscosity eta", p.viscosity_eta);

  const PotentialSpec& pot = p.potential;
  const GrowthConstants& g = pot.growth;
  if (!(pot.s_max > 0.0)) fail("working range s_max > 0", "s_max = " + fmt(pot.s_max));
  if (!(g.c3 > 0.0)) fail("C3 > 0", "C3 = " + fmt(g.c3));

  if (pot.s_max > 0.0 && samples >= 2) {
    double worst_psi = std::numeric_limits<double>::infinity(), at_psi = 0.0;
    double worst_coerc = std::numeric_limits<double>::infinity(), at_coerc = 0.0;
    double worst_c0 = -std::numeric_limits<double>::infinity(), at_c0 = 0.0;
    double worst_c1 = -std::numeric_limits<double>::infinity(), at_c1 = 0.0;
    double sup_second = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      const double s = sample_point(pot.s_max, i, samples);
      const PsiValues v = psi_eval(s, pot);
      if (v.value < worst_psi) worst_psi = v.value, at_psi = s;
      const double coerc = v.value - g.c3 * s * s + g.c4;
      if (coerc < worst_coerc) worst_coerc = coerc, at_coerc = s;
      const double c0_gap = std::abs(v.second) - g.c0 * (1.0 + std::pow(std::abs(s), g.r));
      if (c0_gap > worst_c0) worst_c0 = c0_gap, at_c0 = s;
      const double c1_gap = std::abs(v.first) - (g.c1 * v.value + g.c2);
      if (c1_gap > worst_c1) worst_c1 = c1_gap, at_c1 = s;
      sup_second = std::max(sup_second, v.second);
    }
    if (worst_psi < 0.0)
      fail("Psi >= 0", "Psi(" + fmt(at_psi) + ") = " + fmt(worst_psi));
    if (worst_coerc < 0.0)
      fail("Psi(s) >= C3 s^2 - C4",
           "gap " + fmt(worst_coerc) + " at s = " + fmt(at_coerc) +
               " (C3 = " + fmt(g.c3) + ", C4 = " + fmt(g.c4) + ")");
    if (worst_c0 > 0.0)
      fail("|Psi''| <= C0 (1 + |s|^r)", "exceeded by " + fmt(worst_c0) +
                                            " at s = " + fmt(at_c0));
    if (worst_c1 > 0.0)
      fail("|Psi'| <= C1 Psi + C2", "exceeded by " + fmt(worst_c1) +
                                        " at s = " + fmt(at_c1));
    if (pot.stabilization < sup_second)
      fail("S_stab >= sup Psi''", "S_stab = " + fmt(pot.stabilization) +
                                      ", sup Psi'' = " + fmt(sup_second));
  }

  if (g.c3 > 0.0) {
    const double needed = 2.0 * p.chi * p.chi / g.c3;
    if (!(p.A > needed))
      fail("coercivity A > 2 chi^2 / C3",
           "A = " + fmt(p.A) + " but 2 chi^2 / C3 = " + fmt(needed));
  }
  return report;
}

void require_valid(const ModelParams& p, bool override_checks) {
  if (override_checks) return;
  const ValidationReport report = validate_params(p);
  if (!report.ok())
    throw ValidationError("model parameters rejected:\n" + report.summary());
}

InterfaceScaling epsilon_beta_map(double beta, double epsilon) {
  if (!(beta > 0.0) || !(epsilon > 0.0))
    throw ConfigError("epsilon_beta_map needs beta > 0 and epsilon > 0 (got beta = " +
                      fmt(beta) + ", epsilon = " + fmt(epsilon) + ")");
  return {beta / epsilon, beta * epsilon};
}

}  // namespace nsch
