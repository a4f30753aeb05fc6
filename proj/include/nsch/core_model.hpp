#pragma once

#include <string>
#include <vector>

namespace nsch {

// Constants certifying the growth conditions on the potential:
//   |Psi''(s)| <= c0 (1 + |s|^r),  |Psi'(s)| <= c1 Psi(s) + c2,
//   Psi(s) >= c3 s^2 - c4.
struct GrowthConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double r = 2.0;
};

enum class PotentialKind { Quartic, Polynomial };

/// Double-well potential. The quartic kind is 1/4 (s^2 - 1)^2 evaluated in
/// factored form; the polynomial kind is sum_k coefficients[k] s^k.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Quartic;
  std::vector<double> coefficients{0.25, 0.0, -0.5, 0.0, 0.25};
  GrowthConstants growth;
  /// Working range [-s_max, s_max] used for sampling-based certification.
  double s_max = 2.0;
  /// Linear stabilization constant; must dominate Psi'' on the working range.
  double stabilization = 0.0;

  /// Default double well with c3 = 1/8 and c4 from a 1D minimization.
  static PotentialSpec quartic(double s_max = 2.0);
  /// User polynomial; stabilization is set to the sampled sup of Psi''.
  static PotentialSpec polynomial(std::vector<double> coefficients,
                                  GrowthConstants growth, double s_max = 2.0);
};

struct PsiValues {
  double value;
  double first;
  double second;
};

PsiValues psi_eval(double s, const PotentialSpec& spec);
double psi(double s, const PotentialSpec& spec);
double psi_prime(double s, const PotentialSpec& spec);
double psi_second(double s, const PotentialSpec& spec);
double psi_third(double s, const PotentialSpec& spec);

/// Sampled sup of Psi'' over [-s_max, s_max].
double sup_psi_second(const PotentialSpec& spec, int samples = 40001);

/// Smallest c4 with Psi(s) >= c3 s^2 - c4 on the working range, found by a
/// dense scan followed by golden-section refinement, then padded by a few
/// ulps so the bound certifies under sampling with zero tolerance.
double certify_c4(const PotentialSpec& spec, double c3);

enum class CoeffKind { Constant, ClampedPolynomial };

/// Mobility or viscosity profile. Values are clamped to [lower, upper] after
/// polynomial evaluation, so the declared bounds hold for every argument.
struct CoeffSpec {
  CoeffKind kind = CoeffKind::Constant;
  double lower = 1.0;
  double upper = 1.0;
  std::vector<double> coefficients{1.0};

  static CoeffSpec constant(double value);
  static CoeffSpec clamped_polynomial(std::vector<double> coefficients,
                                      double lower, double upper);

  double operator()(double s) const;
  /// d/ds of the clamped profile (zero where the clamp is active).
  double derivative(double s) const;
};

struct ModelParams {
  double A = 20.0;
  double B = 0.05;
  double chi = 0.0;
  PotentialSpec potential = PotentialSpec::quartic();
  CoeffSpec mobility_m = CoeffSpec::constant(1e-3);
  CoeffSpec mobility_n = CoeffSpec::constant(1.0);
  CoeffSpec viscosity_eta = CoeffSpec::constant(0.1);
};

struct FreeEnergyValues {
  double n;        // N(phi, sigma)
  double n_phi;    // dN/dphi
  double n_sigma;  // dN/dsigma
};

/// N = sigma^2/2 + chi sigma (1 - phi) and its partial derivatives.
inline FreeEnergyValues chemical_free_energy(double phi, double sigma,
                                             double chi) {
  return {0.5 * sigma * sigma + chi * sigma * (1.0 - phi), -chi * sigma,
          sigma + chi * (1.0 - phi)};
}

struct Violation {
  std::string assumption;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate_params(const ModelParams& p, int samples = 40001);

/// Throws ValidationError listing every violation unless override_checks.
void require_valid(const ModelParams& p, bool override_checks);

struct InterfaceScaling {
  double A;
  double B;
};

/// A = beta / epsilon, B = beta * epsilon.
InterfaceScaling epsilon_beta_map(double beta, double epsilon);

}  // namespace nsch
