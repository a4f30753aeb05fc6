#pragma once

#include <string>
#include <vector>

#include "nsch/grid.hpp"

namespace nsch {

enum class SourceKind { Zero, Prescribed, Proliferation, LipschitzGrowth };

/// Mass-transfer (Gamma) and reaction (S) model.
///
/// Both presets are written in the form that enters the phi equation
/// directly, i.e. after absorbing the factor 2 of the zero-excess-mass
/// reduction:
///   proliferation:    Gamma = (G sigma - A)(phi + 1),  S = -C sigma (phi + 1) / 2
///   lipschitz-growth: Gamma = h(phi) P(sigma),         S = -h(phi) C sigma
/// where h(s) = clamp((s + 1)/2, 0, 1) and P(sigma) = G clamp(sigma, 0, sat).
struct SourceSpec {
  SourceKind kind = SourceKind::Zero;
  double proliferation = 0.0;  // G
  double apoptosis = 0.0;      // A
  double consumption = 0.0;    // C
  double ramp_saturation = 1.0;
  /// Directory of Gamma/S snapshot frames for the prescribed kind.
  std::string path;

  /// Throws ConfigError on negative rates or a missing path.
  void validate() const;

  /// True for the state-dependent presets, which the existence theory covers
  /// only through a remark without growth conditions.
  bool state_dependent() const {
    return kind == SourceKind::Proliferation || kind == SourceKind::LipschitzGrowth;
  }
};

struct SourceFields {
  ScalarField gamma;
  ScalarField s;
};

double interface_indicator(double phi);                       // h
double growth_ramp(double sigma, const SourceSpec& spec);     // P

/// One prescribed frame pair at time t.
struct SourceFrame {
  double t = 0.0;
  ScalarField gamma;
  ScalarField s;
};

/// Time-ordered frames, linearly interpolated in t and held constant
/// outside the covered interval.
class PrescribedSources {
 public:
  PrescribedSources() = default;
  explicit PrescribedSources(std::vector<SourceFrame> frames);

  /// Reads every `Gamma_*.csv` / `S_*.csv` snapshot in `dir`, pairing files
  /// by their header time. Throws IoError / ConfigError on bad data or a
  /// grid mismatch.
  static PrescribedSources load(const std::string& dir, const Grid2D& grid);

  SourceFields at(double t) const;
  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }

 private:
  std::vector<SourceFrame> frames_;
};

/// Evaluates Gamma and S. `prescribed` is required for the prescribed kind.
SourceFields eval_sources(const ScalarField& phi, const ScalarField& sigma, double t,
                          const SourceSpec& spec,
                          const PrescribedSources* prescribed = nullptr);

struct LipschitzBound {
  double gamma = 0.0;
  double s = 0.0;
};

/// Euclidean Lipschitz constants of (phi, sigma) -> Gamma and -> S on the box
/// |phi| <= phi_bound, |sigma| <= sigma_bound.
LipschitzBound analytic_lipschitz(const SourceSpec& spec, double phi_bound, double sigma_bound);

/// sup |Gamma| and sup |S| on the same box.
LipschitzBound analytic_sup(const SourceSpec& spec, double phi_bound, double sigma_bound);

}  // namespace nsch
