#include "nsch/sources.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "nsch/error.hpp"
#include "nsch/io.hpp"

namespace nsch {

void SourceSpec::validate() const {
  if (proliferation < 0.0 || apoptosis < 0.0 || consumption < 0.0)
    throw ConfigError("source rates must be non-negative");
  if (kind == SourceKind::LipschitzGrowth && !(ramp_saturation > 0.0))
    throw ConfigError("sources.ramp_saturation must be positive");
  if (kind == SourceKind::Prescribed && path.empty())
    throw ConfigError("prescribed sources need sources.path");
}

double interface_indicator(double phi) { return std::clamp(0.5 * (phi + 1.0), 0.0, 1.0); }

double growth_ramp(double sigma, const SourceSpec& spec) {
  return spec.proliferation * std::clamp(sigma, 0.0, spec.ramp_saturation);
}

PrescribedSources::PrescribedSources(std::vector<SourceFrame> frames) : frames_(std::move(frames)) {
  std::sort(frames_.begin(), frames_.end(),
            [](const SourceFrame& a, const SourceFrame& b) { return a.t < b.t; });
}

PrescribedSources PrescribedSources::load(const std::string& dir, const Grid2D& grid) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("prescribed source directory not found: " + dir);
  std::map<double, ScalarField> gammas, ss;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const FieldFile file = read_field_csv(path);
    if (file.header.field != "Gamma" && file.header.field != "S") continue;
    ScalarField f = read_scalar_field(path, grid);
    (file.header.field == "Gamma" ? gammas : ss).insert_or_assign(file.header.t, std::move(f));
  }
  std::vector<SourceFrame> frames;
  for (auto& [t, gamma] : gammas) {
    auto it = ss.find(t);
    if (it == ss.end())
      throw ConfigError("prescribed sources: Gamma frame at t = " + format_double(t) +
                        " has no matching S frame");
    frames.push_back({t, std::move(gamma), std::move(it->second)});
    ss.erase(it);
  }
  if (!ss.empty())
    throw ConfigError("prescribed sources: S frame at t = " + format_double(ss.begin()->first) +
                      " has no matching Gamma frame");
  if (frames.empty()) throw ConfigError("prescribed sources: no frames in " + dir);
  return PrescribedSources(std::move(frames));
}

SourceFields PrescribedSources::at(double t) const {
  if (frames_.empty()) throw ConfigError("prescribed sources: no frames loaded");
  if (t <= frames_.front().t) return {frames_.front().gamma, frames_.front().s};
  if (t >= frames_.back().t) return {frames_.back().gamma, frames_.back().s};
  const auto hi = std::upper_bound(frames_.begin(), frames_.end(), t,
                                   [](double x, const SourceFrame& f) { return x < f.t; });
  const auto lo = hi - 1;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return {(1.0 - w) * lo->gamma + w * hi->gamma, (1.0 - w) * lo->s + w * hi->s};
}

SourceFields eval_sources(const ScalarField& phi, const ScalarField& sigma, double t,
                          const SourceSpec& spec, const PrescribedSources* prescribed) {
  const Grid2D& g = phi.grid();
  SourceFields out{ScalarField(g), ScalarField(g)};
  switch (spec.kind) {
    case SourceKind::Zero:
      return out;
    case SourceKind::Prescribed:
      if (!prescribed || prescribed->empty())
        throw ConfigError("prescribed sources requested but no frames are loaded");
      return prescribed->at(t);
    case SourceKind::Proliferation:
    case SourceKind::LipschitzGrowth:
      break;
  }
  if (!phi.all_finite() || !sigma.all_finite())
    throw StepFailure("non-finite state passed to source evaluation", 0.0);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double p = phi[k], s = sigma[k];
    if (spec.kind == SourceKind::Proliferation) {
      out.gamma[k] = (spec.proliferation * s - spec.apoptosis) * (p + 1.0);
      out.s[k] = -0.5 * spec.consumption * s * (p + 1.0);
    } else {
      const double h = interface_indicator(p);
      out.gamma[k] = h * growth_ramp(s, spec);
      out.s[k] = -h * spec.consumption * s;
    }
  }
  return out;
}

LipschitzBound analytic_lipschitz(const SourceSpec& spec, double a, double b) {
  LipschitzBound out;
  const double G = spec.proliferation, Ap = spec.apoptosis, C = spec.consumption;
  switch (spec.kind) {
    case SourceKind::Zero:
    case SourceKind::Prescribed:
      return out;
    case SourceKind::Proliferation:
      // Gradients are affine in (phi, sigma); their norms peak at a corner.
      for (double p : {-a, a})
        for (double s : {-b, b}) {
          out.gamma = std::max(out.gamma, std::hypot(G * s - Ap, G * (p + 1.0)));
          out.s = std::max(out.s, std::hypot(0.5 * C * s, 0.5 * C * (p + 1.0)));
        }
      return out;
    case SourceKind::LipschitzGrowth: {
      // h' = 1/2 on (-1, 1), P' = G on (0, sat); both active together near
      // phi -> min(a, 1), sigma -> min(b, sat).
      const double h_max = interface_indicator(std::min(a, 1.0));
      const double p_max = G * std::min(b, spec.ramp_saturation);
      out.gamma = std::hypot(0.5 * p_max, h_max * G);
      out.s = std::hypot(0.5 * C * b, h_max * C);
      return out;
    }
  }
  return out;
}

LipschitzBound analytic_sup(const SourceSpec& spec, double a, double b) {
  LipschitzBound out;
  const double G = spec.proliferation, Ap = spec.apoptosis, C = spec.consumption;
  switch (spec.kind) {
    case SourceKind::Zero:
    case SourceKind::Prescribed:
      return out;
    case SourceKind::Proliferation:
      out.gamma = (G * b + Ap) * (a + 1.0);
      out.s = 0.5 * C * b * (a + 1.0);
      return out;
    case SourceKind::LipschitzGrowth:
      out.gamma = interface_indicator(a) * G * std::min(b, spec.ramp_saturation);
      out.s = interface_indicator(a) * C * b;
      return out;
  }
  return out;
}

}  // namespace nsch
