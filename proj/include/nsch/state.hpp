#pragma once

#include <cstdint>

#include "nsch/diagnostics.hpp"
#include "nsch/grid.hpp"

namespace nsch {

/// Full solution at one time level. mu is kept consistent with (phi, sigma)
/// at output time; q is the modified pressure.
struct SimState {
  double t = 0.0;
  long step = 0;
  double dt_prev = 0.0;
  std::uint64_t seed = 0;
  ScalarField phi;
  ScalarField mu;
  ScalarField sigma;
  MacVelocity v;
  ScalarField q;
  EnergyReport last;

  SimState() = default;
  explicit SimState(const Grid2D& g)
      : phi(g), mu(g), sigma(g), v(g), q(g) {}
  const Grid2D& grid() const { return phi.grid(); }
};

}  // namespace nsch
