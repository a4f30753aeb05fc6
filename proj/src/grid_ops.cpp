#include "nsch/grid_ops.hpp"

#include <algorithm>
#include <cmath>

namespace nsch {

ScalarField laplacian(const ScalarField& f) {
  const Grid2D& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double ax = 1.0 / (g.hx() * g.hx()), ay = 1.0 / (g.hy() * g.hy());
  const bool per = g.periodic();
  ScalarField out(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = f(i, j);
      double acc = 0.0;
      if (i > 0) acc += ax * (f(i - 1, j) - c);
      else if (per) acc += ax * (f(nx - 1, j) - c);
      if (i < nx - 1) acc += ax * (f(i + 1, j) - c);
      else if (per) acc += ax * (f(0, j) - c);
      if (j > 0) acc += ay * (f(i, j - 1) - c);
      else if (per) acc += ay * (f(i, ny - 1) - c);
      if (j < ny - 1) acc += ay * (f(i, j + 1) - c);
      else if (per) acc += ay * (f(i, 0) - c);
      out(i, j) = acc;
    }
  }
  return out;
}

FaceField gradient_cc_to_face(const ScalarField& f) {
  const Grid2D& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  FaceField w(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) w.u(i, j) = (f(i, j) - f(i - 1, j)) * ihx;
#pragma omp parallel for schedule(static)
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) w.v(i, j) = (f(i, j) - f(i, j - 1)) * ihy;
  if (g.periodic()) {
    for (int j = 0; j < ny; ++j) w.u(0, j) = w.u(nx, j) = (f(0, j) - f(nx - 1, j)) * ihx;
    for (int i = 0; i < nx; ++i) w.v(i, 0) = w.v(i, ny) = (f(i, 0) - f(i, ny - 1)) * ihy;
  }
  return w;
}

ScalarField divergence_face_to_cc(const FaceField& w) {
  const Grid2D& g = w.grid();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  ScalarField out(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (w.u(i + 1, j) - w.u(i, j)) * ihx + (w.v(i, j + 1) - w.v(i, j)) * ihy;
  return out;
}

FaceField interpolate_cc_to_face(const ScalarField& f) {
  const Grid2D& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  FaceField w(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) w.u(i, j) = 0.5 * (f(i, j) + f(i - 1, j));
#pragma omp parallel for schedule(static)
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) w.v(i, j) = 0.5 * (f(i, j) + f(i, j - 1));
  for (int j = 0; j < ny; ++j) {
    if (g.periodic()) {
      w.u(0, j) = w.u(nx, j) = 0.5 * (f(0, j) + f(nx - 1, j));
    } else {
      w.u(0, j) = f(0, j);
      w.u(nx, j) = f(nx - 1, j);
    }
  }
  for (int i = 0; i < nx; ++i) {
    if (g.periodic()) {
      w.v(i, 0) = w.v(i, ny) = 0.5 * (f(i, 0) + f(i, ny - 1));
    } else {
      w.v(i, 0) = f(i, 0);
      w.v(i, ny) = f(i, ny - 1);
    }
  }
  return w;
}

ScalarField advect_scalar(const MacVelocity& w, const ScalarField& f) {
  return divergence_face_to_cc(face_product(interpolate_cc_to_face(f), w));
}

ScalarField divergence_of_flux(const FaceField& coefficient, const ScalarField& f) {
  return divergence_face_to_cc(face_product(coefficient, gradient_cc_to_face(f)));
}

void apply_divergence_of_flux(const FaceField& c, std::span<const double> f,
                              std::span<double> out) {
  const Grid2D& g = c.grid();
  const int nx = g.nx, ny = g.ny;
  const double ax = 1.0 / (g.hx() * g.hx()), ay = 1.0 / (g.hy() * g.hy());
  const bool per = g.periodic();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    const std::size_t up = static_cast<std::size_t>(j == ny - 1 ? 0 : j + 1) * nx;
    const std::size_t dn = static_cast<std::size_t>(j == 0 ? ny - 1 : j - 1) * nx;
    for (int i = 0; i < nx; ++i) {
      const double x = f[row + i];
      double acc = 0.0;
      if (i > 0) acc += ax * c.u(i, j) * (f[row + i - 1] - x);
      else if (per) acc += ax * c.u(0, j) * (f[row + nx - 1] - x);
      if (i < nx - 1) acc += ax * c.u(i + 1, j) * (f[row + i + 1] - x);
      else if (per) acc += ax * c.u(nx, j) * (f[row] - x);
      if (j > 0 || per) acc += ay * c.v(i, j) * (f[dn + i] - x);
      if (j < ny - 1 || per) acc += ay * c.v(i, j + 1) * (f[up + i] - x);
      out[row + i] = acc;
    }
  }
}

double integrate(const ScalarField& f) {
  double acc = 0.0;
  for (double x : f.raw()) acc += x;
  return acc * f.grid().cell_area();
}

double mean(const ScalarField& f) {
  double acc = 0.0;
  for (double x : f.raw()) acc += x;
  return acc / static_cast<double>(f.size());
}

CellVector face_to_cc(const FaceField& w) {
  const Grid2D& g = w.grid();
  CellVector out{ScalarField(g), ScalarField(g)};
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out.x(i, j) = 0.5 * (w.u(i, j) + w.u(i + 1, j));
      out.y(i, j) = 0.5 * (w.v(i, j) + w.v(i, j + 1));
    }
  return out;
}

FaceField face_coefficient(const ScalarField& f, const CoeffSpec& coef, double s_clamp) {
  ScalarField cell = map_cells(f, [&](double s) { return coef(std::clamp(s, -s_clamp, s_clamp)); });
  return interpolate_cc_to_face(cell);
}

double cell_inner(const ScalarField& f, const ScalarField& g) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * g[k];
  return acc * f.grid().cell_area();
}

double face_inner(const FaceField& a, const FaceField& b) {
  const Grid2D& g = a.grid();
  const int iu = g.periodic() ? g.nx - 1 : g.nx;
  const int jv = g.periodic() ? g.ny - 1 : g.ny;
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= iu; ++i) acc += a.u(i, j) * b.u(i, j);
  for (int j = 0; j <= jv; ++j)
    for (int i = 0; i < g.nx; ++i) acc += a.v(i, j) * b.v(i, j);
  return acc * g.cell_area();
}

FaceField face_product(const FaceField& a, const FaceField& b) {
  FaceField out(a.grid());
  auto& ou = out.u_raw();
  auto& ov = out.v_raw();
  const auto& au = a.u_raw();
  const auto& bu = b.u_raw();
  const auto& av = a.v_raw();
  const auto& bv = b.v_raw();
  for (std::size_t k = 0; k < ou.size(); ++k) ou[k] = au[k] * bu[k];
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] = av[k] * bv[k];
  return out;
}

ScalarField map_cells(const ScalarField& f, const std::function<double(double)>& fn) {
  ScalarField out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = fn(f[k]);
  return out;
}

double divergence_max(const MacVelocity& w) { return divergence_face_to_cc(w).max_abs(); }

MacVelocity curl_of_stream_function(const Grid2D& g,
                                    const std::function<double(double, double)>& psi) {
  const double hx = g.hx(), hy = g.hy();
  std::vector<double> corner(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
  auto at = [&](int i, int j) -> double& {
    return corner[static_cast<std::size_t>(j) * (g.nx + 1) + i];
  };
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) at(i, j) = psi(i * hx, j * hy);
  MacVelocity w(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) w.u(i, j) = (at(i, j + 1) - at(i, j)) / hy;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w.v(i, j) = -(at(i + 1, j) - at(i, j)) / hx;
  return w;
}

}  // namespace nsch
