#include "nsch/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsch {
namespace {

int points_for(int cells, TransformKind kind) {
  return kind == TransformKind::DirichletNode ? cells - 1 : cells;
}

std::vector<double> eigenvalues(int cells, TransformKind kind, double h) {
  const int n = points_for(cells, kind);
  std::vector<double> lam(static_cast<std::size_t>(n));
  const double scale = 2.0 / (h * h);
  const double pi = std::numbers::pi;
  for (int k = 0; k < n; ++k) {
    double theta = 0.0;
    switch (kind) {
      case TransformKind::Neumann: theta = pi * k / cells; break;
      case TransformKind::DirichletNode:
      case TransformKind::DirichletCell: theta = pi * (k + 1) / cells; break;
      case TransformKind::Periodic: {
        const int freq = k <= cells / 2 ? k : cells - k;
        theta = 2.0 * pi * freq / cells;
        break;
      }
    }
    lam[static_cast<std::size_t>(k)] = scale * (1.0 - std::cos(theta));
  }
  // Exact zero for the constant mode keeps singular solves clean.
  if (kind == TransformKind::Neumann || kind == TransformKind::Periodic) lam[0] = 0.0;
  return lam;
}

fftw_r2r_kind forward_kind(TransformKind k) {
  switch (k) {
    case TransformKind::Neumann: return FFTW_REDFT10;
    case TransformKind::DirichletNode: return FFTW_RODFT00;
    case TransformKind::DirichletCell: return FFTW_RODFT10;
    case TransformKind::Periodic: return FFTW_R2HC;
  }
  return FFTW_REDFT10;
}

fftw_r2r_kind backward_kind(TransformKind k) {
  switch (k) {
    case TransformKind::Neumann: return FFTW_REDFT01;
    case TransformKind::DirichletNode: return FFTW_RODFT00;
    case TransformKind::DirichletCell: return FFTW_RODFT01;
    case TransformKind::Periodic: return FFTW_HC2R;
  }
  return FFTW_REDFT01;
}

double logical_size(int cells, TransformKind k) {
  return k == TransformKind::Periodic ? cells : 2.0 * cells;
}

}  // namespace

struct SpectralSolver::Plans {
  double* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
};

SpectralSolver::SpectralSolver(int cells_x, TransformKind kind_x, double hx,
                               int cells_y, TransformKind kind_y, double hy)
    : px_(points_for(cells_x, kind_x)),
      py_(points_for(cells_y, kind_y)),
      norm_(logical_size(cells_x, kind_x) * logical_size(cells_y, kind_y)),
      lam_x_(eigenvalues(cells_x, kind_x, hx)),
      lam_y_(eigenvalues(cells_y, kind_y, hy)),
      plans_(std::make_unique<Plans>()) {
  if (px_ < 1 || py_ < 1) throw std::invalid_argument("spectral grid too small");
  plans_->buffer = fftw_alloc_real(size());
  // FFTW_ESTIMATE keeps the chosen algorithm, and therefore the rounding,
  // identical from run to run.
  plans_->forward = fftw_plan_r2r_2d(py_, px_, plans_->buffer, plans_->buffer,
                                     forward_kind(kind_y), forward_kind(kind_x), FFTW_ESTIMATE);
  plans_->backward = fftw_plan_r2r_2d(py_, px_, plans_->buffer, plans_->buffer,
                                      backward_kind(kind_y), backward_kind(kind_x), FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("FFTW planning failed");
}

SpectralSolver::~SpectralSolver() = default;
SpectralSolver::SpectralSolver(SpectralSolver&&) noexcept = default;
SpectralSolver& SpectralSolver::operator=(SpectralSolver&&) noexcept = default;

std::vector<double> SpectralSolver::make_multiplier(
    const std::function<double(double, double)>& symbol) const {
  std::vector<double> m(size());
  for (int j = 0; j < py_; ++j)
    for (int i = 0; i < px_; ++i)
      m[static_cast<std::size_t>(j) * px_ + i] =
          symbol(lam_x_[static_cast<std::size_t>(i)], lam_y_[static_cast<std::size_t>(j)]) / norm_;
  return m;
}

void SpectralSolver::apply(std::span<const double> in, std::span<double> out,
                           const std::vector<double>& multiplier) const {
  const std::size_t n = size();
  if (in.size() != n || out.size() != n || multiplier.size() != n)
    throw std::invalid_argument("spectral apply: size mismatch");
  double* buf = plans_->buffer;
  for (std::size_t k = 0; k < n; ++k) buf[k] = in[k];
  fftw_execute(plans_->forward);
  for (std::size_t k = 0; k < n; ++k) buf[k] *= multiplier[k];
  fftw_execute(plans_->backward);
  for (std::size_t k = 0; k < n; ++k) out[k] = buf[k];
}

void SpectralSolver::solve(std::span<const double> in, std::span<double> out, double alpha,
                           double beta_x, double beta_y) const {
  const std::size_t n = size();
  if (in.size() != n || out.size() != n) throw std::invalid_argument("spectral solve: size mismatch");
  double* buf = plans_->buffer;
  std::copy(in.begin(), in.end(), buf);
  fftw_execute(plans_->forward);
  for (int j = 0; j < py_; ++j) {
    const double ay = alpha + beta_y * lam_y_[static_cast<std::size_t>(j)];
    double* row = buf + static_cast<std::size_t>(j) * px_;
    for (int i = 0; i < px_; ++i) {
      const double d = ay + beta_x * lam_x_[static_cast<std::size_t>(i)];
      row[i] = d == 0.0 ? 0.0 : row[i] / (d * norm_);
    }
  }
  fftw_execute(plans_->backward);
  std::copy(buf, buf + n, out.begin());
}

}  // namespace nsch
