#pragma once

#include <functional>
#include <span>

#include "nsch/core_model.hpp"
#include "nsch/grid.hpp"

namespace nsch {

/// 5-point Laplacian. Neumann bc use mirrored ghosts, so the operator is
/// symmetric and annihilates constants; periodic bc wrap around.
ScalarField laplacian(const ScalarField& f);

/// Two-point face differences. Wall-normal faces are exactly zero under
/// Neumann bc.
FaceField gradient_cc_to_face(const ScalarField& f);

/// Cell divergence of face data; minus the adjoint of gradient_cc_to_face in
/// the cell/face inner products for fields with zero wall-normal components.
ScalarField divergence_face_to_cc(const FaceField& w);

/// Conservative convection div(f w) with arithmetic face interpolation of f.
ScalarField advect_scalar(const MacVelocity& w, const ScalarField& f);

/// div(c grad f) for a face coefficient c (one value per face).
ScalarField divergence_of_flux(const FaceField& coefficient, const ScalarField& f);

/// In-place variant on raw row-major cell data; used inside Krylov loops.
void apply_divergence_of_flux(const FaceField& coefficient, std::span<const double> f,
                              std::span<double> out);

/// Midpoint rule sum f hx hy, accumulated in fixed row-major order.
double integrate(const ScalarField& f);
double mean(const ScalarField& f);

/// Arithmetic two-point averages onto faces. Wall faces take the adjacent
/// cell value (mirrored ghost).
FaceField interpolate_cc_to_face(const ScalarField& f);

/// Averages each face component onto cell centers.
CellVector face_to_cc(const FaceField& w);

/// Face coefficient from a cell field: mean of coef(f) over the two cells
/// sharing the face. Arguments are clamped to [-s_clamp, s_clamp].
FaceField face_coefficient(const ScalarField& f, const CoeffSpec& coef, double s_clamp);

/// Cell inner product sum f g hx hy.
double cell_inner(const ScalarField& f, const ScalarField& g);

/// Face inner product over distinct faces (periodic duplicates skipped).
double face_inner(const FaceField& a, const FaceField& b);

/// Pointwise product on faces.
FaceField face_product(const FaceField& a, const FaceField& b);

/// Pointwise map of a cell field.
ScalarField map_cells(const ScalarField& f, const std::function<double(double)>& fn);

/// max |div w| over cells.
double divergence_max(const MacVelocity& w);

/// Discrete curl of a stream function sampled at cell corners: u = dpsi/dy,
/// v = -dpsi/dx. The result is exactly divergence free. `psi` is called with
/// corner coordinates.
MacVelocity curl_of_stream_function(const Grid2D& grid,
                                    const std::function<double(double, double)>& psi);

}  // namespace nsch
