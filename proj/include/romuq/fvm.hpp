#pragma once

// Explicit finite-volume operators shared by the full-order solver and the
// Galerkin projection. Every operator returns cell-integrated quantities
// (sum over the faces of a cell), so dividing by the cell volume gives the
// pointwise value and pairing with a test field needs no volume weight.

#include <span>
#include <vector>

#include "romuq/field.hpp"

namespace romuq::fvm {

using mesh::ScalarField;
using mesh::Vec2;
using mesh::VectorField;
using mesh::VelocityField;

/// Central (Gauss linear) diffusion: sum_f A (u_N - u_P) / d; boundary faces
/// use the half-cell distance and the patch value.
std::vector<Vec2> laplacian(const VectorField& u);

/// Face interpolation of the convected velocity. Central is bilinear in
/// (flux, u), so its Galerkin projection is an exact quadratic form; upwind
/// is not, because the upwind cell follows the sign of the flux.
enum class Scheme { Central, Upwind };

/// Convection sum_f F_f u_f with u_f interpolated by `scheme`; boundary
/// faces transport the patch value.
std::vector<Vec2> convection(std::span<const double> flux, const VectorField& u, Scheme scheme = Scheme::Central);

/// Gauss gradient sum_f p_f n_f A_f with p_f the face average.
std::vector<Vec2> gradient(const ScalarField& p);

/// Cell-integrated steady momentum residual conv(F, u) - nu lap(u) + grad(p).
std::vector<Vec2> momentum_residual(const VelocityField& u, const ScalarField& p, double nu,
                                    Scheme scheme = Scheme::Central);

/// sum_c test[c] . integrated[c]; the L2(Omega) pairing of a test field with
/// an operator image returned by the functions above.
double pair(const VectorField& test, std::span<const Vec2> integrated);
double pair(const ScalarField& test, std::span<const double> integrated);

} // namespace romuq::fvm
