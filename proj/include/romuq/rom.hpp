#pragma once

#include <iosfwd>
#include <vector>

#include "romuq/fom.hpp"
#include "romuq/linalg.hpp"
#include "romuq/pod.hpp"

namespace romuq::rom {

using fom::ParameterPoint;
using linalg::DenseMatrix;
using linalg::DenseVector;

/// Velocity slots are ordered [lift_x, lift_y, POD 1..n_u, supremizer 1..n_sup].
/// The two lifting coefficients are fixed to (mu_x, mu_y) and never solved for.
struct Layout {
  int n_u = 0;
  int n_sup = 0;
  int n_p = 0;

  static constexpr int n_lift = 2;
  int n_velocity() const noexcept { return n_lift + n_u + n_sup; }
  int n_free() const noexcept { return n_u + n_sup; }
  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Everything the online stage needs to rebuild fields.
struct ReducedBasis {
  pod::Lifting lifting;
  pod::VelocityBasis velocity;
  pod::VelocityBasis supremizers;
  pod::PressureBasis pressure;

  Layout layout() const;
  /// Velocity slots in layout order, truncated to `l`.
  std::vector<const mesh::VelocityField*> velocity_slots(const Layout& l) const;
};

/// Galerkin operators. With a the velocity and b the pressure coefficients,
/// the reduced momentum rows read nu B a - a^T C a - H b = 0 and the reduced
/// continuity rows P a = 0.
struct ReducedOperators {
  Layout layout;
  double nu = 0.0;
  fvm::Scheme convection = fvm::Scheme::Central;
  DenseMatrix B;          // N' x N', (phi_i, lap phi_j)
  std::vector<double> C;  // N'^3, (phi_i, conv(F_j, phi_k)) at (i N' + j) N' + k
  DenseMatrix H;          // N' x N_p, (phi_i, grad chi_j)
  DenseMatrix P;          // N_p x N', (chi_i, div phi_j)

  int n() const noexcept { return layout.n_velocity(); }
  double c(int i, int j, int k) const { return C[(static_cast<std::size_t>(i) * n() + j) * n() + k]; }

  /// Operators of the nested basis that keeps the leading n_u, n_sup and
  /// n_p modes. Bit-identical to assembling the smaller basis directly.
  ReducedOperators restrict(const Layout& smaller) const;
};

/// threads = 1 selects the serial convection-tensor kernel. The scheme must
/// match the one the snapshots were computed with.
ReducedOperators assemble_operators(const ReducedBasis& basis, double nu, const Layout& layout, int threads = 0,
                                    fvm::Scheme convection = fvm::Scheme::Central);

struct NewtonSettings {
  double tolerance = 1e-9;  // relative to max(1, ||nu B a||)
  int max_iterations = 100;
};

struct ReducedState {
  DenseVector a;  // all N' velocity coefficients, lifting slots included
  DenseVector b;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  std::vector<double> history;  // residual norm before each Newton step, then the final one
};

/// Residual of the momentum rows of the free slots followed by the
/// continuity rows, evaluated directly from the operators.
DenseVector residual(const ReducedOperators& ops, const DenseVector& a, const DenseVector& b);
double residual_tolerance(const ReducedOperators& ops, const DenseVector& a, double rel = 1e-9);

/// Damped Newton on the free velocity and all pressure coefficients. Throws
/// SingularMatrixError when the Jacobian cannot be factorised; the usual
/// remedy is more supremizer modes.
ReducedState solve_reduced(const ReducedOperators& ops, const ParameterPoint& mu, const ReducedState* initial = nullptr,
                           const NewtonSettings& settings = {});

struct ReconstructedFlow {
  mesh::VelocityField velocity;
  mesh::ScalarField pressure;
};

ReconstructedFlow reconstruct(const ReducedBasis& basis, const Layout& layout, const ReducedState& state);

double rom_lift(const ReducedBasis& basis, const ReducedOperators& ops, const ReducedState& state,
                const ParameterPoint& mu, double chord);

/// Coefficients of the L2 projection of a full-order state onto the reduced
/// spaces (lifting slots fixed to mu).
ReducedState project_state(const ReducedBasis& basis, const Layout& layout, const mesh::VelocityField& velocity,
                           const mesh::ScalarField& pressure, const ParameterPoint& mu);

void write_operators(std::ostream& os, const ReducedOperators& ops);
ReducedOperators read_operators(std::istream& is);

} // namespace romuq::rom
