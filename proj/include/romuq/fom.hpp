#pragma once

#include <vector>

#include "romuq/field.hpp"
#include "romuq/fvm.hpp"

namespace romuq::fom {

using mesh::MeshPtr;
using mesh::ScalarField;
using mesh::Vec2;
using mesh::VectorField;
using mesh::VelocityField;

/// Angle of attack (degrees) and inflow speed (m/s). The inflow vector is
/// (mu_x, mu_y) = U (cos a, sin a).
struct ParameterPoint {
  double alpha_deg = 0.0;
  double speed = 1.0;

  double mu_x() const;
  double mu_y() const;
  Vec2 inflow() const { return {mu_x(), mu_y()}; }
  /// Unit vector normal to the inflow, (-sin a, cos a).
  Vec2 lift_direction() const;
};

void validate(const ParameterPoint& mu);

struct SimpleSettings {
  double relax_velocity = 0.7;
  double relax_pressure = 0.3;
  // converged fields satisfy this scheme; central is applied as a deferred
  // correction on top of an implicit upwind matrix
  fvm::Scheme convection = fvm::Scheme::Central;
  double tolerance = 1e-6;
  int max_iterations = 5000;
  double divergence_limit = 1e6;
  int history_stride = 1;  // record every n-th iteration in the residual history
};

struct ResidualRecord {
  int iteration = 0;
  double momentum = 0.0;
  double continuity = 0.0;
};

struct FlowState {
  VelocityField velocity;
  ScalarField pressure;  // density-normalised
  double nu = 0.0;
  bool converged = false;
  int iterations = 0;
  double momentum_residual = 0.0;
  double continuity_residual = 0.0;
  std::vector<ResidualRecord> history;
};

/// Steady incompressible Navier-Stokes by SIMPLE on a colocated grid with
/// Rhie-Chow face fluxes. Inlet patches carry mu.inflow(), walls and the
/// obstacle are no-slip, the outlet is zero-gradient with p = 0.
///
/// Returns a state flagged non-converged when max_iterations is reached;
/// throws SolverDivergenceError when a residual exceeds the divergence limit
/// or turns NaN.
FlowState solve_steady_ns(const MeshPtr& mesh, const ParameterPoint& mu, double nu,
                          const SimpleSettings& settings = {}, const VelocityField* initial = nullptr);

/// Potential-flow lifting function: inlet face flux direction . n A, zero flux
/// on walls and obstacle, potential pinned to zero at the outlet. Face fluxes
/// come from the potential gradient; cell values are reconstructed from them.
/// The returned field carries FixedValue(direction) on inlet patches.
VelocityField solve_potential_lifting(const MeshPtr& mesh, Vec2 direction);

/// C_l = 2 F_perp / (U^2 chord) with F the pressure plus viscous force on the
/// obstacle patch (density-normalised). Throws when the mesh has no obstacle.
double compute_lift(const VectorField& velocity, const ScalarField& pressure, double nu,
                    const ParameterPoint& mu, double chord);
double compute_lift(const FlowState& state, const ParameterPoint& mu, double chord);

/// Sum of inflow over inlet patches (positive) and outflow over outlet patches.
struct MassBalance {
  double inflow = 0.0;
  double outflow = 0.0;
};
MassBalance mass_balance(const mesh::StructuredMesh& mesh, std::span<const double> flux);

} // namespace romuq::fom
