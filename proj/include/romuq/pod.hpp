#pragma once

#include <string>
#include <vector>

#include "romuq/field.hpp"
#include "romuq/fom.hpp"
#include "romuq/linalg.hpp"

namespace romuq::pod {

using fom::ParameterPoint;
using mesh::MeshPtr;
using mesh::ScalarField;
using mesh::VelocityField;

template <class Field>
struct SnapshotSet {
  std::vector<Field> snapshots;
  std::vector<ParameterPoint> parameters;

  std::size_t size() const noexcept { return snapshots.size(); }
};

using VelocitySnapshots = SnapshotSet<VelocityField>;
using PressureSnapshots = SnapshotSet<ScalarField>;

/// Throws DegenerateInputError for an empty set, ValidationError when the
/// parameter list does not match, MeshMismatchError for mixed meshes.
template <class Field>
void validate(const SnapshotSet<Field>& set);

enum class BasisKind { Velocity, Pressure, Supremizer };
std::string to_string(BasisKind kind);

/// L2-orthonormal modes in decreasing energy order. `eigenvalues` holds the
/// whole clamped spectrum of the correlation matrix, not only the retained
/// part, so that energy fractions can be reported.
template <class Field>
struct PODBasis {
  BasisKind kind = BasisKind::Velocity;
  std::vector<Field> modes;
  linalg::DenseVector eigenvalues;

  int size() const noexcept { return static_cast<int>(modes.size()); }
};

using VelocityBasis = PODBasis<VelocityField>;
using PressureBasis = PODBasis<ScalarField>;

/// Potential-flow lifting fields for unit inflow along x and y.
struct Lifting {
  VelocityField x;
  VelocityField y;
};

Lifting compute_lifting(const MeshPtr& mesh);

/// u - mu_x phi_x - mu_y phi_y for every snapshot (cells, boundary values and
/// fluxes). Throws DivergenceConstraintError when a result has a cell with
/// net flux above `divergence_tol`.
VelocitySnapshots homogenize(const VelocitySnapshots& set, const Lifting& lifting, double divergence_tol = 1e-7);

/// Method of snapshots on K_mn = (u_m, u_n) / N_s. Returns min(n_modes, rank)
/// modes, n_modes > N_s being a ValidationError; eigenvalues below 1e-12 of
/// the largest count as zero. `threads` selects the correlation kernel
/// (0 = OpenMP default, 1 = serial reference).
VelocityBasis pod_modes(const VelocitySnapshots& set, int n_modes, int threads = 0);
PressureBasis pod_modes(const PressureSnapshots& set, int n_modes, int threads = 0);

/// Cumulative energy fraction of the leading eigenvalues; last entry is 1.
std::vector<double> cumulative_energy(const linalg::DenseVector& eigenvalues);

/// One supremizer per pressure mode: s solves lap s = grad chi with s = 0 on
/// inlet, wall and obstacle patches and zero gradient at the outlet.
/// Supremizers are orthonormalised among themselves; ones that vanish (for
/// instance from a constant pressure mode) are dropped with a warning.
/// `eigenvalues` holds the spectrum of the Gram matrix of the raw
/// supremizers divided by their count.
VelocityBasis supremizer_modes(const PressureBasis& pressure, int n_sup);

/// Single supremizer before orthonormalisation.
VelocityField supremizer(const ScalarField& pressure_mode);

/// max_ij |(phi_i, phi_j) - delta_ij|
template <class Field>
double orthonormality_defect(const std::vector<Field>& modes);

/// L2 projection of u onto span(modes), assuming orthonormal modes.
VelocityField project(const VelocityField& u, const VelocityBasis& basis, int n_modes);
ScalarField project(const ScalarField& p, const PressureBasis& basis, int n_modes);

} // namespace romuq::pod
