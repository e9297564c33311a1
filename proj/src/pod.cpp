#include "romuq/pod.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "romuq/error.hpp"
#include "romuq/fvm.hpp"
#include "romuq/kernels.hpp"

namespace romuq::pod {

using mesh::BoundaryCondition;
using mesh::PatchRole;
using mesh::StructuredMesh;
using mesh::Vec2;
using mesh::VectorField;

namespace {

constexpr double kZeroEigen = 1e-12;

double inner(const VelocityField& a, const VelocityField& b) { return mesh::inner_product(a.cells, b.cells); }
double inner(const ScalarField& a, const ScalarField& b) { return mesh::inner_product(a, b); }

template <class Field>
Field zero_like(const Field& f) {
  Field z = f;
  z.scale(0.0);
  return z;
}

// Modified Gram-Schmidt, in order. Entries whose norm collapses below
// drop_tol relative to their incoming norm are removed.
template <class Field>
std::vector<Field> gram_schmidt(std::vector<Field> in, double drop_tol, std::vector<int>* kept = nullptr) {
  std::vector<Field> out;
  for (std::size_t k = 0; k < in.size(); ++k) {
    Field v = std::move(in[k]);
    const double before = std::sqrt(inner(v, v));
    if (!(before > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const Field& q : out) v.axpy(-inner(q, v), q);
    const double after = std::sqrt(inner(v, v));
    if (after <= drop_tol * before) continue;
    v.scale(1.0 / after);
    out.push_back(std::move(v));
    if (kept) kept->push_back(static_cast<int>(k));
  }
  return out;
}

template <class Field>
PODBasis<Field> pod_modes_impl(const SnapshotSet<Field>& set, int n_modes, int threads, BasisKind kind) {
  validate(set);
  if (n_modes < 1) throw ValidationError("pod_modes: requested mode count must be positive");
  const std::size_t ns = set.size();
  if (static_cast<std::size_t>(n_modes) > ns)
    throw ValidationError(fmt::format("pod_modes: {} modes requested from {} snapshots", n_modes, ns));
  const kernels::SnapshotMatrix s = kernels::flatten(std::span<const Field>(set.snapshots));
  const double scale = 1.0 / static_cast<double>(ns);
  const linalg::DenseMatrix k =
      threads == 1 ? kernels::serial::correlation_matrix(s, scale) : kernels::parallel::correlation_matrix(s, scale, threads);
  linalg::SymmetricEigen eig = linalg::sym_eig(k);
  linalg::clamp_eigenvalues(eig.values, kZeroEigen);

  int rank = 0;
  while (rank < static_cast<int>(ns) && eig.values[rank] > 0.0) ++rank;
  if (rank == 0) throw DegenerateInputError("pod_modes: all snapshots are zero");
  const int keep = std::min(n_modes, rank);
  if (keep < n_modes)
    spdlog::warn("pod_modes: {} modes requested, snapshot rank is {}; returning {}", n_modes, rank, keep);

  std::vector<Field> modes;
  modes.reserve(keep);
  for (int m = 0; m < keep; ++m) {
    Field phi = zero_like(set.snapshots.front());
    for (std::size_t n = 0; n < ns; ++n) phi.axpy(eig.vectors(n, m), set.snapshots[n]);
    phi.scale(1.0 / std::sqrt(static_cast<double>(ns) * eig.values[m]));
    modes.push_back(std::move(phi));
  }
  // Re-orthonormalise to remove the round-off of the snapshot combination.
  modes = gram_schmidt(std::move(modes), 1e-8);

  PODBasis<Field> basis;
  basis.kind = kind;
  basis.modes = std::move(modes);
  basis.eigenvalues = eig.values;
  return basis;
}

std::vector<BoundaryCondition<Vec2>> supremizer_bcs(const StructuredMesh& m) {
  std::vector<BoundaryCondition<Vec2>> bcs;
  for (const auto& p : m.patches())
    bcs.push_back(p.role == PatchRole::Outlet ? BoundaryCondition<Vec2>::zero_gradient()
                                              : BoundaryCondition<Vec2>::fixed_value({}));
  return bcs;
}

} // namespace

template <class Field>
void validate(const SnapshotSet<Field>& set) {
  if (set.snapshots.empty()) throw DegenerateInputError("snapshot set is empty");
  if (set.parameters.size() != set.snapshots.size())
    throw ValidationError(fmt::format("snapshot set has {} snapshots but {} parameter points", set.snapshots.size(),
                                      set.parameters.size()));
  const MeshPtr& m = set.snapshots.front().mesh();
  for (const Field& f : set.snapshots)
    if (f.mesh() != m) throw MeshMismatchError("snapshot set mixes meshes");
}

template void validate(const SnapshotSet<VelocityField>&);
template void validate(const SnapshotSet<ScalarField>&);

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Velocity: return "u";
    case BasisKind::Pressure: return "p";
    case BasisKind::Supremizer: return "u_sup";
  }
  return "?";
}

Lifting compute_lifting(const MeshPtr& mesh) {
  return {fom::solve_potential_lifting(mesh, {1.0, 0.0}), fom::solve_potential_lifting(mesh, {0.0, 1.0})};
}

VelocitySnapshots homogenize(const VelocitySnapshots& set, const Lifting& lifting, double divergence_tol) {
  validate(set);
  VelocitySnapshots out;
  out.parameters = set.parameters;
  out.snapshots.reserve(set.size());
  for (std::size_t n = 0; n < set.size(); ++n) {
    const ParameterPoint& mu = set.parameters[n];
    VelocityField h = set.snapshots[n];
    if (h.mesh() != lifting.x.mesh()) throw MeshMismatchError("homogenize: lifting lives on another mesh");
    h.axpy(-mu.mu_x(), lifting.x);
    h.axpy(-mu.mu_y(), lifting.y);
    const double div = mesh::max_abs(mesh::cell_net_flux(*h.mesh(), h.flux));
    if (div > divergence_tol)
      throw DivergenceConstraintError(
          fmt::format("homogenize: snapshot {} has cell divergence {:.3e} > {:.1e}", n, div, divergence_tol));
    out.snapshots.push_back(std::move(h));
  }
  return out;
}

VelocityBasis pod_modes(const VelocitySnapshots& set, int n_modes, int threads) {
  return pod_modes_impl(set, n_modes, threads, BasisKind::Velocity);
}

PressureBasis pod_modes(const PressureSnapshots& set, int n_modes, int threads) {
  return pod_modes_impl(set, n_modes, threads, BasisKind::Pressure);
}

std::vector<double> cumulative_energy(const linalg::DenseVector& eigenvalues) {
  double total = 0.0;
  for (double l : eigenvalues) total += std::max(l, 0.0);
  if (!(total > 0.0)) throw DegenerateInputError("cumulative_energy: spectrum is zero");
  std::vector<double> out;
  double acc = 0.0;
  for (double l : eigenvalues) {
    acc += std::max(l, 0.0);
    out.push_back(acc / total);
  }
  out.back() = 1.0;
  return out;
}

VelocityField supremizer(const ScalarField& chi) {
  const StructuredMesh& m = *chi.mesh();
  const int n = m.cell_count();
  const std::vector<Vec2> g = fvm::gradient(chi);

  // -lap s = -grad chi, symmetric positive definite thanks to the Dirichlet patches.
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * n);
  for (int f = 0; f < m.face_count(); ++f) {
    const mesh::Face& face = m.face(f);
    const double k = face.area / face.distance;
    if (face.boundary()) {
      if (m.patches()[face.patch].role != PatchRole::Outlet) t.emplace_back(face.owner, face.owner, k);
    } else {
      t.emplace_back(face.owner, face.owner, k);
      t.emplace_back(face.neighbour, face.neighbour, k);
      t.emplace_back(face.owner, face.neighbour, -k);
      t.emplace_back(face.neighbour, face.owner, -k);
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  if (solver.info() != Eigen::Success) throw Error("supremizer: Laplace factorisation failed");
  Eigen::VectorXd bx(n), by(n);
  for (int c = 0; c < n; ++c) {
    bx[c] = -g[c].x;
    by[c] = -g[c].y;
  }
  const Eigen::VectorXd sx = solver.solve(bx);
  const Eigen::VectorXd sy = solver.solve(by);
  if (solver.info() != Eigen::Success || !sx.allFinite() || !sy.allFinite()) throw Error("supremizer: solve failed");
  std::vector<Vec2> cells(n);
  for (int c = 0; c < n; ++c) cells[c] = {sx[c], sy[c]};
  return VelocityField(VectorField(chi.mesh(), std::move(cells), supremizer_bcs(m)));
}

VelocityBasis supremizer_modes(const PressureBasis& pressure, int n_sup) {
  if (n_sup < 0) throw ValidationError("supremizer_modes: negative count");
  if (n_sup > pressure.size())
    throw ValidationError(
        fmt::format("supremizer_modes: {} supremizers requested, only {} pressure modes", n_sup, pressure.size()));
  VelocityBasis basis;
  basis.kind = BasisKind::Supremizer;
  if (n_sup == 0) return basis;

  std::vector<VelocityField> raw;
  for (int i = 0; i < n_sup; ++i) raw.push_back(supremizer(pressure.modes[i]));

  linalg::DenseMatrix gram(n_sup, n_sup);
  for (int i = 0; i < n_sup; ++i)
    for (int j = i; j < n_sup; ++j) gram(i, j) = gram(j, i) = inner(raw[i], raw[j]) / n_sup;
  linalg::SymmetricEigen eig = linalg::sym_eig(gram);
  linalg::clamp_eigenvalues(eig.values, kZeroEigen);
  basis.eigenvalues = eig.values;

  std::vector<int> kept;
  basis.modes = gram_schmidt(std::move(raw), 1e-10, &kept);
  for (int i = 0, k = 0; i < n_sup; ++i) {
    if (k < static_cast<int>(kept.size()) && kept[k] == i) {
      ++k;
      continue;
    }
    spdlog::warn("supremizer_modes: supremizer of pressure mode {} vanishes or is dependent; skipped", i + 1);
  }
  return basis;
}

template <class Field>
double orthonormality_defect(const std::vector<Field>& modes) {
  double worst = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = i; j < modes.size(); ++j)
      worst = std::max(worst, std::abs(inner(modes[i], modes[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

template double orthonormality_defect(const std::vector<VelocityField>&);
template double orthonormality_defect(const std::vector<ScalarField>&);

VelocityField project(const VelocityField& u, const VelocityBasis& basis, int n_modes) {
  if (n_modes < 1 || n_modes > basis.size()) throw ValidationError("project: mode count out of range");
  VelocityField out = zero_like(basis.modes.front());
  for (int i = 0; i < n_modes; ++i) out.axpy(inner(basis.modes[i], u), basis.modes[i]);
  return out;
}

ScalarField project(const ScalarField& p, const PressureBasis& basis, int n_modes) {
  if (n_modes < 1 || n_modes > basis.size()) throw ValidationError("project: mode count out of range");
  ScalarField out = zero_like(basis.modes.front());
  for (int i = 0; i < n_modes; ++i) out.axpy(inner(basis.modes[i], p), basis.modes[i]);
  return out;
}

} // namespace romuq::pod
