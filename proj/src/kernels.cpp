#include "romuq/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "romuq/error.hpp"
#include "romuq/fvm.hpp"

namespace romuq::kernels {

namespace {

void check_same_mesh(const mesh::MeshPtr& a, const mesh::MeshPtr& b) {
  if (a != b) throw MeshMismatchError("kernels: fields live on different meshes");
}

double weighted_column_dot(const SnapshotMatrix& s, std::size_t m, std::size_t n) {
  const double* x = s.data.data() + m * s.dofs;
  const double* y = s.data.data() + n * s.dofs;
  const double* w = s.weights.data();
  double acc = 0.0;
  for (std::size_t d = 0; d < s.dofs; ++d) acc += w[d] * x[d] * y[d];
  return acc;
}

void fill_row(const SnapshotMatrix& s, double scale, std::size_t m, linalg::DenseMatrix& k) {
  for (std::size_t n = m; n < s.count; ++n) {
    const double v = scale * weighted_column_dot(s, m, n);
    k(m, n) = v;
    k(n, m) = v;
  }
}

// C_ijk for fixed (j, k) and all i.
void fill_convection_pair(const ConvectionOperands& ops, std::size_t j, std::size_t k, std::vector<double>& out) {
  const std::size_t n = ops.modes.size();
  const std::vector<mesh::Vec2> image = fvm::convection(ops.modes[j]->flux, ops.modes[k]->cells, ops.scheme);
  for (std::size_t i = 0; i < n; ++i) out[(i * n + j) * n + k] = fvm::pair(ops.modes[i]->cells, image);
}

void check_operands(const ConvectionOperands& ops) {
  if (ops.modes.empty()) throw ShapeError("convection_tensor: no modes");
  for (const auto* m : ops.modes) check_same_mesh(ops.modes.front()->mesh(), m->mesh());
}

} // namespace

SnapshotMatrix flatten(std::span<const mesh::ScalarField> fields) {
  if (fields.empty()) throw ShapeError("flatten: no fields");
  SnapshotMatrix s;
  const auto& mesh = fields.front().mesh();
  s.dofs = static_cast<std::size_t>(mesh->cell_count());
  s.count = fields.size();
  s.weights = mesh->volumes();
  s.data.reserve(s.dofs * s.count);
  for (const auto& f : fields) {
    check_same_mesh(mesh, f.mesh());
    s.data.insert(s.data.end(), f.values().begin(), f.values().end());
  }
  return s;
}

SnapshotMatrix flatten(std::span<const mesh::VelocityField> fields) {
  if (fields.empty()) throw ShapeError("flatten: no fields");
  SnapshotMatrix s;
  const auto& mesh = fields.front().mesh();
  const std::size_t n = static_cast<std::size_t>(mesh->cell_count());
  s.dofs = 2 * n;
  s.count = fields.size();
  s.weights.resize(s.dofs);
  for (std::size_t c = 0; c < n; ++c) s.weights[2 * c] = s.weights[2 * c + 1] = mesh->volume(static_cast<int>(c));
  s.data.reserve(s.dofs * s.count);
  for (const auto& f : fields) {
    check_same_mesh(mesh, f.mesh());
    for (const mesh::Vec2& v : f.cells.values()) {
      s.data.push_back(v.x);
      s.data.push_back(v.y);
    }
  }
  return s;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

linalg::DenseMatrix correlation_matrix(const SnapshotMatrix& s, double scale) {
  linalg::DenseMatrix k(s.count, s.count);
  for (std::size_t m = 0; m < s.count; ++m) fill_row(s, scale, m, k);
  return k;
}

std::vector<double> convection_tensor(const ConvectionOperands& ops) {
  check_operands(ops);
  const std::size_t n = ops.modes.size();
  std::vector<double> out(n * n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) fill_convection_pair(ops, j, k, out);
  return out;
}

} // namespace serial

namespace parallel {

linalg::DenseMatrix correlation_matrix(const SnapshotMatrix& s, double scale, int threads) {
  linalg::DenseMatrix k(s.count, s.count);
  const long count = static_cast<long>(s.count);
  const int nt = threads > 0 ? threads : max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long m = 0; m < count; ++m) fill_row(s, scale, static_cast<std::size_t>(m), k);
  (void)nt;
  return k;
}

std::vector<double> convection_tensor(const ConvectionOperands& ops, int threads) {
  check_operands(ops);
  const std::size_t n = ops.modes.size();
  std::vector<double> out(n * n * n, 0.0);
  const long pairs = static_cast<long>(n * n);
  const int nt = threads > 0 ? threads : max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long jk = 0; jk < pairs; ++jk)
    fill_convection_pair(ops, static_cast<std::size_t>(jk) / n, static_cast<std::size_t>(jk) % n, out);
  (void)nt;
  return out;
}

} // namespace parallel

} // namespace romuq::kernels
