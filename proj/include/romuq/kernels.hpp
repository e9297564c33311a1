#pragma once

// Data-parallel kernels of the offline stage. Each kernel has a serial
// reference and an OpenMP version. The parallel versions split work over
// output entries only; every entry is accumulated by one thread in the same
// order as the reference, so both produce bit-identical results.

#include <cstddef>
#include <span>
#include <vector>

#include "romuq/field.hpp"
#include "romuq/fvm.hpp"
#include "romuq/linalg.hpp"

namespace romuq::kernels {

/// Fields flattened into columns of a dof x count matrix (column-major) with
/// one quadrature weight per dof.
struct SnapshotMatrix {
  std::size_t dofs = 0;
  std::size_t count = 0;
  std::vector<double> data;
  std::vector<double> weights;

  std::span<const double> column(std::size_t j) const { return {data.data() + j * dofs, dofs}; }
};

SnapshotMatrix flatten(std::span<const mesh::ScalarField> fields);
SnapshotMatrix flatten(std::span<const mesh::VelocityField> fields);

/// Operands of the convection tensor C_ijk = (phi_i, conv(F_j, phi_k)).
struct ConvectionOperands {
  std::vector<const mesh::VelocityField*> modes;
  fvm::Scheme scheme = fvm::Scheme::Central;
};

namespace serial {

/// K_mn = scale * sum_d w_d x_dm x_dn
linalg::DenseMatrix correlation_matrix(const SnapshotMatrix& s, double scale = 1.0);

/// Flat row-major N^3 array, index (i * N + j) * N + k.
std::vector<double> convection_tensor(const ConvectionOperands& ops);

} // namespace serial

namespace parallel {

/// threads <= 0 uses the OpenMP default.
linalg::DenseMatrix correlation_matrix(const SnapshotMatrix& s, double scale = 1.0, int threads = 0);
std::vector<double> convection_tensor(const ConvectionOperands& ops, int threads = 0);

} // namespace parallel

int max_threads();

} // namespace romuq::kernels
