#include "romuq/rom.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "romuq/error.hpp"
#include "romuq/fvm.hpp"
#include "romuq/kernels.hpp"

namespace romuq::rom {

using mesh::ScalarField;
using mesh::Vec2;
using mesh::VelocityField;

namespace {

void check_layout(const Layout& l) {
  if (l.n_u < 0 || l.n_sup < 0) throw ValidationError("layout: negative mode count");
  if (l.n_p < 1) throw ValidationError("layout: at least one pressure mode is required");
}

void check_fits(const Layout& small, const Layout& big) {
  check_layout(small);
  if (small.n_u > big.n_u || small.n_sup > big.n_sup || small.n_p > big.n_p)
    throw ValidationError(fmt::format("layout ({}, {}, {}) exceeds available ({}, {}, {})", small.n_u, small.n_p,
                                      small.n_sup, big.n_u, big.n_p, big.n_sup));
}

// Slot of the large layout that holds slot s of the small one.
int source_slot(int s, const Layout& small, const Layout& big) {
  if (s < Layout::n_lift + small.n_u) return s;
  return Layout::n_lift + big.n_u + (s - Layout::n_lift - small.n_u);
}

double momentum_scale(const ReducedOperators& ops, const DenseVector& a) {
  const int n = ops.n();
  double s = 0.0;
  for (int i = Layout::n_lift; i < n; ++i) {
    double r = 0.0;
    for (int j = 0; j < n; ++j) r += ops.B(i, j) * a[j];
    s += (ops.nu * r) * (ops.nu * r);
  }
  return std::sqrt(s);
}

DenseMatrix jacobian(const ReducedOperators& ops, const DenseVector& a) {
  const int n = ops.n();
  const int nf = ops.layout.n_free();
  const int np = ops.layout.n_p;
  DenseMatrix j(nf + np, nf + np);
  for (int i = Layout::n_lift; i < n; ++i) {
    const int row = i - Layout::n_lift;
    for (int m = Layout::n_lift; m < n; ++m) {
      double v = ops.nu * ops.B(i, m);
      for (int k = 0; k < n; ++k) v -= (ops.c(i, m, k) + ops.c(i, k, m)) * a[k];
      j(row, m - Layout::n_lift) = v;
    }
    for (int l = 0; l < np; ++l) j(row, nf + l) = -ops.H(i, l);
  }
  for (int l = 0; l < np; ++l)
    for (int m = Layout::n_lift; m < n; ++m) j(nf + l, m - Layout::n_lift) = ops.P(l, m);
  return j;
}

void write_matrix(std::ostream& os, const char* tag, const DenseMatrix& m) {
  fmt::print(os, "{} {} {}\n", tag, m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) fmt::print(os, "{}{:.17g}", j ? " " : "", m(i, j));
    os << '\n';
  }
}

template <class T>
T read_value(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) throw ArtifactError(fmt::format("operator file: cannot read {}", what));
  return v;
}

void expect_tag(std::istream& is, const std::string& tag) {
  const auto got = read_value<std::string>(is, tag.c_str());
  if (got != tag) throw ArtifactError(fmt::format("operator file: expected '{}', found '{}'", tag, got));
}

DenseMatrix read_matrix(std::istream& is, const char* tag, std::size_t rows, std::size_t cols) {
  expect_tag(is, tag);
  const auto r = read_value<std::size_t>(is, tag);
  const auto c = read_value<std::size_t>(is, tag);
  if (r != rows || c != cols)
    throw ArtifactError(fmt::format("operator file: {} is {}x{}, layout implies {}x{}", tag, r, c, rows, cols));
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = read_value<double>(is, tag);
  return m;
}

constexpr const char* kMagic = "romuq-reduced-operators";
constexpr int kVersion = 1;

} // namespace

Layout ReducedBasis::layout() const { return {velocity.size(), supremizers.size(), pressure.size()}; }

std::vector<const VelocityField*> ReducedBasis::velocity_slots(const Layout& l) const {
  check_fits(l, layout());
  std::vector<const VelocityField*> slots{&lifting.x, &lifting.y};
  for (int i = 0; i < l.n_u; ++i) slots.push_back(&velocity.modes[i]);
  for (int i = 0; i < l.n_sup; ++i) slots.push_back(&supremizers.modes[i]);
  return slots;
}

ReducedOperators ReducedOperators::restrict(const Layout& smaller) const {
  check_fits(smaller, layout);
  ReducedOperators out;
  out.layout = smaller;
  out.nu = nu;
  out.convection = convection;
  const int n = smaller.n_velocity();
  const int np = smaller.n_p;
  out.B = DenseMatrix(n, n);
  out.H = DenseMatrix(n, np);
  out.P = DenseMatrix(np, n);
  out.C.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int si = source_slot(i, smaller, layout);
    for (int j = 0; j < n; ++j) {
      const int sj = source_slot(j, smaller, layout);
      out.B(i, j) = B(si, sj);
      for (int k = 0; k < n; ++k)
        out.C[(static_cast<std::size_t>(i) * n + j) * n + k] = c(si, sj, source_slot(k, smaller, layout));
    }
    for (int l = 0; l < np; ++l) {
      out.H(i, l) = H(si, l);
      out.P(l, i) = P(l, si);
    }
  }
  return out;
}

ReducedOperators assemble_operators(const ReducedBasis& basis, double nu, const Layout& layout, int threads,
                                    fvm::Scheme convection) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ValidationError("assemble_operators: viscosity must be positive");
  const std::vector<const VelocityField*> phi = basis.velocity_slots(layout);
  const int n = layout.n_velocity();
  const int np = layout.n_p;

  ReducedOperators ops;
  ops.layout = layout;
  ops.nu = nu;
  ops.convection = convection;
  ops.B = DenseMatrix(n, n);
  ops.H = DenseMatrix(n, np);
  ops.P = DenseMatrix(np, n);
  for (int j = 0; j < n; ++j) {
    const std::vector<Vec2> lap = fvm::laplacian(phi[j]->cells);
    for (int i = 0; i < n; ++i) ops.B(i, j) = fvm::pair(phi[i]->cells, lap);
  }
  for (int l = 0; l < np; ++l) {
    const ScalarField& chi = basis.pressure.modes[l];
    const std::vector<Vec2> grad = fvm::gradient(chi);
    for (int i = 0; i < n; ++i) ops.H(i, l) = fvm::pair(phi[i]->cells, grad);
  }
  for (int j = 0; j < n; ++j) {
    const std::vector<double> div = mesh::cell_net_flux(*phi[j]->mesh(), phi[j]->flux);
    for (int l = 0; l < np; ++l) ops.P(l, j) = fvm::pair(basis.pressure.modes[l], div);
  }
  kernels::ConvectionOperands operands{phi, convection};
  ops.C = threads == 1 ? kernels::serial::convection_tensor(operands)
                       : kernels::parallel::convection_tensor(operands, threads);
  return ops;
}

DenseVector residual(const ReducedOperators& ops, const DenseVector& a, const DenseVector& b) {
  const int n = ops.n();
  const int np = ops.layout.n_p;
  if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != np)
    throw ShapeError("reduced residual: coefficient vectors do not match the layout");
  DenseVector r(ops.layout.n_free() + np);
  for (int i = Layout::n_lift; i < n; ++i) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
      v += ops.nu * ops.B(i, j) * a[j];
      double cj = 0.0;
      for (int k = 0; k < n; ++k) cj += ops.c(i, j, k) * a[k];
      v -= a[j] * cj;
    }
    for (int l = 0; l < np; ++l) v -= ops.H(i, l) * b[l];
    r[i - Layout::n_lift] = v;
  }
  for (int l = 0; l < np; ++l) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += ops.P(l, j) * a[j];
    r[ops.layout.n_free() + l] = v;
  }
  return r;
}

double residual_tolerance(const ReducedOperators& ops, const DenseVector& a, double rel) {
  return rel * std::max(1.0, momentum_scale(ops, a));
}

ReducedState solve_reduced(const ReducedOperators& ops, const ParameterPoint& mu, const ReducedState* initial,
                           const NewtonSettings& settings) {
  fom::validate(mu);
  const int n = ops.n();
  const int nf = ops.layout.n_free();
  const int np = ops.layout.n_p;

  ReducedState s;
  s.a = DenseVector(n);
  s.b = DenseVector(np);
  if (initial) {
    if (static_cast<int>(initial->a.size()) != n || static_cast<int>(initial->b.size()) != np)
      throw ShapeError("solve_reduced: initial guess does not match the layout");
    s.a = initial->a;
    s.b = initial->b;
  }
  s.a[0] = mu.mu_x();
  s.a[1] = mu.mu_y();

  auto norm_at = [&](const DenseVector& a, const DenseVector& b) { return residual(ops, a, b).norm2(); };

  DenseVector r = residual(ops, s.a, s.b);
  double rn = r.norm2();
  for (s.iterations = 0;; ++s.iterations) {
    if (!std::isfinite(rn)) throw SolverDivergenceError("reduced Newton: residual is not finite", {});
    s.residual = rn;
    s.history.push_back(rn);
    s.tolerance = residual_tolerance(ops, s.a, settings.tolerance);
    if (rn <= s.tolerance) {
      s.converged = true;
      break;
    }
    if (s.iterations >= settings.max_iterations) break;

    DenseVector rhs(nf + np);
    for (int q = 0; q < nf + np; ++q) rhs[q] = -r[q];
    DenseVector delta;
    try {
      delta = linalg::lu_solve(jacobian(ops, s.a), rhs);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError(fmt::format(
          "reduced Jacobian is singular ({}); the pressure-velocity coupling is not stable, increase the number "
          "of supremizer modes",
          e.what()));
    }

    double step = 1.0;
    DenseVector a_try, b_try;
    double rn_try = 0.0;
    for (;;) {
      a_try = s.a;
      b_try = s.b;
      for (int m = 0; m < nf; ++m) a_try[Layout::n_lift + m] += step * delta[m];
      for (int l = 0; l < np; ++l) b_try[l] += step * delta[nf + l];
      rn_try = norm_at(a_try, b_try);
      if (rn_try < (1.0 - 1e-4 * step) * rn || step < 1.0 / 1024.0) break;
      step *= 0.5;
    }
    s.a = std::move(a_try);
    s.b = std::move(b_try);
    r = residual(ops, s.a, s.b);
    rn = r.norm2();
  }
  return s;
}

ReconstructedFlow reconstruct(const ReducedBasis& basis, const Layout& layout, const ReducedState& state) {
  const std::vector<const VelocityField*> phi = basis.velocity_slots(layout);
  if (state.a.size() != phi.size() || static_cast<int>(state.b.size()) != layout.n_p)
    throw ShapeError("reconstruct: coefficient vectors do not match the layout");
  VelocityField u = *phi[0];
  u.scale(state.a[0]);
  for (std::size_t j = 1; j < phi.size(); ++j) u.axpy(state.a[j], *phi[j]);

  ScalarField p = ScalarField::uniform(basis.lifting.x.mesh(), 0.0, mesh::pressure_bcs(*basis.lifting.x.mesh()));
  if (layout.n_p > 0) {
    p = basis.pressure.modes[0];
    p.scale(state.b[0]);
    for (int l = 1; l < layout.n_p; ++l) p.axpy(state.b[l], basis.pressure.modes[l]);
  }
  return {std::move(u), std::move(p)};
}

double rom_lift(const ReducedBasis& basis, const ReducedOperators& ops, const ReducedState& state,
                const ParameterPoint& mu, double chord) {
  const ReconstructedFlow flow = reconstruct(basis, ops.layout, state);
  return fom::compute_lift(flow.velocity.cells, flow.pressure, ops.nu, mu, chord);
}

ReducedState project_state(const ReducedBasis& basis, const Layout& layout, const VelocityField& velocity,
                           const ScalarField& pressure, const ParameterPoint& mu) {
  const std::vector<const VelocityField*> phi = basis.velocity_slots(layout);
  const int n = layout.n_velocity();
  const int nf = layout.n_free();
  VelocityField h = velocity;
  h.axpy(-mu.mu_x(), basis.lifting.x);
  h.axpy(-mu.mu_y(), basis.lifting.y);

  ReducedState s;
  s.a = DenseVector(n);
  s.b = DenseVector(layout.n_p);
  s.a[0] = mu.mu_x();
  s.a[1] = mu.mu_y();
  if (nf > 0) {
    // POD and supremizer modes are not mutually orthogonal: solve the Gram system.
    DenseMatrix g(nf, nf);
    DenseVector rhs(nf);
    for (int i = 0; i < nf; ++i) {
      const auto& pi = phi[Layout::n_lift + i]->cells;
      rhs[i] = mesh::inner_product(pi, h.cells);
      for (int j = i; j < nf; ++j) g(i, j) = g(j, i) = mesh::inner_product(pi, phi[Layout::n_lift + j]->cells);
    }
    const DenseVector c = linalg::lu_solve(g, rhs);
    for (int i = 0; i < nf; ++i) s.a[Layout::n_lift + i] = c[i];
  }
  for (int l = 0; l < layout.n_p; ++l) s.b[l] = mesh::inner_product(basis.pressure.modes[l], pressure);
  s.converged = true;
  return s;
}

void write_operators(std::ostream& os, const ReducedOperators& ops) {
  const int n = ops.n();
  fmt::print(os, "{} {}\n", kMagic, kVersion);
  fmt::print(os, "n_u {}\nn_sup {}\nn_p {}\nnu {:.17g}\n", ops.layout.n_u, ops.layout.n_sup, ops.layout.n_p, ops.nu);
  fmt::print(os, "convection {}\n", ops.convection == fvm::Scheme::Central ? "central" : "upwind");
  write_matrix(os, "B", ops.B);
  fmt::print(os, "C {} {} {}\n", n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) fmt::print(os, "{}{:.17g}", k ? " " : "", ops.c(i, j, k));
      os << '\n';
    }
  write_matrix(os, "H", ops.H);
  write_matrix(os, "P", ops.P);
  if (!os) throw ArtifactError("operator file: write failed");
}

ReducedOperators read_operators(std::istream& is) {
  if (read_value<std::string>(is, "header") != kMagic) throw ArtifactError("operator file: bad header");
  if (read_value<int>(is, "version") != kVersion) throw ArtifactError("operator file: unsupported version");
  ReducedOperators ops;
  expect_tag(is, "n_u");
  ops.layout.n_u = read_value<int>(is, "n_u");
  expect_tag(is, "n_sup");
  ops.layout.n_sup = read_value<int>(is, "n_sup");
  expect_tag(is, "n_p");
  ops.layout.n_p = read_value<int>(is, "n_p");
  expect_tag(is, "nu");
  ops.nu = read_value<double>(is, "nu");
  expect_tag(is, "convection");
  const auto scheme = read_value<std::string>(is, "convection scheme");
  if (scheme != "central" && scheme != "upwind") throw ArtifactError("operator file: unknown convection scheme");
  ops.convection = scheme == "central" ? fvm::Scheme::Central : fvm::Scheme::Upwind;
  try {
    check_layout(ops.layout);
  } catch (const ValidationError& e) {
    throw ArtifactError(std::string("operator file: ") + e.what());
  }
  const std::size_t n = ops.layout.n_velocity();
  const std::size_t np = ops.layout.n_p;
  ops.B = read_matrix(is, "B", n, n);
  expect_tag(is, "C");
  for (int d = 0; d < 3; ++d)
    if (read_value<std::size_t>(is, "C shape") != n) throw ArtifactError("operator file: C shape mismatch");
  ops.C.resize(n * n * n);
  for (double& v : ops.C) v = read_value<double>(is, "C");
  ops.H = read_matrix(is, "H", n, np);
  ops.P = read_matrix(is, "P", np, n);
  return ops;
}

} // namespace romuq::rom
