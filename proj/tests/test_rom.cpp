#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "romuq/error.hpp"
#include "romuq/fom.hpp"
#include "romuq/pce.hpp"
#include "romuq/pod.hpp"
#include "romuq/rom.hpp"
#include "romuq/sampling.hpp"
#include "support.hpp"

using namespace romuq;
using namespace romuq::mesh;
using rom::Layout;

namespace {

constexpr double kNu = 0.04;

struct Fixture {
  MeshPtr mesh;
  pod::VelocitySnapshots u;
  pod::PressureSnapshots p;
  std::vector<double> cl;
  rom::ReducedBasis basis;
  rom::ReducedOperators ops;  // full layout (20, 4, 4)
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    x.mesh = build_mesh(test::plate_spec(24, 12));
    const auto samples = sampling::lhc_gaussian(24, {0.0, 1.0}, {5.0, 0.1}, 77);
    for (const auto& mu : samples.points) {
      const auto st = fom::solve_steady_ns(x.mesh, mu, kNu);
      if (!st.converged) continue;
      x.u.snapshots.push_back(st.velocity);
      x.u.parameters.push_back(mu);
      x.p.snapshots.push_back(st.pressure);
      x.p.parameters.push_back(mu);
      x.cl.push_back(fom::compute_lift(st, mu, 1.0));
    }
    x.basis.lifting = pod::compute_lifting(x.mesh);
    x.basis.velocity = pod::pod_modes(pod::homogenize(x.u, x.basis.lifting), 20);
    x.basis.pressure = pod::pod_modes(x.p, 4);
    x.basis.supremizers = pod::supremizer_modes(x.basis.pressure, 4);
    x.ops = rom::assemble_operators(x.basis, kNu, x.basis.layout());
    return x;
  }();
  return f;
}

double l2(const VectorField& f, const VectorField& g) {
  double s = 0.0;
  for (int c = 0; c < f.size(); ++c) s += f.mesh()->volume(c) * (f[c].x * g[c].x + f[c].y * g[c].y);
  return s;
}

} // namespace

TEST(Operators, ShapesAndFiniteness) {
  const auto& f = fixture();
  ASSERT_EQ(f.u.size(), 24u);
  const auto& o = f.ops;
  EXPECT_EQ(o.layout, (Layout{20, 4, 4}));
  EXPECT_EQ(o.n(), 26);
  EXPECT_EQ(o.B.rows(), 26u);
  EXPECT_EQ(o.C.size(), 26u * 26u * 26u);
  EXPECT_EQ(o.H.cols(), 4u);
  EXPECT_EQ(o.P.rows(), 4u);
  for (double v : o.C) EXPECT_TRUE(std::isfinite(v));
}

TEST(Operators, DiffusionDiagonalNonPositiveForHomogeneousModes) {
  const auto& o = fixture().ops;
  for (int i = Layout::n_lift; i < o.n(); ++i) EXPECT_LE(o.B(i, i), 0.0);
}

TEST(Operators, DivergenceFreeColumnsOfPodModes) {
  const auto& o = fixture().ops;
  for (int l = 0; l < o.layout.n_p; ++l)
    for (int j = 0; j < Layout::n_lift + o.layout.n_u; ++j) EXPECT_LE(std::abs(o.P(l, j)), 1e-6) << l << "," << j;
}

TEST(Operators, ZeroConvectingSlotGivesZeroSlice) {
  rom::ReducedBasis b = fixture().basis;
  b.velocity.modes[0].scale(0.0);
  const Layout l{3, 1, 1};
  const auto o = rom::assemble_operators(b, kNu, l);
  for (int i = 0; i < o.n(); ++i)
    for (int k = 0; k < o.n(); ++k) EXPECT_EQ(o.c(i, Layout::n_lift, k), 0.0);
}

TEST(Operators, RestrictionMatchesDirectAssembly) {
  const auto& f = fixture();
  for (const Layout& l : {Layout{5, 2, 3}, Layout{20, 4, 4}, Layout{0, 1, 1}}) {
    const auto direct = rom::assemble_operators(f.basis, kNu, l);
    const auto cut = f.ops.restrict(l);
    EXPECT_EQ(direct.B.values(), cut.B.values());
    EXPECT_EQ(direct.C, cut.C);
    EXPECT_EQ(direct.H.values(), cut.H.values());
    EXPECT_EQ(direct.P.values(), cut.P.values());
  }
  EXPECT_THROW(f.ops.restrict(Layout{21, 4, 4}), ValidationError);
  EXPECT_THROW(f.ops.restrict(Layout{5, 4, 0}), ValidationError);
}

TEST(Operators, SerialAndParallelAssemblyAgree) {
  const auto& f = fixture();
  const Layout l{8, 4, 4};
  const auto a = rom::assemble_operators(f.basis, kNu, l, 1);
  const auto b = rom::assemble_operators(f.basis, kNu, l, 4);
  EXPECT_EQ(a.C, b.C);
  EXPECT_EQ(a.B.values(), b.B.values());
}

TEST(Operators, TextRoundTripIsExact) {
  const auto o = fixture().ops.restrict({6, 3, 2});
  std::stringstream ss;
  rom::write_operators(ss, o);
  const auto back = rom::read_operators(ss);
  EXPECT_EQ(back.layout, o.layout);
  EXPECT_EQ(back.nu, o.nu);
  EXPECT_EQ(back.convection, o.convection);
  EXPECT_EQ(back.B.values(), o.B.values());
  EXPECT_EQ(back.C, o.C);
  EXPECT_EQ(back.H.values(), o.H.values());
  EXPECT_EQ(back.P.values(), o.P.values());
  std::istringstream junk("not-an-operator-file 1\n");
  EXPECT_THROW(rom::read_operators(junk), ArtifactError);
  std::string text = ss.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(rom::read_operators(truncated), ArtifactError);
}

TEST(Solve, PinnedLiftingAndIndependentResidual) {
  const auto& f = fixture();
  const auto o = f.ops.restrict({10, 4, 4});
  for (std::size_t i = 0; i < f.u.size(); i += 3) {
    const auto& mu = f.u.parameters[i];
    const auto s = rom::solve_reduced(o, mu);
    ASSERT_TRUE(s.converged);
    EXPECT_EQ(s.a[0], mu.mu_x());
    EXPECT_EQ(s.a[1], mu.mu_y());
    // nu B a - a^T C a - H b on the free rows, P a below; written out here
    const int n = o.n(), nf = o.layout.n_free(), np = o.layout.n_p;
    double res = 0.0, scale = 0.0;
    for (int r = Layout::n_lift; r < n; ++r) {
      double v = 0.0, bterm = 0.0;
      for (int j = 0; j < n; ++j) {
        bterm += kNu * o.B(r, j) * s.a[j];
        for (int k = 0; k < n; ++k) v -= s.a[j] * o.c(r, j, k) * s.a[k];
      }
      for (int l = 0; l < np; ++l) v -= o.H(r, l) * s.b[l];
      res += (v + bterm) * (v + bterm);
      scale += bterm * bterm;
    }
    for (int l = 0; l < np; ++l) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += o.P(l, j) * s.a[j];
      res += v * v;
    }
    EXPECT_LE(std::sqrt(res), 1e-9 * std::max(1.0, std::sqrt(scale)));
    EXPECT_EQ(static_cast<int>(s.a.size()), n);
    EXPECT_EQ(nf, 14);
    EXPECT_EQ(s.history.size(), static_cast<std::size_t>(s.iterations + 1));
  }
}

TEST(Solve, NewtonFromProjectionIsFast) {
  const auto& f = fixture();
  const Layout l{20, 4, 4};
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    const auto guess = rom::project_state(f.basis, l, f.u.snapshots[i], f.p.snapshots[i], f.u.parameters[i]);
    const auto s = rom::solve_reduced(f.ops, f.u.parameters[i], &guess);
    EXPECT_TRUE(s.converged);
    EXPECT_LE(s.iterations, 5);
  }
}

TEST(Solve, LinearLimitMatchesDirectSolve) {
  // without the convection tensor the reduced system is linear
  const auto& f = fixture();
  auto o = f.ops.restrict({6, 4, 4});
  std::fill(o.C.begin(), o.C.end(), 0.0);
  const fom::ParameterPoint mu{3.0, 1.0};
  const auto s = rom::solve_reduced(o, mu);
  ASSERT_TRUE(s.converged);
  EXPECT_LE(s.iterations, 2);
  // oracle: nu B a - H b = 0 on the free rows, P a = 0, lifting pinned
  const int nf = o.layout.n_free(), np = o.layout.n_p;
  const double a0[2] = {mu.mu_x(), mu.mu_y()};
  std::vector<std::vector<double>> m(nf + np, std::vector<double>(nf + np, 0.0));
  std::vector<double> rhs(nf + np, 0.0);
  for (int r = 0; r < nf; ++r) {
    for (int j = 0; j < nf; ++j) m[r][j] = o.nu * o.B(Layout::n_lift + r, Layout::n_lift + j);
    for (int l = 0; l < np; ++l) m[r][nf + l] = -o.H(Layout::n_lift + r, l);
    for (int j = 0; j < 2; ++j) rhs[r] -= o.nu * o.B(Layout::n_lift + r, j) * a0[j];
  }
  for (int l = 0; l < np; ++l) {
    for (int j = 0; j < nf; ++j) m[nf + l][j] = o.P(l, Layout::n_lift + j);
    for (int j = 0; j < 2; ++j) rhs[nf + l] -= o.P(l, j) * a0[j];
  }
  const auto x = test::solve_dense(m, rhs);
  double diff = 0.0, ref = 0.0;
  for (int j = 0; j < nf; ++j) {
    diff += std::pow(s.a[Layout::n_lift + j] - x[j], 2);
    ref += x[j] * x[j];
  }
  for (int l = 0; l < np; ++l) {
    diff += std::pow(s.b[l] - x[nf + l], 2);
    ref += x[nf + l] * x[nf + l];
  }
  EXPECT_LE(std::sqrt(diff), 1e-6 * std::sqrt(ref));
}

TEST(Solve, SingularJacobianSuggestsSupremizers) {
  rom::ReducedOperators o;
  o.layout = {1, 0, 1};
  o.nu = 1.0;
  o.B = linalg::DenseMatrix(3, 3);
  o.H = linalg::DenseMatrix(3, 1);
  o.P = linalg::DenseMatrix(1, 3);
  o.C.assign(27, 0.0);
  o.B(2, 0) = 1.0;  // nonzero residual so that Newton has to step
  try {
    rom::solve_reduced(o, {0.0, 1.0});
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_NE(std::string(e.what()).find("supremizer"), std::string::npos);
  }
}

TEST(Solve, NonConvergenceIsFlaggedWithHistory) {
  const auto& f = fixture();
  rom::NewtonSettings tight;
  tight.max_iterations = 0;
  const auto s = rom::solve_reduced(f.ops.restrict({5, 2, 2}), {4.0, 1.0}, nullptr, tight);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.history.size(), 1u);
}

TEST(Reconstruct, ZeroCoefficientsGiveScaledLifting) {
  const auto& f = fixture();
  const Layout l{3, 2, 2};
  rom::ReducedState s;
  const fom::ParameterPoint mu{6.0, 1.2};
  s.a = linalg::DenseVector(l.n_velocity());
  s.b = linalg::DenseVector(l.n_p);
  s.a[0] = mu.mu_x();
  s.a[1] = mu.mu_y();
  const auto r = rom::reconstruct(f.basis, l, s);
  for (int c = 0; c < r.velocity.size(); ++c) {
    const Vec2 want = mu.mu_x() * f.basis.lifting.x.cells[c] + mu.mu_y() * f.basis.lifting.y.cells[c];
    EXPECT_NEAR(r.velocity.cells[c].x, want.x, 1e-14);
    EXPECT_NEAR(r.velocity.cells[c].y, want.y, 1e-14);
  }
  for (const Patch& p : f.mesh->patches())
    if (p.role == PatchRole::Inlet)
      for (int face : p.faces) {
        EXPECT_NEAR(r.velocity.cells.boundary_value(face).x, mu.mu_x(), 1e-10);
        EXPECT_NEAR(r.velocity.cells.boundary_value(face).y, mu.mu_y(), 1e-10);
      }
  s.b[0] = 1.0;
  const auto q = rom::reconstruct(f.basis, l, s);
  EXPECT_EQ(q.pressure.values(), f.basis.pressure.modes[0].values());
  s.b = linalg::DenseVector(5);
  EXPECT_THROW(rom::reconstruct(f.basis, l, s), ShapeError);
}

TEST(Reconstruct, ProjectionErrorBoundedByPodTruncation) {
  const auto& f = fixture();
  const auto h = pod::homogenize(f.u, f.basis.lifting);
  for (int n : {4, 10}) {
    const Layout l{n, 4, 4};
    for (std::size_t i = 0; i < f.u.size(); i += 5) {
      const auto s = rom::project_state(f.basis, l, f.u.snapshots[i], f.p.snapshots[i], f.u.parameters[i]);
      VectorField err = rom::reconstruct(f.basis, l, s).velocity.cells;
      err.axpy(-1.0, f.u.snapshots[i].cells);
      VectorField trunc = h.snapshots[i].cells;
      for (int k = 0; k < n; ++k) trunc.axpy(-l2(h.snapshots[i].cells, f.basis.velocity.modes[k].cells),
                                             f.basis.velocity.modes[k].cells);
      EXPECT_LE(l2(err, err), l2(trunc, trunc) * (1.0 + 1e-9) + 1e-20);
    }
  }
}

TEST(Lift, ZeroStateSymmetricAtZeroIncidence) {
  const auto& f = fixture();
  const Layout l{4, 2, 2};
  const auto o = f.ops.restrict(l);
  rom::ReducedState s;
  s.a = linalg::DenseVector(l.n_velocity());
  s.b = linalg::DenseVector(l.n_p);
  s.a[0] = 1.0;
  EXPECT_LE(std::abs(rom::rom_lift(f.basis, o, s, {0.0, 1.0}, 1.0)), 5e-3);
}

TEST(Lift, AntisymmetricInIncidence) {
  const auto& f = fixture();
  const auto o = f.ops.restrict({20, 4, 4});
  const auto sp = rom::solve_reduced(o, {4.0, 1.0});
  const auto sm = rom::solve_reduced(o, {-4.0, 1.0});
  const double cp = rom::rom_lift(f.basis, o, sp, {4.0, 1.0}, 1.0);
  const double cm = rom::rom_lift(f.basis, o, sm, {-4.0, 1.0}, 1.0);
  EXPECT_GT(std::abs(cp), 1e-2);
  // the basis is only approximately mirror symmetric, so allow a few percent
  EXPECT_NEAR(cp, -cm, 0.05 * std::abs(cp));
}

TEST(Galerkin, ProjectedResidualShrinksWithModeCount) {
  // on this 24-snapshot campaign the residual levels off beyond about ten modes
  const auto& f = fixture();
  std::vector<double> mean;
  for (int n : {2, 5, 10}) {
    const Layout l{n, 4, 4};
    const auto o = f.ops.restrict(l);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
      const auto s = rom::project_state(f.basis, l, f.u.snapshots[i], f.p.snapshots[i], f.u.parameters[i]);
      acc += rom::residual(o, s.a, s.b).norm2();
    }
    mean.push_back(acc / f.u.size());
  }
  EXPECT_LT(mean[1], mean[0]);
  EXPECT_LT(mean[2], mean[1]);
}

TEST(Galerkin, ReproductionWithFullBasisIsAccurate) {
  const auto& f = fixture();
  std::vector<double> rom_cl;
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    const auto s = rom::solve_reduced(f.ops, f.u.parameters[i]);
    ASSERT_TRUE(s.converged);
    rom_cl.push_back(rom::rom_lift(f.basis, f.ops, s, f.u.parameters[i], 1.0));
  }
  EXPECT_LE(test::percent_error(f.cl, rom_cl), 1.0);
}
