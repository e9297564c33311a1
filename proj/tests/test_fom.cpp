#include <gtest/gtest.h>

#include <cmath>

#include "romuq/error.hpp"
#include "romuq/fom.hpp"
#include "romuq/fvm.hpp"
#include "support.hpp"

using namespace romuq;
using namespace romuq::mesh;
using fom::ParameterPoint;

namespace {

MeshPtr plate() {
  static const MeshPtr m = build_mesh(test::plate_spec(24, 12));
  return m;
}

double max_divergence(const VelocityField& u) {
  return max_abs(cell_net_flux(*u.mesh(), u.flux));
}

const fom::FlowState& toy_solution() {
  static const fom::FlowState st = fom::solve_steady_ns(plate(), {5.0, 1.0}, 0.04);
  return st;
}

} // namespace

TEST(Lifting, EmptyChannelIsUniform) {
  MeshSpec s;
  s.x_max = 3.0;
  s.nx = 12;
  s.ny = 6;
  const MeshPtr m = build_mesh(s);
  const VelocityField u = fom::solve_potential_lifting(m, {1.0, 0.0});
  for (int c = 0; c < m->cell_count(); ++c) {
    EXPECT_NEAR(u.cells[c].x, 1.0, 1e-10);
    EXPECT_NEAR(u.cells[c].y, 0.0, 1e-10);
  }
}

TEST(Lifting, DivergenceFreeAndMassBalanced) {
  for (Vec2 d : {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}) {
    const VelocityField u = fom::solve_potential_lifting(plate(), d);
    EXPECT_LE(max_divergence(u), 1e-8);
    const auto mb = fom::mass_balance(*plate(), u.flux);
    EXPECT_NEAR(mb.inflow, mb.outflow, 1e-10 * std::max(1.0, mb.inflow));
    for (const Patch& p : plate()->patches())
      if (p.role == PatchRole::Inlet)
        for (int f : p.faces) EXPECT_EQ(u.cells.boundary_value(f), d);
  }
}

TEST(Lift, ClosedSurfaceGivesZero) {
  const MeshPtr m = plate();
  const VectorField u = VectorField::uniform(m, {0.0, 0.0}, velocity_bcs(*m, {0.0, 0.0}));
  const ScalarField p = ScalarField::uniform(m, 3.7, pressure_bcs(*m));
  EXPECT_NEAR(fom::compute_lift(u, p, 0.04, {7.0, 1.0}, 1.0), 0.0, 1e-14);
}

TEST(Lift, QuadraticSpeedNormalisation) {
  const auto& st = toy_solution();
  const double c1 = fom::compute_lift(st.velocity.cells, st.pressure, 0.04, {5.0, 1.0}, 1.0);
  const double c2 = fom::compute_lift(st.velocity.cells, st.pressure, 0.04, {5.0, 2.0}, 1.0);
  EXPECT_NEAR(c2, c1 / 4.0, 1e-14 * std::abs(c1));
}

TEST(Lift, NeedsObstacle) {
  const MeshPtr m = test::unit_square(4, 4);
  const VectorField u = VectorField::uniform(m, {1.0, 0.0}, velocity_bcs(*m, {1.0, 0.0}));
  const ScalarField p = ScalarField::uniform(m, 0.0, pressure_bcs(*m));
  EXPECT_THROW(fom::compute_lift(u, p, 0.1, {0.0, 1.0}, 1.0), ValidationError);
}

TEST(Simple, ConvergedStateContract) {
  const auto& st = toy_solution();
  ASSERT_TRUE(st.converged);
  EXPECT_LE(st.momentum_residual, 1e-6);
  EXPECT_LE(st.continuity_residual, 1e-6);
  const auto mb = fom::mass_balance(*plate(), st.velocity.flux);
  EXPECT_LE(std::abs(mb.inflow - mb.outflow), 1e-8 * mb.inflow);
  const ParameterPoint mu{5.0, 1.0};
  for (const Patch& p : plate()->patches()) {
    for (int f : p.faces) {
      if (p.role == PatchRole::Inlet) EXPECT_EQ(st.velocity.cells.boundary_value(f), mu.inflow());
      if (p.role == PatchRole::Outlet) EXPECT_EQ(st.pressure.boundary_value(f), 0.0);
      if (p.role == PatchRole::Obstacle || p.role == PatchRole::Wall)
        EXPECT_EQ(st.velocity.cells.boundary_value(f), (Vec2{0.0, 0.0}));
    }
  }
}

TEST(Simple, ExplicitResidualVanishesAtConvergence) {
  // the explicit operators are exactly what SIMPLE converges to
  const auto& st = toy_solution();
  const auto r = fvm::momentum_residual(st.velocity, st.pressure, 0.04);
  const auto c = fvm::convection(st.velocity.flux, st.velocity.cells);
  double nr = 0.0, nc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    nr += dot(r[i], r[i]);
    nc += dot(c[i], c[i]);
  }
  EXPECT_LE(std::sqrt(nr), 1e-4 * std::sqrt(nc));
}

TEST(Simple, Deterministic) {
  const auto a = fom::solve_steady_ns(plate(), {-3.0, 1.1}, 0.04);
  const auto b = fom::solve_steady_ns(plate(), {-3.0, 1.1}, 0.04);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.velocity.flux, b.velocity.flux);
  EXPECT_EQ(a.pressure.values(), b.pressure.values());
}

TEST(Simple, MirrorSymmetry) {
  const double c0 = fom::compute_lift(fom::solve_steady_ns(plate(), {0.0, 1.0}, 0.04), {0.0, 1.0}, 1.0);
  EXPECT_LE(std::abs(c0), 5e-3);
  const double cp = fom::compute_lift(fom::solve_steady_ns(plate(), {4.0, 1.0}, 0.04), {4.0, 1.0}, 1.0);
  const double cm = fom::compute_lift(fom::solve_steady_ns(plate(), {-4.0, 1.0}, 0.04), {-4.0, 1.0}, 1.0);
  EXPECT_NEAR(cp, -cm, 1e-3);
  EXPECT_GT(std::abs(cp), 10 * std::abs(c0));
}

TEST(Simple, UpwindVariantConverges) {
  fom::SimpleSettings s;
  s.convection = fvm::Scheme::Upwind;
  const auto st = fom::solve_steady_ns(plate(), {5.0, 1.0}, 0.04, s);
  ASSERT_TRUE(st.converged);
  const auto r = fvm::momentum_residual(st.velocity, st.pressure, 0.04, fvm::Scheme::Upwind);
  double nr = 0.0;
  for (const Vec2& v : r) nr += dot(v, v);
  EXPECT_LE(std::sqrt(nr), 1e-4);
}

TEST(Simple, NonConvergenceIsFlagged) {
  fom::SimpleSettings s;
  s.max_iterations = 3;
  const auto st = fom::solve_steady_ns(plate(), {5.0, 1.0}, 0.04, s);
  EXPECT_FALSE(st.converged);
  EXPECT_EQ(st.iterations, 3);
  EXPECT_EQ(st.history.size(), 3u);
}

TEST(Simple, DivergenceThrowsWithTrace) {
  fom::SimpleSettings s;
  s.divergence_limit = 1e-12;
  try {
    fom::solve_steady_ns(plate(), {5.0, 1.0}, 0.04, s);
    FAIL() << "expected SolverDivergenceError";
  } catch (const SolverDivergenceError& e) {
    EXPECT_FALSE(e.trace().empty());
  }
}

TEST(Simple, RejectsBadInput) {
  EXPECT_THROW(fom::solve_steady_ns(plate(), {0.0, 1.0}, 0.0), ValidationError);
  EXPECT_THROW(fom::solve_steady_ns(plate(), {0.0, -1.0}, 0.04), ValidationError);
}

TEST(Simple, ShortChannelTendsToParabola) {
  MeshSpec s;
  s.x_max = 6.0;
  s.nx = 48;
  s.ny = 16;
  const MeshPtr m = build_mesh(s);
  const auto st = fom::solve_steady_ns(m, {0.0, 1.0}, 1.0 / 30.0);
  ASSERT_TRUE(st.converged);
  double dev = 0.0;
  for (int j = 0; j < s.ny; ++j) {
    const int c = m->cell_at(s.nx - 2, j);
    const double y = m->center(c).y;
    dev = std::max(dev, std::abs(st.velocity.cells[c].x - 6.0 * y * (1.0 - y)));
  }
  EXPECT_LE(dev / 1.5, 0.02);
}

TEST(Fvm, CentralConvectionIsBilinear) {
  test::Rng rng(4);
  const MeshPtr m = plate();
  const VelocityField a = test::random_velocity(rng, m), b = test::random_velocity(rng, m);
  const VectorField u = test::random_vector(rng, m);
  std::vector<double> sum(a.flux);
  for (std::size_t f = 0; f < sum.size(); ++f) sum[f] += 2.0 * b.flux[f];
  const auto lhs = fvm::convection(sum, u);
  const auto ca = fvm::convection(a.flux, u), cb = fvm::convection(b.flux, u);
  for (int c = 0; c < m->cell_count(); ++c) {
    EXPECT_NEAR(lhs[c].x, ca[c].x + 2.0 * cb[c].x, 1e-12);
    EXPECT_NEAR(lhs[c].y, ca[c].y + 2.0 * cb[c].y, 1e-12);
  }
}

TEST(Fvm, ZeroFluxConvectsNothing) {
  test::Rng rng(6);
  const MeshPtr m = plate();
  const std::vector<double> zero(m->face_count(), 0.0);
  for (auto s : {fvm::Scheme::Central, fvm::Scheme::Upwind})
    for (const Vec2& v : fvm::convection(zero, test::random_vector(rng, m), s)) EXPECT_EQ(v, (Vec2{0.0, 0.0}));
}

TEST(Fvm, LaplacianNegativeSemidefinite) {
  test::Rng rng(12);
  const MeshPtr m = plate();
  for (int trial = 0; trial < 10; ++trial) {
    const VectorField u = test::random_vector(rng, m);  // homogeneous Dirichlet/zero-gradient table
    EXPECT_LE(fvm::pair(u, fvm::laplacian(u)), 0.0);
  }
}
