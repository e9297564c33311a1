#include "romuq/fom.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "romuq/error.hpp"
#include "romuq/fvm.hpp"

namespace romuq::fom {

using mesh::BoundaryCondition;
using mesh::Face;
using mesh::PatchRole;
using mesh::StructuredMesh;

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

bool has_outlet(const StructuredMesh& m) {
  for (const auto& p : m.patches())
    if (p.role == PatchRole::Outlet && !p.faces.empty()) return true;
  return false;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm2(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (const Vec2& x : v) s += mesh::dot(x, x);
  return std::sqrt(s);
}

// Gauss gradient of a correction field: zero on the outlet, zero-gradient
// elsewhere. Per unit volume.
std::vector<Vec2> correction_gradient(const StructuredMesh& m, const Eigen::VectorXd& pc) {
  std::vector<Vec2> g(m.cell_count());
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    if (face.boundary()) {
      const bool outlet = m.patch_role(face.patch) == PatchRole::Outlet;
      const double pb = outlet ? 0.0 : pc[face.owner];
      g[face.owner] += (pb * face.area) * face.normal;
    } else {
      const Vec2 t = (0.5 * (pc[face.owner] + pc[face.neighbour]) * face.area) * face.normal;
      g[face.owner] += t;
      g[face.neighbour] -= t;
    }
  }
  for (int c = 0; c < m.cell_count(); ++c) g[c] *= 1.0 / m.volume(c);
  return g;
}

} // namespace

double ParameterPoint::mu_x() const { return speed * std::cos(deg2rad(alpha_deg)); }
double ParameterPoint::mu_y() const { return speed * std::sin(deg2rad(alpha_deg)); }

Vec2 ParameterPoint::lift_direction() const {
  const double a = deg2rad(alpha_deg);
  return {-std::sin(a), std::cos(a)};
}

void validate(const ParameterPoint& mu) {
  if (!(mu.speed > 0.0) || !std::isfinite(mu.speed)) throw ValidationError("parameter point: speed must be > 0");
  if (!std::isfinite(mu.alpha_deg)) throw ValidationError("parameter point: angle must be finite");
}

MassBalance mass_balance(const StructuredMesh& m, std::span<const double> flux) {
  MassBalance mb;
  for (const auto& p : m.patches()) {
    for (int f : p.faces) {
      if (p.role == PatchRole::Inlet) mb.inflow -= flux[f];
      if (p.role == PatchRole::Outlet) mb.outflow += flux[f];
    }
  }
  return mb;
}

VelocityField solve_potential_lifting(const MeshPtr& mesh_ptr, Vec2 direction) {
  const StructuredMesh& m = *mesh_ptr;
  if (!has_outlet(m)) throw ValidationError("potential lifting: mesh has no outlet patch to pin the potential");
  const int n = m.cell_count();

  std::vector<Triplet> trip;
  trip.reserve(5 * n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<double> flux(m.face_count(), 0.0);

  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    const double k = face.area / face.distance;
    if (!face.boundary()) {
      trip.emplace_back(face.owner, face.owner, k);
      trip.emplace_back(face.neighbour, face.neighbour, k);
      trip.emplace_back(face.owner, face.neighbour, -k);
      trip.emplace_back(face.neighbour, face.owner, -k);
      continue;
    }
    switch (m.patch_role(face.patch)) {
      case PatchRole::Inlet:
        flux[f] = face.area * mesh::dot(direction, face.normal);
        rhs[face.owner] += flux[f];
        break;
      case PatchRole::Outlet: trip.emplace_back(face.owner, face.owner, k); break;
      case PatchRole::Wall:
      case PatchRole::Obstacle: break;
    }
  }
  SpMat k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> solver(k);
  if (solver.info() != Eigen::Success) throw Error("potential lifting: Laplace factorisation failed");
  const Eigen::VectorXd phi = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !phi.allFinite()) throw Error("potential lifting: Laplace solve failed");

  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    const double k = face.area / face.distance;
    if (!face.boundary())
      flux[f] = k * (phi[face.neighbour] - phi[face.owner]);
    else if (m.patch_role(face.patch) == PatchRole::Outlet)
      flux[f] = -k * phi[face.owner];
  }

  std::vector<Vec2> cells(n);
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    cells[face.owner] += flux[f] * (face.center - m.center(face.owner));
    if (!face.boundary()) cells[face.neighbour] += -flux[f] * (face.center - m.center(face.neighbour));
  }
  for (int c = 0; c < n; ++c) cells[c] *= 1.0 / m.volume(c);

  return VelocityField(VectorField(mesh_ptr, std::move(cells), mesh::velocity_bcs(m, direction)), std::move(flux));
}

FlowState solve_steady_ns(const MeshPtr& mesh_ptr, const ParameterPoint& mu, double nu,
                          const SimpleSettings& settings, const VelocityField* initial) {
  validate(mu);
  if (!(nu > 0.0)) throw ValidationError("solve_steady_ns: viscosity must be > 0");
  const StructuredMesh& m = *mesh_ptr;
  if (!has_outlet(m)) throw ValidationError("solve_steady_ns: mesh has no outlet patch");
  const int n = m.cell_count();
  const int nf = m.face_count();
  const double ru = settings.relax_velocity;
  const double rp = settings.relax_pressure;

  const Vec2 inflow = mu.inflow();
  VelocityField u = initial ? *initial : solve_potential_lifting(mesh_ptr, inflow);
  if (u.mesh() != mesh_ptr) throw MeshMismatchError("solve_steady_ns: initial field is on another mesh");
  u.cells = VectorField(mesh_ptr, u.cells.values(), mesh::velocity_bcs(m, inflow));
  for (const auto& patch : m.patches()) {
    if (patch.role == PatchRole::Outlet) continue;
    for (int f : patch.faces) u.flux[f] = m.face(f).area * mesh::dot(u.cells.boundary_value(f), m.face(f).normal);
  }
  ScalarField p = ScalarField::uniform(mesh_ptr, 0.0, mesh::pressure_bcs(m));

  const double q_in = std::max(mass_balance(m, u.flux).inflow, 1e-300);

  std::vector<char> is_outlet(nf, 0);
  for (int f = m.interior_face_count(); f < nf; ++f)
    is_outlet[f] = m.patch_role(m.face(f).patch) == PatchRole::Outlet;

  std::vector<Triplet> trip;
  trip.reserve(5 * n);
  std::vector<double> diag(n), diag_relaxed(n), dcoef(n);
  Eigen::VectorXd bx(n), by(n), ux(n), uy(n), rhs_p(n);
  Eigen::SparseLU<SpMat> momentum_solver;
  Eigen::SimplicialLDLT<SpMat> pressure_solver;
  bool patterns_ready = false;

  FlowState state;
  state.nu = nu;
  std::vector<double> trace;

  for (int it = 1; it <= settings.max_iterations; ++it) {
    // residual of the current iterate, before anything moves
    const std::vector<Vec2> res = fvm::momentum_residual(u, p, nu, settings.convection);
    const bool central = settings.convection == fvm::Scheme::Central;

    // momentum matrix: upwind convection with the conservative fluxes,
    // central diffusion; pressure gradient and the central-minus-upwind
    // correction explicit
    trip.clear();
    std::fill(diag.begin(), diag.end(), 0.0);
    bx.setZero();
    by.setZero();
    for (int f = 0; f < nf; ++f) {
      const Face& face = m.face(f);
      const double F = u.flux[f];
      if (!face.boundary()) {
        const double d = nu * face.area / face.distance;
        const int P = face.owner, N = face.neighbour;
        diag[P] += d + std::max(F, 0.0);
        diag[N] += d + std::max(-F, 0.0);
        trip.emplace_back(P, N, -d + std::min(F, 0.0));
        trip.emplace_back(N, P, -d + std::min(-F, 0.0));
        if (central) {
          const Vec2 up = F >= 0.0 ? u.cells[P] : u.cells[N];
          const Vec2 corr = F * (0.5 * (u.cells[P] + u.cells[N]) - up);
          bx[P] -= corr.x;
          by[P] -= corr.y;
          bx[N] += corr.x;
          by[N] += corr.y;
        }
        continue;
      }
      const int P = face.owner;
      if (is_outlet[f]) {
        diag[P] += std::max(F, 0.0);
        const Vec2 deferred = std::min(F, 0.0) * u.cells[P];
        bx[P] -= deferred.x;
        by[P] -= deferred.y;
      } else {
        const double d = nu * face.area / face.distance;
        const Vec2 ub = u.cells.boundary_value(f);
        diag[P] += d;
        bx[P] += d * ub.x - F * ub.x;
        by[P] += d * ub.y - F * ub.y;
      }
    }
    const std::vector<Vec2> gradp = fvm::gradient(p);
    for (int c = 0; c < n; ++c) {
      bx[c] -= gradp[c].x;
      by[c] -= gradp[c].y;
      diag_relaxed[c] = diag[c] / ru;
      bx[c] += (1.0 - ru) * diag_relaxed[c] * u.cells[c].x;
      by[c] += (1.0 - ru) * diag_relaxed[c] * u.cells[c].y;
      trip.emplace_back(c, c, diag_relaxed[c]);
      dcoef[c] = m.volume(c) / diag_relaxed[c];
    }

    double ref = 0.0;
    for (int c = 0; c < n; ++c) ref += diag[c] * diag[c] * mesh::dot(u.cells[c], u.cells[c]);
    const double mom_res = norm2(res) / std::max(std::sqrt(ref), 1e-300);

    SpMat a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    if (!patterns_ready) momentum_solver.analyzePattern(a);
    momentum_solver.factorize(a);
    if (momentum_solver.info() != Eigen::Success) throw SolverDivergenceError("SIMPLE: momentum matrix singular", trace);
    ux = momentum_solver.solve(bx);
    uy = momentum_solver.solve(by);

    std::vector<Vec2> ustar(n);
    for (int c = 0; c < n; ++c) ustar[c] = {ux[c], uy[c]};

    // Rhie-Chow predicted fluxes
    std::vector<Vec2> gp(n);
    for (int c = 0; c < n; ++c) gp[c] = (1.0 / m.volume(c)) * gradp[c];
    std::vector<double> fstar(nf, 0.0);
    for (int f = 0; f < nf; ++f) {
      const Face& face = m.face(f);
      const int P = face.owner;
      if (!face.boundary()) {
        const int N = face.neighbour;
        const double df = 0.5 * (dcoef[P] + dcoef[N]);
        const Vec2 ubar = 0.5 * (ustar[P] + ustar[N]);
        const double gface = (p[N] - p[P]) / face.distance;
        const double gavg = mesh::dot(0.5 * (gp[P] + gp[N]), face.normal);
        fstar[f] = face.area * (mesh::dot(ubar, face.normal) - df * (gface - gavg));
      } else if (is_outlet[f]) {
        const double gface = (0.0 - p[P]) / face.distance;
        fstar[f] = face.area * (mesh::dot(ustar[P], face.normal) - dcoef[P] * (gface - mesh::dot(gp[P], face.normal)));
      } else {
        fstar[f] = u.flux[f];
      }
    }
    const std::vector<double> div = mesh::cell_net_flux(m, fstar);
    const double cont_res = norm2(div) / q_in;

    // pressure correction
    trip.clear();
    for (int f = 0; f < nf; ++f) {
      const Face& face = m.face(f);
      if (!face.boundary()) {
        const double k = face.area * 0.5 * (dcoef[face.owner] + dcoef[face.neighbour]) / face.distance;
        trip.emplace_back(face.owner, face.owner, k);
        trip.emplace_back(face.neighbour, face.neighbour, k);
        trip.emplace_back(face.owner, face.neighbour, -k);
        trip.emplace_back(face.neighbour, face.owner, -k);
      } else if (is_outlet[f]) {
        trip.emplace_back(face.owner, face.owner, face.area * dcoef[face.owner] / face.distance);
      }
    }
    for (int c = 0; c < n; ++c) rhs_p[c] = -div[c];
    SpMat mp(n, n);
    mp.setFromTriplets(trip.begin(), trip.end());
    if (!patterns_ready) pressure_solver.analyzePattern(mp);
    pressure_solver.factorize(mp);
    if (pressure_solver.info() != Eigen::Success) throw SolverDivergenceError("SIMPLE: pressure matrix singular", trace);
    const Eigen::VectorXd pc = pressure_solver.solve(rhs_p);
    patterns_ready = true;

    for (int f = 0; f < nf; ++f) {
      const Face& face = m.face(f);
      if (!face.boundary()) {
        const double df = 0.5 * (dcoef[face.owner] + dcoef[face.neighbour]);
        fstar[f] -= face.area * df * (pc[face.neighbour] - pc[face.owner]) / face.distance;
      } else if (is_outlet[f]) {
        fstar[f] -= face.area * dcoef[face.owner] * (0.0 - pc[face.owner]) / face.distance;
      }
    }
    const std::vector<Vec2> gpc = correction_gradient(m, pc);
    for (int c = 0; c < n; ++c) {
      p[c] += rp * pc[c];
      u.cells[c] = ustar[c] - dcoef[c] * gpc[c];
    }
    u.flux = std::move(fstar);

    trace.push_back(std::max(mom_res, cont_res));
    if (settings.history_stride > 0 && (it % settings.history_stride == 0 || it == 1))
      state.history.push_back({it, mom_res, cont_res});
    state.iterations = it;
    state.momentum_residual = mom_res;
    state.continuity_residual = cont_res;

    if (!std::isfinite(mom_res) || !std::isfinite(cont_res) || mom_res > settings.divergence_limit ||
        cont_res > settings.divergence_limit)
      throw SolverDivergenceError("SIMPLE diverged at iteration " + std::to_string(it), trace);
    if (mom_res <= settings.tolerance && cont_res <= settings.tolerance) {
      state.converged = true;
      break;
    }
  }

  state.velocity = std::move(u);
  state.pressure = std::move(p);
  return state;
}

double compute_lift(const VectorField& velocity, const ScalarField& pressure, double nu, const ParameterPoint& mu,
                    double chord) {
  const StructuredMesh& m = *velocity.mesh();
  if (pressure.mesh() != velocity.mesh()) throw MeshMismatchError("compute_lift: fields on different meshes");
  if (!(chord > 0.0)) throw ValidationError("compute_lift: chord must be > 0");
  validate(mu);
  const int obs = m.find_patch("obstacle");
  if (obs < 0 || m.patches()[obs].faces.empty()) throw ValidationError("compute_lift: mesh has no obstacle patch");

  Vec2 force;
  for (int f : m.patches()[obs].faces) {
    const Face& face = m.face(f);
    const Vec2 traction = (nu / face.distance) * (velocity[face.owner] - velocity.boundary_value(f));
    force += face.area * (pressure.boundary_value(f) * face.normal + traction);
  }
  const double f_perp = mesh::dot(force, mu.lift_direction());
  return 2.0 * f_perp / (mu.speed * mu.speed * chord);
}

double compute_lift(const FlowState& state, const ParameterPoint& mu, double chord) {
  return compute_lift(state.velocity.cells, state.pressure, state.nu, mu, chord);
}

} // namespace romuq::fom
