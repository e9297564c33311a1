#include "romuq/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace romuq::mesh {

VelocityField::VelocityField(VectorField c, std::vector<double> f) : cells(std::move(c)), flux(std::move(f)) {
  if (static_cast<int>(flux.size()) != cells.mesh()->face_count())
    throw ShapeError("VelocityField: flux count != face count");
}

VelocityField::VelocityField(VectorField c) : cells(std::move(c)) { flux = interpolated_flux(cells); }

VelocityField& VelocityField::axpy(double a, const VelocityField& other) {
  cells.axpy(a, other.cells);
  for (std::size_t f = 0; f < flux.size(); ++f) flux[f] += a * other.flux[f];
  return *this;
}

VelocityField& VelocityField::scale(double a) {
  cells.scale(a);
  for (double& f : flux) f *= a;
  return *this;
}

std::vector<double> interpolated_flux(const VectorField& u) {
  const StructuredMesh& m = *u.mesh();
  std::vector<double> flux(m.face_count());
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    const Vec2 uf = face.boundary() ? u.boundary_value(f) : 0.5 * (u[face.owner] + u[face.neighbour]);
    flux[f] = face.area * dot(uf, face.normal);
  }
  return flux;
}

std::vector<double> cell_net_flux(const StructuredMesh& mesh, std::span<const double> flux) {
  std::vector<double> div(mesh.cell_count(), 0.0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Face& face = mesh.face(f);
    div[face.owner] += flux[f];
    if (!face.boundary()) div[face.neighbour] -= flux[f];
  }
  return div;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

template <class T>
double weighted_dot(const CellField<T>& f, const CellField<T>& g) {
  if (f.mesh() != g.mesh()) throw MeshMismatchError("inner_product: fields live on different meshes");
  const auto& vol = f.mesh()->volumes();
  double s = 0.0;
  for (int c = 0; c < f.size(); ++c) s += vol[c] * dot(f[c], g[c]);
  return s;
}

} // namespace

double inner_product(const ScalarField& f, const ScalarField& g) { return weighted_dot(f, g); }
double inner_product(const VectorField& f, const VectorField& g) { return weighted_dot(f, g); }
double inner_product(const VelocityField& f, const VelocityField& g) { return weighted_dot(f.cells, g.cells); }

std::vector<BoundaryCondition<Vec2>> velocity_bcs(const StructuredMesh& mesh, Vec2 inlet) {
  using BC = BoundaryCondition<Vec2>;
  std::vector<BC> bcs;
  for (const Patch& p : mesh.patches()) {
    switch (p.role) {
      case PatchRole::Inlet: bcs.push_back(BC::fixed_value(inlet)); break;
      case PatchRole::Outlet: bcs.push_back(BC::zero_gradient()); break;
      case PatchRole::Wall:
      case PatchRole::Obstacle: bcs.push_back(BC::fixed_value({})); break;
    }
  }
  return bcs;
}

std::vector<BoundaryCondition<double>> pressure_bcs(const StructuredMesh& mesh) {
  using BC = BoundaryCondition<double>;
  std::vector<BC> bcs;
  for (const Patch& p : mesh.patches())
    bcs.push_back(p.role == PatchRole::Outlet ? BC::fixed_value(0.0) : BC::zero_gradient());
  return bcs;
}

void write_csv(std::ostream& os, const ScalarField& f, const std::string& name) {
  const StructuredMesh& m = *f.mesh();
  fmt::print(os, "cell,x,y,{}\n", name);
  for (int c = 0; c < f.size(); ++c) {
    const Vec2 x = m.center(c);
    fmt::print(os, "{},{:.17g},{:.17g},{:.17g}\n", c, x.x, x.y, f[c]);
  }
}

void write_csv(std::ostream& os, const VectorField& f, const std::string& name) {
  const StructuredMesh& m = *f.mesh();
  fmt::print(os, "cell,x,y,{0}_x,{0}_y\n", name);
  for (int c = 0; c < f.size(); ++c) {
    const Vec2 x = m.center(c);
    fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g}\n", c, x.x, x.y, f[c].x, f[c].y);
  }
}

} // namespace romuq::mesh
