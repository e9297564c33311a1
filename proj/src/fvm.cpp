#include "romuq/fvm.hpp"

namespace romuq::fvm {

using mesh::Face;
using mesh::StructuredMesh;

std::vector<Vec2> laplacian(const VectorField& u) {
  const StructuredMesh& m = *u.mesh();
  std::vector<Vec2> out(m.cell_count());
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    const double coeff = face.area / face.distance;
    if (face.boundary()) {
      out[face.owner] += coeff * (u.boundary_value(f) - u[face.owner]);
    } else {
      const Vec2 d = coeff * (u[face.neighbour] - u[face.owner]);
      out[face.owner] += d;
      out[face.neighbour] -= d;
    }
  }
  return out;
}

std::vector<Vec2> convection(std::span<const double> flux, const VectorField& u, Scheme scheme) {
  const StructuredMesh& m = *u.mesh();
  std::vector<Vec2> out(m.cell_count());
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    const double F = flux[f];
    if (face.boundary()) {
      out[face.owner] += F * u.boundary_value(f);
    } else {
      const Vec2 uf = scheme == Scheme::Central ? 0.5 * (u[face.owner] + u[face.neighbour])
                      : F >= 0.0                ? u[face.owner]
                                                : u[face.neighbour];
      const Vec2 t = F * uf;
      out[face.owner] += t;
      out[face.neighbour] -= t;
    }
  }
  return out;
}

std::vector<Vec2> gradient(const ScalarField& p) {
  const StructuredMesh& m = *p.mesh();
  std::vector<Vec2> out(m.cell_count());
  for (int f = 0; f < m.face_count(); ++f) {
    const Face& face = m.face(f);
    if (face.boundary()) {
      out[face.owner] += (p.boundary_value(f) * face.area) * face.normal;
    } else {
      const Vec2 g = (0.5 * (p[face.owner] + p[face.neighbour]) * face.area) * face.normal;
      out[face.owner] += g;
      out[face.neighbour] -= g;
    }
  }
  return out;
}

std::vector<Vec2> momentum_residual(const VelocityField& u, const ScalarField& p, double nu, Scheme scheme) {
  std::vector<Vec2> r = convection(u.flux, u.cells, scheme);
  const std::vector<Vec2> lap = laplacian(u.cells);
  const std::vector<Vec2> grad = gradient(p);
  for (std::size_t c = 0; c < r.size(); ++c) r[c] += grad[c] - nu * lap[c];
  return r;
}

double pair(const VectorField& test, std::span<const Vec2> integrated) {
  double s = 0.0;
  for (int c = 0; c < test.size(); ++c) s += mesh::dot(test[c], integrated[c]);
  return s;
}

double pair(const ScalarField& test, std::span<const double> integrated) {
  double s = 0.0;
  for (int c = 0; c < test.size(); ++c) s += test[c] * integrated[c];
  return s;
}

} // namespace romuq::fvm
