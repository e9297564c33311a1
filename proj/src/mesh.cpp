#include "romuq/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "romuq/error.hpp"

namespace romuq::mesh {

std::string_view to_string(PatchRole role) {
  switch (role) {
    case PatchRole::Inlet: return "inlet";
    case PatchRole::Outlet: return "outlet";
    case PatchRole::Wall: return "wall";
    case PatchRole::Obstacle: return "obstacle";
  }
  return "unknown";
}

PatchRole parse_patch_role(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "inlet") return PatchRole::Inlet;
  if (s == "outlet") return PatchRole::Outlet;
  if (s == "wall") return PatchRole::Wall;
  if (s == "obstacle") return PatchRole::Obstacle;
  throw ValidationError("unknown patch role '" + s + "'");
}

std::shared_ptr<const StructuredMesh> StructuredMesh::build(const MeshSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2) throw ValidationError("mesh: nx and ny must be >= 2");
  if (!(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min))
    throw ValidationError("mesh: domain extents must be positive");
  for (PatchRole r : {spec.left, spec.right, spec.bottom, spec.top})
    if (r == PatchRole::Obstacle) throw ValidationError("mesh: domain sides cannot take the obstacle role");

  std::shared_ptr<StructuredMesh> m(new StructuredMesh());
  m->spec_ = spec;
  const int nx = spec.nx, ny = spec.ny;
  m->dx_ = (spec.x_max - spec.x_min) / nx;
  m->dy_ = (spec.y_max - spec.y_min) / ny;
  const double dx = m->dx_, dy = m->dy_;

  auto cx = [&](int i) { return spec.x_min + (i + 0.5) * dx; };
  auto cy = [&](int j) { return spec.y_min + (j + 0.5) * dy; };

  std::vector<char> solid(static_cast<std::size_t>(nx) * ny, 0);
  if (spec.obstacle) {
    const Rect& r = *spec.obstacle;
    if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw ValidationError("mesh: obstacle rectangle has non-positive extent");
    if (!(r.x0 > spec.x_min && r.x1 < spec.x_max && r.y0 > spec.y_min && r.y1 < spec.y_max))
      throw GeometryError("mesh: obstacle touches or crosses the domain boundary");
    int blocked = 0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (cx(i) > r.x0 && cx(i) < r.x1 && cy(j) > r.y0 && cy(j) < r.y1) {
          if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1)
            throw GeometryError("mesh: obstacle covers a boundary cell");
          solid[j * nx + i] = 1;
          ++blocked;
        }
    if (blocked == 0) throw GeometryError("mesh: obstacle does not cover any cell centre");
  }

  m->grid_to_cell_.assign(static_cast<std::size_t>(nx) * ny, -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (solid[j * nx + i]) continue;
      m->grid_to_cell_[j * nx + i] = static_cast<int>(m->centers_.size());
      m->centers_.push_back({cx(i), cy(j)});
      m->volumes_.push_back(dx * dy);
      m->cell_ij_.emplace_back(i, j);
    }
  const int ncells = static_cast<int>(m->centers_.size());
  m->cell_faces_.resize(ncells);

  auto add_face = [&](Face f) {
    const int id = static_cast<int>(m->faces_.size());
    m->cell_faces_[f.owner].push_back(id);
    if (f.neighbour >= 0) m->cell_faces_[f.neighbour].push_back(id);
    m->faces_.push_back(f);
    return id;
  };

  // interior x-normal faces, then y-normal faces
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = m->cell_at(i, j), b = m->cell_at(i + 1, j);
      if (a < 0 || b < 0) continue;
      add_face({a, b, dy, {1.0, 0.0}, {spec.x_min + (i + 1) * dx, cy(j)}, dx, -1});
    }
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = m->cell_at(i, j), b = m->cell_at(i, j + 1);
      if (a < 0 || b < 0) continue;
      add_face({a, b, dx, {0.0, 1.0}, {cx(i), spec.y_min + (j + 1) * dy}, dy, -1});
    }
  m->interior_faces_ = static_cast<int>(m->faces_.size());

  auto new_patch = [&](std::string name, PatchRole role) {
    m->patches_.push_back({std::move(name), role, {}});
    return static_cast<int>(m->patches_.size()) - 1;
  };

  const int left = new_patch("left", spec.left);
  for (int j = 0; j < ny; ++j)
    m->patches_[left].faces.push_back(
        add_face({m->cell_at(0, j), -1, dy, {-1.0, 0.0}, {spec.x_min, cy(j)}, 0.5 * dx, left}));
  const int right = new_patch("right", spec.right);
  for (int j = 0; j < ny; ++j)
    m->patches_[right].faces.push_back(
        add_face({m->cell_at(nx - 1, j), -1, dy, {1.0, 0.0}, {spec.x_max, cy(j)}, 0.5 * dx, right}));
  const int bottom = new_patch("bottom", spec.bottom);
  for (int i = 0; i < nx; ++i)
    m->patches_[bottom].faces.push_back(
        add_face({m->cell_at(i, 0), -1, dx, {0.0, -1.0}, {cx(i), spec.y_min}, 0.5 * dy, bottom}));
  const int top = new_patch("top", spec.top);
  for (int i = 0; i < nx; ++i)
    m->patches_[top].faces.push_back(
        add_face({m->cell_at(i, ny - 1), -1, dx, {0.0, 1.0}, {cx(i), spec.y_max}, 0.5 * dy, top}));

  if (spec.obstacle) {
    const int obs = new_patch("obstacle", PatchRole::Obstacle);
    for (int c = 0; c < ncells; ++c) {
      const auto [i, j] = m->cell_ij_[c];
      const Vec2 xc = m->centers_[c];
      if (m->blocked(i - 1, j))
        m->patches_[obs].faces.push_back(add_face({c, -1, dy, {-1.0, 0.0}, {xc.x - 0.5 * dx, xc.y}, 0.5 * dx, obs}));
      if (m->blocked(i + 1, j))
        m->patches_[obs].faces.push_back(add_face({c, -1, dy, {1.0, 0.0}, {xc.x + 0.5 * dx, xc.y}, 0.5 * dx, obs}));
      if (m->blocked(i, j - 1))
        m->patches_[obs].faces.push_back(add_face({c, -1, dx, {0.0, -1.0}, {xc.x, xc.y - 0.5 * dy}, 0.5 * dy, obs}));
      if (m->blocked(i, j + 1))
        m->patches_[obs].faces.push_back(add_face({c, -1, dx, {0.0, 1.0}, {xc.x, xc.y + 0.5 * dy}, 0.5 * dy, obs}));
    }
  }
  return m;
}

double StructuredMesh::total_volume() const noexcept {
  double v = 0.0;
  for (double x : volumes_) v += x;
  return v;
}

int StructuredMesh::find_patch(std::string_view name) const {
  for (std::size_t p = 0; p < patches_.size(); ++p)
    if (patches_[p].name == name) return static_cast<int>(p);
  return -1;
}

Vec2 StructuredMesh::closure_defect(int cell) const {
  Vec2 s;
  for (int f : cell_faces_[cell]) {
    const Face& face = faces_[f];
    const double sign = face.owner == cell ? 1.0 : -1.0;
    s += (sign * face.area) * face.normal;
  }
  return s;
}

MeshPtr build_mesh(const MeshSpec& spec) { return StructuredMesh::build(spec); }

} // namespace romuq::mesh
