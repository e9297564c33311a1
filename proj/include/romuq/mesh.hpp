#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace romuq::mesh {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double dot(double a, double b) { return a * b; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

enum class PatchRole { Inlet, Outlet, Wall, Obstacle };

std::string_view to_string(PatchRole role);
PatchRole parse_patch_role(std::string_view text);

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Channel box, uniform cell counts, optional blocked rectangle and the role
/// of each of the four domain sides.
struct MeshSpec {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int nx = 2, ny = 2;
  std::optional<Rect> obstacle;
  PatchRole left = PatchRole::Inlet;
  PatchRole right = PatchRole::Outlet;
  PatchRole bottom = PatchRole::Wall;
  PatchRole top = PatchRole::Wall;
};

struct Face {
  int owner = -1;
  int neighbour = -1;  // -1 on boundary faces
  double area = 0.0;   // per unit depth
  Vec2 normal;         // unit, pointing out of the owner
  Vec2 center;
  double distance = 0.0;  // owner-neighbour centre distance, or owner-face for boundary faces
  int patch = -1;         // -1 on interior faces

  bool boundary() const noexcept { return neighbour < 0; }
};

struct Patch {
  std::string name;
  PatchRole role;
  std::vector<int> faces;
};

/// Uniform Cartesian finite-volume mesh. Blocked (solid) cells carry no
/// unknowns; fluid cells are numbered row by row (i fastest). Interior faces
/// come first, then boundary faces grouped by patch.
class StructuredMesh {
public:
  static std::shared_ptr<const StructuredMesh> build(const MeshSpec& spec);

  const MeshSpec& spec() const noexcept { return spec_; }
  int nx() const noexcept { return spec_.nx; }
  int ny() const noexcept { return spec_.ny; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }

  int cell_count() const noexcept { return static_cast<int>(centers_.size()); }
  int face_count() const noexcept { return static_cast<int>(faces_.size()); }
  int interior_face_count() const noexcept { return interior_faces_; }

  Vec2 center(int cell) const { return centers_[cell]; }
  double volume(int cell) const { return volumes_[cell]; }
  const std::vector<double>& volumes() const noexcept { return volumes_; }
  double total_volume() const noexcept;

  /// Fluid cell index for grid position (i, j), or -1 for blocked cells.
  int cell_at(int i, int j) const { return grid_to_cell_[j * spec_.nx + i]; }
  int grid_i(int cell) const { return cell_ij_[cell].first; }
  int grid_j(int cell) const { return cell_ij_[cell].second; }
  /// False outside the grid.
  bool blocked(int i, int j) const {
    return i >= 0 && j >= 0 && i < spec_.nx && j < spec_.ny && cell_at(i, j) < 0;
  }

  const std::vector<Face>& faces() const noexcept { return faces_; }
  const Face& face(int f) const { return faces_[f]; }
  const std::vector<int>& cell_faces(int cell) const { return cell_faces_[cell]; }

  const std::vector<Patch>& patches() const noexcept { return patches_; }
  int patch_count() const noexcept { return static_cast<int>(patches_.size()); }
  int find_patch(std::string_view name) const;  // -1 when absent
  PatchRole patch_role(int patch) const { return patches_[patch].role; }

  /// Per-cell sum of area * outward normal; zero for a closed cell.
  Vec2 closure_defect(int cell) const;

private:
  StructuredMesh() = default;

  MeshSpec spec_;
  double dx_ = 0.0, dy_ = 0.0;
  std::vector<Vec2> centers_;
  std::vector<double> volumes_;
  std::vector<int> grid_to_cell_;
  std::vector<std::pair<int, int>> cell_ij_;
  std::vector<Face> faces_;
  int interior_faces_ = 0;
  std::vector<std::vector<int>> cell_faces_;
  std::vector<Patch> patches_;
};

using MeshPtr = std::shared_ptr<const StructuredMesh>;

/// Validates the spec and builds the mesh. Throws ValidationError for bad
/// extents/counts and GeometryError when the obstacle touches the boundary or
/// does not cover any cell.
MeshPtr build_mesh(const MeshSpec& spec);

} // namespace romuq::mesh
