#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "romuq/error.hpp"
#include "romuq/mesh.hpp"

namespace romuq::mesh {

template <class T>
struct BoundaryCondition {
  enum class Kind { FixedValue, ZeroGradient, FixedGradient };

  Kind kind = Kind::ZeroGradient;
  T value{};  // fixed value, or the normal gradient for FixedGradient

  static BoundaryCondition fixed_value(T v) { return {Kind::FixedValue, v}; }
  static BoundaryCondition zero_gradient() { return {Kind::ZeroGradient, T{}}; }
  static BoundaryCondition fixed_gradient(T g) { return {Kind::FixedGradient, g}; }
};

/// Cell-centred field over the fluid cells of a mesh together with one
/// boundary condition per patch. Fields are values; the mesh is shared.
template <class T>
class CellField {
public:
  using value_type = T;
  using BC = BoundaryCondition<T>;

  CellField() = default;
  CellField(MeshPtr mesh, std::vector<T> values, std::vector<BC> bcs)
      : mesh_(std::move(mesh)), values_(std::move(values)), bcs_(std::move(bcs)) {
    if (!mesh_) throw ValidationError("CellField: null mesh");
    if (static_cast<int>(values_.size()) != mesh_->cell_count())
      throw ShapeError("CellField: value count != fluid cell count");
    if (static_cast<int>(bcs_.size()) != mesh_->patch_count())
      throw ShapeError("CellField: boundary table does not cover every patch");
  }

  static CellField uniform(MeshPtr mesh, T value, std::vector<BC> bcs) {
    const int n = mesh->cell_count();
    return CellField(std::move(mesh), std::vector<T>(n, value), std::move(bcs));
  }

  const MeshPtr& mesh() const noexcept { return mesh_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const std::vector<T>& values() const noexcept { return values_; }
  std::vector<T>& values() noexcept { return values_; }
  T& operator[](int cell) { return values_[cell]; }
  const T& operator[](int cell) const { return values_[cell]; }

  const std::vector<BC>& bcs() const noexcept { return bcs_; }
  const BC& bc(int patch) const { return bcs_[patch]; }
  void set_bc(int patch, BC bc) { bcs_[patch] = bc; }

  /// Value on a boundary face as implied by the patch condition.
  T boundary_value(int face) const {
    const Face& f = mesh_->face(face);
    const BC& b = bcs_[f.patch];
    switch (b.kind) {
      case BC::Kind::FixedValue: return b.value;
      case BC::Kind::ZeroGradient: return values_[f.owner];
      case BC::Kind::FixedGradient: return values_[f.owner] + f.distance * b.value;
    }
    return values_[f.owner];
  }

  /// this += a * other; boundary tables must have matching kinds.
  CellField& axpy(double a, const CellField& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
    for (std::size_t p = 0; p < bcs_.size(); ++p)
      if (bcs_[p].kind != BC::Kind::ZeroGradient) bcs_[p].value += a * other.bcs_[p].value;
    return *this;
  }

  CellField& scale(double a) {
    for (T& v : values_) v *= a;
    for (BC& b : bcs_)
      if (b.kind != BC::Kind::ZeroGradient) b.value *= a;
    return *this;
  }

  void check_compatible(const CellField& other) const {
    if (mesh_ != other.mesh_) throw MeshMismatchError("CellField: fields live on different meshes");
    for (std::size_t p = 0; p < bcs_.size(); ++p)
      if (bcs_[p].kind != other.bcs_[p].kind)
        throw MeshMismatchError("CellField: boundary kinds differ on patch " + mesh_->patches()[p].name);
  }

private:
  MeshPtr mesh_;
  std::vector<T> values_;
  std::vector<BC> bcs_;
};

using ScalarField = CellField<double>;
using VectorField = CellField<Vec2>;

/// Velocity: cell values plus one volumetric flux per face (outward from the
/// owner). The fluxes are the conservative quantity; cell values are what
/// gets plotted and projected.
struct VelocityField {
  VectorField cells;
  std::vector<double> flux;

  VelocityField() = default;
  VelocityField(VectorField c, std::vector<double> f);
  /// Fluxes from linear interpolation of the cell values (boundary faces use
  /// the boundary value).
  explicit VelocityField(VectorField c);

  const MeshPtr& mesh() const noexcept { return cells.mesh(); }
  int size() const noexcept { return cells.size(); }

  VelocityField& axpy(double a, const VelocityField& other);
  VelocityField& scale(double a);
};

std::vector<double> interpolated_flux(const VectorField& u);

/// Per-cell net outward flux.
std::vector<double> cell_net_flux(const StructuredMesh& mesh, std::span<const double> flux);
double max_abs(std::span<const double> v);

/// Volume-weighted L2(Omega) inner product sum_cells V (f . g).
double inner_product(const ScalarField& f, const ScalarField& g);
double inner_product(const VectorField& f, const VectorField& g);
double inner_product(const VelocityField& f, const VelocityField& g);

/// Boundary tables used by the flow solver for a given inlet velocity.
std::vector<BoundaryCondition<Vec2>> velocity_bcs(const StructuredMesh& mesh, Vec2 inlet);
std::vector<BoundaryCondition<double>> pressure_bcs(const StructuredMesh& mesh);

/// CSV with header "cell,x,y,<names...>" and 17 significant digits.
void write_csv(std::ostream& os, const ScalarField& f, const std::string& name = "p");
void write_csv(std::ostream& os, const VectorField& f, const std::string& name = "u");

} // namespace romuq::mesh
