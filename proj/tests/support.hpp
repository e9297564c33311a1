#pragma once

// Test-side helpers: hand-rolled generators and oracles that do not go
// through the library code they check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "romuq/config.hpp"
#include "romuq/field.hpp"
#include "romuq/fom.hpp"
#include "romuq/linalg.hpp"
#include "romuq/mesh.hpp"

namespace romuq::test {

using mesh::MeshPtr;
using mesh::ScalarField;
using mesh::Vec2;
using mesh::VectorField;
using mesh::VelocityField;

inline MeshPtr unit_square(int nx, int ny) {
  mesh::MeshSpec s;
  s.nx = nx;
  s.ny = ny;
  return mesh::build_mesh(s);
}

/// Desk-scale channel with the blunt plate used throughout, at a given
/// resolution.
inline mesh::MeshSpec plate_spec(int nx, int ny) {
  mesh::MeshSpec s;
  s.x_min = 0.0;
  s.x_max = 6.0;
  s.y_min = -1.5;
  s.y_max = 1.5;
  s.nx = nx;
  s.ny = ny;
  s.obstacle = mesh::Rect{1.5, -0.4, 2.5, 0.4};
  s.top = mesh::PatchRole::Inlet;
  s.bottom = mesh::PatchRole::Inlet;
  return s;
}

/// Small configuration that runs the whole pipeline in a second or two.
inline config::PipelineConfig toy_config(const std::filesystem::path& out) {
  config::PipelineConfig c = config::default_config();
  c.mesh = plate_spec(24, 12);
  c.flow.nu = 0.04;
  c.seed = 11;
  c.training = {{8, {0.0, 1.0}, {5.0, 0.1}}};
  c.rom.layout = {4, 2, 2};
  c.uq.groups = {{30, {0.0, 1.0}, {3.0, 0.1}}};
  c.uq.train = 12;
  c.uq.test = 18;
  c.output_dir = out;
  return c;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  std::mt19937_64& engine() { return gen_; }

private:
  std::mt19937_64 gen_;
};

inline linalg::DenseMatrix random_matrix(Rng& r, std::size_t rows, std::size_t cols) {
  linalg::DenseMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = r.uniform(-1.0, 1.0);
  return a;
}

inline linalg::DenseMatrix random_symmetric(Rng& r, std::size_t n) {
  linalg::DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = r.uniform(-1.0, 1.0);
  return a;
}

inline ScalarField random_scalar(Rng& r, const MeshPtr& m) {
  std::vector<double> v(m->cell_count());
  for (double& x : v) x = r.normal();
  return ScalarField(m, std::move(v), mesh::pressure_bcs(*m));
}

inline VectorField random_vector(Rng& r, const MeshPtr& m) {
  std::vector<Vec2> v(m->cell_count());
  for (Vec2& x : v) x = {r.normal(), r.normal()};
  return VectorField(m, std::move(v), mesh::velocity_bcs(*m, {0.0, 0.0}));
}

/// Random cell values and independent random face fluxes.
inline VelocityField random_velocity(Rng& r, const MeshPtr& m) {
  std::vector<double> flux(m->face_count());
  for (double& f : flux) f = r.normal();
  return VelocityField(random_vector(r, m), std::move(flux));
}

/// 64-point (or n-point) Gauss-Hermite rule for the standard normal
/// measure, by Newton iteration on the orthonormal physicists' recurrence
/// with the classical asymptotic starting guesses.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_hermite(int n) {
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  std::vector<double> x(n), w(n);
  double z = 0.0;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  // physicists' weight exp(-t^2) -> standard normal: x = sqrt(2) t, w / sqrt(pi)
  Quadrature q;
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(std::sqrt(2.0) * x[i]);
    q.weights.push_back(w[i] / std::sqrt(M_PI));
  }
  return q;
}

/// Gaussian elimination with partial pivoting on a row-major copy.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Relative L2 error in percent, written out independently of the library.
inline double percent_error(const std::vector<double>& ref, const std::vector<double>& cand) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (ref[i] - cand[i]) * (ref[i] - cand[i]);
    den += ref[i] * ref[i];
  }
  return 100.0 * std::sqrt(num) / std::sqrt(den);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("romuq-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace romuq::test
