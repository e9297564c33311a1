#include "romuq/pce.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "romuq/error.hpp"

namespace romuq::pce {

namespace {

// All exponent vectors of length n and total degree exactly d, leading
// exponent descending.
void exact_degree(int n, int d, MultiIndex& prefix, std::vector<MultiIndex>& out) {
  if (n == 1) {
    prefix.push_back(d);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = d; first >= 0; --first) {
    prefix.push_back(first);
    exact_degree(n - 1, d - first, prefix, out);
    prefix.pop_back();
  }
}

template <class T>
T read_value(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) throw ArtifactError(fmt::format("PCE model file: cannot read {}", what));
  return v;
}

void expect_tag(std::istream& is, const std::string& tag) {
  const auto got = read_value<std::string>(is, tag.c_str());
  if (got != tag) throw ArtifactError(fmt::format("PCE model file: expected '{}', found '{}'", tag, got));
}

constexpr const char* kMagic = "romuq-pce-model";
constexpr int kVersion = 1;

} // namespace

MultiIndexSet multi_indices(int n, int p) {
  if (n < 1) throw ValidationError("multi_indices: dimension must be at least 1");
  if (p < 0) throw ValidationError("multi_indices: degree must be nonnegative");
  MultiIndexSet set{n, p, {}};
  MultiIndex prefix;
  for (int d = 0; d <= p; ++d) exact_degree(n, d, prefix, set.indices);
  return set;
}

std::size_t basis_count(int n, int p) {
  // C(n + p, p), built incrementally so every intermediate stays an integer.
  std::size_t c = 1;
  for (int k = 1; k <= p; ++k) c = c * static_cast<std::size_t>(n + k) / static_cast<std::size_t>(k);
  return c;
}

double hermite(int m, double x) {
  if (m < 0) throw ValidationError("hermite: negative degree");
  if (m == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < m; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double norm_squared(const MultiIndex& m) {
  double v = 1.0;
  for (int e : m)
    for (int k = 2; k <= e; ++k) v *= k;
  return v;
}

double evaluate(const MultiIndex& m, std::span<const double> zeta) {
  if (zeta.size() != m.size()) throw ShapeError("PCE basis: coordinate count differs from dimension");
  double v = 1.0;
  for (std::size_t k = 0; k < m.size(); ++k) v *= hermite(m[k], zeta[k]);
  return v;
}

DenseMatrix design_matrix(const std::vector<std::vector<double>>& zeta, const MultiIndexSet& basis) {
  if (zeta.empty()) throw ValidationError("design_matrix: no samples");
  DenseMatrix l(zeta.size(), basis.size());
  for (std::size_t i = 0; i < zeta.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) l(i, j) = evaluate(basis.indices[j], zeta[i]);
  return l;
}

DenseMatrix design_matrix(const sampling::SampleSet& samples, const MultiIndexSet& basis) {
  if (!samples.standardized()) throw ValidationError("design_matrix: samples carry no standardized coordinates");
  if (basis.dimension != sampling::kDimensions) throw ShapeError("design_matrix: basis dimension differs from samples");
  std::vector<std::vector<double>> z;
  for (const auto& c : samples.zeta) z.emplace_back(c.begin(), c.end());
  return design_matrix(z, basis);
}

PCEModel fit(const DenseMatrix& l, const DenseVector& y, const MultiIndexSet& basis,
             const sampling::Standardization& standardization) {
  if (l.cols() != basis.size()) throw ShapeError("fit: design matrix columns differ from basis size");
  if (l.rows() != y.size()) throw ShapeError("fit: design matrix rows differ from QoI count");
  if (l.rows() < l.cols())
    throw ValidationError(fmt::format("fit: {} samples cannot determine {} coefficients", l.rows(), l.cols()));
  PCEModel m;
  m.basis = basis;
  m.standardization = standardization;
  m.coefficients = linalg::lstsq(l, y);
  m.training_residual = (l * m.coefficients - y).norm2();
  return m;
}

PCEModel fit(const sampling::SampleSet& samples, std::span<const double> y, int degree) {
  if (!samples.standardized()) throw ValidationError("fit: samples carry no standardized coordinates");
  const MultiIndexSet basis = multi_indices(sampling::kDimensions, degree);
  return fit(design_matrix(samples, basis), DenseVector(std::vector<double>(y.begin(), y.end())), basis,
             *samples.standardization);
}

double predict_standardized(const PCEModel& model, std::span<const double> zeta) {
  double v = 0.0;
  for (std::size_t i = 0; i < model.basis.size(); ++i) v += model.coefficients[i] * evaluate(model.basis.indices[i], zeta);
  return v;
}

Prediction predict(const PCEModel& model, const sampling::Coordinates& x) {
  if (model.basis.dimension != sampling::kDimensions) throw ShapeError("predict: model dimension differs from input");
  const sampling::Coordinates z = model.standardization.forward(x);
  Prediction p;
  p.value = predict_standardized(model, z);
  for (double zk : z) p.extrapolated = p.extrapolated || std::abs(zk) > 3.0;
  return p;
}

Prediction predict(const PCEModel& model, const fom::ParameterPoint& x) {
  return predict(model, sampling::coordinates(x));
}

Moments moments(const PCEModel& model) {
  Moments m;
  for (std::size_t i = 0; i < model.basis.size(); ++i) {
    const double c = model.coefficients[i];
    bool constant = true;
    for (int e : model.basis.indices[i]) constant = constant && e == 0;
    if (constant)
      m.mean += c;
    else
      m.variance += c * c * norm_squared(model.basis.indices[i]);
  }
  return m;
}

double relative_error(std::span<const double> reference, std::span<const double> candidate) {
  if (reference.size() != candidate.size())
    throw ShapeError(fmt::format("relative_error: {} reference values, {} candidates", reference.size(),
                                 candidate.size()));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - candidate[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (!(den > 0.0)) throw DegenerateInputError("relative_error: reference vector has zero norm");
  return 100.0 * std::sqrt(num) / std::sqrt(den);
}

void write_model(std::ostream& os, const PCEModel& model) {
  fmt::print(os, "{} {}\n", kMagic, kVersion);
  fmt::print(os, "dimension {}\ndegree {}\n", model.basis.dimension, model.basis.degree);
  os << "mean";
  for (double v : model.standardization.mean) fmt::print(os, " {:.17g}", v);
  os << "\nstddev";
  for (double v : model.standardization.stddev) fmt::print(os, " {:.17g}", v);
  fmt::print(os, "\ntraining_residual {:.17g}\ncoefficients {}\n", model.training_residual, model.basis.size());
  for (std::size_t i = 0; i < model.basis.size(); ++i) {
    for (int e : model.basis.indices[i]) fmt::print(os, "{} ", e);
    fmt::print(os, "{:.17g}\n", model.coefficients[i]);
  }
  if (!os) throw ArtifactError("PCE model file: write failed");
}

PCEModel read_model(std::istream& is) {
  if (read_value<std::string>(is, "header") != kMagic) throw ArtifactError("PCE model file: bad header");
  if (read_value<int>(is, "version") != kVersion) throw ArtifactError("PCE model file: unsupported version");
  expect_tag(is, "dimension");
  const int n = read_value<int>(is, "dimension");
  expect_tag(is, "degree");
  const int p = read_value<int>(is, "degree");
  if (n != sampling::kDimensions || p < 0) throw ArtifactError("PCE model file: unsupported dimension or degree");
  PCEModel m;
  m.basis = multi_indices(n, p);
  expect_tag(is, "mean");
  for (double& v : m.standardization.mean) v = read_value<double>(is, "mean");
  expect_tag(is, "stddev");
  for (double& v : m.standardization.stddev) v = read_value<double>(is, "stddev");
  expect_tag(is, "training_residual");
  m.training_residual = read_value<double>(is, "training_residual");
  expect_tag(is, "coefficients");
  if (read_value<std::size_t>(is, "coefficient count") != m.basis.size())
    throw ArtifactError("PCE model file: coefficient count differs from basis size");
  m.coefficients = DenseVector(m.basis.size());
  for (std::size_t i = 0; i < m.basis.size(); ++i) {
    for (int k = 0; k < n; ++k)
      if (read_value<int>(is, "exponent") != m.basis.indices[i][k])
        throw ArtifactError("PCE model file: multi-index order differs from graded lexicographic order");
    m.coefficients[i] = read_value<double>(is, "coefficient");
  }
  return m;
}

} // namespace romuq::pce
