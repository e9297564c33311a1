#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "romuq/linalg.hpp"
#include "romuq/sampling.hpp"

namespace romuq::pce {

using linalg::DenseMatrix;
using linalg::DenseVector;

using MultiIndex = std::vector<int>;

/// Total-degree set in graded lexicographic order: by total degree, then
/// with larger leading exponents first. For n = 2, p = 2:
/// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
struct MultiIndexSet {
  int dimension = 0;
  int degree = 0;
  std::vector<MultiIndex> indices;

  std::size_t size() const noexcept { return indices.size(); }
};

MultiIndexSet multi_indices(int n, int p);

/// (p + n)! / (p! n!)
std::size_t basis_count(int n, int p);

/// Probabilists' Hermite polynomial He_m(x).
double hermite(int m, double x);

/// E[psi^2] = prod_k m_k! under the standard normal measure.
double norm_squared(const MultiIndex& m);

/// psi_m(zeta) = prod_k He_{m_k}(zeta_k)
double evaluate(const MultiIndex& m, std::span<const double> zeta);

/// Rows are samples, columns basis functions.
DenseMatrix design_matrix(const std::vector<std::vector<double>>& zeta, const MultiIndexSet& basis);
/// Throws ValidationError when the set carries no standardized coordinates.
DenseMatrix design_matrix(const sampling::SampleSet& samples, const MultiIndexSet& basis);

struct PCEModel {
  MultiIndexSet basis;
  DenseVector coefficients;
  sampling::Standardization standardization;
  double training_residual = 0.0;  // ||L c - y||_2
};

/// Least-squares fit. Throws ValidationError when there are fewer samples
/// than basis functions and ConditioningError on rank deficiency.
PCEModel fit(const DenseMatrix& l, const DenseVector& y, const MultiIndexSet& basis,
             const sampling::Standardization& standardization = {});

/// Standardizes the samples with their own standardization and fits.
PCEModel fit(const sampling::SampleSet& samples, std::span<const double> y, int degree);

struct Prediction {
  double value = 0.0;
  bool extrapolated = false;  // some |zeta_k| > 3
};

Prediction predict(const PCEModel& model, const sampling::Coordinates& x);
Prediction predict(const PCEModel& model, const fom::ParameterPoint& x);
double predict_standardized(const PCEModel& model, std::span<const double> zeta);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(const PCEModel& model);

/// 100 ||reference - candidate||_2 / ||reference||_2, in percent. Throws
/// ShapeError on length mismatch and DegenerateInputError for a zero
/// reference.
double relative_error(std::span<const double> reference, std::span<const double> candidate);

void write_model(std::ostream& os, const PCEModel& model);
PCEModel read_model(std::istream& is);

} // namespace romuq::pce
