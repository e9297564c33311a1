#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "romuq/fom.hpp"

namespace romuq::sampling {

using fom::ParameterPoint;

/// Inputs are ordered (alpha [deg], U [m/s]) throughout.
inline constexpr int kDimensions = 2;
using Coordinates = std::array<double, kDimensions>;

struct SampleGroup {
  int count = 1;
  Coordinates mean{};
  Coordinates stddev{1.0, 1.0};
};

void validate(const SampleGroup& g);

struct Standardization {
  Coordinates mean{};
  Coordinates stddev{1.0, 1.0};

  Coordinates forward(const Coordinates& x) const;
  Coordinates inverse(const Coordinates& zeta) const;
};

struct SampleSet {
  std::vector<ParameterPoint> points;
  std::vector<int> groups;         // 1-based group of each sample
  std::vector<Coordinates> cdf;    // stratified uniforms the sample came from
  std::uint64_t seed = 0;
  std::optional<Standardization> standardization;
  std::vector<Coordinates> zeta;   // filled by standardize()

  std::size_t size() const noexcept { return points.size(); }
  bool standardized() const noexcept { return standardization.has_value(); }
  /// First `count` samples, from index `first`.
  SampleSet slice(std::size_t first, std::size_t count) const;
};

inline Coordinates coordinates(const ParameterPoint& p) { return {p.alpha_deg, p.speed}; }

double normal_cdf(double x);
/// Rational approximation of P. J. Acklam (relative error below 1.2e-9 on
/// (0, 1)) followed by one Halley step against erfc, which brings it close to
/// double precision. Throws ValidationError outside (0, 1).
double inverse_normal_cdf(double p);

/// Stratified uniforms in [0, 1): column d holds one value in each of the
/// n strata [i/n, (i+1)/n), randomly permuted and jittered inside the
/// stratum. Uses mt19937_64 with its own uniform and shuffle, so the draw is
/// identical on every platform.
std::vector<std::vector<double>> lhc_unit(int n, int dims, std::uint64_t seed);

SampleSet lhc_gaussian(int n, const Coordinates& mean, const Coordinates& stddev, std::uint64_t seed);

/// Seed used for group `index` (0-based) of merge_groups.
std::uint64_t group_seed(std::uint64_t seed, std::size_t index);

/// Concatenation of one LHC draw per group, in group order.
SampleSet merge_groups(const std::vector<SampleGroup>& groups, std::uint64_t seed);

SampleSet standardize(const SampleSet& set, const Standardization& s);

/// Thirteen Gaussian bulks in angle of attack, 520 samples in total, all
/// with inflow speed mean 100 m/s and standard deviation 20 m/s.
std::vector<SampleGroup> table1_groups();

/// CSV with header index,group,alpha,speed,zeta_alpha,zeta_speed. The zeta
/// columns are empty when the set is not standardized.
void write_csv(std::ostream& os, const SampleSet& set);
/// Reads the layout above; zeta columns, if present, are ignored and the
/// set comes back unstandardized. Throws ArtifactError on malformed input.
SampleSet read_csv(std::istream& is);

} // namespace romuq::sampling
