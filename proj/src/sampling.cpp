#include "romuq/sampling.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "romuq/error.hpp"

namespace romuq::sampling {

namespace {

// Uniform in the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) by rejection.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  if (p < lo) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - lo) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArtifactError(fmt::format("sample CSV line {}: '{}' is not a number", line, s));
  }
}

} // namespace

void validate(const SampleGroup& g) {
  if (g.count < 1) throw ValidationError("sample group: count must be at least 1");
  for (int d = 0; d < kDimensions; ++d)
    if (!(g.stddev[d] > 0.0) || !std::isfinite(g.stddev[d]) || !std::isfinite(g.mean[d]))
      throw ValidationError(fmt::format("sample group: standard deviation {} must be positive", g.stddev[d]));
}

Coordinates Standardization::forward(const Coordinates& x) const {
  Coordinates z{};
  for (int d = 0; d < kDimensions; ++d) z[d] = (x[d] - mean[d]) / stddev[d];
  return z;
}

Coordinates Standardization::inverse(const Coordinates& zeta) const {
  Coordinates x{};
  for (int d = 0; d < kDimensions; ++d) x[d] = mean[d] + stddev[d] * zeta[d];
  return x;
}

SampleSet SampleSet::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw ValidationError("sample set slice out of range");
  SampleSet out;
  out.seed = seed;
  out.standardization = standardization;
  auto cut = [&](const auto& v, auto& dst) {
    if (!v.empty()) dst.assign(v.begin() + first, v.begin() + first + count);
  };
  cut(points, out.points);
  cut(groups, out.groups);
  cut(cdf, out.cdf);
  cut(zeta, out.zeta);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(fmt::format("inverse_normal_cdf: p = {} outside (0, 1)", p));
  double x = acklam(p);
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

std::vector<std::vector<double>> lhc_unit(int n, int dims, std::uint64_t seed) {
  if (n < 1) throw ValidationError("lhc: sample count must be at least 1");
  if (dims < 1) throw ValidationError("lhc: dimension must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> u(n, std::vector<double>(dims));
  std::vector<int> perm(n);
  for (int d = 0; d < dims; ++d) {
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[below(rng, static_cast<std::uint64_t>(i) + 1)]);
    for (int i = 0; i < n; ++i) {
      const double hi = static_cast<double>(perm[i] + 1) / n;
      const double v = (perm[i] + open_uniform(rng)) / n;
      u[i][d] = v < hi ? v : std::nextafter(hi, 0.0);  // rounding must not leave the stratum
    }
  }
  return u;
}

SampleSet lhc_gaussian(int n, const Coordinates& mean, const Coordinates& stddev, std::uint64_t seed) {
  validate(SampleGroup{n, mean, stddev});
  const auto u = lhc_unit(n, kDimensions, seed);
  SampleSet set;
  set.seed = seed;
  for (int i = 0; i < n; ++i) {
    Coordinates x{};
    for (int d = 0; d < kDimensions; ++d) x[d] = mean[d] + stddev[d] * inverse_normal_cdf(u[i][d]);
    set.points.push_back({x[0], x[1]});
    set.groups.push_back(1);
    set.cdf.push_back({u[i][0], u[i][1]});
  }
  return set;
}

std::uint64_t group_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

SampleSet merge_groups(const std::vector<SampleGroup>& groups, std::uint64_t seed) {
  if (groups.empty()) throw ValidationError("merge_groups: no groups");
  for (const auto& g : groups) validate(g);
  SampleSet out;
  out.seed = seed;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    SampleSet part = lhc_gaussian(groups[g].count, groups[g].mean, groups[g].stddev, group_seed(seed, g));
    out.points.insert(out.points.end(), part.points.begin(), part.points.end());
    out.cdf.insert(out.cdf.end(), part.cdf.begin(), part.cdf.end());
    out.groups.insert(out.groups.end(), part.size(), static_cast<int>(g) + 1);
  }
  return out;
}

SampleSet standardize(const SampleSet& set, const Standardization& s) {
  for (int d = 0; d < kDimensions; ++d)
    if (!(s.stddev[d] > 0.0)) throw ValidationError("standardize: standard deviation must be positive");
  SampleSet out = set;
  out.standardization = s;
  out.zeta.clear();
  for (const auto& p : set.points) out.zeta.push_back(s.forward(coordinates(p)));
  return out;
}

std::vector<SampleGroup> table1_groups() {
  struct Row {
    int n;
    double mean, sd;
  };
  static constexpr Row rows[] = {{90, 0, 20},  {20, -10, 2}, {20, 10, 2},  {50, -15, 2}, {50, 15, 2},
                                 {40, -22, 5}, {40, 22, 5},  {40, -30, 10}, {40, 30, 10}, {20, -38, 2},
                                 {20, 38, 2},  {50, -45, 5}, {40, 45, 5}};
  std::vector<SampleGroup> out;
  for (const Row& r : rows) out.push_back({r.n, {r.mean, 100.0}, {r.sd, 20.0}});
  return out;
}

void write_csv(std::ostream& os, const SampleSet& set) {
  os << "index,group,alpha,speed,zeta_alpha,zeta_speed\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const int g = set.groups.empty() ? 1 : set.groups[i];
    fmt::print(os, "{},{},{:.17g},{:.17g}", i, g, set.points[i].alpha_deg, set.points[i].speed);
    if (set.standardized())
      fmt::print(os, ",{:.17g},{:.17g}\n", set.zeta[i][0], set.zeta[i][1]);
    else
      os << ",,\n";
  }
}

SampleSet read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ArtifactError("sample CSV: empty input");
  const auto header = split(line, ',');
  if (header.size() < 4 || header[2] != "alpha" || header[3] != "speed")
    throw ArtifactError("sample CSV: header must start with index,group,alpha,speed");
  SampleSet set;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() < 4) throw ArtifactError(fmt::format("sample CSV line {}: too few columns", lineno));
    set.groups.push_back(static_cast<int>(parse_double(cols[1], lineno)));
    set.points.push_back({parse_double(cols[2], lineno), parse_double(cols[3], lineno)});
  }
  return set;
}

} // namespace romuq::sampling
