#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "romuq/error.hpp"
#include "romuq/sampling.hpp"
#include "support.hpp"

using namespace romuq;
using namespace romuq::sampling;

namespace {

// each of the n strata [i/n, (i+1)/n) holds exactly one value of column d
bool stratified(const std::vector<std::vector<double>>& u, int d) {
  const int n = static_cast<int>(u.size());
  std::vector<int> hits(n, 0);
  for (const auto& row : u) {
    const double v = row[d];
    if (!(v >= 0.0 && v < 1.0)) return false;
    ++hits[static_cast<int>(std::floor(v * n))];
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

struct Stats {
  double mean, sd, skew;
};

Stats stats(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    m2 += (v - m) * (v - m);
    m3 += (v - m) * (v - m) * (v - m);
  }
  m2 /= n;
  m3 /= n;
  return {m, std::sqrt(m2), m3 / std::pow(m2, 1.5)};
}

} // namespace

TEST(Lhc, OneSamplePerStratum) {
  for (int n : {4, 100}) {
    for (std::uint64_t seed : {1ull, 2024ull, 0xdeadbeefull}) {
      const auto u = lhc_unit(n, 2, seed);
      ASSERT_EQ(static_cast<int>(u.size()), n);
      EXPECT_TRUE(stratified(u, 0));
      EXPECT_TRUE(stratified(u, 1));
    }
  }
}

TEST(Lhc, StratificationProperty) {
  test::Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(1, 500), dims = rng.integer(1, 5);
    const auto u = lhc_unit(n, dims, rng.integer(0, 1 << 30));
    for (int d = 0; d < dims; ++d) EXPECT_TRUE(stratified(u, d)) << "n " << n << " d " << d;
  }
}

TEST(Lhc, DeterministicUnderSeed) {
  EXPECT_EQ(lhc_unit(50, 2, 9), lhc_unit(50, 2, 9));
  EXPECT_NE(lhc_unit(50, 2, 9), lhc_unit(50, 2, 10));
  const auto a = lhc_gaussian(30, {0.0, 1.0}, {5.0, 0.1}, 3);
  const auto b = lhc_gaussian(30, {0.0, 1.0}, {5.0, 0.1}, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.points[i].alpha_deg, b.points[i].alpha_deg);
    EXPECT_EQ(a.points[i].speed, b.points[i].speed);
  }
}

TEST(Lhc, Errors) {
  EXPECT_THROW(lhc_unit(0, 2, 1), ValidationError);
  EXPECT_THROW(lhc_unit(3, 0, 1), ValidationError);
  EXPECT_THROW(lhc_gaussian(3, {0.0, 1.0}, {0.0, 1.0}, 1), ValidationError);
  EXPECT_THROW(merge_groups({}, 1), ValidationError);
}

TEST(Lhc, GaussianMomentsMatchTargets) {
  const auto s = lhc_gaussian(10000, {3.0, 100.0}, {4.0, 20.0}, 2024);
  std::vector<double> a, v;
  for (const auto& p : s.points) {
    a.push_back(p.alpha_deg);
    v.push_back(p.speed);
  }
  const Stats sa = stats(a), sv = stats(v);
  EXPECT_NEAR(sa.mean, 3.0, 0.05 * 4.0);
  EXPECT_NEAR(sa.sd / 4.0, 1.0, 0.05);
  EXPECT_NEAR(sv.mean, 100.0, 0.05 * 20.0);
  EXPECT_NEAR(sv.sd / 20.0, 1.0, 0.05);
  EXPECT_LE(std::abs(sa.skew), 0.2);
  EXPECT_LE(std::abs(sv.skew), 0.2);
}

TEST(Lhc, CdfColumnMapsToPoints) {
  const auto s = lhc_gaussian(20, {1.0, 2.0}, {3.0, 0.5}, 5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(normal_cdf((s.points[i].alpha_deg - 1.0) / 3.0), s.cdf[i][0], 1e-12);
    EXPECT_NEAR(normal_cdf((s.points[i].speed - 2.0) / 0.5), s.cdf[i][1], 1e-12);
  }
}

TEST(InverseNormal, InvertsTheCdf) {
  for (double p : {1e-12, 1e-6, 0.01, 0.02425, 0.3, 0.5, 0.77, 0.97575, 0.999, 1.0 - 1e-9}) {
    const double x = inverse_normal_cdf(p);
    EXPECT_NEAR(normal_cdf(x), p, 1e-14 + 1e-13 * p) << p;
  }
  EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
  EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-13);
  EXPECT_THROW(inverse_normal_cdf(0.0), ValidationError);
  EXPECT_THROW(inverse_normal_cdf(1.0), ValidationError);
}

TEST(InverseNormal, OddSymmetryProperty) {
  test::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.uniform(1e-8, 0.5);
    EXPECT_NEAR(inverse_normal_cdf(p), -inverse_normal_cdf(1.0 - p), 1e-9);
  }
}

TEST(Groups, TableCompositionIsExact) {
  const auto groups = table1_groups();
  ASSERT_EQ(groups.size(), 13u);
  int total = 0;
  for (const auto& g : groups) {
    total += g.count;
    EXPECT_EQ(g.mean[1], 100.0);
    EXPECT_EQ(g.stddev[1], 20.0);
  }
  EXPECT_EQ(total, 520);
  const auto set = merge_groups(groups, 2024);
  ASSERT_EQ(set.size(), 520u);
  for (std::size_t g = 0; g < groups.size(); ++g)
    EXPECT_EQ(std::count(set.groups.begin(), set.groups.end(), static_cast<int>(g) + 1), groups[g].count);
}

TEST(Groups, BimodalTailsSitNearPlusMinus38) {
  const auto groups = table1_groups();
  const auto set = merge_groups(groups, 7);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::abs(groups[g].mean[0]) != 38.0) continue;
    EXPECT_EQ(groups[g].stddev[0], 2.0);
    double m = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < set.size(); ++i)
      if (set.groups[i] == static_cast<int>(g) + 1) {
        m += set.points[i].alpha_deg;
        ++n;
      }
    EXPECT_NEAR(m / n, groups[g].mean[0], 1.0);
  }
}

TEST(Groups, EachGroupIsItsOwnLatinHypercube) {
  const std::vector<SampleGroup> groups{{4, {0.0, 1.0}, {1.0, 1.0}}, {6, {5.0, 2.0}, {2.0, 0.5}}};
  const auto set = merge_groups(groups, 99);
  const auto second = lhc_gaussian(6, {5.0, 2.0}, {2.0, 0.5}, group_seed(99, 1));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(set.points[4 + i].alpha_deg, second.points[i].alpha_deg);
  EXPECT_NE(group_seed(99, 0), group_seed(99, 1));
}

TEST(Standardize, Examples) {
  const Standardization s{{0.0, 100.0}, {20.0, 20.0}};
  const auto z = s.forward({20.0, 100.0});
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  const auto w = s.forward({-10.0, 60.0});
  EXPECT_DOUBLE_EQ(w[0], -0.5);
  EXPECT_DOUBLE_EQ(w[1], -2.0);
  SampleSet one;
  one.points = {{20.0, 100.0}};
  EXPECT_THROW(standardize(one, Standardization{{0.0, 0.0}, {0.0, 1.0}}), ValidationError);
  const auto st = standardize(one, s);
  ASSERT_TRUE(st.standardized());
  EXPECT_DOUBLE_EQ(st.zeta[0][0], 1.0);
}

TEST(Standardize, RoundTripProperty) {
  test::Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const Standardization s{{rng.uniform(-50, 50), rng.uniform(-50, 50)}, {rng.uniform(0.1, 30), rng.uniform(0.1, 30)}};
    const Coordinates x{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const Coordinates back = s.inverse(s.forward(x));
    for (int d = 0; d < 2; ++d) EXPECT_NEAR(back[d], x[d], 1e-14 * std::max(1.0, std::abs(x[d])) * 100);
  }
}

TEST(SampleCsv, RoundTripIsExact) {
  const auto set = standardize(merge_groups({{5, {0.0, 1.0}, {3.0, 0.1}}, {3, {9.0, 2.0}, {1.0, 0.2}}}, 4),
                               Standardization{{1.0, 1.0}, {2.0, 0.5}});
  std::stringstream ss;
  write_csv(ss, set);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,group,alpha,speed,zeta_alpha,zeta_speed");
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), set.size());
  EXPECT_FALSE(back.standardized());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back.points[i].alpha_deg, set.points[i].alpha_deg);
    EXPECT_EQ(back.points[i].speed, set.points[i].speed);
    EXPECT_EQ(back.groups[i], set.groups[i]);
  }
  std::istringstream bad("index,group,alpha,speed\n0,1,abc,1\n");
  EXPECT_THROW(read_csv(bad), ArtifactError);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), ArtifactError);
}

TEST(SampleSet, Slice) {
  const auto set = lhc_gaussian(10, {0.0, 1.0}, {1.0, 1.0}, 8);
  const auto s = set.slice(3, 4);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.points[0].alpha_deg, set.points[3].alpha_deg);
  EXPECT_THROW(set.slice(8, 3), ValidationError);
}
