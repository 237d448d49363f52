// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/rational.hpp>
#include <gtest/gtest.h>

#include <atsss/error.hpp>
#include <atsss/rng.hpp>
#include <atsss/traffic.hpp>

using namespace atsss;
using namespace atsss::traffic;

namespace {

/// Pearson chi-square statistic against expected probabilities.
double chi_square(const std::vector<std::int64_t>& counts, const std::vector<double>& p, std::int64_t n) {
  double x = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = p[i] * static_cast<double>(n);
    x += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
  }
  return x;
}

double chi_square_critical(std::size_t categories, double alpha) {
  boost::math::chi_squared dist(static_cast<double>(categories - 1));
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

ContentLibrary library(std::size_t n, double alpha) {
  return make_library(LibraryConfig{n, alpha, 1000, 1000}, 1);
}

std::vector<int> users(int n) {
  std::vector<int> u(static_cast<std::size_t>(n));
  std::iota(u.begin(), u.end(), 1);
  return u;
}

}  // namespace

TEST(Zipf, UniformAtAlphaZero) {
  for (double p : zipf_pmf(4, 0.0)) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(Zipf, SingleFile) {
  EXPECT_EQ(zipf_pmf(1, 0.0), std::vector<double>{1.0});
  EXPECT_EQ(zipf_pmf(1, 2.5), std::vector<double>{1.0});
}

TEST(Zipf, HarmonicFiveMatchesRational) {
  // 1 + 1/2 + ... + 1/5 computed in exact rationals.
  boost::rational<std::int64_t> h(0);
  for (int i = 1; i <= 5; ++i) h += boost::rational<std::int64_t>(1, i);
  ASSERT_EQ(h, boost::rational<std::int64_t>(137, 60));
  const auto p = zipf_pmf(5, 1.0);
  for (int f = 1; f <= 5; ++f) {
    const auto exact = boost::rational<std::int64_t>(1, f) / h;
    EXPECT_NEAR(p[static_cast<std::size_t>(f - 1)], boost::rational_cast<double>(exact), 1e-12);
  }
  EXPECT_NEAR(p[0], 0.4380, 5e-5);
  EXPECT_NEAR(p[4], 0.0876, 5e-5);
}

TEST(Zipf, SumsToOneAndNonIncreasing) {
  for (std::size_t n : {1u, 7u, 1000u, 1000000u}) {
    for (double a : {0.0, 0.5, 0.8, 1.0, 2.0, 3.0}) {
      const auto p = zipf_pmf(n, a);
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9) << n << " " << a;
      if (a > 0.0) {
        EXPECT_TRUE(std::is_sorted(p.rbegin(), p.rend()));
      }
    }
  }
}

TEST(Zipf, RejectsBadArguments) {
  EXPECT_THROW(zipf_pmf(0, 1.0), InvalidArgument);
  EXPECT_THROW(zipf_pmf(5, -0.1), InvalidArgument);
}

TEST(SampleFile, DegenerateLibrary) {
  const auto lib = library(1, 0.8);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_file(lib, rng), 1);
}

TEST(SampleFile, UniformPassesChiSquare) {
  const auto lib = library(10, 0.0);
  Rng rng(17);
  const std::int64_t n = 100000;
  std::vector<std::int64_t> counts(10);
  for (std::int64_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_file(lib, rng) - 1)];
  EXPECT_LT(chi_square(counts, lib.popularity, n), chi_square_critical(10, 0.001));
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (auto c : counts) EXPECT_NEAR(static_cast<double>(c), n * 0.1, 3 * sigma);
}

TEST(SampleFile, ZipfHeadFrequency) {
  const auto lib = library(5, 1.0);
  Rng rng(99);
  const std::int64_t n = 100000;
  std::vector<std::int64_t> counts(5);
  for (std::int64_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_file(lib, rng) - 1)];
  EXPECT_NEAR(static_cast<double>(counts[0]) / n, 60.0 / 137.0, 0.01);
  EXPECT_LT(chi_square(counts, lib.popularity, n), chi_square_critical(5, 0.001));
}

TEST(FileSizes, ConstantRange) {
  Rng rng(1);
  for (auto s : assign_file_sizes(100, 5000, 5000, rng)) EXPECT_EQ(s, 5000);
}

TEST(FileSizes, MeanAndIndependenceFromRank) {
  Rng rng(2);
  const auto sizes = assign_file_sizes(10000, 1'000'000, 10'000'000, rng);
  const double mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / 10000.0;
  EXPECT_NEAR(mean, 5.5e6, 0.02 * 5.5e6);
  double sr = 0, ss = 0, srr = 0, sss = 0, srs = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double r = static_cast<double>(i + 1), s = static_cast<double>(sizes[i]);
    sr += r; ss += s; srr += r * r; sss += s * s; srs += r * s;
  }
  const double n = 10000.0;
  const double corr = (srs - sr * ss / n) / std::sqrt((srr - sr * sr / n) * (sss - ss * ss / n));
  EXPECT_NEAR(corr, 0.0, 0.03);
  for (auto s : sizes) {
    EXPECT_GE(s, 1'000'000);
    EXPECT_LE(s, 10'000'000);
  }
}

TEST(FileSizes, RejectsInvertedBounds) {
  Rng rng(1);
  EXPECT_THROW(assign_file_sizes(10, 10, 5, rng), InvalidArgument);
  EXPECT_THROW(assign_file_sizes(10, 0, 5, rng), InvalidArgument);
}

TEST(Poisson, Examples) {
  EXPECT_EQ(poisson_pmf(0, 0.0, 5.0), 1.0);
  EXPECT_EQ(poisson_pmf(3, 0.0, 5.0), 0.0);
  EXPECT_NEAR(poisson_pmf(0, 2.0, 1.0), std::exp(-2.0), 1e-15);
  double sum = 0.0;
  for (int r = 0; r <= 50; ++r) sum += poisson_pmf(r, 5.0, 1.0);
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_GT(poisson_pmf(2000, 2000.0, 1.0), 0.0);  // log-space keeps large r finite
  EXPECT_THROW(poisson_pmf(-1, 1.0, 1.0), InvalidArgument);
}

TEST(Requests, EmptyHorizon) {
  const auto lib = library(10, 0.8);
  const auto u = users(5);
  EXPECT_TRUE(generate_requests(ArrivalConfig{2.0, 0.0, 1}, lib, u).empty());
}

TEST(Requests, CountAndInterArrival) {
  const auto lib = library(100, 0.8);
  const auto u = users(100);
  const auto s = generate_requests(ArrivalConfig{2.0, 1e4, 42}, lib, u);
  EXPECT_NEAR(static_cast<double>(s.size()), 2e4, 3.0 * std::sqrt(2e4));
  const double mean_gap = s.back().arrival_time_s / static_cast<double>(s.size());
  EXPECT_NEAR(mean_gap, 0.5, 0.01);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end(),
                             [](const auto& a, const auto& b) { return a.arrival_time_s < b.arrival_time_s; }));
  for (const auto& r : s) {
    EXPECT_GE(r.user_id, 1);
    EXPECT_LE(r.user_id, 100);
    EXPECT_EQ(r.size_bytes, lib.sizes_bytes[static_cast<std::size_t>(r.file_id - 1)]);
  }
}

TEST(Requests, DisjointWindowsMeanEqualsVariance) {
  const auto lib = library(10, 0.8);
  const auto u = users(10);
  const double horizon = 1e5;
  const auto s = generate_requests(ArrivalConfig{2.0, horizon, 5}, lib, u);
  std::vector<double> counts(static_cast<std::size_t>(horizon));
  for (const auto& r : s) {
    const auto k = static_cast<std::size_t>(r.arrival_time_s);
    if (k < counts.size()) counts[k] += 1.0;
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / horizon;
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= horizon - 1.0;
  EXPECT_GE(mean / var, 0.9);
  EXPECT_LE(mean / var, 1.1);
}

TEST(Requests, SameSeedSameStream) {
  const auto lib = library(50, 0.8);
  const auto u = users(20);
  EXPECT_EQ(generate_requests(ArrivalConfig{2.0, 500, 8}, lib, u),
            generate_requests(ArrivalConfig{2.0, 500, 8}, lib, u));
  EXPECT_NE(generate_requests(ArrivalConfig{2.0, 500, 8}, lib, u),
            generate_requests(ArrivalConfig{2.0, 500, 9}, lib, u));
}

TEST(Requests, CsvRoundTrip) {
  const auto lib = make_library(LibraryConfig{}, 4);
  const auto u = users(30);
  const auto s = generate_requests(ArrivalConfig{3.0, 200, 4}, lib, u, TrafficType::URLLC);
  std::stringstream ss;
  write_requests_csv(s, ss);
  EXPECT_EQ(read_requests_csv(ss), s);
}

TEST(Requests, CsvRejectsMalformedRows) {
  std::stringstream bad("arrival_time_s,user_id,file_id,size_bytes,traffic_type\n0.5,1,2,100,eMBB\n0.7,x,2,100,eMBB\n");
  try {
    read_requests_csv(bad);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::stringstream unsorted("arrival_time_s,user_id,file_id,size_bytes,traffic_type\n0.5,1,2,100,eMBB\n0.4,1,2,100,eMBB\n");
  EXPECT_THROW(read_requests_csv(unsorted), IoError);
}

TEST(Library, SizesFollowSeedOnly) {
  const LibraryConfig cfg{200, 0.8, 500, 900};
  const auto a = make_library(cfg, 12), b = make_library(cfg, 12), c = make_library(cfg, 13);
  EXPECT_EQ(a.sizes_bytes, b.sizes_bytes);
  EXPECT_NE(a.sizes_bytes, c.sizes_bytes);
  EXPECT_DOUBLE_EQ(a.cdf.back(), 1.0);
}
