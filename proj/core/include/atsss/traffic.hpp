// SPDX-License-Identifier: Apache-2.0
//
// Request workload: Poisson arrivals, Zipf content popularity and random
// file sizes that are independent of popularity.
#pragma once

#include <atsss/rng.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace atsss::traffic {

enum class TrafficType { eMBB, URLLC };

std::string_view to_string(TrafficType t) noexcept;
TrafficType parse_traffic_type(std::string_view s);

struct ContentLibrary {
  double zipf_alpha = 0.8;
  std::vector<double> popularity;        ///< P_F(f) for f = 1..N_F at index f-1
  std::vector<double> cdf;               ///< running sum of popularity, last entry forced to 1
  std::vector<std::int64_t> sizes_bytes;  ///< index f-1

  std::size_t n_files() const noexcept { return popularity.size(); }
};

struct LibraryConfig {
  std::size_t n_files = 1000;
  double zipf_alpha = 0.8;
  std::int64_t size_min_bytes = 500'000;
  std::int64_t size_max_bytes = 20'000'000;

  friend bool operator==(const LibraryConfig&, const LibraryConfig&) = default;
};

struct ArrivalConfig {
  double lambda_per_s = 2.0;
  double horizon_s = 600.0;
  std::uint64_t seed = 1;
};

struct Request {
  double arrival_time_s = 0.0;
  int user_id = 0;
  std::int64_t file_id = 1;
  std::int64_t size_bytes = 0;
  TrafficType traffic_type = TrafficType::eMBB;

  friend bool operator==(const Request&, const Request&) = default;
};

using RequestStream = std::vector<Request>;

/// Z * f^-alpha with Z = 1 / sum_i i^-alpha, f = 1..n_files.
std::vector<double> zipf_pmf(std::size_t n_files, double alpha);

/// Inverse-CDF draw; returns a 1-based file id.
std::int64_t sample_file(const ContentLibrary& library, Rng& rng);

/// I.i.d. uniform integer sizes on [size_min, size_max].
std::vector<std::int64_t> assign_file_sizes(std::size_t n_files, std::int64_t size_min,
                                            std::int64_t size_max, Rng& rng);

/// (lambda T)^r e^(-lambda T) / r!, evaluated in log space.
double poisson_pmf(std::int64_t r, double lambda, double t_interval);

/// Library with popularity from `cfg` and sizes from the "sizes" sub-stream of `seed`.
ContentLibrary make_library(const LibraryConfig& cfg, std::uint64_t seed);

/// Exponential inter-arrivals at rate lambda up to the horizon; each arrival picks a
/// user uniformly and a file by popularity. Arrival times, user picks and file
/// picks use separate sub-streams of cfg.seed.
RequestStream generate_requests(const ArrivalConfig& cfg, const ContentLibrary& library,
                                std::span<const int> user_ids,
                                TrafficType type = TrafficType::eMBB);

// CSV columns: arrival_time_s,user_id,file_id,size_bytes,traffic_type
void write_requests_csv(const RequestStream& stream, std::ostream& out);
void write_requests_csv(const RequestStream& stream, const std::filesystem::path& path);
RequestStream read_requests_csv(std::istream& in);
RequestStream read_requests_csv(const std::filesystem::path& path);

}  // namespace atsss::traffic
