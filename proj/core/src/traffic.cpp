// SPDX-License-Identifier: Apache-2.0
#include "atsss/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "atsss/error.hpp"
#include "text_util.hpp"

namespace atsss::traffic {

std::string_view to_string(TrafficType t) noexcept { return t == TrafficType::eMBB ? "eMBB" : "URLLC"; }

TrafficType parse_traffic_type(std::string_view s) {
  if (s == "eMBB") return TrafficType::eMBB;
  if (s == "URLLC") return TrafficType::URLLC;
  throw InvalidArgument(fmt::format("unknown traffic type '{}'", s));
}

std::vector<double> zipf_pmf(std::size_t n_files, double alpha) {
  if (n_files == 0) throw InvalidArgument("zipf_pmf: library must hold at least one file");
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw InvalidArgument(fmt::format("zipf_pmf: alpha must be finite and >= 0 (got {})", alpha));
  std::vector<double> p(n_files);
  for (std::size_t f = 0; f < n_files; ++f) p[f] = std::pow(static_cast<double>(f + 1), -alpha);
  // Sum smallest terms first.
  double norm = 0.0;
  for (std::size_t f = n_files; f-- > 0;) norm += p[f];
  for (auto& v : p) v /= norm;
  return p;
}

std::int64_t sample_file(const ContentLibrary& library, Rng& rng) {
  const double u = rng.uniform01();
  auto it = std::upper_bound(library.cdf.begin(), library.cdf.end(), u);
  if (it == library.cdf.end()) --it;
  return static_cast<std::int64_t>(it - library.cdf.begin()) + 1;
}

std::vector<std::int64_t> assign_file_sizes(std::size_t n_files, std::int64_t size_min,
                                            std::int64_t size_max, Rng& rng) {
  if (size_min <= 0) throw InvalidArgument(fmt::format("file size minimum must be > 0 (got {})", size_min));
  if (size_max < size_min)
    throw InvalidArgument(fmt::format("file size bounds inverted: [{}, {}]", size_min, size_max));
  std::vector<std::int64_t> sizes(n_files);
  for (auto& s : sizes) s = rng.between(size_min, size_max);
  return sizes;
}

double poisson_pmf(std::int64_t r, double lambda, double t_interval) {
  if (r < 0) throw InvalidArgument(fmt::format("poisson_pmf: event count must be >= 0 (got {})", r));
  const double mu = lambda * t_interval;
  if (!std::isfinite(mu) || mu < 0.0)
    throw InvalidArgument(fmt::format("poisson_pmf: lambda*T must be finite and >= 0 (got {})", mu));
  if (mu == 0.0) return r == 0 ? 1.0 : 0.0;
  const double rr = static_cast<double>(r);
  return std::exp(rr * std::log(mu) - mu - std::lgamma(rr + 1.0));
}

ContentLibrary make_library(const LibraryConfig& cfg, std::uint64_t seed) {
  ContentLibrary lib;
  lib.zipf_alpha = cfg.zipf_alpha;
  lib.popularity = zipf_pmf(cfg.n_files, cfg.zipf_alpha);
  lib.cdf.resize(lib.popularity.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < lib.popularity.size(); ++i) {
    acc += lib.popularity[i];
    lib.cdf[i] = acc;
  }
  lib.cdf.back() = 1.0;
  Rng size_rng(derive_seed(seed, "sizes"));
  lib.sizes_bytes = assign_file_sizes(cfg.n_files, cfg.size_min_bytes, cfg.size_max_bytes, size_rng);
  return lib;
}

RequestStream generate_requests(const ArrivalConfig& cfg, const ContentLibrary& library,
                                std::span<const int> user_ids, TrafficType type) {
  if (user_ids.empty()) throw InvalidArgument("generate_requests: user list is empty");
  if (!(cfg.lambda_per_s > 0.0) || !std::isfinite(cfg.lambda_per_s))
    throw InvalidArgument(fmt::format("arrival rate must be finite and > 0 (got {})", cfg.lambda_per_s));
  Rng arrivals(derive_seed(cfg.seed, "arrivals"));
  Rng users(derive_seed(cfg.seed, "users"));
  Rng files(derive_seed(cfg.seed, "files"));
  RequestStream out;
  double t = 0.0;
  while (true) {
    t += arrivals.exponential(cfg.lambda_per_s);
    if (!(t <= cfg.horizon_s)) break;
    Request r;
    r.arrival_time_s = t;
    r.user_id = user_ids[users.below(user_ids.size())];
    r.file_id = sample_file(library, files);
    r.size_bytes = library.sizes_bytes[static_cast<std::size_t>(r.file_id - 1)];
    r.traffic_type = type;
    out.push_back(r);
  }
  return out;
}

void write_requests_csv(const RequestStream& stream, std::ostream& out) {
  out << "arrival_time_s,user_id,file_id,size_bytes,traffic_type\n";
  for (const auto& r : stream) {
    out << detail::format_exact(r.arrival_time_s) << ',' << r.user_id << ',' << r.file_id << ','
        << r.size_bytes << ',' << to_string(r.traffic_type) << '\n';
  }
}

void write_requests_csv(const RequestStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  write_requests_csv(stream, out);
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

RequestStream read_requests_csv(std::istream& in) {
  RequestStream out;
  std::string line;
  if (!std::getline(in, line)) throw IoError("request CSV is empty (header missing)");
  if (detail::trim_cr(line) != "arrival_time_s,user_id,file_id,size_bytes,traffic_type")
    throw IoError("request CSV header mismatch: '" + line + "'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 5) throw IoError(fmt::format("request CSV line {}: expected 5 fields", lineno));
    try {
      Request r;
      r.arrival_time_s = detail::parse_double(f[0]);
      r.user_id = static_cast<int>(detail::parse_int(f[1]));
      r.file_id = detail::parse_int(f[2]);
      r.size_bytes = detail::parse_int(f[3]);
      r.traffic_type = parse_traffic_type(f[4]);
      if (!out.empty() && r.arrival_time_s < out.back().arrival_time_s)
        throw IoError("arrival times must be non-decreasing");
      out.push_back(r);
    } catch (const Error& e) {
      throw IoError(fmt::format("request CSV line {}: {}", lineno, e.what()));
    }
  }
  return out;
}

RequestStream read_requests_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return read_requests_csv(in);
}

}  // namespace atsss::traffic
