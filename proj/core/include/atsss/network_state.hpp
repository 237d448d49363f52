// SPDX-License-Identifier: Apache-2.0
//
// Downlink queues per access node and per-user flows. Bytes move from a
// user's pending files into node queues as chunks; a chunk split for load
// balancing has one copy, a duplicated chunk has one copy per selected WAT
// and completes as soon as any copy has been fully served.
//
// Accounting per node is exact in integer bytes:
//   enqueued = served + dropped + flushed + queued.
#pragma once

#include <atsss/radio.hpp>
#include <atsss/steering.hpp>
#include <atsss/wat.hpp>

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace atsss::net {

inline constexpr std::int64_t kDefaultCapacityBytes = 50'000'000;
inline constexpr double kDefaultEfficiency = 0.6;

/// efficiency * B * log2(1 + SINR), capped at max_rate_bps. Returns 0 for SINR of -inf.
double serve_rate_bps(double sinr_db, double bandwidth_hz, double efficiency,
                      double max_rate_bps = std::numeric_limits<double>::infinity());

/// How one dispatch is spread over WATs.
struct Routing {
  bool duplicate = false;
  PerWat<double> weights;  ///< split shares when !duplicate
  PerWat<bool> selected;   ///< copies when duplicate

  bool empty() const noexcept;
};

/// LB decisions split by weight, SD decisions duplicate over the selection.
/// Degenerate decisions route everything to `fallback` (if any).
Routing routing_for(const steering::SteeringDecision& decision, std::optional<Wat> fallback);

/// Node index of the user's serving node per WAT, if any.
using ServingNodes = PerWat<std::optional<std::size_t>>;

struct Segment {
  std::uint64_t chunk_id = 0;
  std::int64_t length = 0;  ///< bytes accepted into this copy
  std::int64_t served = 0;

  std::int64_t remaining() const noexcept { return length - served; }
};

struct UserBacklog {
  std::deque<Segment> segments;
  std::int64_t bytes = 0;
};

struct NodeQueue {
  Wat wat = Wat::FiveG;
  int node_id = 0;
  std::int64_t capacity_bytes = kDefaultCapacityBytes;
  std::map<int, UserBacklog> per_user;  ///< only users with bytes queued
  std::int64_t total_queued_bytes = 0;

  std::int64_t enqueued_bytes = 0;  ///< offered to this node, including drops
  std::int64_t dropped_bytes = 0;   ///< rejected for lack of space
  std::int64_t served_bytes = 0;
  std::int64_t flushed_bytes = 0;   ///< removed unserved (duplicate residue, reclaimed)

  double buffer_pct() const noexcept {
    return 100.0 * static_cast<double>(total_queued_bytes) / static_cast<double>(capacity_bytes);
  }
  std::int64_t queued_bytes(int user) const noexcept;
};

inline constexpr std::int64_t kUntracked = -1;

struct PendingFile {
  std::int64_t seq = 0;
  std::int64_t file_id = 0;
  std::int64_t size_bytes = 0;
  std::int64_t undispatched = 0;
  std::int64_t delivered = 0;
  int outstanding_chunks = 0;
  double arrival_time_s = 0.0;
};

struct FlowState {
  int user_id = 0;
  std::map<std::int64_t, PendingFile> files;  ///< unfinished files in arrival order
  std::int64_t next_seq = 0;
  std::int64_t delivered_bytes = 0;
  std::int64_t completed_files = 0;

  std::int64_t backlog_bytes() const noexcept;
};

struct FlowCompletion {
  int user_id = 0;
  std::int64_t seq = 0;
  std::int64_t file_id = 0;
  std::int64_t size_bytes = 0;
  double arrival_time_s = 0.0;
  double completion_time_s = 0.0;

  friend bool operator==(const FlowCompletion&, const FlowCompletion&) = default;
};

struct EnqueueReport {
  PerWat<std::int64_t> accepted{};
  PerWat<std::int64_t> dropped{};
  std::int64_t returned = 0;  ///< bytes no copy could hold, handed back to the file
};

struct AdvanceReport {
  std::vector<std::int64_t> served_per_node;
  std::map<int, std::int64_t> delivered_per_user;  ///< unique bytes
  std::vector<FlowCompletion> completions;
};

struct Totals {
  std::int64_t enqueued = 0;
  std::int64_t dropped = 0;
  std::int64_t served = 0;
  std::int64_t flushed = 0;
  std::int64_t queued = 0;
  std::int64_t returned = 0;  ///< bytes sent back to user backlogs for re-dispatch

  bool balanced() const noexcept { return enqueued == served + dropped + flushed + queued; }
  friend bool operator==(const Totals&, const Totals&) = default;
};

class NetworkState {
 public:
  NetworkState(std::span<const radio::AccessNode> nodes, const PerWat<std::int64_t>& capacity_bytes);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  const NodeQueue& node(std::size_t index) const { return nodes_.at(index); }
  std::optional<std::size_t> node_index(Wat wat, int node_id) const;

  /// Rate the node achieves for this user when scheduled (bps).
  void set_link_rate(int user, std::size_t node, double rate_bps);
  double link_rate(int user, std::size_t node) const noexcept;

  /// Queues a new file behind the user's existing ones; returns its sequence number.
  std::int64_t add_file(int user, std::int64_t file_id, std::int64_t size_bytes, double arrival_time_s);

  /// Places `bytes` into serving-node queues per `routing`. Bytes beyond a
  /// node's free space are dropped and counted. `file_seq` ties the chunks to
  /// a pending file of the user, or kUntracked.
  EnqueueReport enqueue(int user, std::int64_t bytes, const Routing& routing, const ServingNodes& serving,
                        std::int64_t file_seq = kUntracked);

  /// Moves up to `budget_bytes` from the user's pending files into node queues.
  /// Returns the bytes taken from the files.
  std::int64_t dispatch(int user, std::int64_t budget_bytes, const Routing& routing, const ServingNodes& serving);

  /// Serves every node for dt seconds with equal time shares among its
  /// backlogged users. `now_s` is the time at the end of the step.
  AdvanceReport advance(double dt_s, double now_s);

  /// Removes the user's queued copies from a node (e.g. the link was lost);
  /// bytes that no other copy can deliver go back to the user's files.
  void reclaim(int user, std::size_t node);

  /// Queue-drain delay estimate for the user at this node, capped at cap_ms.
  /// Infinite drain (zero rate with bytes queued) reports the cap.
  double user_delay_ms(int user, std::size_t node, std::int64_t probe_bytes, double cap_ms) const;

  const FlowState* flow(int user) const;
  Totals totals() const noexcept;

 private:
  struct Copy {
    std::size_t node = 0;
    std::int64_t length = 0;
  };
  struct Chunk {
    int user = 0;
    std::int64_t file_seq = kUntracked;
    std::int64_t size = 0;
    std::int64_t delivered = 0;
    std::vector<Copy> copies;
  };

  FlowState& flow_mut(int user);
  void credit_delivery(Chunk& chunk, std::int64_t served_prefix, AdvanceReport* report);
  /// Drops copy bookkeeping for `node` and settles the chunk; returns true if the chunk is gone.
  bool retire_copy(std::uint64_t chunk_id, std::size_t node, double now_s, AdvanceReport* report);
  void finish_chunk(std::uint64_t chunk_id, double now_s, AdvanceReport* report);
  void remove_segment(std::size_t node, int user, std::uint64_t chunk_id);
  void maybe_complete_file(int user, std::int64_t seq, double now_s, AdvanceReport* report);

  std::vector<NodeQueue> nodes_;
  std::map<std::pair<Wat, int>, std::size_t> index_;
  std::map<std::pair<int, std::size_t>, double> rates_;
  std::map<int, FlowState> flows_;
  std::unordered_map<std::uint64_t, Chunk> chunks_;
  std::uint64_t next_chunk_ = 1;
  std::int64_t returned_ = 0;
};

}  // namespace atsss::net
