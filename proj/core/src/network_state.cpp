// SPDX-License-Identifier: Apache-2.0
#include "atsss/network_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "atsss/error.hpp"

namespace atsss::net {

double serve_rate_bps(double sinr_db, double bandwidth_hz, double efficiency, double max_rate_bps) {
  if (!(bandwidth_hz > 0.0)) throw InvalidArgument(fmt::format("bandwidth must be > 0 (got {})", bandwidth_hz));
  if (!std::isfinite(sinr_db)) return sinr_db > 0 ? max_rate_bps : 0.0;
  const double rate = efficiency * bandwidth_hz * std::log2(1.0 + std::pow(10.0, sinr_db / 10.0));
  return std::min(rate, max_rate_bps);
}

bool Routing::empty() const noexcept {
  for (Wat w : kAllWats)
    if (duplicate ? selected[w] : weights[w] > 0.0) return false;
  return true;
}

Routing routing_for(const steering::SteeringDecision& decision, std::optional<Wat> fallback) {
  Routing r;
  r.duplicate = decision.mode == steering::SteeringMode::SplitDuplicate;
  if (!decision.degenerate) {
    r.weights = decision.lb_weights;
    r.selected = decision.sd_selection;
    return r;
  }
  if (fallback) {
    r.weights[*fallback] = 100.0;
    r.selected[*fallback] = true;
  }
  return r;
}

std::int64_t NodeQueue::queued_bytes(int user) const noexcept {
  auto it = per_user.find(user);
  return it == per_user.end() ? 0 : it->second.bytes;
}

std::int64_t FlowState::backlog_bytes() const noexcept {
  std::int64_t b = 0;
  for (const auto& [seq, f] : files) b += f.undispatched;
  return b;
}

NetworkState::NetworkState(std::span<const radio::AccessNode> nodes, const PerWat<std::int64_t>& capacity_bytes) {
  nodes_.reserve(nodes.size());
  for (const auto& n : nodes) {
    if (capacity_bytes[n.wat] <= 0)
      throw InvalidArgument(fmt::format("{} buffer capacity must be > 0", to_string(n.wat)));
    NodeQueue q;
    q.wat = n.wat;
    q.node_id = n.node_id;
    q.capacity_bytes = capacity_bytes[n.wat];
    if (!index_.emplace(std::pair{n.wat, n.node_id}, nodes_.size()).second)
      throw InvalidArgument(fmt::format("duplicate {} node id {}", to_string(n.wat), n.node_id));
    nodes_.push_back(std::move(q));
  }
}

std::optional<std::size_t> NetworkState::node_index(Wat wat, int node_id) const {
  auto it = index_.find({wat, node_id});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void NetworkState::set_link_rate(int user, std::size_t node, double rate_bps) {
  rates_[{user, node}] = std::max(0.0, rate_bps);
}

double NetworkState::link_rate(int user, std::size_t node) const noexcept {
  auto it = rates_.find({user, node});
  return it == rates_.end() ? 0.0 : it->second;
}

FlowState& NetworkState::flow_mut(int user) {
  auto [it, inserted] = flows_.try_emplace(user);
  if (inserted) it->second.user_id = user;
  return it->second;
}

const FlowState* NetworkState::flow(int user) const {
  auto it = flows_.find(user);
  return it == flows_.end() ? nullptr : &it->second;
}

std::int64_t NetworkState::add_file(int user, std::int64_t file_id, std::int64_t size_bytes, double arrival_time_s) {
  if (size_bytes <= 0) throw InvalidArgument(fmt::format("file size must be > 0 (got {})", size_bytes));
  auto& fs = flow_mut(user);
  PendingFile f;
  f.seq = fs.next_seq++;
  f.file_id = file_id;
  f.size_bytes = size_bytes;
  f.undispatched = size_bytes;
  f.arrival_time_s = arrival_time_s;
  fs.files.emplace(f.seq, f);
  return f.seq;
}

EnqueueReport NetworkState::enqueue(int user, std::int64_t bytes, const Routing& routing, const ServingNodes& serving,
                                    std::int64_t file_seq) {
  EnqueueReport rep;
  if (bytes <= 0) return rep;

  PendingFile* file = nullptr;
  if (file_seq != kUntracked) {
    auto& fs = flow_mut(user);
    auto it = fs.files.find(file_seq);
    if (it == fs.files.end()) throw InvalidArgument(fmt::format("user {} has no pending file #{}", user, file_seq));
    file = &it->second;
  }

  auto offer = [&](Wat w, std::int64_t amount) -> std::int64_t {
    auto& q = nodes_[*serving[w]];
    const std::int64_t accepted = std::clamp<std::int64_t>(q.capacity_bytes - q.total_queued_bytes, 0, amount);
    q.enqueued_bytes += amount;
    q.dropped_bytes += amount - accepted;
    rep.accepted[w] += accepted;
    rep.dropped[w] += amount - accepted;
    return accepted;
  };
  auto place = [&](std::uint64_t id, Wat w, std::int64_t length) {
    auto& q = nodes_[*serving[w]];
    auto& b = q.per_user[user];
    b.segments.push_back(Segment{id, length, 0});
    b.bytes += length;
    q.total_queued_bytes += length;
  };
  auto new_chunk = [&](std::int64_t size) {
    const auto id = next_chunk_++;
    auto& c = chunks_[id];
    c.user = user;
    c.file_seq = file_seq;
    c.size = size;
    if (file) ++file->outstanding_chunks;
    return id;
  };

  std::int64_t placed = 0;
  if (routing.duplicate) {
    PerWat<std::int64_t> acc{};
    for (Wat w : kAllWats)
      if (routing.selected[w] && serving[w]) acc[w] = offer(w, bytes);
    const std::int64_t longest = *std::max_element(acc.begin(), acc.end());
    if (longest > 0) {
      const auto id = new_chunk(longest);
      for (Wat w : kAllWats) {
        if (acc[w] <= 0) continue;
        place(id, w, acc[w]);
        chunks_[id].copies.push_back(Copy{*serving[w], acc[w]});
      }
    }
    placed = longest;
  } else {
    PerWat<double> share{};
    double total = 0.0;
    for (Wat w : kAllWats)
      if (routing.weights[w] > 0.0 && serving[w]) {
        share[w] = routing.weights[w];
        total += share[w];
      }
    if (total > 0.0) {
      // Largest-remainder split so the parts add up to `bytes` exactly.
      PerWat<std::int64_t> part{};
      PerWat<double> rem{};
      std::int64_t given = 0;
      for (Wat w : kAllWats) {
        const double exact = static_cast<double>(bytes) * share[w] / total;
        part[w] = static_cast<std::int64_t>(std::floor(exact));
        rem[w] = exact - static_cast<double>(part[w]);
        given += part[w];
      }
      std::array<Wat, kWatCount> order = kAllWats;
      std::stable_sort(order.begin(), order.end(), [&](Wat a, Wat b) { return rem[a] > rem[b]; });
      for (std::size_t i = 0; given < bytes; ++i) {
        const Wat w = order[i % kWatCount];
        if (share[w] > 0.0) {
          ++part[w];
          ++given;
        }
      }
      for (Wat w : kAllWats) {
        if (part[w] <= 0) continue;
        const std::int64_t acc = offer(w, part[w]);
        if (acc <= 0) continue;
        const auto id = new_chunk(acc);
        place(id, w, acc);
        chunks_[id].copies.push_back(Copy{*serving[w], acc});
        placed += acc;
      }
    }
  }

  rep.returned = bytes - placed;
  if (file && rep.returned > 0) {
    file->undispatched += rep.returned;
    returned_ += rep.returned;
  }
  return rep;
}

std::int64_t NetworkState::dispatch(int user, std::int64_t budget_bytes, const Routing& routing,
                                    const ServingNodes& serving) {
  auto fit = flows_.find(user);
  if (fit == flows_.end() || budget_bytes <= 0 || routing.empty()) return 0;
  std::vector<std::int64_t> seqs;
  for (const auto& [seq, f] : fit->second.files)
    if (f.undispatched > 0) seqs.push_back(seq);
  std::int64_t taken = 0;
  for (auto seq : seqs) {
    if (budget_bytes <= 0) break;
    auto& f = fit->second.files.at(seq);
    const std::int64_t take = std::min(budget_bytes, f.undispatched);
    f.undispatched -= take;
    budget_bytes -= take;
    taken += take;
    enqueue(user, take, routing, serving, seq);
  }
  return taken;
}

void NetworkState::credit_delivery(Chunk& chunk, std::int64_t served_prefix, AdvanceReport* report) {
  if (served_prefix <= chunk.delivered) return;
  const std::int64_t delta = served_prefix - chunk.delivered;
  chunk.delivered = served_prefix;
  if (report) report->delivered_per_user[chunk.user] += delta;
  if (chunk.file_seq == kUntracked) return;
  auto& fs = flow_mut(chunk.user);
  fs.delivered_bytes += delta;
  auto it = fs.files.find(chunk.file_seq);
  if (it != fs.files.end()) it->second.delivered += delta;
}

void NetworkState::remove_segment(std::size_t node, int user, std::uint64_t chunk_id) {
  auto& q = nodes_[node];
  auto uit = q.per_user.find(user);
  if (uit == q.per_user.end()) return;
  auto& segs = uit->second.segments;
  auto sit = std::find_if(segs.begin(), segs.end(), [&](const Segment& s) { return s.chunk_id == chunk_id; });
  if (sit == segs.end()) return;
  const std::int64_t left = sit->remaining();
  q.flushed_bytes += left;
  q.total_queued_bytes -= left;
  uit->second.bytes -= left;
  segs.erase(sit);
  if (segs.empty()) q.per_user.erase(uit);
}

void NetworkState::maybe_complete_file(int user, std::int64_t seq, double now_s, AdvanceReport* report) {
  auto& fs = flow_mut(user);
  auto it = fs.files.find(seq);
  if (it == fs.files.end()) return;
  const auto& f = it->second;
  if (f.undispatched > 0 || f.outstanding_chunks > 0) return;
  if (f.delivered != f.size_bytes)
    throw SimulationError(fmt::format("user {} file #{}: settled with {} of {} bytes delivered", user, seq,
                                      f.delivered, f.size_bytes));
  if (report) report->completions.push_back(FlowCompletion{user, f.seq, f.file_id, f.size_bytes, f.arrival_time_s, now_s});
  ++fs.completed_files;
  fs.files.erase(it);
}

void NetworkState::finish_chunk(std::uint64_t chunk_id, double now_s, AdvanceReport* report) {
  auto cit = chunks_.find(chunk_id);
  if (cit == chunks_.end()) return;
  const Chunk chunk = std::move(cit->second);
  chunks_.erase(cit);
  for (const auto& c : chunk.copies) remove_segment(c.node, chunk.user, chunk_id);
  if (chunk.file_seq == kUntracked) return;
  auto& fs = flow_mut(chunk.user);
  auto fit = fs.files.find(chunk.file_seq);
  if (fit == fs.files.end()) return;
  --fit->second.outstanding_chunks;
  maybe_complete_file(chunk.user, chunk.file_seq, now_s, report);
}

bool NetworkState::retire_copy(std::uint64_t chunk_id, std::size_t node, double now_s, AdvanceReport* report) {
  auto cit = chunks_.find(chunk_id);
  if (cit == chunks_.end()) return true;
  auto& chunk = cit->second;
  std::erase_if(chunk.copies, [&](const Copy& c) { return c.node == node; });
  std::int64_t reachable = chunk.delivered;
  for (const auto& c : chunk.copies) reachable = std::max(reachable, c.length);
  if (reachable < chunk.size) {
    const std::int64_t lost = chunk.size - reachable;
    chunk.size = reachable;
    if (chunk.file_seq != kUntracked) {
      auto& fs = flow_mut(chunk.user);
      if (auto fit = fs.files.find(chunk.file_seq); fit != fs.files.end()) {
        fit->second.undispatched += lost;
        returned_ += lost;
      }
    }
  }
  if (chunk.delivered == chunk.size) {
    finish_chunk(chunk_id, now_s, report);
    return true;
  }
  return false;
}

AdvanceReport NetworkState::advance(double dt_s, double now_s) {
  if (!(dt_s > 0.0)) throw InvalidArgument(fmt::format("advance: dt must be > 0 (got {})", dt_s));
  AdvanceReport rep;
  rep.served_per_node.assign(nodes_.size(), 0);
  std::vector<int> users;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].per_user.empty()) continue;
    users.clear();
    for (const auto& [u, b] : nodes_[i].per_user) users.push_back(u);
    const double n = static_cast<double>(users.size());
    for (int u : users) {
      const double rate = link_rate(u, i);
      auto quota = static_cast<std::int64_t>(std::floor(rate * dt_s / (8.0 * n)));
      while (quota > 0) {
        auto& q = nodes_[i];
        auto uit = q.per_user.find(u);
        if (uit == q.per_user.end()) break;
        auto& seg = uit->second.segments.front();
        const std::int64_t b = std::min(quota, seg.remaining());
        seg.served += b;
        uit->second.bytes -= b;
        q.total_queued_bytes -= b;
        q.served_bytes += b;
        rep.served_per_node[i] += b;
        quota -= b;
        const auto id = seg.chunk_id;
        const bool done = seg.remaining() == 0;
        if (auto cit = chunks_.find(id); cit != chunks_.end()) credit_delivery(cit->second, seg.served, &rep);
        if (done) {
          uit->second.segments.pop_front();
          if (uit->second.segments.empty()) q.per_user.erase(uit);
          retire_copy(id, i, now_s, &rep);
        }
      }
    }
  }
  return rep;
}

void NetworkState::reclaim(int user, std::size_t node) {
  auto& q = nodes_.at(node);
  auto uit = q.per_user.find(user);
  if (uit == q.per_user.end()) return;
  std::vector<std::uint64_t> ids;
  for (const auto& s : uit->second.segments) ids.push_back(s.chunk_id);
  for (auto id : ids) {
    remove_segment(node, user, id);
    retire_copy(id, node, 0.0, nullptr);
  }
}

double NetworkState::user_delay_ms(int user, std::size_t node, std::int64_t probe_bytes, double cap_ms) const {
  const auto& q = nodes_.at(node);
  const double rate = link_rate(user, node);
  if (!(rate > 0.0)) return cap_ms;
  const double own = static_cast<double>(q.queued_bytes(user)) * 8.0 / rate;
  const double horizon = own + static_cast<double>(probe_bytes) * 8.0 / rate;
  double total = own;
  for (const auto& [v, b] : q.per_user) {
    if (v == user) continue;
    const double rv = link_rate(v, node);
    const double tv = rv > 0.0 ? static_cast<double>(b.bytes) * 8.0 / rv : horizon;
    total += std::min(tv, horizon);
  }
  return std::min(total * 1000.0, cap_ms);
}

Totals NetworkState::totals() const noexcept {
  Totals t;
  for (const auto& q : nodes_) {
    t.enqueued += q.enqueued_bytes;
    t.dropped += q.dropped_bytes;
    t.served += q.served_bytes;
    t.flushed += q.flushed_bytes;
    t.queued += q.total_queued_bytes;
  }
  t.returned = returned_;
  return t;
}

}  // namespace atsss::net
