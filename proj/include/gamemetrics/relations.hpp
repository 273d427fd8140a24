#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "gamemetrics/game.hpp"

namespace gamemetrics {

/// Binary relation over the states of one game, stored densely.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n, bool fill = false) : n_(n), bits_(n * n, fill ? 1 : 0) {}

  std::size_t size() const { return n_; }
  bool contains(State s, State t) const { return bits_[s * n_ + t] != 0; }
  void set(State s, State t, bool v = true) { bits_[s * n_ + t] = v ? 1 : 0; }

  std::vector<std::pair<State, State>> pairs() const {
    std::vector<std::pair<State, State>> out;
    for (State s = 0; s < n_; ++s)
      for (State t = 0; t < n_; ++t)
        if (contains(s, t)) out.emplace_back(s, t);
    return out;
  }

  bool is_reflexive() const {
    for (State s = 0; s < n_; ++s)
      if (!contains(s, s)) return false;
    return true;
  }

  bool is_transitive() const {
    for (State s = 0; s < n_; ++s)
      for (State u = 0; u < n_; ++u)
        if (contains(s, u))
          for (State t = 0; t < n_; ++t)
            if (contains(u, t) && !contains(s, t)) return false;
    return true;
  }

  bool operator==(const Relation&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<char> bits_;
};

/// Disjoint blocks covering every state. Blocks are ordered by their
/// lowest-indexed member and list members in increasing order.
class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<std::vector<State>> blocks) : blocks_(std::move(blocks)) {
    normalize();
  }

  /// Groups states by a per-state label.
  template <class Label>
  static Partition from_labels(const std::vector<Label>& labels) {
    std::vector<std::vector<State>> blocks;
    std::vector<Label> seen;
    for (State s = 0; s < labels.size(); ++s) {
      auto it = std::find(seen.begin(), seen.end(), labels[s]);
      if (it == seen.end()) {
        seen.push_back(labels[s]);
        blocks.push_back({s});
      } else {
        blocks[static_cast<std::size_t>(it - seen.begin())].push_back(s);
      }
    }
    return Partition(std::move(blocks));
  }

  const std::vector<std::vector<State>>& blocks() const { return blocks_; }
  std::size_t block_of(State s) const { return block_of_.at(s); }
  bool same_block(State s, State t) const { return block_of_.at(s) == block_of_.at(t); }
  std::size_t num_states() const { return block_of_.size(); }

  Relation as_relation() const {
    Relation r(block_of_.size());
    for (const auto& b : blocks_)
      for (State s : b)
        for (State t : b) r.set(s, t);
    return r;
  }

  bool operator==(const Partition& o) const { return blocks_ == o.blocks_; }

 private:
  void normalize() {
    for (auto& b : blocks_) std::sort(b.begin(), b.end());
    blocks_.erase(std::remove_if(blocks_.begin(), blocks_.end(),
                                 [](const auto& b) { return b.empty(); }),
                  blocks_.end());
    std::sort(blocks_.begin(), blocks_.end());
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.size();
    block_of_.assign(n, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      for (State s : blocks_[i]) {
        if (s >= n || block_of_[s] != static_cast<std::size_t>(-1))
          throw ContractError("partition blocks must be disjoint and cover 0..n-1");
        block_of_[s] = i;
      }
  }

  std::vector<std::vector<State>> blocks_;
  std::vector<std::size_t> block_of_;
};

/// Partition induced by an equivalence relation; throws if `r` is not one.
inline Partition partition_of(const Relation& r) {
  const std::size_t n = r.size();
  std::vector<std::size_t> label(n);
  for (State s = 0; s < n; ++s) {
    label[s] = s;
    for (State t = 0; t < s; ++t)
      if (r.contains(s, t)) {
        label[s] = label[t];
        break;
      }
  }
  Partition p = Partition::from_labels(label);
  if (!(p.as_relation() == r)) throw ContractError("relation is not an equivalence");
  return p;
}

}  // namespace gamemetrics
