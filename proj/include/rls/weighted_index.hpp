#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rls/rng.hpp"

namespace rls {

/// Dynamic weighted sampler over integer weights: a complete binary tree of
/// partial sums. sample() and update() are O(log n).
class WeightedIndex {
 public:
  explicit WeightedIndex(std::span<const std::int64_t> weights) {
    size_ = weights.size();
    if (size_ == 0) throw std::invalid_argument("WeightedIndex: empty weights");
    cap_ = 1;
    while (cap_ < size_) cap_ <<= 1;
    tree_.assign(2 * cap_, 0);
    for (std::size_t i = 0; i < size_; ++i) {
      if (weights[i] < 0)
        throw std::invalid_argument("WeightedIndex: negative weight");
      tree_[cap_ + i] = weights[i];
    }
    for (std::size_t i = cap_ - 1; i >= 1; --i)
      tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
  }

  std::size_t size() const { return size_; }
  std::int64_t total() const { return tree_[1]; }
  std::int64_t weight(std::size_t i) const { return tree_[cap_ + i]; }

  void update(std::size_t i, std::int64_t delta) {
    if (i >= size_) throw std::out_of_range("WeightedIndex::update: bad index");
    if (tree_[cap_ + i] + delta < 0)
      throw std::invalid_argument("WeightedIndex::update: weight would go negative");
    for (std::size_t p = cap_ + i; p >= 1; p >>= 1) tree_[p] += delta;
  }

  void set(std::size_t i, std::int64_t w) { update(i, w - weight(i)); }

  /// Index of the bucket containing prefix position r, r in [0, total).
  std::size_t locate(std::int64_t r) const {
    if (r < 0 || r >= total())
      throw std::out_of_range("WeightedIndex::locate: position out of range");
    std::size_t p = 1;
    while (p < cap_) {
      p <<= 1;
      if (r >= tree_[p]) {
        r -= tree_[p];
        p |= 1;
      }
    }
    return p - cap_;
  }

  /// Index i with probability weight(i)/total().
  std::size_t sample(RngStream& rng) const {
    if (total() <= 0)
      throw std::runtime_error("WeightedIndex::sample: total weight is zero");
    return locate(static_cast<std::int64_t>(
        rng.uniform_below(static_cast<std::uint64_t>(total()))));
  }

 private:
  std::size_t size_ = 0;
  std::size_t cap_ = 1;
  std::vector<std::int64_t> tree_;
};

/// Uniform bin choice, kept next to the weighted sampler so the engine draws
/// through one interface.
inline std::size_t sample_uniform_bin(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_uniform_bin: n must be > 0");
  return static_cast<std::size_t>(rng.uniform_below(n));
}

}  // namespace rls
