#pragma once

#include <cassert>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fxp {

// Dense subset of {0, ..., n-1}. Used both for feature subsets and for
// per-feature value subsets; universes are small (features, domain values).
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t universe) : bits_(universe, false) {}

  static IndexSet full(std::size_t universe) {
    IndexSet s(universe);
    s.bits_.assign(universe, true);
    s.count_ = universe;
    return s;
  }

  static IndexSet of(std::size_t universe, std::initializer_list<std::size_t> members) {
    IndexSet s(universe);
    for (std::size_t i : members) s.insert(i);
    return s;
  }

  static IndexSet of(std::size_t universe, std::span<const std::size_t> members) {
    IndexSet s(universe);
    for (std::size_t i : members) s.insert(i);
    return s;
  }

  std::size_t universe() const { return bits_.size(); }
  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(std::size_t i) const {
    assert(i < bits_.size());
    return bits_[i];
  }

  void insert(std::size_t i) {
    assert(i < bits_.size());
    if (!bits_[i]) {
      bits_[i] = true;
      ++count_;
    }
  }

  void erase(std::size_t i) {
    assert(i < bits_.size());
    if (bits_[i]) {
      bits_[i] = false;
      --count_;
    }
  }

  IndexSet with(std::size_t i) const {
    IndexSet s = *this;
    s.insert(i);
    return s;
  }

  IndexSet without(std::size_t i) const {
    IndexSet s = *this;
    s.erase(i);
    return s;
  }

  IndexSet complement() const {
    IndexSet s(universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (!bits_[i]) s.insert(i);
    }
    return s;
  }

  IndexSet intersect(const IndexSet& other) const {
    assert(universe() == other.universe());
    IndexSet s(universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] && other.bits_[i]) s.insert(i);
    }
    return s;
  }

  IndexSet unite(const IndexSet& other) const {
    assert(universe() == other.universe());
    IndexSet s(universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] || other.bits_[i]) s.insert(i);
    }
    return s;
  }

  bool intersects(const IndexSet& other) const {
    assert(universe() == other.universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] && other.bits_[i]) return true;
    }
    return false;
  }

  bool subset_of(const IndexSet& other) const {
    assert(universe() == other.universe());
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] && !other.bits_[i]) return false;
    }
    return true;
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out.push_back(i);
    }
    return out;
  }

  bool operator==(const IndexSet& other) const = default;

  // Orders by cardinality, then by members lexicographically. Canonical
  // ordering for reported set collections.
  std::strong_ordering operator<=>(const IndexSet& other) const {
    if (auto c = count_ <=> other.count_; c != 0) return c;
    for (std::size_t i = 0; i < bits_.size() && i < other.bits_.size(); ++i) {
      if (bits_[i] != other.bits_[i]) {
        return bits_[i] ? std::strong_ordering::less : std::strong_ordering::greater;
      }
    }
    return bits_.size() <=> other.bits_.size();
  }

 private:
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

}  // namespace fxp
