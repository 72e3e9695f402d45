#ifndef NERO_INDIVIDUAL_SET_HPP
#define NERO_INDIVIDUAL_SET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace nero {

using IndividualId = std::uint32_t;

/// Fixed-universe bitset over dense individual indices [0, universe).
class IndividualSet {
 public:
  IndividualSet() = default;
  explicit IndividualSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}
  IndividualSet(std::size_t universe, std::initializer_list<IndividualId> members) : IndividualSet(universe) {
    for (auto id : members) insert(id);
  }

  static IndividualSet full(std::size_t universe) {
    IndividualSet s(universe);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.trim();
    return s;
  }

  template <typename Range>
  static IndividualSet from_range(std::size_t universe, const Range& ids) {
    IndividualSet s(universe);
    for (auto id : ids) s.insert(static_cast<IndividualId>(id));
    return s;
  }

  std::size_t universe() const { return universe_; }

  bool contains(IndividualId id) const { return (words_[id >> 6] >> (id & 63)) & 1U; }
  void insert(IndividualId id) { words_[id >> 6] |= std::uint64_t{1} << (id & 63); }
  void erase(IndividualId id) { words_[id >> 6] &= ~(std::uint64_t{1} << (id & 63)); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  IndividualSet& operator&=(const IndividualSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  IndividualSet& operator|=(const IndividualSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  /// Set difference.
  IndividualSet& operator-=(const IndividualSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  IndividualSet complement() const {
    IndividualSet s(*this);
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  friend IndividualSet operator&(IndividualSet a, const IndividualSet& b) { return a &= b; }
  friend IndividualSet operator|(IndividualSet a, const IndividualSet& b) { return a |= b; }
  friend IndividualSet operator-(IndividualSet a, const IndividualSet& b) { return a -= b; }

  std::size_t intersection_count(const IndividualSet& o) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) n += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return n;
  }
  bool intersects(const IndividualSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  bool is_subset_of(const IndividualSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  /// Calls f(id) for each member in ascending index order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w != 0) {
        const int bit = std::countr_zero(w);
        f(static_cast<IndividualId>(i * 64 + static_cast<std::size_t>(bit)));
        w &= w - 1;
      }
    }
  }

  std::vector<IndividualId> to_vector() const {
    std::vector<IndividualId> out;
    out.reserve(count());
    for_each([&](IndividualId id) { out.push_back(id); });
    return out;
  }

  std::size_t hash() const {
    std::size_t h = std::hash<std::size_t>{}(universe_);
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  friend bool operator==(const IndividualSet&, const IndividualSet&) = default;

 private:
  void trim() {
    if (universe_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace nero

template <>
struct std::hash<nero::IndividualSet> {
  std::size_t operator()(const nero::IndividualSet& s) const noexcept { return s.hash(); }
};

#endif  // NERO_INDIVIDUAL_SET_HPP
