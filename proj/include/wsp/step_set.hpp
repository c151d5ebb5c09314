#ifndef WSP_STEP_SET_HPP
#define WSP_STEP_SET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "wsp/error.hpp"

namespace wsp {

using StepId = int;
using UserId = int;

inline constexpr int kMaxSteps = 30;

// A set of steps of one instance, stored as a bitmask. Steps are 0-based.
class StepSet {
 public:
  constexpr StepSet() = default;
  constexpr explicit StepSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr StepSet single(StepId s) { return StepSet(std::uint32_t{1} << s); }
  static constexpr StepSet all(int k) {
    return StepSet(k >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << k) - 1);
  }
  static StepSet of(std::initializer_list<StepId> steps) {
    StepSet out;
    for (StepId s : steps) out.insert(s);
    return out;
  }
  static StepSet of(const std::vector<StepId>& steps) {
    StepSet out;
    for (StepId s : steps) out.insert(s);
    return out;
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(StepId s) const { return (bits_ >> s) & 1u; }
  constexpr bool subset_of(StepSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(StepSet o) const { return (bits_ & o.bits_) != 0; }
  constexpr StepId lowest() const { return std::countr_zero(bits_); }

  constexpr void insert(StepId s) { bits_ |= std::uint32_t{1} << s; }
  constexpr void erase(StepId s) { bits_ &= ~(std::uint32_t{1} << s); }

  constexpr StepSet operator|(StepSet o) const { return StepSet(bits_ | o.bits_); }
  constexpr StepSet operator&(StepSet o) const { return StepSet(bits_ & o.bits_); }
  constexpr StepSet operator-(StepSet o) const { return StepSet(bits_ & ~o.bits_); }
  constexpr StepSet& operator|=(StepSet o) { bits_ |= o.bits_; return *this; }
  constexpr StepSet& operator&=(StepSet o) { bits_ &= o.bits_; return *this; }
  constexpr StepSet& operator-=(StepSet o) { bits_ &= ~o.bits_; return *this; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) fn(StepId(std::countr_zero(b)));
  }

  std::vector<StepId> to_vector() const {
    std::vector<StepId> out;
    for_each([&](StepId s) { out.push_back(s); });
    return out;
  }

  friend constexpr bool operator==(StepSet, StepSet) = default;
  friend constexpr auto operator<=>(StepSet a, StepSet b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

// Calls fn on every subset of mask, in increasing numeric order.
template <class Fn>
void for_each_submask(std::uint32_t mask, Fn&& fn) {
  std::uint32_t sub = 0;
  while (true) {
    fn(sub);
    if (sub == mask) break;
    sub = (sub - mask) & mask;
  }
}

// Enumerates every subset of `candidates` that contains `chosen` and has no
// two members in conflict. conf[i] is the conflict mask of step i. Stops early
// when fn returns true; the return value says whether it stopped.
template <class Fn>
bool for_each_conflict_free(std::uint32_t chosen, std::uint32_t candidates,
                            const std::uint32_t* conf, Fn& fn) {
  if (fn(chosen)) return true;
  while (candidates != 0) {
    std::uint32_t b = candidates & (~candidates + 1);
    candidates ^= b;
    if (for_each_conflict_free(chosen | b, candidates & ~conf[std::countr_zero(b)], conf, fn))
      return true;
  }
  return false;
}

// One bit per subset of a k-element ground set.
class SubsetTable {
 public:
  SubsetTable() = default;
  explicit SubsetTable(int k, bool fill = false) : k_(k) {
    if (k < 0 || k > kMaxSteps) throw Error(ErrorCode::StepLimitExceeded, "subset table width");
    std::size_t words = ((std::size_t{1} << k) + 63) / 64;
    words_.assign(words, fill ? ~std::uint64_t{0} : 0);
    trim();
  }

  int width() const { return k_; }
  std::size_t size() const { return std::size_t{1} << k_; }

  bool test(std::uint32_t s) const { return (words_[s >> 6] >> (s & 63)) & 1u; }
  void set(std::uint32_t s) { words_[s >> 6] |= std::uint64_t{1} << (s & 63); }
  void reset(std::uint32_t s) { words_[s >> 6] &= ~(std::uint64_t{1} << (s & 63)); }

  SubsetTable& operator&=(const SubsetTable& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  std::size_t count() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) total += std::popcount(w);
    return total;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const SubsetTable&, const SubsetTable&) = default;

 private:
  void trim() {
    if (k_ < 6 && !words_.empty()) words_[0] &= (std::uint64_t{1} << (std::size_t{1} << k_)) - 1;
  }

  int k_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace wsp

#endif
