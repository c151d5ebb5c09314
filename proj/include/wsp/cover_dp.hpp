#ifndef WSP_COVER_DP_HPP
#define WSP_COVER_DP_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/step_set.hpp"

namespace wsp {

struct DpStats {
  std::uint64_t subsets_visited = 0;
  std::uint64_t blocks_solved = 0;
};

// A class of interchangeable agents (users with equal authorization rows, or
// child blocks with equal tables). Each member takes one feasible set.
struct AgentGroup {
  const SubsetTable* feasible = nullptr;
  std::uint32_t allowed = 0;                         // every feasible set lies inside
  const std::vector<std::uint32_t>* conflicts = nullptr;  // no feasible set holds a conflicting pair
  std::vector<int> members;

  int multiplicity() const {
    return std::min<int>(int(members.size()), std::popcount(allowed));
  }
};

// Exact cover of subsets of the ground set by feasible sets taken by
// distinct agents. reach[T] is 1 + the least number of leading groups that
// can cover T exactly, or 0 when no assignment covers T.
class ExactCoverDp {
 public:
  ExactCoverDp(int k, std::vector<AgentGroup> groups, DpStats* stats = nullptr)
      : k_(k), groups_(std::move(groups)), stats_(stats) {
    if (groups_.size() > 65000) throw Error(ErrorCode::InvalidArgument, "too many agent groups");
    std::stable_sort(groups_.begin(), groups_.end(), [](const AgentGroup& a, const AgentGroup& b) {
      return std::popcount(a.allowed) > std::popcount(b.allowed);
    });
  }

  void run() {
    std::size_t size = std::size_t{1} << k_;
    reach_.assign(size, 0);
    reach_[0] = 1;
    cnt_.assign(groups_.size(), {});
    std::uint64_t visits = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const AgentGroup& grp = groups_[g];
      int m = grp.multiplicity();
      if (m == 0) continue;
      if (m >= 2) build_counts(g, visits);
      std::uint16_t limit = std::uint16_t(g + 1);
      std::uint16_t mark = std::uint16_t(g + 2);
      if (g == 0) {
        for_each_submask(grp.allowed, [&](std::uint32_t t) {
          ++visits;
          if (t != 0 && fits(g, t)) reach_[t] = mark;
        });
        continue;
      }
      const std::uint32_t* conf = grp.conflicts->data();
      for (std::uint32_t t = 1; t < size; ++t) {
        if (reach_[t] != 0) continue;
        std::uint32_t avail = t & grp.allowed;
        if (avail == 0) continue;
        bool found = false;
        if (m == 1) {
          auto fn = [&](std::uint32_t a) {
            ++visits;
            if (a == 0 || !grp.feasible->test(a)) return false;
            std::uint16_t r = reach_[t ^ a];
            return found = (r != 0 && r <= limit);
          };
          for_each_conflict_free(0, avail, conf, fn);
        } else {
          for (std::uint32_t a = avail; a != 0; a = (a - 1) & avail) {
            ++visits;
            if (cnt_[g][a] > m) continue;
            std::uint16_t r = reach_[t ^ a];
            if (r != 0 && r <= limit) { found = true; break; }
          }
        }
        if (found) reach_[t] = mark;
      }
    }
    if (stats_) stats_->subsets_visited += visits;
  }

  bool reachable(std::uint32_t t) const { return reach_[t] != 0; }
  std::uint16_t reach(std::uint32_t t) const { return reach_[t]; }
  const std::vector<std::uint16_t>& reach_table() const { return reach_; }

  // Splits t into (agent, nonempty set) pairs over distinct agents.
  std::vector<std::pair<int, std::uint32_t>> reconstruct(std::uint32_t t) const {
    if (reach_.empty() || reach_[t] == 0)
      throw Error(ErrorCode::InternalInconsistency, "reconstruction from an unreachable subset");
    std::vector<std::pair<int, std::uint32_t>> out;
    while (t != 0) {
      std::uint16_t v = reach_[t];
      std::size_t g = std::size_t(v) - 2;
      const AgentGroup& grp = groups_[g];
      int m = grp.multiplicity();
      std::uint32_t avail = t & grp.allowed;
      std::uint32_t chosen = 0;
      for (std::uint32_t a = avail; a != 0; a = (a - 1) & avail) {
        if (!fits(g, a)) continue;
        std::uint16_t r = reach_[t ^ a];
        if (r != 0 && r < v) { chosen = a; break; }
      }
      if (chosen == 0) throw Error(ErrorCode::InternalInconsistency, "no block matches the reach table");
      if (m == 1) {
        out.emplace_back(grp.members[0], chosen);
      } else {
        auto parts = split_group(g, chosen);
        for (std::size_t i = 0; i < parts.size(); ++i) out.emplace_back(grp.members[i], parts[i]);
      }
      t ^= chosen;
    }
    return out;
  }

  // Covers one target by a single group that has a member for every step,
  // searching downward from the target and memoizing failures.
  static std::optional<std::vector<std::uint32_t>> split_target(const SubsetTable& feasible,
                                                                const std::vector<std::uint32_t>& conf,
                                                                std::uint32_t target, DpStats* stats = nullptr) {
    SubsetTable failed(feasible.width());
    std::vector<std::uint32_t> parts;
    std::uint64_t visits = 0;
    bool ok = split_rec(feasible, conf.data(), failed, target, parts, visits);
    if (stats) stats->subsets_visited += visits;
    if (!ok) return std::nullopt;
    return parts;
  }

 private:
  bool fits(std::size_t g, std::uint32_t a) const {
    const AgentGroup& grp = groups_[g];
    if ((a & ~grp.allowed) != 0) return false;
    if (grp.multiplicity() == 1) return grp.feasible->test(a);
    return cnt_[g][a] <= grp.multiplicity();
  }

  // cnt[A]: fewest feasible sets partitioning A, saturated at 255.
  void build_counts(std::size_t g, std::uint64_t& visits) {
    const AgentGroup& grp = groups_[g];
    auto& cnt = cnt_[g];
    cnt.assign(std::size_t{1} << k_, 255);
    cnt[0] = 0;
    const std::uint32_t* conf = grp.conflicts->data();
    for_each_submask(grp.allowed, [&](std::uint32_t a) {
      if (a == 0) return;
      std::uint32_t low = a & (~a + 1);
      int best = 255;
      auto fn = [&](std::uint32_t f) {
        ++visits;
        if (!grp.feasible->test(f)) return false;
        int v = cnt[a ^ f] + 1;
        if (v < best) best = v;
        return best == 1;
      };
      for_each_conflict_free(low, (a ^ low) & ~conf[std::countr_zero(low)], conf, fn);
      cnt[a] = std::uint8_t(std::min(best, 255));
    });
  }

  std::vector<std::uint32_t> split_group(std::size_t g, std::uint32_t a) const {
    const AgentGroup& grp = groups_[g];
    const auto& cnt = cnt_[g];
    const std::uint32_t* conf = grp.conflicts->data();
    std::vector<std::uint32_t> parts;
    while (a != 0) {
      std::uint32_t low = a & (~a + 1);
      std::uint32_t pick = 0;
      auto fn = [&](std::uint32_t f) {
        if (grp.feasible->test(f) && cnt[a ^ f] + 1 == cnt[a]) {
          pick = f;
          return true;
        }
        return false;
      };
      for_each_conflict_free(low, (a ^ low) & ~conf[std::countr_zero(low)], conf, fn);
      if (pick == 0) throw Error(ErrorCode::InternalInconsistency, "count table has no witness");
      parts.push_back(pick);
      a ^= pick;
    }
    return parts;
  }

  static bool split_rec(const SubsetTable& feasible, const std::uint32_t* conf, SubsetTable& failed,
                        std::uint32_t a, std::vector<std::uint32_t>& parts, std::uint64_t& visits) {
    if (a == 0) return true;
    if (failed.test(a)) return false;
    std::uint32_t low = a & (~a + 1);
    auto fn = [&](std::uint32_t f) {
      ++visits;
      if (!feasible.test(f)) return false;
      parts.push_back(f);
      if (split_rec(feasible, conf, failed, a ^ f, parts, visits)) return true;
      parts.pop_back();
      return false;
    };
    if (for_each_conflict_free(low, (a ^ low) & ~conf[std::countr_zero(low)], conf, fn)) return true;
    failed.set(a);
    return false;
  }

  int k_;
  std::vector<AgentGroup> groups_;
  DpStats* stats_;
  std::vector<std::uint16_t> reach_;
  std::vector<std::vector<std::uint8_t>> cnt_;
};

}  // namespace wsp

#endif
