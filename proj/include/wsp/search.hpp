#ifndef WSP_SEARCH_HPP
#define WSP_SEARCH_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/model.hpp"

namespace wsp {

struct SearchStats {
  std::uint64_t nodes = 0;
};

namespace detail {

// Backtracking over steps with smallest remaining domain first. Binary
// relations between two single steps prune domains on assignment; all other
// constraints are checked once their scope is assigned. Counting upper
// bounds are checked incrementally.
class PropagationSearch {
 public:
  explicit PropagationSearch(const WorkflowInstance& w) : w_(w), k_(w.k()), n_(w.n()) {
    for (const auto& c : w.constraints)
      if (const auto* e = as_entailment(c); e && e->rel.kind == RelationKind::Pairs)
        throw Error(ErrorCode::OracleOnlyConstraints, "explicit relations are not searched");
    dom_.assign(std::size_t(k_) * n_, 0);
    size_.assign(k_, 0);
    for (UserId u = 0; u < n_; ++u)
      w.auth[u].for_each([&](StepId s) {
        dom_[std::size_t(s) * n_ + u] = 1;
        ++size_[s];
      });
    binary_.resize(k_);
    checked_.resize(k_);
    counting_.resize(k_);
    for (int i = 0; i < w.c(); ++i) {
      const auto& c = w.constraints[i];
      if (const auto* e = as_entailment(c); e && e->type() == 1 && e->scope1 != e->scope2) {
        StepId a = e->scope1.lowest(), b = e->scope2.lowest();
        binary_[a].push_back({i, b});
        binary_[b].push_back({i, a});
        continue;
      }
      if (as_counting(c)) constraint_scope(c).for_each([&](StepId s) { counting_[s].push_back(i); });
      constraint_scope(c).for_each([&](StepId s) { checked_[s].push_back(i); });
    }
    load_.assign(w.c(), std::vector<int>(n_, 0));
    left_.assign(w.c(), 0);
    for (int i = 0; i < w.c(); ++i) left_[i] = constraint_scope(w.constraints[i]).size();
    plan_.assign(k_, -1);
  }

  std::optional<Plan> run(SearchStats* stats) {
    for (StepId s = 0; s < k_; ++s)
      if (size_[s] == 0) return std::nullopt;
    bool ok = dfs(0);
    if (stats) stats->nodes += nodes_;
    if (!ok) return std::nullopt;
    return Plan{plan_};
  }

 private:
  struct Link {
    int constraint;
    StepId other;
  };

  bool related(int ci, StepId from, UserId u, StepId to, UserId v) const {
    const auto& e = std::get<Entailment>(w_.constraints[ci]);
    // Orientation matters only for explicit relations, which are excluded.
    (void)from;
    (void)to;
    return relation_holds(e.rel, w_.hierarchy, u, v);
  }

  bool dfs(int depth) {
    ++nodes_;
    if (depth == k_) return true;
    StepId s = -1;
    for (StepId t = 0; t < k_; ++t)
      if (plan_[t] < 0 && (s < 0 || size_[t] < size_[s])) s = t;
    std::vector<std::uint8_t> saved_dom = dom_;
    std::vector<int> saved_size = size_;
    for (UserId u = 0; u < n_; ++u) {
      if (!dom_[std::size_t(s) * n_ + u]) continue;
      if (assign(s, u) && dfs(depth + 1)) return true;
      unassign(s, u);
      dom_ = saved_dom;
      size_ = saved_size;
    }
    return false;
  }

  bool assign(StepId s, UserId u) {
    plan_[s] = u;
    bool ok = true;
    for (int i : checked_[s]) --left_[i];
    for (int i : counting_[s]) {
      const auto& c = std::get<Counting>(w_.constraints[i]);
      if (++load_[i][u] > c.tr) ok = false;
    }
    if (!ok) return false;
    for (int i : checked_[s])
      if (left_[i] == 0 && !constraint_satisfied(w_.constraints[i], w_.hierarchy, plan_)) return false;
    for (const Link& l : binary_[s]) {
      if (plan_[l.other] >= 0) {
        if (!related(l.constraint, s, u, l.other, plan_[l.other])) return false;
        continue;
      }
      std::uint8_t* row = &dom_[std::size_t(l.other) * n_];
      for (UserId v = 0; v < n_; ++v) {
        if (row[v] && !related(l.constraint, s, u, l.other, v)) {
          row[v] = 0;
          --size_[l.other];
        }
      }
      if (size_[l.other] == 0) return false;
    }
    return true;
  }

  void unassign(StepId s, UserId u) {
    for (int i : checked_[s]) ++left_[i];
    for (int i : counting_[s]) --load_[i][u];
    plan_[s] = -1;
  }

  const WorkflowInstance& w_;
  int k_;
  int n_;
  std::vector<std::uint8_t> dom_;
  std::vector<int> size_;
  std::vector<std::vector<Link>> binary_;
  std::vector<std::vector<int>> checked_;
  std::vector<std::vector<int>> counting_;
  std::vector<std::vector<int>> load_;
  std::vector<int> left_;
  std::vector<UserId> plan_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

inline std::optional<Plan> search_solve(const WorkflowInstance& w, SearchStats* stats = nullptr) {
  detail::PropagationSearch search(w);
  return search.run(stats);
}

}  // namespace wsp

#endif
