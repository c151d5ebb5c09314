#ifndef WSP_ORACLE_HPP
#define WSP_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/model.hpp"

namespace wsp {

struct OracleLimits {
  int max_steps = 8;
  double budget = 1e9;  // bound on the product of per-step authorized-user counts
};

namespace detail {

struct OracleSearch {
  const WorkflowInstance& w;
  std::vector<std::vector<UserId>> candidates;
  std::vector<std::vector<int>> decided_at;       // constraints whose last step is s
  std::vector<std::vector<int>> counting_with;    // counting constraints containing s
  std::vector<std::vector<int>> load;             // per counting constraint, per user
  std::vector<UserId> plan;

  explicit OracleSearch(const WorkflowInstance& inst) : w(inst) {
    int k = w.k();
    candidates.resize(k);
    for (StepId s = 0; s < k; ++s) candidates[s] = w.authorized_users(s);
    decided_at.resize(k);
    counting_with.resize(k);
    load.assign(w.c(), std::vector<int>(w.n(), 0));
    for (int i = 0; i < w.c(); ++i) {
      StepSet scope = constraint_scope(w.constraints[i]);
      decided_at[31 - std::countl_zero(scope.bits())].push_back(i);
      if (as_counting(w.constraints[i])) scope.for_each([&](StepId s) { counting_with[s].push_back(i); });
    }
    plan.assign(k, -1);
  }

  bool run(StepId s) {
    if (s == w.k()) return true;
    for (UserId u : candidates[s]) {
      plan[s] = u;
      bool ok = true;
      for (int i : counting_with[s]) {
        if (++load[i][u] > std::get<Counting>(w.constraints[i]).tr) ok = false;
      }
      if (ok) {
        for (int i : decided_at[s]) {
          if (!constraint_satisfied(w.constraints[i], w.hierarchy, plan)) {
            ok = false;
            break;
          }
        }
      }
      if (ok && run(s + 1)) return true;
      for (int i : counting_with[s]) --load[i][u];
    }
    plan[s] = -1;
    return false;
  }
};

inline void check_oracle_limits(const WorkflowInstance& w, const OracleLimits& limits) {
  if (w.k() > limits.max_steps)
    throw Error(ErrorCode::BudgetExceeded, "oracle limited to " + std::to_string(limits.max_steps) + " steps");
  double product = 1;
  for (StepId s = 0; s < w.k(); ++s) product *= double(w.authorized_users(s).size());
  if (product > limits.budget) throw Error(ErrorCode::BudgetExceeded, "oracle search space too large");
}

}  // namespace detail

// Exhaustive search over plans with early rejection of decided constraints.
// Supports every constraint form, including explicit relations.
inline std::optional<Plan> oracle_solve(const WorkflowInstance& w, const OracleLimits& limits = {}) {
  detail::check_oracle_limits(w, limits);
  detail::OracleSearch search(w);
  if (!search.run(0)) return std::nullopt;
  return Plan{search.plan};
}

// Plain enumeration of every plan; used to cross-check the pruned oracle.
inline std::optional<Plan> oracle_solve_unpruned(const WorkflowInstance& w, const OracleLimits& limits = {}) {
  detail::check_oracle_limits(w, limits);
  int k = w.k();
  std::vector<std::vector<UserId>> cand(k);
  for (StepId s = 0; s < k; ++s) cand[s] = w.authorized_users(s);
  for (const auto& c : cand)
    if (c.empty()) return std::nullopt;
  std::vector<std::size_t> idx(k, 0);
  Plan p{std::vector<UserId>(k)};
  while (true) {
    for (StepId s = 0; s < k; ++s) p.assignment[s] = cand[s][idx[s]];
    if (check_plan(w, p).valid) return p;
    StepId s = 0;
    while (s < k && ++idx[s] == cand[s].size()) idx[s++] = 0;
    if (s == k) return std::nullopt;
  }
}

}  // namespace wsp

#endif
