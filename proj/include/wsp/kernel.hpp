#ifndef WSP_KERNEL_HPP
#define WSP_KERNEL_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/model.hpp"

namespace wsp {

// Every stage keeps a copy of the instance it consumed so plans can be
// lifted back through it.
struct MergeStage {
  WorkflowInstance input;
  std::vector<std::vector<StepId>> supersteps;  // reduced step -> input steps
};

struct EasyStepStage {
  WorkflowInstance input;
  std::vector<StepId> hard_steps;  // reduced step -> input step
  std::vector<StepId> easy_steps;
  std::vector<UserId> kept_users;  // reduced user -> input user
};

struct MatchingStage {
  WorkflowInstance input;
  std::vector<std::pair<StepId, UserId>> matched;  // steps outside the kernel
  std::vector<StepId> kernel_steps;
  std::vector<UserId> kernel_users;
};

using KernelStage = std::variant<MergeStage, EasyStepStage, MatchingStage>;

struct StageOutcome {
  KernelStage stage;
  WorkflowInstance reduced;
  std::optional<Verdict> shortcut;
};

struct KernelResult {
  WorkflowInstance original;
  WorkflowInstance reduced;
  std::vector<KernelStage> trace;
  std::optional<Verdict> verdict_shortcut;
};

inline std::string_view stage_name(const KernelStage& s) {
  if (std::holds_alternative<MergeStage>(s)) return "merge";
  if (std::holds_alternative<EasyStepStage>(s)) return "easy-steps";
  return "matching";
}

//-----------------------------------------------------------------------------
// Applicability

namespace detail {

inline bool is_kind(const Constraint& c, RelationKind k) {
  const auto* e = as_entailment(c);
  return e && e->rel.kind == k;
}

inline std::vector<int> equality_components(const WorkflowInstance& w) {
  std::vector<int> parent(w.k());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : w.constraints) {
    if (!is_kind(c, RelationKind::Eq)) continue;
    const auto& e = std::get<Entailment>(c);
    int a = find(e.scope1.lowest()), b = find(e.scope2.lowest());
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> comp(w.k());
  for (StepId s = 0; s < w.k(); ++s) comp[s] = find(s);
  return comp;
}

// Builds an instance over a subset of steps and users of w. Entailment
// scopes and counting scopes are mapped through step_map (-1 drops a step).
inline WorkflowInstance sub_instance(const WorkflowInstance& w, const std::vector<StepId>& steps,
                                     const std::vector<UserId>& users) {
  WorkflowInstance out;
  std::vector<StepId> step_map(w.k(), -1);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    step_map[steps[i]] = StepId(i);
    out.steps.push_back(w.steps[steps[i]]);
  }
  auto map_set = [&](StepSet s) {
    StepSet r;
    s.for_each([&](StepId x) {
      if (step_map[x] >= 0) r.insert(step_map[x]);
    });
    return r;
  };
  for (UserId u : users) {
    out.users.push_back(w.users[u]);
    out.auth.push_back(map_set(w.auth[u]));
  }
  if (w.hierarchy) out.hierarchy = w.hierarchy->restrict_to(users);
  for (const auto& c : w.constraints) {
    StepSet scope = constraint_scope(c);
    if (const auto* cc = as_counting(c)) {
      StepSet kept = map_set(cc->scope);
      if (kept.empty()) continue;
      out.constraints.push_back(Counting{cc->tl, std::min(cc->tr, kept.size()), kept});
      continue;
    }
    if (map_set(scope).size() != scope.size()) continue;
    auto e = std::get<Entailment>(c);
    e.scope1 = map_set(e.scope1);
    e.scope2 = map_set(e.scope2);
    out.constraints.push_back(e);
  }
  return out;
}

}  // namespace detail

inline std::optional<std::string> merge_inapplicable(const WorkflowInstance& w) {
  for (const auto& c : w.constraints) {
    if (const auto* e = as_entailment(c)) {
      if (e->rel.kind == RelationKind::Sim || e->rel.kind == RelationKind::Nsim || e->rel.kind == RelationKind::Pairs)
        return std::string(relation_name(e->rel.kind)) + " constraints present";
      if (e->rel.kind == RelationKind::Eq && e->type() != 1) return "equality constraint of type " + std::to_string(e->type());
    } else if (as_counting(c)->tl > 1) {
      return "counting constraint with tl > 1";
    }
  }
  auto comp = detail::equality_components(w);
  std::vector<int> size(w.k(), 0);
  for (int c : comp) ++size[c];
  for (const auto& c : w.constraints) {
    if (const auto* cc = as_counting(c)) {
      bool touches = false;
      cc->scope.for_each([&](StepId s) { touches = touches || size[comp[s]] > 1; });
      if (touches) return "counting scope meets merged steps";
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> easy_steps_inapplicable(const WorkflowInstance& w) {
  for (const auto& c : w.constraints) {
    if (const auto* e = as_entailment(c)) {
      if (e->rel.kind != RelationKind::Neq) return std::string(relation_name(e->rel.kind)) + " constraints present";
    } else if (as_counting(c)->tl > 1) {
      return "counting constraint with tl > 1";
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> matching_inapplicable(const WorkflowInstance& w) {
  for (const auto& c : w.constraints) {
    const auto* e = as_entailment(c);
    if (!e || e->rel.kind != RelationKind::Neq || e->type() != 1) return "not every constraint is a type-1 neq";
  }
  return std::nullopt;
}

//-----------------------------------------------------------------------------
// Stages

inline StageOutcome merge_equality_steps(const WorkflowInstance& w) {
  if (auto why = merge_inapplicable(w)) throw Error(ErrorCode::Inapplicable, *why);
  auto comp = detail::equality_components(w);
  std::vector<int> index(w.k(), -1);
  MergeStage stage{w, {}};
  for (StepId s = 0; s < w.k(); ++s) {
    if (index[comp[s]] < 0) {
      index[comp[s]] = int(stage.supersteps.size());
      stage.supersteps.emplace_back();
    }
    stage.supersteps[index[comp[s]]].push_back(s);
  }
  auto map_set = [&](StepSet s) {
    StepSet r;
    s.for_each([&](StepId x) { r.insert(index[comp[x]]); });
    return r;
  };
  WorkflowInstance out;
  for (const auto& members : stage.supersteps) {
    std::string name;
    for (StepId s : members) name += (name.empty() ? "" : "+") + w.steps[s];
    out.steps.push_back(name);
  }
  out.users = w.users;
  out.hierarchy = w.hierarchy;
  std::optional<Verdict> shortcut;
  for (UserId u = 0; u < w.n(); ++u) {
    StepSet a;
    for (std::size_t t = 0; t < stage.supersteps.size(); ++t) {
      bool all = std::all_of(stage.supersteps[t].begin(), stage.supersteps[t].end(),
                             [&](StepId s) { return w.auth[u].contains(s); });
      if (all) a.insert(StepId(t));
    }
    out.auth.push_back(a);
  }
  StepSet covered;
  for (StepSet a : out.auth) covered |= a;
  if (covered != out.all_steps()) shortcut = Verdict::Unsat;
  for (const auto& c : w.constraints) {
    if (const auto* cc = as_counting(c)) {
      out.constraints.push_back(Counting{cc->tl, cc->tr, map_set(cc->scope)});
      continue;
    }
    auto e = std::get<Entailment>(c);
    if (e.rel.kind == RelationKind::Eq) continue;
    e.scope1 = map_set(e.scope1);
    e.scope2 = map_set(e.scope2);
    if ((e.scope1 | e.scope2).size() == 1) shortcut = Verdict::Unsat;
    out.constraints.push_back(e);
  }
  out.constraints = dedup_constraints(out.constraints);
  return {std::move(stage), std::move(out), shortcut};
}

inline StageOutcome remove_easy_steps(const WorkflowInstance& w) {
  if (auto why = easy_steps_inapplicable(w)) throw Error(ErrorCode::Inapplicable, *why);
  int k = w.k();
  EasyStepStage stage{w, {}, {}, {}};
  for (const auto& c : w.constraints) {
    const auto* e = as_entailment(c);
    if (e && e->scope1 == e->scope2 && e->scope1.size() == 1) {
      stage.hard_steps.clear();
      return {std::move(stage), w, Verdict::Unsat};
    }
  }
  StepSet hard;
  for (StepId s = 0; s < k; ++s) {
    if (int(w.authorized_users(s).size()) >= k) stage.easy_steps.push_back(s);
    else {
      stage.hard_steps.push_back(s);
      hard.insert(s);
    }
  }
  for (UserId u = 0; u < w.n(); ++u)
    if (w.auth[u].intersects(hard)) stage.kept_users.push_back(u);
  if (std::int64_t(stage.kept_users.size()) > std::int64_t(k) * (k - 1))
    throw Error(ErrorCode::InternalInconsistency, "easy-step kernel exceeds k(k-1) users");
  WorkflowInstance out = detail::sub_instance(w, stage.hard_steps, stage.kept_users);
  std::optional<Verdict> shortcut;
  if (stage.hard_steps.empty()) shortcut = Verdict::Sat;
  return {std::move(stage), std::move(out), shortcut};
}

namespace detail {

// Maximum bipartite matching by shortest augmenting paths in phases.
class HopcroftKarp {
 public:
  HopcroftKarp(int left, int right, std::vector<std::vector<int>> adj)
      : left_(left), right_(right), adj_(std::move(adj)), match_l_(left, -1), match_r_(right, -1), dist_(left) {}

  int run() {
    int size = 0;
    while (bfs()) {
      for (int u = 0; u < left_; ++u)
        if (match_l_[u] < 0 && dfs(u)) ++size;
    }
    return size;
  }

  const std::vector<int>& match_left() const { return match_l_; }
  const std::vector<int>& match_right() const { return match_r_; }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    for (int u = 0; u < left_; ++u) {
      dist_[u] = match_l_[u] < 0 ? 0 : kInf;
      if (dist_[u] == 0) q.push(u);
    }
    bool found = false;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        int w = match_r_[v];
        if (w < 0) found = true;
        else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      int w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  int left_;
  int right_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_;
  std::vector<int> match_r_;
  std::vector<int> dist_;
};

inline void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InternalInconsistency, what);
}

}  // namespace detail

struct MatchingState {
  std::vector<int> step_match;  // step -> user or -1
  std::vector<int> user_match;  // user -> step or -1
  StepSet reach_steps;          // S'
  std::vector<UserId> reach_users;  // U'
};

// Maximum matching of steps into authorized users plus the set of vertices
// reachable from uncovered steps by alternating paths.
inline MatchingState alternating_reach(const WorkflowInstance& w) {
  int k = w.k(), n = w.n();
  std::vector<std::vector<int>> adj(k);
  for (StepId s = 0; s < k; ++s) adj[s] = w.authorized_users(s);
  detail::HopcroftKarp hk(k, n, adj);
  hk.run();
  MatchingState st{hk.match_left(), hk.match_right(), {}, {}};
  std::vector<char> user_seen(n, 0);
  std::vector<StepId> queue;
  for (StepId s = 0; s < k; ++s)
    if (st.step_match[s] < 0) {
      st.reach_steps.insert(s);
      queue.push_back(s);
    }
  for (std::size_t i = 0; i < queue.size(); ++i) {
    StepId s = queue[i];
    for (UserId u : adj[s]) {
      if (u == st.step_match[s] || user_seen[u]) continue;
      user_seen[u] = 1;
      int t = st.user_match[u];
      detail::require(t >= 0, "alternating path ends at a free user: matching is not maximum");
      if (!st.reach_steps.contains(t)) {
        st.reach_steps.insert(t);
        queue.push_back(t);
      }
    }
  }
  for (UserId u = 0; u < n; ++u)
    if (user_seen[u]) st.reach_users.push_back(u);
  return st;
}

// The three structural properties of the alternating reach set.
inline void check_reach_properties(const WorkflowInstance& w, const MatchingState& st) {
  int k = w.k();
  std::vector<char> in_u(w.n(), 0);
  for (UserId u : st.reach_users) in_u[u] = 1;
  for (StepId s = 0; s < k; ++s)
    if (!st.reach_steps.contains(s)) detail::require(st.step_match[s] >= 0, "P1: step outside S' is unmatched");
  for (UserId u = 0; u < w.n(); ++u) {
    if (!in_u[u]) detail::require(!w.auth[u].intersects(st.reach_steps), "P2: edge from U\\U' into S'");
    else detail::require(st.reach_steps.contains(st.user_match[u]), "P2: matching edge leaves U'");
  }
  // Every U'' in U' has at least |U''| + 1 neighbours in S' iff U' still
  // matches into S' after deleting any single step of S'.
  std::vector<StepId> sp = st.reach_steps.to_vector();
  for (StepId removed : sp) {
    std::vector<std::vector<int>> adj(st.reach_users.size());
    std::vector<int> col(k, -1);
    int cols = 0;
    for (StepId s : sp)
      if (s != removed) col[s] = cols++;
    for (std::size_t i = 0; i < st.reach_users.size(); ++i)
      w.auth[st.reach_users[i]].for_each([&](StepId s) {
        if (col[s] >= 0) adj[i].push_back(col[s]);
      });
    detail::HopcroftKarp hk(int(st.reach_users.size()), cols, adj);
    detail::require(hk.run() == int(st.reach_users.size()), "P3: Hall surplus below one");
  }
  detail::require(int(st.reach_users.size()) < st.reach_steps.size() || st.reach_steps.empty(),
                  "|U'| < |S'| fails");
}

inline StageOutcome matching_kernel(const WorkflowInstance& w) {
  if (auto why = matching_inapplicable(w)) throw Error(ErrorCode::Inapplicable, *why);
  MatchingStage stage{w, {}, {}, {}};
  for (const auto& c : w.constraints) {
    const auto& e = std::get<Entailment>(c);
    if (e.scope1 == e.scope2) return {std::move(stage), w, Verdict::Unsat};
  }
  MatchingState st = alternating_reach(w);
  check_reach_properties(w, st);
  for (StepId s = 0; s < w.k(); ++s) {
    if (st.reach_steps.contains(s)) stage.kernel_steps.push_back(s);
    else stage.matched.emplace_back(s, st.step_match[s]);
  }
  stage.kernel_users = st.reach_users;
  detail::require(int(stage.kernel_users.size()) <= w.k(), "matching kernel exceeds k users");
  WorkflowInstance out = detail::sub_instance(w, stage.kernel_steps, stage.kernel_users);
  std::optional<Verdict> shortcut;
  if (stage.kernel_steps.empty()) shortcut = Verdict::Sat;
  return {std::move(stage), std::move(out), shortcut};
}

//-----------------------------------------------------------------------------
// Pipeline

inline KernelResult kernelize(const WorkflowInstance& w) {
  KernelResult r{w, w, {}, std::nullopt};
  auto apply = [&](StageOutcome o) {
    r.trace.push_back(std::move(o.stage));
    r.reduced = std::move(o.reduced);
    r.verdict_shortcut = o.shortcut;
    return o.shortcut.has_value();
  };
  if (!merge_inapplicable(r.reduced) && apply(merge_equality_steps(r.reduced))) return r;
  if (!easy_steps_inapplicable(r.reduced) && apply(remove_easy_steps(r.reduced))) return r;
  if (!matching_inapplicable(r.reduced) && apply(matching_kernel(r.reduced))) return r;
  return r;
}

inline Plan lift_stage(const KernelStage& stage, const Plan& p) {
  if (const auto* m = std::get_if<MergeStage>(&stage)) {
    Plan out{std::vector<UserId>(m->input.k(), -1)};
    for (std::size_t t = 0; t < m->supersteps.size(); ++t)
      for (StepId s : m->supersteps[t]) out.assignment[s] = p.assignment[t];
    return out;
  }
  if (const auto* e = std::get_if<EasyStepStage>(&stage)) {
    const WorkflowInstance& w = e->input;
    Plan out{std::vector<UserId>(w.k(), -1)};
    std::vector<char> used(w.n(), 0);
    for (std::size_t i = 0; i < e->hard_steps.size(); ++i) {
      UserId u = e->kept_users[p.assignment[i]];
      out.assignment[e->hard_steps[i]] = u;
      used[u] = 1;
    }
    for (StepId s : e->easy_steps) {
      UserId pick = -1;
      for (UserId u = 0; u < w.n() && pick < 0; ++u)
        if (!used[u] && w.auth[u].contains(s)) pick = u;
      if (pick < 0) throw Error(ErrorCode::InsufficientUsers, "no unused user for easy step '" + w.steps[s] + "'");
      used[pick] = 1;
      out.assignment[s] = pick;
    }
    return out;
  }
  const auto& m = std::get<MatchingStage>(stage);
  Plan out{std::vector<UserId>(m.input.k(), -1)};
  for (std::size_t i = 0; i < m.kernel_steps.size(); ++i) out.assignment[m.kernel_steps[i]] = m.kernel_users[p.assignment[i]];
  for (auto [s, u] : m.matched) out.assignment[s] = u;
  return out;
}

inline Plan lift_plan(const KernelResult& kr, const Plan& kernel_plan) {
  if (kr.verdict_shortcut == Verdict::Unsat)
    throw Error(ErrorCode::InvalidArgument, "no plan to lift: the kernel decided unsat");
  if (int(kernel_plan.assignment.size()) != kr.reduced.k())
    throw Error(ErrorCode::InvalidArgument, "plan does not match the reduced instance");
  Plan p = kernel_plan;
  for (auto it = kr.trace.rbegin(); it != kr.trace.rend(); ++it) p = lift_stage(*it, p);
  return p;
}

}  // namespace wsp

#endif
