#ifndef WSP_SOLVER_HPP
#define WSP_SOLVER_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsp/canonical.hpp"
#include "wsp/constraints.hpp"
#include "wsp/cover_dp.hpp"
#include "wsp/error.hpp"
#include "wsp/hierarchy.hpp"
#include "wsp/kernel.hpp"
#include "wsp/model.hpp"
#include "wsp/oracle.hpp"
#include "wsp/search.hpp"

namespace wsp {

enum class Route { Auto, Flat, Quotient, Hierarchy, Oracle, Search };

inline Route parse_route(std::string_view name) {
  if (name == "auto") return Route::Auto;
  if (name == "flat") return Route::Flat;
  if (name == "quotient") return Route::Quotient;
  if (name == "hierarchy") return Route::Hierarchy;
  if (name == "oracle") return Route::Oracle;
  if (name == "search") return Route::Search;
  throw Error(ErrorCode::InvalidArgument, "unknown route '" + std::string(name) + "'");
}

struct SolveStats {
  std::uint64_t subsets_visited = 0;
  std::uint64_t blocks_solved = 0;
  std::uint64_t search_nodes = 0;
  double elapsed_ms = 0;
  std::string route;
};

struct SolveResult {
  Verdict status = Verdict::Unsat;
  std::optional<Plan> plan;
  SolveStats stats;
  bool sat() const { return status == Verdict::Sat; }
};

struct SolveOptions {
  Route route = Route::Auto;
  int cap = kMaxSteps;
  // Above this estimated number of subset visits, the automatic route
  // switches from the subset DP to propagation search.
  double dp_budget = 1.5e9;
  bool kernelize = true;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline SolveResult finish(const WorkflowInstance& w, std::optional<Plan> plan, SolveStats stats,
                          const Stopwatch& clock) {
  SolveResult r;
  stats.elapsed_ms = clock.ms();
  r.stats = std::move(stats);
  if (plan) {
    if (!check_plan(w, *plan).valid) throw Error(ErrorCode::InternalInconsistency, "solver produced an invalid plan");
    r.status = Verdict::Sat;
    r.plan = std::move(plan);
  }
  return r;
}

inline std::vector<Constraint> without_trivial(const std::vector<Constraint>& in) {
  std::vector<Constraint> out;
  for (const auto& c : in)
    if (!trivially_satisfied(c)) out.push_back(c);
  return out;
}

inline SubsetTable restrict_to_subsets(const SubsetTable& base, std::uint32_t allowed) {
  if (allowed == StepSet::all(base.width()).bits()) return base;
  SubsetTable t(base.width());
  for_each_submask(allowed, [&](std::uint32_t f) {
    if (base.test(f)) t.set(f);
  });
  return t;
}

// Users with identical authorization rows, in order of first appearance.
inline std::vector<std::pair<std::uint32_t, std::vector<UserId>>> user_groups(const WorkflowInstance& w) {
  std::vector<std::pair<std::uint32_t, std::vector<UserId>>> groups;
  std::map<std::uint32_t, std::size_t> at;
  std::uint32_t all = w.all_steps().bits();
  for (UserId u = 0; u < w.n(); ++u) {
    std::uint32_t a = w.auth[u].bits() & all;
    if (a == 0) continue;
    auto [it, fresh] = at.try_emplace(a, groups.size());
    if (fresh) groups.push_back({a, {}});
    groups[it->second].second.push_back(u);
  }
  return groups;
}

inline double pow3(int k) { return std::pow(3.0, k); }

}  // namespace detail

//-----------------------------------------------------------------------------
// Flat solver

// Walks a finished user-sweep DP from the full step set down to the empty
// set; members of the DP groups are user ids.
inline Plan reconstruct_plan(const ExactCoverDp& dp, int k) {
  Plan p{std::vector<UserId>(k, -1)};
  for (auto [u, set] : dp.reconstruct(StepSet::all(k).bits()))
    StepSet(set).for_each([&](StepId s) { p.assignment[s] = u; });
  return p;
}

inline SolveResult solve_flat(const WorkflowInstance& w, int cap = kMaxSteps) {
  detail::Stopwatch clock;
  if (w.k() > std::min(cap, kMaxSteps)) throw Error(ErrorCode::StepLimitExceeded, "too many steps for the flat solver");
  auto report = classify(w.constraints);
  for (std::size_t i = 0; i < report.regular.size(); ++i)
    if (!report.regular[i])
      throw Error(ErrorCode::NonRegularConstraint, "constraint " + std::to_string(i) + " is not regular");
  SolveStats stats;
  stats.route = "flat";
  int k = w.k();
  if (k == 0) return detail::finish(w, Plan{}, stats, clock);

  auto constraints = detail::without_trivial(w.constraints);
  SubsetTable eligible = eligible_family(constraints, k);
  auto conf = conflict_masks(constraints, k);
  auto groups = detail::user_groups(w);
  std::uint32_t target = w.all_steps().bits();
  DpStats dp_stats;
  std::optional<Plan> plan;

  if (groups.size() == 1 && groups[0].first == target && int(groups[0].second.size()) >= k) {
    auto parts = ExactCoverDp::split_target(eligible, conf, target, &dp_stats);
    if (parts) {
      plan = Plan{std::vector<UserId>(k, -1)};
      for (std::size_t i = 0; i < parts->size(); ++i)
        StepSet((*parts)[i]).for_each([&](StepId s) { plan->assignment[s] = groups[0].second[i]; });
    }
  } else {
    std::vector<SubsetTable> tables;
    tables.reserve(groups.size());
    for (const auto& g : groups) tables.push_back(detail::restrict_to_subsets(eligible, g.first));
    std::vector<AgentGroup> agents;
    for (std::size_t i = 0; i < groups.size(); ++i)
      agents.push_back(AgentGroup{&tables[i], groups[i].first, &conf, groups[i].second});
    ExactCoverDp dp(k, std::move(agents), &dp_stats);
    dp.run();
    if (dp.reachable(target)) plan = reconstruct_plan(dp, k);
  }
  stats.subsets_visited = dp_stats.subsets_visited;
  stats.blocks_solved = 1;
  return detail::finish(w, std::move(plan), stats, clock);
}

//-----------------------------------------------------------------------------
// Hierarchical solver

namespace detail {

struct HierarchyContext {
  WorkflowInstance inst;  // rewritten: sim/nsim only among entailments
  SignificantBlockTree tree;
  int k = 0;
  std::vector<SubsetTable> level_ok;                  // index i-1: no rule of level i fires
  std::vector<std::vector<std::uint32_t>> level_conf;  // index i-1: pair conflicts at level i
  SubsetTable counting_ok;
  std::vector<std::uint32_t> counting_conf;
  std::vector<SubsetTable> table;                  // per node
  std::vector<std::uint32_t> allowed;              // per node
  std::vector<std::vector<std::uint32_t>> conf;    // per node

  SubsetTable rules(int a, int b) const {
    SubsetTable t(k, true);
    for (int i = a; i <= b; ++i) t &= level_ok[i - 1];
    return t;
  }

  // Children of v grouped by identical table, mask and conflicts.
  std::vector<AgentGroup> child_groups(int v) const {
    std::vector<AgentGroup> groups;
    for (int c : tree.nodes[v].children) {
      bool placed = false;
      for (auto& g : groups) {
        int rep = g.members.front();
        if (allowed[rep] == allowed[c] && conf[rep] == conf[c] && table[rep] == table[c]) {
          g.members.push_back(c);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back(AgentGroup{&table[c], allowed[c], &conf[c], {c}});
    }
    return groups;
  }
};

inline WorkflowInstance prepare_for_hierarchy(const WorkflowInstance& w, int cap) {
  WorkflowInstance out = w;
  out.constraints.clear();
  for (const auto& c : without_trivial(w.constraints)) {
    if (const auto* e = as_entailment(c)) {
      Entailment x = *e;
      if (x.rel.kind == RelationKind::Eq) x.rel = Relation::sim(1);
      else if (x.rel.kind == RelationKind::Neq) x.rel = Relation::nsim(1);
      else if (x.rel.kind == RelationKind::Pairs)
        throw Error(ErrorCode::UnsupportedConstraint, "explicit relations need the oracle");
      if (x.rel.kind == RelationKind::Sim && x.overlapping()) continue;
      out.constraints.push_back(x);
    } else {
      out.constraints.push_back(c);
    }
  }
  return rewrite_sim_type3(out, cap);
}

}  // namespace detail

inline SolveResult solve_hierarchy(const WorkflowInstance& w, int cap = kMaxSteps) {
  detail::Stopwatch clock;
  if (!w.hierarchy) throw Error(ErrorCode::MissingHierarchy, "hierarchical solver needs a hierarchy");
  if (!w.hierarchy->is_canonical()) throw Error(ErrorCode::NotCanonical, "hierarchy is not canonical");
  if (w.k() > std::min(cap, kMaxSteps)) throw Error(ErrorCode::StepLimitExceeded, "too many steps");
  SolveStats stats;
  stats.route = "hierarchy";
  if (w.k() == 0) return detail::finish(w, Plan{}, stats, clock);
  if (w.n() == 0) return detail::finish(w, std::nullopt, stats, clock);

  detail::HierarchyContext cx;
  cx.inst = detail::prepare_for_hierarchy(w, cap);
  const WorkflowInstance& in = cx.inst;
  const Hierarchy& h = *in.hierarchy;
  int k = cx.k = in.k();
  int ell = h.levels();
  cx.tree = significant_block_tree(h);

  cx.level_ok.assign(ell, SubsetTable(k, true));
  cx.level_conf.assign(ell, std::vector<std::uint32_t>(k, 0));
  cx.counting_ok = SubsetTable(k, true);
  std::vector<Constraint> counting;
  for (const auto& c : in.constraints) {
    if (as_counting(c)) {
      clear_ineligible(cx.counting_ok, c);
      counting.push_back(c);
      continue;
    }
    const auto& e = std::get<Entailment>(c);
    int i = e.rel.level;
    clear_entailment_rule(cx.level_ok[i - 1], e, e.rel.kind == RelationKind::Sim);
    if (e.rel.kind == RelationKind::Nsim) {
      StepSet pair = e.scope1 | e.scope2;
      if (pair.size() == 2) {
        StepId a = pair.lowest(), b = (pair - StepSet::single(a)).lowest();
        cx.level_conf[i - 1][a] |= 1u << b;
        cx.level_conf[i - 1][b] |= 1u << a;
      }
    }
  }
  cx.counting_conf = conflict_masks(counting, k);

  int nodes = int(cx.tree.nodes.size());
  cx.table.assign(nodes, SubsetTable());
  cx.allowed.assign(nodes, 0);
  cx.conf.assign(nodes, std::vector<std::uint32_t>(k, 0));
  std::uint32_t all = in.all_steps().bits();
  DpStats dp_stats;
  for (int v : cx.tree.postorder()) {
    const BlockNode& node = cx.tree.nodes[v];
    for (UserId u : node.members) cx.allowed[v] |= in.auth[u].bits() & all;
    for (int i = node.first_level; i <= node.last_level; ++i)
      for (int s = 0; s < k; ++s) cx.conf[v][s] |= cx.level_conf[i - 1][s];
    SubsetTable rules = cx.rules(node.first_level, node.last_level);
    if (node.is_leaf()) {
      for (int s = 0; s < k; ++s) cx.conf[v][s] |= cx.counting_conf[s];
      rules &= cx.counting_ok;
      cx.table[v] = detail::restrict_to_subsets(rules, cx.allowed[v]);
    } else {
      ExactCoverDp dp(k, cx.child_groups(v), &dp_stats);
      dp.run();
      SubsetTable t(k);
      const auto& reach = dp.reach_table();
      for (std::uint32_t f = 0; f < reach.size(); ++f)
        if (reach[f] != 0 && rules.test(f)) t.set(f);
      cx.table[v] = std::move(t);
    }
    ++stats.blocks_solved;
  }

  std::optional<Plan> plan;
  if (cx.table[cx.tree.root].test(all)) {
    Plan full{std::vector<UserId>(k, -1)};
    std::vector<std::pair<int, std::uint32_t>> work{{cx.tree.root, all}};
    while (!work.empty()) {
      auto [v, f] = work.back();
      work.pop_back();
      const BlockNode& node = cx.tree.nodes[v];
      if (node.is_leaf()) {
        StepSet(f).for_each([&](StepId s) { full.assignment[s] = node.members.front(); });
        continue;
      }
      ExactCoverDp dp(k, cx.child_groups(v));
      dp.run();
      for (auto part : dp.reconstruct(f)) work.push_back(part);
    }
    if (!check_plan(in, full).valid) throw Error(ErrorCode::InternalInconsistency, "hierarchical plan is invalid");
    full.assignment.resize(w.k());
    plan = std::move(full);
  }
  stats.subsets_visited = dp_stats.subsets_visited;
  return detail::finish(w, std::move(plan), stats, clock);
}

//-----------------------------------------------------------------------------
// Quotient solver

// Users become the blocks of `relation`; sim/nsim become eq/neq. Counting
// constraints apply to blocks as units.
inline WorkflowInstance build_quotient(const WorkflowInstance& w, const std::vector<int>& relation) {
  if (int(relation.size()) != w.n()) throw Error(ErrorCode::InvalidArgument, "relation does not cover the users");
  WorkflowInstance q;
  q.steps = w.steps;
  q.order = w.order;
  std::map<int, int> block;
  for (UserId u = 0; u < w.n(); ++u) {
    auto [it, fresh] = block.try_emplace(relation[u], q.n());
    if (fresh) {
      q.users.push_back(w.users[u]);
      q.auth.push_back(StepSet{});
    } else {
      q.users[it->second] += "+" + w.users[u];
    }
    q.auth[it->second] |= w.auth[u];
  }
  for (const auto& c : w.constraints) {
    if (const auto* e = as_entailment(c)) {
      Entailment x = *e;
      switch (x.rel.kind) {
        case RelationKind::Sim: x.rel = Relation::eq(); break;
        case RelationKind::Nsim: x.rel = Relation::neq(); break;
        default:
          throw Error(ErrorCode::MixedRelations, std::string(relation_name(x.rel.kind)) +
                                                     " constraints relate users, not blocks");
      }
      q.constraints.push_back(x);
    } else {
      q.constraints.push_back(c);
    }
  }
  q.constraints = dedup_constraints(q.constraints);
  return q;
}

inline SolveResult solve_quotient(const WorkflowInstance& w, const std::vector<int>& relation, int cap = kMaxSteps) {
  detail::Stopwatch clock;
  WorkflowInstance q = build_quotient(w, relation);
  SolveResult qr = solve_flat(rewrite_eq_type3(q, cap), cap);
  SolveResult r;
  r.stats = qr.stats;
  r.stats.route = "quotient";
  if (qr.sat()) {
    // Block ids in quotient user order.
    std::vector<std::vector<UserId>> members(q.n());
    std::map<int, int> block;
    for (UserId u = 0; u < w.n(); ++u) {
      auto it = block.try_emplace(relation[u], int(block.size())).first;
      members[it->second].push_back(u);
    }
    Plan p{std::vector<UserId>(w.k(), -1)};
    for (int b = 0; b < q.n(); ++b) {
      StepSet cls;
      for (StepId s = 0; s < w.k(); ++s)
        if (qr.plan->assignment[s] == b) cls.insert(s);
      while (!cls.empty()) {
        UserId best = -1;
        int cover = 0;
        for (UserId u : members[b]) {
          int c = (w.auth[u] & cls).size();
          if (c > cover) { best = u; cover = c; }
        }
        if (best < 0) throw Error(ErrorCode::InternalInconsistency, "block class has no authorized member");
        (w.auth[best] & cls).for_each([&](StepId s) { p.assignment[s] = best; });
        cls -= w.auth[best];
      }
    }
    r.status = Verdict::Sat;
    r.plan = std::move(p);
  }
  r.stats.elapsed_ms = clock.ms();
  return r;
}

//-----------------------------------------------------------------------------
// Dispatch

namespace detail {

inline double flat_cost(const WorkflowInstance& w) {
  auto groups = user_groups(w);
  if (groups.size() == 1 && groups[0].first == w.all_steps().bits() && int(groups[0].second.size()) >= w.k())
    return std::ldexp(double(w.c() + 1), w.k());
  return pow3(w.k()) * double(groups.size());
}

inline double hierarchy_cost(const WorkflowInstance& w) {
  return pow3(w.k()) * double(std::max(1, w.n() - 1));
}

inline SolveResult run_search(const WorkflowInstance& w) {
  Stopwatch clock;
  SearchStats ss;
  auto plan = search_solve(w, &ss);
  SolveStats stats;
  stats.route = "search";
  stats.search_nodes = ss.nodes;
  return finish(w, std::move(plan), stats, clock);
}

inline void require_hierarchy_free(const WorkflowInstance& w, const char* route) {
  for (const auto& c : w.constraints)
    if (const auto* e = as_entailment(c); e && (e->rel.kind == RelationKind::Sim || e->rel.kind == RelationKind::Nsim))
      throw Error(ErrorCode::UnsupportedConstraint, std::string("the ") + route + " route does not take sim/nsim");
}

// Solves without kernelization on the requested route. Plans may still carry
// dummy steps from rewrites.
inline SolveResult dispatch_route(const WorkflowInstance& w, const SolveOptions& opt) {
  auto report = classify(w.constraints);
  bool pairs = report.route == SolverRoute::OracleOnly;
  if (pairs && opt.route != Route::Oracle)
    throw Error(ErrorCode::OracleOnlyConstraints, "explicit relations are only supported by the oracle");
  switch (opt.route) {
    case Route::Oracle: {
      Stopwatch clock;
      auto plan = oracle_solve(w);
      SolveStats stats;
      stats.route = "oracle";
      return finish(w, std::move(plan), stats, clock);
    }
    case Route::Search:
      return run_search(w);
    case Route::Flat:
      require_hierarchy_free(w, "flat");
      return solve_flat(rewrite_eq_type3(w, opt.cap), opt.cap);
    case Route::Hierarchy: {
      WorkflowInstance c = canonicalize_instance(w);
      if (!c.hierarchy) c.hierarchy = flat_hierarchy(c.n());
      SolveResult r = solve_hierarchy(c, opt.cap);
      return r;
    }
    case Route::Quotient: {
      if (!w.hierarchy) throw Error(ErrorCode::MissingHierarchy, "quotient route needs a hierarchy");
      WorkflowInstance c = canonicalize_instance(w);
      if (c.hierarchy->levels() != 3)
        throw Error(ErrorCode::MixedRelations, "quotient route needs exactly one relation between users and everyone");
      for (const auto& con : c.constraints) {
        const auto* e = as_entailment(con);
        if (!e) throw Error(ErrorCode::MixedRelations, "counting constraints change meaning on blocks");
        if ((e->rel.kind == RelationKind::Sim || e->rel.kind == RelationKind::Nsim) && e->rel.level != 2)
          throw Error(ErrorCode::MixedRelations, "quotient route takes level-2 relations only");
      }
      SolveResult r = solve_quotient(c, c.hierarchy->labels(2), opt.cap);
      if (r.plan && !check_plan(w, *r.plan).valid)
        throw Error(ErrorCode::InternalInconsistency, "quotient plan is invalid");
      return r;
    }
    case Route::Auto:
      break;
  }
  if (report.route == SolverRoute::NeedsHierarchy) {
    WorkflowInstance c = canonicalize_instance(w);
    if (hierarchy_cost(c) > opt.dp_budget) return run_search(w);
    return solve_hierarchy(c, opt.cap);
  }
  WorkflowInstance flat = rewrite_eq_type3(w, opt.cap);
  if (flat_cost(flat) > opt.dp_budget) return run_search(w);
  return solve_flat(flat, opt.cap);
}

inline SolveResult dispatch(const WorkflowInstance& w, const SolveOptions& opt) {
  SolveResult r = dispatch_route(w, opt);
  if (r.plan) r.plan->assignment.resize(w.k());
  return r;
}

}  // namespace detail

inline SolveResult solve(const WorkflowInstance& w, const SolveOptions& opt = {}) {
  detail::Stopwatch clock;
  if (w.k() > std::min(opt.cap, kMaxSteps)) throw Error(ErrorCode::StepLimitExceeded, "too many steps");
  SolveResult r;
  if (opt.route == Route::Auto && opt.kernelize) {
    KernelResult kr = kernelize(w);
    if (kr.verdict_shortcut) {
      r.stats.route = "kernel";
      if (*kr.verdict_shortcut == Verdict::Sat) r.plan = lift_plan(kr, Plan{});
    } else {
      r = detail::dispatch(kr.reduced, opt);
      if (r.plan) r.plan = lift_plan(kr, *r.plan);
    }
  } else {
    r = detail::dispatch(w, opt);
  }
  r.status = r.plan ? Verdict::Sat : Verdict::Unsat;
  if (r.plan) {
    r.plan->assignment.resize(w.k());
    if (!check_plan(w, *r.plan).valid) throw Error(ErrorCode::InternalInconsistency, "returned plan is invalid");
  }
  r.stats.elapsed_ms = clock.ms();
  return r;
}

//-----------------------------------------------------------------------------
// Minimum number of interchangeable users

struct MinUsersResult {
  std::optional<int> users;  // empty: unsatisfiable for every m <= k
  int solve_calls = 0;
};

inline WorkflowInstance fully_authorized_instance(int k, const std::vector<Constraint>& constraints, int m) {
  WorkflowInstance w;
  for (int i = 1; i <= k; ++i) w.steps.push_back("s" + std::to_string(i));
  for (int u = 1; u <= m; ++u) {
    w.users.push_back("u" + std::to_string(u));
    w.auth.push_back(StepSet::all(k));
  }
  w.constraints = constraints;
  return w;
}

// Binary search over m. m = 1 admits a single plan and is settled by
// check_plan; the remaining k outcomes (2..k or none) need at most
// ceil(log2 k) solver calls.
inline MinUsersResult min_fully_authorized_users(int k, const std::vector<Constraint>& constraints,
                                                 const SolveOptions& opt = {}) {
  for (const auto& c : constraints) {
    if (const auto* e = as_entailment(c); e && (e->rel.kind == RelationKind::Sim || e->rel.kind == RelationKind::Nsim))
      throw Error(ErrorCode::MissingHierarchy, "interchangeable users carry no hierarchy");
    StepSet scope = constraint_scope(c);
    if (!scope.subset_of(StepSet::all(k))) throw Error(ErrorCode::InvalidArgument, "constraint scope exceeds k steps");
  }
  MinUsersResult r;
  WorkflowInstance one = fully_authorized_instance(k, constraints, 1);
  if (check_plan(one, Plan{std::vector<UserId>(k, 0)}).valid) {
    r.users = 1;
    return r;
  }
  int lo = 2, hi = k + 1;
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    ++r.solve_calls;
    SolveResult s = solve(fully_authorized_instance(k, constraints, mid), opt);
    if (s.sat()) hi = std::min(mid, std::max(2, s.plan->distinct_users()));
    else lo = mid + 1;
  }
  if (lo <= k) r.users = lo;
  return r;
}

}  // namespace wsp

#endif
