#ifndef WSP_MODEL_HPP
#define WSP_MODEL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/hierarchy.hpp"
#include "wsp/step_set.hpp"

namespace wsp {

inline constexpr std::string_view kDummyPrefix = "__dummy";

enum class Verdict { Sat, Unsat };

inline std::string_view verdict_name(Verdict v) { return v == Verdict::Sat ? "sat" : "unsat"; }

enum class RelationKind { Eq, Neq, Sim, Nsim, Pairs };

inline std::string_view relation_name(RelationKind r) {
  switch (r) {
    case RelationKind::Eq: return "eq";
    case RelationKind::Neq: return "neq";
    case RelationKind::Sim: return "sim";
    case RelationKind::Nsim: return "nsim";
    case RelationKind::Pairs: return "pairs";
  }
  return "?";
}

struct Relation {
  RelationKind kind = RelationKind::Eq;
  int level = 0;                               // Sim and Nsim only
  std::vector<std::pair<UserId, UserId>> pairs;  // Pairs only, sorted

  static Relation eq() { return {RelationKind::Eq, 0, {}}; }
  static Relation neq() { return {RelationKind::Neq, 0, {}}; }
  static Relation sim(int level) { return {RelationKind::Sim, level, {}}; }
  static Relation nsim(int level) { return {RelationKind::Nsim, level, {}}; }
  static Relation explicit_pairs(std::vector<std::pair<UserId, UserId>> p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return {RelationKind::Pairs, 0, std::move(p)};
  }

  friend bool operator==(const Relation&, const Relation&) = default;
};

// Each user performs either none of the scope or between tl and tr of it.
struct Counting {
  int tl = 1;
  int tr = 1;
  StepSet scope;
  friend bool operator==(const Counting&, const Counting&) = default;
};

// Some s1 in scope1 and s2 in scope2 have (plan(s1), plan(s2)) in the relation.
struct Entailment {
  Relation rel;
  StepSet scope1;
  StepSet scope2;

  // 1: both scopes singletons, 2: exactly one, 3: neither.
  int type() const { return 3 - int(scope1.size() == 1) - int(scope2.size() == 1); }
  bool overlapping() const { return scope1.intersects(scope2); }
  friend bool operator==(const Entailment&, const Entailment&) = default;
};

using Constraint = std::variant<Counting, Entailment>;

inline StepSet constraint_scope(const Constraint& c) {
  if (const auto* cc = std::get_if<Counting>(&c)) return cc->scope;
  const auto& e = std::get<Entailment>(c);
  return e.scope1 | e.scope2;
}

inline const Entailment* as_entailment(const Constraint& c) { return std::get_if<Entailment>(&c); }
inline const Counting* as_counting(const Constraint& c) { return std::get_if<Counting>(&c); }

inline Constraint make_eq(StepSet a, StepSet b) { return Entailment{Relation::eq(), a, b}; }
inline Constraint make_neq(StepSet a, StepSet b) { return Entailment{Relation::neq(), a, b}; }
inline Constraint make_sim(int level, StepSet a, StepSet b) { return Entailment{Relation::sim(level), a, b}; }
inline Constraint make_nsim(int level, StepSet a, StepSet b) { return Entailment{Relation::nsim(level), a, b}; }

struct WorkflowInstance {
  std::vector<std::string> steps;
  std::vector<std::pair<StepId, StepId>> order;
  std::vector<std::string> users;
  std::vector<StepSet> auth;  // per user
  std::vector<Constraint> constraints;
  std::optional<Hierarchy> hierarchy;

  int k() const { return int(steps.size()); }
  int n() const { return int(users.size()); }
  int c() const { return int(constraints.size()); }
  StepSet all_steps() const { return StepSet::all(k()); }

  std::vector<UserId> authorized_users(StepId s) const {
    std::vector<UserId> out;
    for (UserId u = 0; u < n(); ++u)
      if (auth[u].contains(s)) out.push_back(u);
    return out;
  }

  friend bool operator==(const WorkflowInstance&, const WorkflowInstance&) = default;
};

struct Plan {
  std::vector<UserId> assignment;  // step -> user

  // Steps grouped by user, in order of first use.
  std::vector<StepSet> classes() const {
    std::map<UserId, StepSet> by_user;
    std::vector<UserId> seen;
    for (StepId s = 0; s < StepId(assignment.size()); ++s) {
      auto [it, fresh] = by_user.try_emplace(assignment[s]);
      if (fresh) seen.push_back(assignment[s]);
      it->second.insert(s);
    }
    std::vector<StepSet> out;
    for (UserId u : seen) out.push_back(by_user[u]);
    return out;
  }

  int distinct_users() const {
    std::set<UserId> s(assignment.begin(), assignment.end());
    return int(s.size());
  }

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlanVerdict {
  bool valid = true;
  std::vector<int> violated;          // constraint indices
  std::vector<StepId> unauthorized;   // steps given to unauthorized users
};

//-----------------------------------------------------------------------------
// Plan semantics

inline bool relation_holds(const Relation& r, const std::optional<Hierarchy>& h, UserId a, UserId b) {
  switch (r.kind) {
    case RelationKind::Eq: return a == b;
    case RelationKind::Neq: return a != b;
    case RelationKind::Sim:
      if (!h) throw Error(ErrorCode::MissingHierarchy, "sim constraint without a hierarchy");
      return h->same_block(a, b, r.level);
    case RelationKind::Nsim:
      if (!h) throw Error(ErrorCode::MissingHierarchy, "nsim constraint without a hierarchy");
      return !h->same_block(a, b, r.level);
    case RelationKind::Pairs:
      return std::binary_search(r.pairs.begin(), r.pairs.end(), std::pair<UserId, UserId>{a, b});
  }
  return false;
}

// Evaluates one constraint on a complete plan.
inline bool constraint_satisfied(const Constraint& c, const std::optional<Hierarchy>& h,
                                 const std::vector<UserId>& plan) {
  if (const auto* cc = as_counting(c)) {
    std::map<UserId, int> load;
    cc->scope.for_each([&](StepId s) { ++load[plan[s]]; });
    for (auto [u, x] : load)
      if (x < cc->tl || x > cc->tr) return false;
    return true;
  }
  const auto& e = std::get<Entailment>(c);
  bool ok = false;
  e.scope1.for_each([&](StepId s1) {
    if (ok) return;
    e.scope2.for_each([&](StepId s2) {
      if (!ok && relation_holds(e.rel, h, plan[s1], plan[s2])) ok = true;
    });
  });
  return ok;
}

inline PlanVerdict check_plan(const WorkflowInstance& w, const Plan& p) {
  if (int(p.assignment.size()) != w.k())
    throw Error(ErrorCode::InvalidArgument, "plan size does not match the step count");
  PlanVerdict v;
  for (StepId s = 0; s < w.k(); ++s) {
    UserId u = p.assignment[s];
    if (u < 0 || u >= w.n()) throw Error(ErrorCode::InvalidArgument, "plan names an unknown user");
    if (!w.auth[u].contains(s)) v.unauthorized.push_back(s);
  }
  for (int i = 0; i < w.c(); ++i)
    if (!constraint_satisfied(w.constraints[i], w.hierarchy, p.assignment)) v.violated.push_back(i);
  v.valid = v.violated.empty() && v.unauthorized.empty();
  return v;
}

// Pins step s to user u by revoking s from every other user.
inline WorkflowInstance commit_step(const WorkflowInstance& w, StepId s, UserId u) {
  if (s < 0 || s >= w.k() || u < 0 || u >= w.n())
    throw Error(ErrorCode::InvalidArgument, "step or user out of range");
  if (!w.auth[u].contains(s))
    throw Error(ErrorCode::NotAuthorized, "user '" + w.users[u] + "' is not authorized for '" + w.steps[s] + "'");
  WorkflowInstance out = w;
  for (UserId v = 0; v < w.n(); ++v)
    if (v != u) out.auth[v].erase(s);
  return out;
}

//-----------------------------------------------------------------------------
// Raw (name based) instances and validation

struct RawConstraint {
  std::string type;  // "counting" or "entailment"
  int tl = 0;
  int tr = 0;
  std::vector<std::string> scope;
  std::string relation;
  std::optional<int> level;
  std::vector<std::string> scope1;
  std::vector<std::string> scope2;
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct RawInstance {
  std::vector<std::string> steps;
  std::vector<std::pair<std::string, std::string>> order;
  std::vector<std::string> users;
  std::vector<std::pair<std::string, std::vector<std::string>>> auth;
  std::vector<RawConstraint> constraints;
  std::optional<std::vector<std::vector<std::vector<std::string>>>> hierarchy;
};

namespace detail {

inline std::map<std::string, int> index_names(const std::vector<std::string>& names, std::string_view what) {
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw Error(ErrorCode::ParseError, std::string(what) + " with an empty name");
    if (names[i].rfind(kDummyPrefix, 0) == 0)
      throw Error(ErrorCode::ReservedIdentifier, "name '" + names[i] + "' uses a reserved prefix");
    if (!idx.emplace(names[i], int(i)).second)
      throw Error(ErrorCode::DuplicateIdentifier, std::string(what) + " '" + names[i] + "' declared twice");
  }
  return idx;
}

inline int lookup(const std::map<std::string, int>& idx, const std::string& name, std::string_view what) {
  auto it = idx.find(name);
  if (it == idx.end()) throw Error(ErrorCode::UnknownIdentifier, "unknown " + std::string(what) + " '" + name + "'");
  return it->second;
}

inline StepSet lookup_set(const std::map<std::string, int>& idx, const std::vector<std::string>& names) {
  StepSet s;
  for (const auto& n : names) s.insert(lookup(idx, n, "step"));
  return s;
}

inline void check_acyclic(int k, const std::vector<std::pair<StepId, StepId>>& order) {
  std::vector<std::vector<StepId>> next(k);
  std::vector<int> indeg(k, 0);
  for (auto [a, b] : order) {
    if (a == b) throw Error(ErrorCode::CyclicOrder, "order relates a step to itself");
    next[a].push_back(b);
    ++indeg[b];
  }
  std::vector<StepId> ready;
  for (StepId s = 0; s < k; ++s)
    if (indeg[s] == 0) ready.push_back(s);
  int done = 0;
  while (!ready.empty()) {
    StepId s = ready.back();
    ready.pop_back();
    ++done;
    for (StepId t : next[s])
      if (--indeg[t] == 0) ready.push_back(t);
  }
  if (done != k) throw Error(ErrorCode::CyclicOrder, "order has a cycle");
}

}  // namespace detail

// Drops exact duplicates and, per scope pair, keeps only the strongest sim
// (lowest level) and the strongest nsim (highest level).
inline std::vector<Constraint> dedup_constraints(const std::vector<Constraint>& in) {
  std::vector<Constraint> out;
  std::map<std::pair<StepSet, StepSet>, std::size_t> sim_at, nsim_at;
  for (const auto& c : in) {
    if (std::find(out.begin(), out.end(), c) != out.end()) continue;
    const auto* e = as_entailment(c);
    if (e && (e->rel.kind == RelationKind::Sim || e->rel.kind == RelationKind::Nsim)) {
      auto& seen = e->rel.kind == RelationKind::Sim ? sim_at : nsim_at;
      auto key = std::make_pair(e->scope1, e->scope2);
      auto it = seen.find(key);
      if (it != seen.end()) {
        auto& kept = std::get<Entailment>(out[it->second]);
        bool stronger = e->rel.kind == RelationKind::Sim ? e->rel.level < kept.rel.level
                                                         : e->rel.level > kept.rel.level;
        if (stronger) kept.rel.level = e->rel.level;
        continue;
      }
      seen.emplace(key, out.size());
    }
    out.push_back(c);
  }
  return out;
}

inline WorkflowInstance validate_instance(const RawInstance& raw, int cap = kMaxSteps) {
  if (cap > kMaxSteps) cap = kMaxSteps;
  if (int(raw.steps.size()) > cap)
    throw Error(ErrorCode::StepLimitExceeded,
                std::to_string(raw.steps.size()) + " steps exceed the cap of " + std::to_string(cap));
  WorkflowInstance w;
  w.steps = raw.steps;
  w.users = raw.users;
  auto sidx = detail::index_names(raw.steps, "step");
  auto uidx = detail::index_names(raw.users, "user");
  int k = w.k();

  for (const auto& [a, b] : raw.order)
    w.order.emplace_back(detail::lookup(sidx, a, "step"), detail::lookup(sidx, b, "step"));
  std::sort(w.order.begin(), w.order.end());
  w.order.erase(std::unique(w.order.begin(), w.order.end()), w.order.end());
  detail::check_acyclic(k, w.order);

  w.auth.assign(w.n(), StepSet{});
  for (const auto& [user, steps] : raw.auth) {
    UserId u = detail::lookup(uidx, user, "user");
    w.auth[u] |= detail::lookup_set(sidx, steps);
  }
  StepSet covered;
  for (StepSet a : w.auth) covered |= a;
  for (StepId s = 0; s < k; ++s)
    if (!covered.contains(s)) throw Error(ErrorCode::UnauthorizedStep, "no user is authorized for '" + w.steps[s] + "'");

  if (raw.hierarchy) {
    std::vector<std::vector<std::vector<UserId>>> levels;
    for (const auto& level : *raw.hierarchy) {
      auto& blocks = levels.emplace_back();
      for (const auto& block : level) {
        auto& ids = blocks.emplace_back();
        for (const auto& name : block) ids.push_back(detail::lookup(uidx, name, "user"));
      }
    }
    w.hierarchy = validate_hierarchy(levels, w.n());
  }

  for (const auto& rc : raw.constraints) {
    if (rc.type == "counting") {
      Counting c{rc.tl, rc.tr, detail::lookup_set(sidx, rc.scope)};
      if (c.scope.empty()) throw Error(ErrorCode::MalformedConstraint, "counting constraint with an empty scope");
      if (c.tl < 1 || c.tl > c.tr || c.tr > k)
        throw Error(ErrorCode::MalformedConstraint, "counting bounds must satisfy 1 <= tl <= tr <= k");
      w.constraints.push_back(c);
      continue;
    }
    if (rc.type != "entailment") throw Error(ErrorCode::ParseError, "unknown constraint type '" + rc.type + "'");
    Entailment e;
    e.scope1 = detail::lookup_set(sidx, rc.scope1);
    e.scope2 = detail::lookup_set(sidx, rc.scope2);
    if (e.scope1.empty() || e.scope2.empty())
      throw Error(ErrorCode::MalformedConstraint, "entailment constraint with an empty scope");
    if (rc.relation == "eq") e.rel = Relation::eq();
    else if (rc.relation == "neq") e.rel = Relation::neq();
    else if (rc.relation == "sim" || rc.relation == "nsim") {
      if (!w.hierarchy) throw Error(ErrorCode::MissingHierarchy, rc.relation + " constraint needs a hierarchy");
      if (!rc.level) throw Error(ErrorCode::MalformedConstraint, rc.relation + " constraint without a level");
      if (*rc.level < 1 || *rc.level > w.hierarchy->levels())
        throw Error(ErrorCode::MalformedConstraint, "level " + std::to_string(*rc.level) + " is outside the hierarchy");
      e.rel = rc.relation == "sim" ? Relation::sim(*rc.level) : Relation::nsim(*rc.level);
    } else if (rc.relation == "pairs") {
      std::vector<std::pair<UserId, UserId>> p;
      for (const auto& [a, b] : rc.pairs)
        p.emplace_back(detail::lookup(uidx, a, "user"), detail::lookup(uidx, b, "user"));
      e.rel = Relation::explicit_pairs(std::move(p));
    } else {
      throw Error(ErrorCode::ParseError, "unknown relation '" + rc.relation + "'");
    }
    w.constraints.push_back(e);
  }
  w.constraints = dedup_constraints(w.constraints);
  return w;
}

// Inverse of validate_instance for a well formed instance.
inline RawInstance to_raw(const WorkflowInstance& w) {
  RawInstance raw;
  raw.steps = w.steps;
  raw.users = w.users;
  auto names = [&](StepSet s) {
    std::vector<std::string> out;
    s.for_each([&](StepId i) { out.push_back(w.steps[i]); });
    return out;
  };
  for (auto [a, b] : w.order) raw.order.emplace_back(w.steps[a], w.steps[b]);
  for (UserId u = 0; u < w.n(); ++u) raw.auth.emplace_back(w.users[u], names(w.auth[u]));
  for (const auto& c : w.constraints) {
    RawConstraint rc;
    if (const auto* cc = as_counting(c)) {
      rc.type = "counting";
      rc.tl = cc->tl;
      rc.tr = cc->tr;
      rc.scope = names(cc->scope);
    } else {
      const auto& e = std::get<Entailment>(c);
      rc.type = "entailment";
      rc.relation = std::string(relation_name(e.rel.kind));
      if (e.rel.kind == RelationKind::Sim || e.rel.kind == RelationKind::Nsim) rc.level = e.rel.level;
      for (auto [a, b] : e.rel.pairs) rc.pairs.emplace_back(w.users[a], w.users[b]);
      rc.scope1 = names(e.scope1);
      rc.scope2 = names(e.scope2);
    }
    raw.constraints.push_back(std::move(rc));
  }
  if (w.hierarchy) {
    auto& levels = raw.hierarchy.emplace();
    for (int i = 1; i <= w.hierarchy->levels(); ++i) {
      auto& out = levels.emplace_back();
      for (const auto& block : w.hierarchy->blocks(i)) {
        auto& b = out.emplace_back();
        for (UserId u : block) b.push_back(w.users[u]);
      }
    }
  }
  return raw;
}

}  // namespace wsp

#endif
