#ifndef WSP_CONSTRAINTS_HPP
#define WSP_CONSTRAINTS_HPP

#include <span>
#include <string>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/model.hpp"
#include "wsp/step_set.hpp"

namespace wsp {

//-----------------------------------------------------------------------------
// Ineligibility

// True when no valid plan can give one user exactly the steps in F.
inline bool is_ineligible(StepSet f, const Constraint& c) {
  if (const auto* cc = as_counting(c)) {
    int x = (f & cc->scope).size();
    return (x > 0 && x < cc->tl) || x > cc->tr;
  }
  const auto& e = std::get<Entailment>(c);
  switch (e.rel.kind) {
    case RelationKind::Neq:
      return (e.scope1 | e.scope2).subset_of(f);
    case RelationKind::Eq:
      return (e.scope1.subset_of(f) && !f.intersects(e.scope2)) ||
             (e.scope2.subset_of(f) && !f.intersects(e.scope1));
    default:
      throw Error(ErrorCode::UnsupportedConstraint,
                  std::string(relation_name(e.rel.kind)) + " has no per-user ineligibility rule");
  }
}

namespace detail {

// Clears every F with must <= F and F disjoint from avoid.
inline void clear_family(SubsetTable& t, std::uint32_t must, std::uint32_t avoid) {
  if (must & avoid) return;
  std::uint32_t free = StepSet::all(t.width()).bits() & ~(must | avoid);
  for_each_submask(free, [&](std::uint32_t sub) { t.reset(must | sub); });
}

}  // namespace detail

// Marks in `t` the sets made ineligible by one entailment, read as a rule of
// the given kind (Eq or Neq).
inline void clear_entailment_rule(SubsetTable& t, const Entailment& e, bool equality) {
  if (equality) {
    detail::clear_family(t, e.scope1.bits(), e.scope2.bits());
    detail::clear_family(t, e.scope2.bits(), e.scope1.bits());
  } else {
    detail::clear_family(t, (e.scope1 | e.scope2).bits(), 0);
  }
}

inline void clear_ineligible(SubsetTable& t, const Constraint& c) {
  if (const auto* cc = as_counting(c)) {
    std::uint32_t scope = cc->scope.bits();
    std::uint32_t outside = StepSet::all(t.width()).bits() & ~scope;
    for_each_submask(scope, [&](std::uint32_t j) {
      int x = std::popcount(j);
      if ((x > 0 && x < cc->tl) || x > cc->tr)
        for_each_submask(outside, [&](std::uint32_t sub) { t.reset(j | sub); });
    });
    return;
  }
  const auto& e = std::get<Entailment>(c);
  if (e.rel.kind == RelationKind::Eq) clear_entailment_rule(t, e, true);
  else if (e.rel.kind == RelationKind::Neq) clear_entailment_rule(t, e, false);
  else
    throw Error(ErrorCode::UnsupportedConstraint,
                std::string(relation_name(e.rel.kind)) + " has no per-user ineligibility rule");
}

// Bit F is set iff F is eligible for every constraint.
inline SubsetTable eligible_family(std::span<const Constraint> constraints, int k) {
  SubsetTable t(k, true);
  for (const auto& c : constraints) clear_ineligible(t, c);
  return t;
}

// Pairwise conflicts implied by the constraints: steps i and j conflict when
// every set holding both is ineligible.
inline std::vector<std::uint32_t> conflict_masks(std::span<const Constraint> constraints, int k) {
  std::vector<std::uint32_t> conf(k, 0);
  auto add = [&](StepSet pair) {
    if (pair.size() != 2) return;
    StepId a = pair.lowest();
    StepId b = (pair - StepSet::single(a)).lowest();
    conf[a] |= 1u << b;
    conf[b] |= 1u << a;
  };
  for (const auto& c : constraints) {
    if (const auto* cc = as_counting(c)) {
      if (cc->tr == 1) {
        auto members = cc->scope.to_vector();
        for (std::size_t i = 0; i < members.size(); ++i)
          for (std::size_t j = i + 1; j < members.size(); ++j) add(StepSet::of({members[i], members[j]}));
      }
    } else if (const auto* e = as_entailment(c); e->rel.kind == RelationKind::Neq) {
      add(e->scope1 | e->scope2);
    }
  }
  return conf;
}

//-----------------------------------------------------------------------------
// Classification

enum class SolverRoute { Flat, NeedsRewrite, NeedsHierarchy, OracleOnly };

inline std::string_view route_name(SolverRoute r) {
  switch (r) {
    case SolverRoute::Flat: return "flat";
    case SolverRoute::NeedsRewrite: return "needs-rewrite";
    case SolverRoute::NeedsHierarchy: return "needs-hierarchy";
    case SolverRoute::OracleOnly: return "oracle-only";
  }
  return "?";
}

struct RegularityReport {
  std::vector<bool> regular;
  std::vector<bool> trivially_satisfied;
  SolverRoute route = SolverRoute::Flat;
};

inline bool trivially_satisfied(const Constraint& c) {
  const auto* e = as_entailment(c);
  return e && (e->rel.kind == RelationKind::Eq || e->rel.kind == RelationKind::Sim) && e->overlapping();
}

inline RegularityReport classify(std::span<const Constraint> constraints) {
  RegularityReport r;
  int rank = 0;
  for (const auto& c : constraints) {
    bool trivial = trivially_satisfied(c);
    bool regular = true;
    int need = 0;
    if (const auto* e = as_entailment(c); e && !trivial) {
      switch (e->rel.kind) {
        case RelationKind::Eq:
          if (e->type() == 3) { regular = false; need = 1; }
          break;
        case RelationKind::Neq:
          break;
        case RelationKind::Sim:
        case RelationKind::Nsim:
          regular = false;
          need = 2;
          break;
        case RelationKind::Pairs:
          regular = false;
          need = 3;
          break;
      }
    }
    r.regular.push_back(regular);
    r.trivially_satisfied.push_back(trivial);
    rank = std::max(rank, need);
  }
  r.route = rank == 0 ? SolverRoute::Flat
          : rank == 1 ? SolverRoute::NeedsRewrite
          : rank == 2 ? SolverRoute::NeedsHierarchy
                      : SolverRoute::OracleOnly;
  return r;
}

//-----------------------------------------------------------------------------
// Rewrites

namespace detail {

inline std::string fresh_dummy_name(const WorkflowInstance& w, int& counter) {
  while (true) {
    std::string name = std::string(kDummyPrefix) + std::to_string(++counter);
    if (std::find(w.steps.begin(), w.steps.end(), name) == w.steps.end()) return name;
  }
}

// Splits each matching type-3 entailment (rel, S1, S2) into (rel, S1, {d})
// and (rel, {d}, S2) over a fresh step d that every user may perform.
template <class Pred>
WorkflowInstance split_type3(const WorkflowInstance& w, int cap, Pred matches) {
  int extra = 0;
  for (const auto& c : w.constraints)
    if (const auto* e = as_entailment(c); e && matches(*e) && e->type() == 3 && !e->overlapping()) ++extra;
  bool any_trivial = false;
  for (const auto& c : w.constraints)
    if (const auto* e = as_entailment(c); e && matches(*e) && e->type() == 3 && e->overlapping()) any_trivial = true;
  if (extra == 0 && !any_trivial) return w;
  if (w.k() + extra > std::min(cap, kMaxSteps))
    throw Error(ErrorCode::StepLimitExceeded, "rewriting needs " + std::to_string(w.k() + extra) + " steps");
  WorkflowInstance out = w;
  out.constraints.clear();
  int counter = 0;
  for (const auto& c : w.constraints) {
    const auto* e = as_entailment(c);
    if (!e || !matches(*e) || e->type() != 3) {
      out.constraints.push_back(c);
      continue;
    }
    if (e->overlapping()) continue;
    StepId d = out.k();
    out.steps.push_back(fresh_dummy_name(out, counter));
    for (auto& a : out.auth) a.insert(d);
    out.constraints.push_back(Entailment{e->rel, e->scope1, StepSet::single(d)});
    out.constraints.push_back(Entailment{e->rel, StepSet::single(d), e->scope2});
  }
  return out;
}

}  // namespace detail

// Replaces every type-3 equality constraint by two type-2 ones sharing a
// fresh step. Overlapping ones are always satisfied and are dropped.
inline WorkflowInstance rewrite_eq_type3(const WorkflowInstance& w, int cap = kMaxSteps) {
  return detail::split_type3(w, cap, [](const Entailment& e) { return e.rel.kind == RelationKind::Eq; });
}

inline WorkflowInstance rewrite_sim_type3(const WorkflowInstance& w, int cap = kMaxSteps) {
  if (!w.hierarchy) throw Error(ErrorCode::MissingHierarchy, "sim rewrite needs a hierarchy");
  return detail::split_type3(w, cap, [](const Entailment& e) { return e.rel.kind == RelationKind::Sim; });
}

//-----------------------------------------------------------------------------
// Counting constructors

inline Counting separation_of_duty(StepSet scope) {
  if (scope.size() < 2) throw Error(ErrorCode::InvalidArgument, "separation of duty needs two steps");
  return {1, scope.size() - 1, scope};
}

inline Counting binding_of_duty(StepSet scope) {
  if (scope.empty()) throw Error(ErrorCode::InvalidArgument, "empty scope");
  return {scope.size(), scope.size(), scope};
}

// Every user who takes part does about an equal share of |scope| / v steps.
inline Counting division_of_duty(StepSet scope, int v) {
  int m = scope.size();
  if (v < 1 || v > m) throw Error(ErrorCode::InvalidArgument, "division needs 1 <= v <= |scope|");
  return {m / v, (m + v - 1) / v, scope};
}

inline Counting threshold(int t, StepSet scope) {
  if (scope.empty() || t < 1) throw Error(ErrorCode::InvalidArgument, "threshold needs t >= 1 and a scope");
  return {1, std::min(t, scope.size()), scope};
}

// Bounds every user's share so that at least t users are needed for the scope.
inline Counting over_enforce_min_users(int t, StepSet scope) {
  if (t < 2) throw Error(ErrorCode::DegenerateThreshold, "t must be at least 2");
  if (scope.size() < t) throw Error(ErrorCode::InvalidArgument, "scope smaller than t");
  return {1, (scope.size() - 1) / (t - 1), scope};
}

}  // namespace wsp

#endif
