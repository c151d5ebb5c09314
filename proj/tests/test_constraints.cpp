#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"

using namespace wsp;
using namespace wsp::test;

namespace {

// Plain evaluator for counting, eq and neq, written without the library.
bool holds(const Constraint& c, const std::vector<int>& plan) {
  if (const auto* cc = as_counting(c)) {
    std::vector<int> load(plan.size() + 1, 0);
    for (int s = 0; s < int(plan.size()); ++s)
      if (cc->scope.contains(s)) ++load[plan[s]];
    for (int x : load)
      if (x != 0 && (x < cc->tl || x > cc->tr)) return false;
    return true;
  }
  const auto& e = std::get<Entailment>(c);
  for (int a = 0; a < int(plan.size()); ++a)
    for (int b = 0; b < int(plan.size()); ++b) {
      if (!e.scope1.contains(a) || !e.scope2.contains(b)) continue;
      bool same = plan[a] == plan[b];
      if (e.rel.kind == RelationKind::Eq ? same : !same) return true;
    }
  return false;
}

// Some plan gives user 0 exactly the steps of f and satisfies c. Other steps
// go to users 1..k.
bool completable(int k, std::uint32_t f, const Constraint& c) {
  std::vector<int> outside;
  std::vector<int> plan(k, 0);
  for (int s = 0; s < k; ++s)
    if (!((f >> s) & 1u)) outside.push_back(s);
  std::vector<int> pick(outside.size(), 1);
  while (true) {
    for (std::size_t i = 0; i < outside.size(); ++i) plan[outside[i]] = pick[i];
    if (holds(c, plan)) return true;
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] > k) pick[i++] = 1;
    if (i == pick.size()) return false;
  }
}

StepSet random_scope(std::mt19937_64& rng, int k, int min_size = 1) {
  while (true) {
    StepSet s(std::uint32_t(rng()) & StepSet::all(k).bits());
    if (s.size() >= min_size) return s;
  }
}

Constraint random_constraint(std::mt19937_64& rng, int k, bool eq_ok = true) {
  int kind = int(rng() % (eq_ok ? 3 : 2));
  if (kind == 0) {
    StepSet scope = random_scope(rng, k);
    int tl = 1 + int(rng() % scope.size());
    int tr = tl + int(rng() % (scope.size() - tl + 1));
    return Counting{tl, tr, scope};
  }
  StepSet a = random_scope(rng, k), b = random_scope(rng, k);
  return kind == 1 ? make_neq(a, b) : make_eq(a, b);
}

}  // namespace

TEST(Ineligible, CountingRule) {
  Constraint c = Counting{2, 3, S({0, 1, 2, 3})};
  EXPECT_FALSE(is_ineligible(S({4}), c));
  EXPECT_TRUE(is_ineligible(S({0}), c));
  EXPECT_TRUE(is_ineligible(S({0, 4}), c));
  EXPECT_FALSE(is_ineligible(S({0, 1}), c));
  EXPECT_FALSE(is_ineligible(S({0, 1, 2}), c));
  EXPECT_TRUE(is_ineligible(S({0, 1, 2, 3}), c));
}

TEST(Ineligible, EntailmentRules) {
  Constraint neq = make_neq(S({0}), S({1, 2}));
  EXPECT_TRUE(is_ineligible(S({0, 1, 2}), neq));
  EXPECT_FALSE(is_ineligible(S({0, 1}), neq));
  Constraint eq = make_eq(S({0}), S({1, 2}));
  EXPECT_TRUE(is_ineligible(S({0, 3}), eq));
  EXPECT_FALSE(is_ineligible(S({0, 2}), eq));
  EXPECT_TRUE(is_ineligible(S({1, 2}), eq));
  EXPECT_FALSE(is_ineligible(S({1}), eq));
  EXPECT_EQ(error_of([] { is_ineligible(S({0}), make_sim(1, S({0}), S({1}))); }),
            ErrorCode::UnsupportedConstraint);
}

// Ineligible sets never occur in a valid plan, and for eq, neq and counting
// with tl = 1 every eligible set does.
TEST(Ineligible, AgreesWithExhaustiveCompletion) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    int k = 1 + int(rng() % 4);
    Constraint c = random_constraint(rng, k);
    const auto* cc = as_counting(c);
    std::vector<bool> ok(1u << k);
    bool satisfiable = false;
    for (std::uint32_t f = 0; f < (1u << k); ++f) {
      ok[f] = completable(k, f, c);
      satisfiable = satisfiable || ok[f];
    }
    bool exact = satisfiable && (!cc || cc->tl == 1);
    for (std::uint32_t f = 0; f < (1u << k); ++f) {
      bool inel = is_ineligible(StepSet(f), c);
      if (inel) {
        EXPECT_FALSE(ok[f]) << "trial " << trial << " f " << f;
      }
      if (exact) {
        EXPECT_EQ(!inel, ok[f]) << "trial " << trial << " f " << f;
      }
    }
  }
}

TEST(EligibleFamily, MatchesPerSetRule) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 1 + int(rng() % 6);
    std::vector<Constraint> cs;
    int c = int(rng() % 5);
    for (int i = 0; i < c; ++i) cs.push_back(random_constraint(rng, k));
    SubsetTable t = eligible_family(cs, k);
    ASSERT_EQ(t.width(), k);
    for (std::uint32_t f = 0; f < (1u << k); ++f) {
      bool any = false;
      for (const auto& x : cs) any = any || is_ineligible(StepSet(f), x);
      EXPECT_EQ(t.test(f), !any);
    }
  }
}

TEST(EligibleFamily, EmptyConstraintsKeepEverything) {
  SubsetTable t = eligible_family({}, 5);
  EXPECT_EQ(t.count(), 32u);
}

TEST(ConflictMasks, OnlyMarkPairsNoEligibleSetHolds) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 2 + int(rng() % 5);
    std::vector<Constraint> cs;
    for (int i = 0; i < 3; ++i) cs.push_back(random_constraint(rng, k, false));
    SubsetTable t = eligible_family(cs, k);
    auto conf = conflict_masks(cs, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        if (!((conf[a] >> b) & 1u)) continue;
        EXPECT_TRUE((conf[b] >> a) & 1u);
        for (std::uint32_t f = 0; f < (1u << k); ++f)
          if (((f >> a) & 1u) && ((f >> b) & 1u)) {
            EXPECT_FALSE(t.test(f));
          }
      }
  }
}

TEST(Classify, Routes) {
  EXPECT_EQ(classify(fig1_constraints()).route, SolverRoute::Flat);
  std::vector<Constraint> t3 = {make_eq(S({0, 1}), S({2, 3}))};
  auto r = classify(t3);
  EXPECT_EQ(r.route, SolverRoute::NeedsRewrite);
  EXPECT_FALSE(r.regular[0]);
  std::vector<Constraint> sim = {make_neq(S1(0), S1(1)), make_sim(1, S1(0), S1(2))};
  EXPECT_EQ(classify(sim).route, SolverRoute::NeedsHierarchy);
  std::vector<Constraint> pairs = {Entailment{Relation::explicit_pairs({{0, 1}}), S1(0), S1(1)}, t3[0]};
  EXPECT_EQ(classify(pairs).route, SolverRoute::OracleOnly);
  EXPECT_EQ(route_name(SolverRoute::OracleOnly), "oracle-only");
}

TEST(Classify, OverlappingEqualityIsTrivial) {
  std::vector<Constraint> cs = {make_eq(S({0, 1}), S({1, 2})), make_neq(S({0, 1}), S({1, 2})),
                                make_sim(2, S({0, 3}), S({3}))};
  auto r = classify(cs);
  EXPECT_TRUE(r.trivially_satisfied[0]);
  EXPECT_FALSE(r.trivially_satisfied[1]);
  EXPECT_TRUE(r.trivially_satisfied[2]);
  EXPECT_EQ(r.route, SolverRoute::Flat);
}

// A regular constraint holds on every plan whose classes are eligible and
// pairwise held by distinct users.
TEST(Regularity, RegularConstraintsHoldOnEligiblePartitions) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    int k = 1 + int(rng() % 5);
    Constraint c = random_constraint(rng, k);
    std::vector<Constraint> one = {c};
    bool regular = classify(one).regular[0];
    // Enumerate set partitions through restricted growth strings.
    std::vector<int> rgs(k, 0);
    bool counterexample = false;
    while (true) {
      bool eligible = true;
      int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
      for (int b = 0; b < blocks; ++b) {
        StepSet f;
        for (int s = 0; s < k; ++s)
          if (rgs[s] == b) f.insert(s);
        if (is_ineligible(f, c)) eligible = false;
      }
      if (eligible && !holds(c, rgs)) counterexample = true;
      int i = k - 1;
      while (i > 0) {
        int mx = *std::max_element(rgs.begin(), rgs.begin() + i);
        if (rgs[i] <= mx) break;
        rgs[i--] = 0;
      }
      if (i <= 0) break;
      ++rgs[i];
    }
    if (regular) {
      EXPECT_FALSE(counterexample) << "trial " << trial;
    }
  }
}

TEST(Regularity, Type3EqualityIsNotRegular) {
  Constraint c = make_eq(S({0, 1}), S({2, 3}));
  for (int s = 0; s < 4; ++s) EXPECT_FALSE(is_ineligible(S1(s), c));
  EXPECT_FALSE(holds(c, {0, 1, 2, 3}));
}

TEST(RewriteEq, PreservesVerdictAndPlans) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    int k = 2 + int(rng() % 3);
    WorkflowInstance w = open_instance(k, 1 + int(rng() % 3));
    for (auto& a : w.auth) a = random_scope(rng, k, 0);
    int c = 1 + int(rng() % 3);
    for (int i = 0; i < c; ++i) w.constraints.push_back(random_constraint(rng, k));
    w.constraints.push_back(make_eq(random_scope(rng, k, 2), random_scope(rng, k, 2)));
    WorkflowInstance r = rewrite_eq_type3(w);
    EXPECT_NE(classify(r.constraints).route, SolverRoute::NeedsRewrite);
    auto p = brute_force(r);
    EXPECT_EQ(p.has_value(), brute_sat(w)) << "trial " << trial;
    if (p) {
      p->assignment.resize(w.k());
      EXPECT_TRUE(check_plan(w, *p).valid);
    }
  }
}

TEST(RewriteEq, AddsOneStepPerConstraint) {
  WorkflowInstance w = open_instance(4, 2, {make_eq(S({0, 1}), S({2, 3})), make_eq(S({0, 2}), S({1, 3})),
                                            make_eq(S({0, 1}), S({1, 2}))});
  WorkflowInstance r = rewrite_eq_type3(w);
  EXPECT_EQ(r.k(), 6);
  EXPECT_EQ(r.c(), 4);
  EXPECT_EQ(r.steps[4].rfind(std::string(kDummyPrefix), 0), 0u);
  for (const auto& a : r.auth) EXPECT_TRUE(a.contains(4) && a.contains(5));
}

TEST(RewriteEq, StepLimit) {
  WorkflowInstance w = open_instance(kMaxSteps, 1, {make_eq(S({0, 1}), S({2, 3}))});
  EXPECT_EQ(error_of([&] { rewrite_eq_type3(w); }), ErrorCode::StepLimitExceeded);
  WorkflowInstance small = open_instance(4, 1, {make_eq(S({0, 1}), S({2, 3}))});
  EXPECT_EQ(error_of([&] { rewrite_eq_type3(small, 4); }), ErrorCode::StepLimitExceeded);
  EXPECT_EQ(rewrite_eq_type3(small, 5).k(), 5);
}

TEST(RewriteSim, NeedsHierarchy) {
  WorkflowInstance w = open_instance(4, 1, {make_sim(1, S({0, 1}), S({2, 3}))});
  EXPECT_EQ(error_of([&] { rewrite_sim_type3(w); }), ErrorCode::MissingHierarchy);
}

TEST(Constructors, Shapes) {
  EXPECT_EQ(separation_of_duty(S({0, 1, 2})), (Counting{1, 2, S({0, 1, 2})}));
  EXPECT_EQ(binding_of_duty(S({0, 1, 2})), (Counting{3, 3, S({0, 1, 2})}));
  EXPECT_EQ(division_of_duty(S({0, 1, 2, 3, 4}), 2), (Counting{2, 3, S({0, 1, 2, 3, 4})}));
  EXPECT_EQ(threshold(2, S({0, 1, 2})), (Counting{1, 2, S({0, 1, 2})}));
  EXPECT_EQ(threshold(9, S({0, 1})), (Counting{1, 2, S({0, 1})}));
  EXPECT_EQ(over_enforce_min_users(3, S({0, 1, 2, 3, 4})), (Counting{1, 2, S({0, 1, 2, 3, 4})}));
}

TEST(Constructors, Errors) {
  EXPECT_EQ(error_of([] { separation_of_duty(S1(0)); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([] { binding_of_duty(StepSet{}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([] { division_of_duty(S({0, 1}), 3); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([] { threshold(0, S({0})); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([] { over_enforce_min_users(1, S({0, 1})); }), ErrorCode::DegenerateThreshold);
  EXPECT_EQ(error_of([] { over_enforce_min_users(3, S({0, 1})); }), ErrorCode::InvalidArgument);
}

// Every valid plan spends at least t distinct users on the scope.
TEST(Constructors, OverEnforceNeedsTUsers) {
  for (int m = 2; m <= 5; ++m)
    for (int t = 2; t <= m; ++t) {
      Constraint c = over_enforce_min_users(t, StepSet::all(m));
      std::vector<int> plan(m, 0);
      while (true) {
        if (holds(c, plan)) {
          std::set<int> used(plan.begin(), plan.end());
          EXPECT_GE(int(used.size()), t);
        }
        int i = 0;
        while (i < m && ++plan[i] == m) plan[i++] = 0;
        if (i == m) break;
      }
    }
}

TEST(Constructors, SeparationForbidsOneUserForAll) {
  Constraint c = separation_of_duty(S({0, 1, 2}));
  EXPECT_FALSE(holds(c, {0, 0, 0}));
  EXPECT_TRUE(holds(c, {0, 0, 1}));
  Constraint b = binding_of_duty(S({0, 1, 2}));
  EXPECT_TRUE(holds(b, {1, 1, 1}));
  EXPECT_FALSE(holds(b, {1, 1, 0}));
}
