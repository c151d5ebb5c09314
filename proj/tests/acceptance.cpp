// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wsp/wsp.hpp"

using namespace wsp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 5) failures.push_back(why);
  }
};

double now_ms() {
  using clock = std::chrono::steady_clock;
  static const auto start = clock::now();
  return std::chrono::duration<double, std::milli>(clock::now() - start).count();
}

bool oracle_sat(const WorkflowInstance& w) { return oracle_solve(w, OracleLimits{8, 1e12}).has_value(); }

// Solves and checks the returned plan independently.
bool solve_checked(const WorkflowInstance& w, Outcome& o, const std::string& tag, const SolveOptions& opt = {}) {
  SolveResult r = solve(w, opt);
  if (r.sat() && !check_plan(w, *r.plan).valid) o.fail(tag + ": returned plan fails check_plan");
  return r.sat();
}

//-----------------------------------------------------------------------------
// Local brute force for the source problems

bool nae_brute(int vars, const std::vector<std::array<int, 3>>& clauses) {
  for (int a = 0; a < (1 << vars); ++a) {
    bool all = true;
    for (const auto& c : clauses) {
      std::set<bool> values;
      for (int lit : c) {
        bool v = (a >> (std::abs(lit) - 1)) & 1;
        values.insert(lit > 0 ? v : !v);
      }
      if (values.size() < 2) { all = false; break; }
    }
    if (all) return true;
  }
  return false;
}

bool hitting_brute(int elements, const std::vector<unsigned>& sets, int k) {
  // Try every subset of at most k elements.
  std::vector<int> pick;
  std::function<bool(int)> go = [&](int from) {
    bool hit = std::all_of(sets.begin(), sets.end(), [&](unsigned s) {
      return std::any_of(pick.begin(), pick.end(), [&](int e) { return (s >> e) & 1u; });
    });
    if (hit) return true;
    if (int(pick.size()) == k) return false;
    for (int e = from; e < elements; ++e) {
      pick.push_back(e);
      if (go(e + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  return go(0);
}

bool colorable_brute(const Graph& g) {
  int v = g.vertices;
  int total = 1;
  for (int i = 0; i < v; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> col(v);
    for (int i = 0, c = code; i < v; ++i, c /= 3) col[i] = c % 3;
    bool ok = true;
    for (auto [a, b] : g.edges)
      if (col[a] == col[b]) ok = false;
    if (ok) return true;
  }
  return false;
}

//-----------------------------------------------------------------------------
// 1. Oracle equivalence

Outcome oracle_equivalence() {
  Outcome o;
  const std::vector<std::string> classes = {"counting", "wsp1-neq", "neq", "eq", "sim-single", "sim-multi"};
  std::map<std::string, int> per_class;
  std::mt19937_64 rng(2024);
  for (const auto& mix : classes) {
    for (int i = 0; i < 1200; ++i) {
      RandomSpec spec;
      spec.k = std::uniform_int_distribution<int>(1, 5)(rng);
      spec.n = std::uniform_int_distribution<int>(1, 6)(rng);
      spec.constraints = std::uniform_int_distribution<int>(1, 6)(rng);
      spec.auth_density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
      spec.mix = mix;
      spec.seed = rng();
      WorkflowInstance w = gen_random(spec);
      bool expect = oracle_sat(w);
      bool got = solve_checked(w, o, mix);
      if (got != expect) o.fail(mix + " seed " + std::to_string(spec.seed) + ": verdict differs from the oracle");
      ++per_class[mix];
    }
  }
  std::ostringstream d;
  for (const auto& [mix, count] : per_class) d << mix << "=" << count << " ";
  o.detail = d.str();
  return o;
}

//-----------------------------------------------------------------------------
// 2. NAE-3-SAT reduction

using Clause = std::array<int, 3>;

std::vector<Clause> all_clauses(int vars) {
  std::vector<int> lits;
  for (int v = 1; v <= vars; ++v) {
    lits.push_back(v);
    lits.push_back(-v);
  }
  std::vector<Clause> out;
  int L = int(lits.size());
  for (int a = 0; a < L; ++a)
    for (int b = a; b < L; ++b)
      for (int c = b; c < L; ++c) out.push_back({lits[a], lits[b], lits[c]});
  return out;
}

Outcome nae_reduction() {
  Outcome o;
  const std::vector<Clause> first = {{1, 1, 1}, {1, 1, -1}, {1, 1, 2}, {1, -1, 2}, {1, 2, 3}};
  auto pool = all_clauses(4);
  long checked = 0;
  auto run = [&](const std::vector<Clause>& clauses) {
    int vars = 0;
    for (const auto& c : clauses)
      for (int lit : c) vars = std::max(vars, std::abs(lit));
    CnfFormula f{vars, clauses};
    WorkflowInstance w = gen_nae3sat(f);
    if (w.n() != 2 || w.k() != 2 * vars) o.fail("reduction shape differs");
    bool expect = nae_brute(vars, clauses);
    if (solve_checked(w, o, "nae") != expect) {
      std::ostringstream s;
      for (const auto& c : clauses) s << "(" << c[0] << "," << c[1] << "," << c[2] << ")";
      o.fail("formula " + s.str());
    }
    ++checked;
  };
  run({});
  int P = int(pool.size());
  for (const auto& head : first) {
    run({head});
    for (int a = 0; a < P; ++a) {
      run({head, pool[a]});
      for (int b = a; b < P; ++b) {
        run({head, pool[a], pool[b]});
        for (int c = b; c < P; ++c) run({head, pool[a], pool[b], pool[c]});
      }
    }
  }
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    int vars = std::uniform_int_distribution<int>(1, 4)(rng);
    int m = std::uniform_int_distribution<int>(0, 4)(rng);
    std::vector<Clause> clauses;
    for (int j = 0; j < m; ++j) {
      Clause c;
      for (int& lit : c) {
        lit = std::uniform_int_distribution<int>(1, vars)(rng);
        if (rng() & 1) lit = -lit;
      }
      clauses.push_back(c);
    }
    run(clauses);
  }
  o.detail = std::to_string(checked) + " formulas";
  return o;
}

//-----------------------------------------------------------------------------
// 3. Hitting set reductions

// Families are multisets of element columns (bit i set when the element is
// in set i), kept only when minimal under permutations of the sets.
bool canonical_under_rows(const std::vector<unsigned>& cols, int m) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<unsigned> mapped(cols.size());
  while (std::next_permutation(perm.begin(), perm.end())) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      unsigned x = 0;
      for (int r = 0; r < m; ++r)
        if ((cols[i] >> r) & 1u) x |= 1u << perm[r];
      mapped[i] = x;
    }
    std::sort(mapped.begin(), mapped.end());
    if (mapped < cols) return false;
  }
  return true;
}

Outcome hitting_set_reductions() {
  Outcome o;
  long families = 0, instances = 0;
  long eq_bad = 0, counting_bad = 0, counting_false_sat = 0;
  int worst_k = 0;
  for (int m = 1; m <= 5; ++m) {
    unsigned col_values = 1u << m;
    for (int e = 1; e <= 6; ++e) {
      std::vector<unsigned> cols(e, 0);
      std::function<void(int, unsigned)> go = [&](int pos, unsigned from) {
        if (pos == e) {
          std::vector<unsigned> sets(m, 0);
          for (int x = 0; x < e; ++x)
            for (int r = 0; r < m; ++r)
              if ((cols[x] >> r) & 1u) sets[r] |= 1u << x;
          if (std::any_of(sets.begin(), sets.end(), [](unsigned s) { return s == 0; })) return;
          if (!canonical_under_rows(cols, m)) return;
          ++families;
          for (int k = 1; k <= 3; ++k) {
            HittingSetInstance h;
            for (int x = 0; x < e; ++x) h.elements.push_back("z" + std::to_string(x + 1));
            for (unsigned s : sets) {
              auto& set = h.sets.emplace_back();
              for (int x = 0; x < e; ++x)
                if ((s >> x) & 1u) set.push_back(x);
            }
            h.k = k;
            bool expect = hitting_brute(e, sets, k);
            bool eq = solve_checked(gen_hitting_set_eq(h), o, "hs-eq");
            bool cnt = solve_checked(gen_hitting_set_counting(h), o, "hs-counting");
            std::ostringstream s;
            s << "m=" << m << " e=" << e << " k=" << k << " sets";
            for (unsigned x : sets) s << " " << x;
            if (eq != expect) {
              ++eq_bad;
              o.fail("equality reduction: " + s.str());
            }
            if (cnt != expect || cnt != eq) {
              ++counting_bad;
              if (cnt) ++counting_false_sat;
              worst_k = std::max(worst_k, k);
              o.fail("counting reduction: " + s.str());
            }
            instances += 2;
          }
          return;
        }
        for (unsigned c = from; c < col_values; ++c) {
          cols[pos] = c;
          go(pos + 1, c);
        }
      };
      go(0, 0);
    }
  }
  std::ostringstream d;
  d << families << " families, " << instances << " instances; equality mismatches " << eq_bad
    << ", counting mismatches " << counting_bad << " (false SAT " << counting_false_sat << ")";
  o.detail = d.str();
  return o;
}

//-----------------------------------------------------------------------------
// 4. OR-composition

Graph complete(int v) {
  Graph g{v, {}};
  for (int a = 0; a < v; ++a)
    for (int b = a + 1; b < v; ++b) g.edges.push_back({a, b});
  return g;
}

Graph cycle(int v) {
  Graph g{v, {}};
  for (int a = 0; a < v; ++a) g.edges.push_back({a, (a + 1) % v});
  return g;
}

Graph path(int v) {
  Graph g{v, {}};
  for (int a = 0; a + 1 < v; ++a) g.edges.push_back({a, a + 1});
  return g;
}

Graph random_graph(std::mt19937_64& rng) {
  Graph g{std::uniform_int_distribution<int>(3, 5)(rng), {}};
  for (int a = 0; a < g.vertices; ++a)
    for (int b = a + 1; b < g.vertices; ++b)
      if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.6) g.edges.push_back({a, b});
  return g;
}

Outcome or_composition() {
  Outcome o;
  std::mt19937_64 rng(5);
  const std::vector<std::string> names = {"K3", "K4", "C5", "P4", "random"};
  int multisets = 0;
  auto make = [&](int id) {
    switch (id) {
      case 0: return complete(3);
      case 1: return complete(4);
      case 2: return cycle(5);
      case 3: return path(4);
      default: return random_graph(rng);
    }
  };
  std::function<void(std::vector<int>&, int)> go = [&](std::vector<int>& pick, int from) {
    if (!pick.empty()) {
      std::vector<Graph> graphs;
      std::string label;
      for (int id : pick) {
        graphs.push_back(make(id));
        label += names[id] + " ";
      }
      bool expect = std::any_of(graphs.begin(), graphs.end(), colorable_brute);
      WorkflowInstance w = gen_3coloring_or(graphs);
      int kappa = 0;
      for (const auto& g : graphs) kappa = std::max(kappa, g.vertices);
      if (w.k() != kappa + kappa * kappa) o.fail(label + ": step count differs from kappa + kappa^2");
      bool got = solve_checked(w, o, label);
      if (got != expect) o.fail(label + ": verdict differs from coloring brute force");
      ++multisets;
    }
    if (pick.size() == 3) return;
    for (int id = from; id < 5; ++id) {
      pick.push_back(id);
      go(pick, id);
      pick.pop_back();
    }
  };
  std::vector<int> pick;
  go(pick, 0);
  if (solve_checked(gen_3coloring_or({complete(4)}), o, "K4")) o.fail("K4 alone must be UNSAT");
  if (!solve_checked(gen_3coloring_or({complete(3)}), o, "K3")) o.fail("K3 alone must be SAT");
  o.detail = std::to_string(multisets) + " multisets";
  return o;
}

//-----------------------------------------------------------------------------
// 5. Kernel guarantees

Outcome kernel_guarantees() {
  Outcome o;
  std::mt19937_64 rng(99);
  int matching_runs = 0, max_users = 0, easy_runs = 0, max_easy_users = 0;
  auto preserve = [&](const WorkflowInstance& w, const KernelResult& kr, const std::string& tag) {
    bool expect = oracle_sat(w);
    bool got;
    if (kr.verdict_shortcut) {
      got = *kr.verdict_shortcut == Verdict::Sat;
      if (got && !check_plan(w, lift_plan(kr, Plan{})).valid) o.fail(tag + ": lifted shortcut plan invalid");
    } else {
      auto p = oracle_solve(kr.reduced, OracleLimits{8, 1e12});
      got = p.has_value();
      if (p && !check_plan(w, lift_plan(kr, *p)).valid) o.fail(tag + ": lifted plan invalid");
    }
    if (got != expect) o.fail(tag + ": kernel changed the verdict");
  };
  for (int i = 0; i < 300; ++i) {
    RandomSpec spec;
    spec.k = std::uniform_int_distribution<int>(2, 6)(rng);
    spec.n = std::uniform_int_distribution<int>(spec.k, 40)(rng);
    spec.constraints = std::uniform_int_distribution<int>(1, 8)(rng);
    spec.auth_density = std::uniform_real_distribution<double>(0.05, 0.2)(rng);
    spec.mix = "wsp1-eq-neq";
    spec.seed = rng();
    WorkflowInstance w = gen_random(spec);
    KernelResult kr = kernelize(w);
    for (const auto& stage : kr.trace) {
      if (const auto* m = std::get_if<MatchingStage>(&stage)) {
        ++matching_runs;
        try {
          check_reach_properties(m->input, alternating_reach(m->input));
        } catch (const Error& e) {
          o.fail(std::string("P1-P3: ") + e.what());
        }
      }
    }
    bool matched = std::any_of(kr.trace.begin(), kr.trace.end(),
                               [](const KernelStage& s) { return std::holds_alternative<MatchingStage>(s); });
    if (!kr.verdict_shortcut) {
      if (!matched) o.fail("wsp1 seed " + std::to_string(spec.seed) + ": matching stage did not run");
      if (kr.reduced.n() > w.k()) o.fail("wsp1 seed " + std::to_string(spec.seed) + ": more than k users");
      max_users = std::max(max_users, kr.reduced.n());
    }
    preserve(w, kr, "wsp1 seed " + std::to_string(spec.seed));
  }
  for (int i = 0; i < 300; ++i) {
    RandomSpec spec;
    spec.k = std::uniform_int_distribution<int>(2, 6)(rng);
    spec.n = std::uniform_int_distribution<int>(spec.k, 40)(rng);
    spec.constraints = std::uniform_int_distribution<int>(1, 6)(rng);
    spec.auth_density = std::uniform_real_distribution<double>(0.05, 0.25)(rng);
    spec.mix = "neq-threshold";
    spec.seed = rng();
    WorkflowInstance w = gen_random(spec);
    KernelResult kr = kernelize(w);
    for (const auto& stage : kr.trace)
      if (const auto* e = std::get_if<EasyStepStage>(&stage)) {
        ++easy_runs;
        int k = e->input.k();
        if (!kr.verdict_shortcut || *kr.verdict_shortcut == Verdict::Sat) {
          if (int(e->kept_users.size()) > k * (k - 1)) o.fail("easy-step kernel keeps more than k(k-1) users");
          max_easy_users = std::max(max_easy_users, int(e->kept_users.size()));
        }
      }
    preserve(w, kr, "neq+counting seed " + std::to_string(spec.seed));
  }
  if (easy_runs == 0) o.fail("easy-step stage never ran");
  o.detail = "matching runs " + std::to_string(matching_runs) + " (max users " + std::to_string(max_users) +
             "), easy-step runs " + std::to_string(easy_runs) + " (max users " + std::to_string(max_easy_users) + ")";
  return o;
}

//-----------------------------------------------------------------------------
// 6. Scaling

Outcome scaling() {
  Outcome o;
  const int reps = 5;
  std::vector<double> medians;
  double start = now_ms();
  for (int k = 12; k <= 18; ++k) {
    std::vector<double> times;
    for (int r = 0; r < reps; ++r) {
      WorkflowInstance w = gen_scaling_instance(k, 0.5, 1000 * k + r);
      double t0 = now_ms();
      SolveResult res = solve_flat(w);
      times.push_back(now_ms() - t0);
      if (res.sat() && !check_plan(w, *res.plan).valid) o.fail("scaling plan invalid");
    }
    std::sort(times.begin(), times.end());
    medians.push_back(times[reps / 2]);
  }
  std::vector<double> ratios;
  for (std::size_t i = 1; i < medians.size(); ++i) ratios.push_back(medians[i] / std::max(medians[i - 1], 1e-3));
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  double median_ratio = sorted[sorted.size() / 2];
  double max_ratio = sorted.back();
  double total_s = (now_ms() - start) / 1000;
  if (median_ratio > 3.0) o.fail("median ratio above 3");
  if (total_s > 600) o.fail("bench exceeded 10 minutes");
  std::ostringstream d;
  d.precision(3);
  d << "median ratio " << median_ratio << ", max ratio " << max_ratio << ", medians(ms)";
  for (double m : medians) d << " " << m;
  d << ", total " << total_s << "s";
  o.detail = d.str();
  return o;
}

//-----------------------------------------------------------------------------
// 7. Hierarchy cross-checks

Hierarchy fig4_hierarchy() {
  ManagementTree t;
  t.nodes = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  t.root = 9;
  t.edges = {{9, 3}, {9, 8}, {3, 0}, {3, 1}, {3, 2}, {8, 7}, {8, 4}, {7, 5}, {7, 6}};
  return from_management_tree(t, TreeMethod::FoldSubtrees);
}

std::string partition_text(const Hierarchy& h, int level) {
  std::string out;
  for (const auto& block : h.blocks(level)) {
    if (!out.empty()) out += "|";
    for (UserId u : block) out += char('a' + u);
  }
  return out;
}

Outcome hierarchy_cross_checks() {
  Outcome o;
  std::mt19937_64 rng(31);
  // Quotient vs hierarchical on single-relation instances.
  for (int i = 0; i < 200; ++i) {
    RandomSpec spec;
    spec.k = std::uniform_int_distribution<int>(1, 5)(rng);
    spec.n = std::uniform_int_distribution<int>(1, 6)(rng);
    spec.constraints = std::uniform_int_distribution<int>(1, 5)(rng);
    spec.auth_density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    spec.mix = "sim-single";
    spec.seed = rng();
    WorkflowInstance w = gen_random(spec);
    SolveResult q = solve_quotient(w, w.hierarchy->labels(2));
    SolveResult h = solve_hierarchy(canonicalize_instance(w));
    bool expect = oracle_sat(w);
    if (q.sat() != h.sat() || h.sat() != expect) o.fail("quotient/hierarchy disagree, seed " + std::to_string(spec.seed));
    if (q.sat() && !check_plan(w, *q.plan).valid) o.fail("quotient plan invalid");
    if (h.sat() && !check_plan(w, *h.plan).valid) o.fail("hierarchy plan invalid");
  }
  // Two-level hierarchies behave like the flat solver.
  const std::vector<std::string> flat_mixes = {"counting", "neq", "eq", "wsp1-eq-neq", "neq-threshold"};
  for (int i = 0; i < 200; ++i) {
    RandomSpec spec;
    spec.k = std::uniform_int_distribution<int>(1, 5)(rng);
    spec.n = std::uniform_int_distribution<int>(2, 6)(rng);
    spec.constraints = std::uniform_int_distribution<int>(1, 5)(rng);
    spec.auth_density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    spec.mix = flat_mixes[i % flat_mixes.size()];
    spec.seed = rng();
    WorkflowInstance w = gen_random(spec);
    SolveResult f = solve_flat(rewrite_eq_type3(w));
    WorkflowInstance two = w;
    two.hierarchy = flat_hierarchy(w.n());
    SolveResult h = solve_hierarchy(two);
    if (f.sat() != h.sat()) o.fail("2-level hierarchy differs from flat, seed " + std::to_string(spec.seed));
  }
  // Canonicalization keeps verdicts and adds at most two levels.
  for (int i = 0; i < 200; ++i) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    int ell = std::uniform_int_distribution<int>(1, 4)(rng);
    std::vector<std::vector<int>> labels;
    std::vector<int> cur(n);
    for (int u = 0; u < n; ++u) cur[u] = std::uniform_int_distribution<int>(0, n - 1)(rng);
    for (int l = 0; l < ell; ++l) {
      labels.push_back(cur);
      if (rng() % 2) {
        // Coarsen by merging two label values.
        int a = std::uniform_int_distribution<int>(0, n - 1)(rng), b = std::uniform_int_distribution<int>(0, n - 1)(rng);
        for (int& x : cur)
          if (x == a) x = b;
      }
    }
    WorkflowInstance w;
    int k = std::uniform_int_distribution<int>(1, 4)(rng);
    w.steps = {};
    for (int s = 0; s < k; ++s) w.steps.push_back("s" + std::to_string(s + 1));
    for (int u = 0; u < n; ++u) {
      w.users.push_back("u" + std::to_string(u + 1));
      StepSet a;
      for (int s = 0; s < k; ++s)
        if (rng() % 3) a.insert(s);
      w.auth.push_back(a);
    }
    for (int s = 0; s < k; ++s)
      if (w.authorized_users(s).empty()) w.auth[0].insert(s);
    w.hierarchy = Hierarchy::from_labels(labels);
    int c = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int j = 0; j < c; ++j) {
      int lvl = std::uniform_int_distribution<int>(1, ell)(rng);
      StepSet a = StepSet::single(int(rng() % k)), b = StepSet::single(int(rng() % k));
      if (rng() % 3 == 0) b.insert(int(rng() % k));
      w.constraints.push_back(rng() % 2 ? make_sim(lvl, a, b) : make_nsim(lvl, a, b));
    }
    WorkflowInstance cw = canonicalize_instance(w);
    if (!cw.hierarchy->is_canonical()) o.fail("canonicalize output not canonical");
    if (cw.hierarchy->levels() > ell + 2) o.fail("canonicalize emitted more than l+2 levels");
    if (oracle_sat(w) != oracle_sat(cw)) o.fail("canonicalize changed the oracle verdict");
    if (solve(w).sat() != oracle_sat(w)) o.fail("solve on a non-canonical hierarchy differs from the oracle");
  }
  // Management tree partitions.
  Hierarchy h = fig4_hierarchy();
  const std::vector<std::string> expected = {"a|b|c|d|e|f|g|h|i|j", "abc|d|e|fg|h|i|j", "abcd|e|fgh|i|j",
                                             "abcd|efgh|i|j",       "abcd|efghi|j",     "abcdefghi|j",
                                             "abcdefghij"};
  if (h.levels() != int(expected.size())) o.fail("tree hierarchy has the wrong number of levels");
  for (int l = 1; l <= std::min(h.levels(), int(expected.size())); ++l)
    if (partition_text(h, l) != expected[l - 1]) o.fail("level " + std::to_string(l) + " is " + partition_text(h, l));
  // (~5, s1, s2) with (!~4, s1, s2): user i must take one of the steps.
  WorkflowInstance w;
  w.steps = {"s1", "s2"};
  w.users = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  w.auth.assign(10, StepSet::all(2));
  w.hierarchy = h;
  w.constraints = {make_sim(5, StepSet::single(0), StepSet::single(1)),
                   make_nsim(4, StepSet::single(0), StepSet::single(1))};
  SolveResult sat = solve(w);
  if (!sat.sat()) o.fail("sim5/nsim4 example should be SAT");
  else if (sat.plan->assignment[0] != 8 && sat.plan->assignment[1] != 8) o.fail("user i takes neither step");
  w.auth[8] = StepSet{};
  if (solve(w).sat() || oracle_sat(w)) o.fail("without user i the example should be UNSAT");
  o.detail = "quotient 200, two-level 200, canonicalize 200, tree levels " + std::to_string(h.levels());
  return o;
}

//-----------------------------------------------------------------------------
// 8. Minimum users

Outcome min_users() {
  Outcome o;
  std::mt19937_64 rng(8);
  int sets = 0;
  const std::vector<std::string> mixes = {"counting", "neq", "eq", "wsp1-eq-neq", "neq-threshold"};
  auto check = [&](int k, const std::vector<Constraint>& cs, const std::string& tag) {
    std::optional<int> truth;
    for (int m = 1; m <= k && !truth; ++m)
      if (oracle_sat(fully_authorized_instance(k, cs, m))) truth = m;
    MinUsersResult r = min_fully_authorized_users(k, cs);
    int bound = k <= 1 ? 0 : int(std::ceil(std::log2(double(k))));
    if (r.users != truth) o.fail(tag + ": minimum differs from linear scan");
    if (r.solve_calls > bound) o.fail(tag + ": used " + std::to_string(r.solve_calls) + " solve calls");
    ++sets;
  };
  for (int i = 0; i < 2000; ++i) {
    RandomSpec spec;
    spec.k = std::uniform_int_distribution<int>(1, 5)(rng);
    spec.n = 1;
    spec.constraints = std::uniform_int_distribution<int>(0, 6)(rng);
    spec.mix = mixes[i % mixes.size()];
    spec.seed = rng();
    check(spec.k, gen_random(spec).constraints, spec.mix + " seed " + std::to_string(spec.seed));
  }
  // Every set of Type-1 neq constraints on up to 5 steps.
  for (int k = 1; k <= 5; ++k) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) pairs.push_back({a, b});
    for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
      std::vector<Constraint> cs;
      for (std::size_t p = 0; p < pairs.size(); ++p)
        if ((mask >> p) & 1u) cs.push_back(make_neq(StepSet::single(pairs[p].first), StepSet::single(pairs[p].second)));
      check(k, cs, "neq graph k=" + std::to_string(k));
    }
  }
  o.detail = std::to_string(sets) + " constraint sets";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"oracle-equivalence", oracle_equivalence},
      {"nae3sat-reduction", nae_reduction},
      {"hitting-set-reductions", hitting_set_reductions},
      {"or-composition", or_composition},
      {"kernel-guarantees", kernel_guarantees},
      {"scaling", scaling},
      {"hierarchy-cross-checks", hierarchy_cross_checks},
      {"min-users", min_users},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (argc > 1 && std::string(argv[1]) != c.name) continue;
    double t0 = now_ms();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double secs = (now_ms() - t0) / 1000;
    std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
