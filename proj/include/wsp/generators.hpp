#ifndef WSP_GENERATORS_HPP
#define WSP_GENERATORS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/hierarchy.hpp"
#include "wsp/model.hpp"

namespace wsp {

//-----------------------------------------------------------------------------
// Source problems

// Literals are signed variable indices: +i is x_i, -i is its negation.
struct CnfFormula {
  int vars = 0;
  std::vector<std::array<int, 3>> clauses;
};

struct HittingSetInstance {
  std::vector<std::string> elements;
  std::vector<std::vector<int>> sets;  // element indices
  int k = 0;
};

struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based
};

inline void validate_formula(const CnfFormula& f) {
  if (f.vars < 0) throw Error(ErrorCode::InvalidArgument, "negative variable count");
  for (const auto& c : f.clauses)
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > f.vars) throw Error(ErrorCode::InvalidArgument, "literal out of range");
}

inline void validate_hitting_set(const HittingSetInstance& h) {
  if (h.k < 0) throw Error(ErrorCode::InvalidArgument, "negative budget");
  for (const auto& s : h.sets) {
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty set in hitting-set instance");
    for (int e : s)
      if (e < 0 || e >= int(h.elements.size())) throw Error(ErrorCode::InvalidArgument, "element out of range");
  }
}

inline void validate_graph(const Graph& g) {
  if (g.vertices < 0) throw Error(ErrorCode::InvalidArgument, "negative vertex count");
  for (auto [a, b] : g.edges)
    if (a < 0 || b < 0 || a >= g.vertices || b >= g.vertices)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
}

//-----------------------------------------------------------------------------
// Direct solvers for the source problems

inline bool nae_satisfiable(const CnfFormula& f) {
  validate_formula(f);
  for (std::uint32_t a = 0; a < (1u << f.vars); ++a) {
    bool ok = true;
    for (const auto& c : f.clauses) {
      int trues = 0;
      for (int lit : c) trues += (((a >> (std::abs(lit) - 1)) & 1u) != 0) == (lit > 0);
      if (trues == 0 || trues == 3) { ok = false; break; }
    }
    if (ok) return true;
  }
  return false;
}

inline bool hitting_set_exists(const HittingSetInstance& h) {
  validate_hitting_set(h);
  int e = int(h.elements.size());
  std::vector<std::uint32_t> masks;
  for (const auto& s : h.sets) {
    std::uint32_t m = 0;
    for (int x : s) m |= 1u << x;
    masks.push_back(m);
  }
  for (std::uint32_t pick = 0; pick < (1u << e); ++pick) {
    if (std::popcount(pick) > h.k) continue;
    if (std::all_of(masks.begin(), masks.end(), [&](std::uint32_t m) { return (m & pick) != 0; })) return true;
  }
  return false;
}

inline bool three_colorable(const Graph& g) {
  validate_graph(g);
  std::vector<int> color(g.vertices, 0);
  while (true) {
    bool ok = std::none_of(g.edges.begin(), g.edges.end(),
                           [&](auto e) { return color[e.first] == color[e.second]; });
    if (ok) return true;
    int v = 0;
    while (v < g.vertices && ++color[v] == 3) color[v++] = 0;
    if (v == g.vertices) return false;
  }
}

//-----------------------------------------------------------------------------
// Reductions

inline std::vector<std::string> numbered(const std::string& prefix, int count, int from = 1) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(from + i));
  return out;
}

// Two users; step s_i stands for x_i and s_{i+n} for its negation.
inline WorkflowInstance gen_nae3sat(const CnfFormula& f, int cap = kMaxSteps) {
  validate_formula(f);
  int n = f.vars;
  if (2 * n > std::min(cap, kMaxSteps)) throw Error(ErrorCode::StepLimitExceeded, "formula has too many variables");
  WorkflowInstance w;
  w.steps = numbered("s", 2 * n);
  w.users = {"u1", "u2"};
  w.auth = {StepSet::all(2 * n), StepSet::all(2 * n)};
  auto step = [&](int lit) { return lit > 0 ? lit - 1 : -lit - 1 + n; };
  for (int i = 0; i < n; ++i) w.constraints.push_back(make_neq(StepSet::single(i), StepSet::single(i + n)));
  for (const auto& c : f.clauses)
    w.constraints.push_back(make_neq(StepSet::single(step(c[0])), StepSet::of({step(c[1]), step(c[2])})));
  return w;
}

namespace detail {

inline WorkflowInstance hitting_set_frame(const HittingSetInstance& h, int cap) {
  validate_hitting_set(h);
  int m = int(h.sets.size());
  if (m + h.k > std::min(cap, kMaxSteps)) throw Error(ErrorCode::StepLimitExceeded, "hitting-set instance too large");
  WorkflowInstance w;
  w.steps = numbered("v", m);
  for (auto& s : numbered("f", h.k)) w.steps.push_back(s);
  w.users = h.elements;
  StepSet fresh;
  for (int j = 0; j < h.k; ++j) fresh.insert(m + j);
  w.auth.assign(h.elements.size(), fresh);
  for (int i = 0; i < m; ++i)
    for (int e : h.sets[i]) w.auth[e].insert(i);
  return w;
}

inline StepSet fresh_steps(const HittingSetInstance& h) {
  StepSet fresh;
  for (int j = 0; j < h.k; ++j) fresh.insert(int(h.sets.size()) + j);
  return fresh;
}

}  // namespace detail

// Steps v_1..v_m for the sets, then k fresh steps every element may perform.
inline WorkflowInstance gen_hitting_set_eq(const HittingSetInstance& h, int cap = kMaxSteps) {
  WorkflowInstance w = detail::hitting_set_frame(h, cap);
  StepSet fresh = detail::fresh_steps(h);
  for (int i = 0; i < int(h.sets.size()); ++i) w.constraints.push_back(make_eq(StepSet::single(i), fresh));
  return w;
}

inline WorkflowInstance gen_hitting_set_counting(const HittingSetInstance& h, int cap = kMaxSteps) {
  WorkflowInstance w = detail::hitting_set_frame(h, cap);
  StepSet fresh = detail::fresh_steps(h);
  for (int i = 0; i < int(h.sets.size()); ++i)
    w.constraints.push_back(Counting{2, h.k + 1, fresh | StepSet::single(i)});
  return w;
}

// Graphs with fewer vertices than the largest are padded with isolated
// vertices, which leaves 3-colorability unchanged.
inline WorkflowInstance gen_3coloring_or(const std::vector<Graph>& graphs, int cap = kMaxSteps) {
  if (graphs.empty()) throw Error(ErrorCode::InvalidArgument, "no graphs given");
  int kappa = 0;
  for (const auto& g : graphs) {
    validate_graph(g);
    kappa = std::max(kappa, g.vertices);
  }
  int k = kappa + kappa * kappa;
  if (k > std::min(cap, kMaxSteps)) throw Error(ErrorCode::StepLimitExceeded, "graphs too large for the step cap");
  WorkflowInstance w;
  // v1_i, v2_i per vertex, then e_i_j, e'_i_j per pair.
  std::vector<std::vector<int>> e(kappa, std::vector<int>(kappa, -1)), e2 = e;
  for (int i = 1; i <= kappa; ++i) {
    w.steps.push_back("v1_" + std::to_string(i));
    w.steps.push_back("v2_" + std::to_string(i));
  }
  for (int i = 0; i < kappa; ++i)
    for (int j = i + 1; j < kappa; ++j) {
      e[i][j] = int(w.steps.size());
      w.steps.push_back("e_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      e2[i][j] = int(w.steps.size());
      w.steps.push_back("e'_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    }
  auto v1 = [](int i) { return 2 * i; };
  auto v2 = [](int i) { return 2 * i + 1; };
  StepSet all = StepSet::all(k);

  std::vector<int> unit;
  for (std::size_t r = 0; r < graphs.size(); ++r) {
    std::string tag = std::to_string(r + 1);
    for (const char* c : {"c1_", "c2_", "c3_"}) {
      w.users.push_back(c + tag);
      w.auth.push_back(all);
      unit.push_back(int(r));
    }
    std::vector<std::vector<char>> adj(kappa, std::vector<char>(kappa, 0));
    for (auto [a, b] : graphs[r].edges) adj[a][b] = adj[b][a] = 1;
    StepSet alpha;
    for (int i = 0; i < kappa; ++i)
      for (int j = i + 1; j < kappa; ++j)
        if (!adj[i][j]) alpha.insert(e[i][j]);
    w.users.push_back("a_" + tag);
    w.auth.push_back(alpha);
    unit.push_back(int(r));
  }
  int n = int(w.users.size());
  std::vector<int> singletons(n);
  for (int u = 0; u < n; ++u) singletons[u] = u;
  w.hierarchy = Hierarchy::from_labels({singletons, unit, std::vector<int>(n, 0)});

  auto nsim1 = [&](int a, int b) { w.constraints.push_back(make_nsim(1, StepSet::single(a), StepSet::single(b))); };
  for (int i = 0; i < kappa; ++i) nsim1(v1(i), v2(i));
  for (int i = 0; i < kappa; ++i)
    for (int j = i + 1; j < kappa; ++j) {
      nsim1(v1(i), e[i][j]);
      nsim1(v2(i), e[i][j]);
      nsim1(e[i][j], e2[i][j]);
      nsim1(v1(j), e2[i][j]);
      nsim1(v2(j), e2[i][j]);
    }
  // (~2, s, s) is trivially satisfied, so only distinct pairs are listed.
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) w.constraints.push_back(make_sim(2, StepSet::single(a), StepSet::single(b)));
  return w;
}

//-----------------------------------------------------------------------------
// Random instances

struct RandomSpec {
  int k = 5;
  int n = 4;
  int constraints = 4;
  double auth_density = 0.5;
  std::string mix = "mixed";
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& random_mixes() {
  static const std::vector<std::string> mixes = {"counting", "wsp1-neq", "neq",       "eq",        "wsp1-eq-neq",
                                                 "neq-threshold", "sim-single", "sim-multi", "mixed"};
  return mixes;
}

namespace detail {

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : rng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  std::mt19937_64& engine() { return rng_; }

  StepSet subset(int k, int size) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng_);
    StepSet s;
    for (int i = 0; i < size; ++i) s.insert(idx[i]);
    return s;
  }

  // Scopes of the given entailment type.
  std::pair<StepSet, StepSet> scopes(int k, int type) {
    auto size = [&](bool single) { return single ? 1 : uniform(std::min(2, k), std::min(3, k)); };
    bool one = type <= 2, two = type == 1;
    if (type == 2 && uniform(0, 1)) std::swap(one, two);
    return {subset(k, size(one)), subset(k, size(two))};
  }

 private:
  std::mt19937_64 rng_;
};

// Random management tree on n nodes with every internal node of out-degree
// at least 2. Needs n == 1 or n >= 3.
inline ManagementTree random_tree(int n, RandomSource& rs) {
  ManagementTree t;
  t.nodes = numbered("u", n);
  std::vector<int> leaves{0}, internal;
  int used = 1;
  while (used < n) {
    int left = n - used;
    if (left == 1) {
      int p = internal[rs.uniform(0, int(internal.size()) - 1)];
      t.edges.push_back({p, used++});
      continue;
    }
    int li = rs.uniform(0, int(leaves.size()) - 1);
    int p = leaves[li];
    leaves.erase(leaves.begin() + li);
    internal.push_back(p);
    int deg = std::min(left, rs.uniform(2, 3));
    if (left - deg == 1 && deg == 2 && left >= 3) deg = 3;
    for (int d = 0; d < deg; ++d) {
      t.edges.push_back({p, used});
      leaves.push_back(used++);
    }
  }
  return t;
}

inline Hierarchy random_three_level(int n, RandomSource& rs) {
  std::vector<int> singletons(n), unit(n), all(n, 0);
  int blocks = std::max(1, rs.uniform(1, std::max(1, n - 1)));
  for (int u = 0; u < n; ++u) {
    singletons[u] = u;
    unit[u] = u < blocks ? u : rs.uniform(0, blocks - 1);
  }
  return Hierarchy::from_labels({singletons, unit, all});
}

}  // namespace detail

// Deterministic for a given spec. Every step is given at least one
// authorized user.
inline WorkflowInstance gen_random(const RandomSpec& spec) {
  const auto& mixes = random_mixes();
  if (std::find(mixes.begin(), mixes.end(), spec.mix) == mixes.end())
    throw Error(ErrorCode::InvalidArgument, "unknown constraint mix '" + spec.mix + "'");
  if (spec.k < 0 || spec.k > kMaxSteps) throw Error(ErrorCode::InvalidArgument, "k out of range");
  if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "need at least one user");
  if (spec.constraints < 0) throw Error(ErrorCode::InvalidArgument, "negative constraint count");
  if (spec.auth_density < 0 || spec.auth_density > 1) throw Error(ErrorCode::InvalidArgument, "density out of [0,1]");
  detail::RandomSource rs(spec.seed);
  int k = spec.k, n = spec.n;
  WorkflowInstance w;
  w.steps = numbered("s", k);
  w.users = numbered("u", n);
  w.auth.assign(n, StepSet{});
  for (int u = 0; u < n; ++u)
    for (int s = 0; s < k; ++s)
      if (spec.auth_density >= 1.0 || rs.chance(spec.auth_density)) w.auth[u].insert(s);
  for (int s = 0; s < k; ++s)
    if (w.authorized_users(s).empty()) w.auth[rs.uniform(0, n - 1)].insert(s);
  for (int s = 1; s < k; ++s)
    if (rs.chance(0.3)) w.order.push_back({rs.uniform(0, s - 1), s});
  std::sort(w.order.begin(), w.order.end());
  w.order.erase(std::unique(w.order.begin(), w.order.end()), w.order.end());
  if (k == 0) return w;

  const std::string& mix = spec.mix;
  bool sim = mix == "sim-single" || mix == "sim-multi" || mix == "mixed";
  if (mix == "sim-single") {
    w.hierarchy = detail::random_three_level(n, rs);
  } else if (sim) {
    if (n == 1 || n >= 3) w.hierarchy = from_management_tree(detail::random_tree(n, rs), TreeMethod(rs.uniform(0, 1)));
    else w.hierarchy = detail::random_three_level(n, rs);
  }

  auto counting = [&](bool unit_lower) {
    StepSet scope = rs.subset(k, rs.uniform(1, std::min(k, 4)));
    int m = scope.size();
    int tl = unit_lower ? 1 : rs.uniform(1, m);
    int tr = rs.uniform(tl, m);
    return Constraint(Counting{tl, tr, scope});
  };
  auto entail = [&](Relation rel, int type) {
    auto [a, b] = rs.scopes(k, type);
    return Constraint(Entailment{std::move(rel), a, b});
  };
  auto type = [&]() { return rs.uniform(1, 3); };
  for (int i = 0; i < spec.constraints; ++i) {
    if (mix == "counting") {
      w.constraints.push_back(counting(false));
    } else if (mix == "wsp1-neq") {
      w.constraints.push_back(entail(Relation::neq(), 1));
    } else if (mix == "neq") {
      w.constraints.push_back(entail(Relation::neq(), type()));
    } else if (mix == "eq") {
      w.constraints.push_back(entail(Relation::eq(), type()));
    } else if (mix == "wsp1-eq-neq") {
      w.constraints.push_back(entail(rs.uniform(0, 2) == 0 ? Relation::eq() : Relation::neq(), 1));
    } else if (mix == "neq-threshold") {
      w.constraints.push_back(rs.uniform(0, 1) ? entail(Relation::neq(), type()) : counting(true));
    } else if (mix == "sim-single") {
      w.constraints.push_back(entail(rs.uniform(0, 1) ? Relation::sim(2) : Relation::nsim(2), type()));
    } else {
      int ell = w.hierarchy->levels();
      int pick = rs.uniform(0, mix == "mixed" ? 4 : 3);
      if (pick == 0) w.constraints.push_back(entail(Relation::sim(rs.uniform(1, ell)), type()));
      else if (pick == 1) w.constraints.push_back(entail(Relation::nsim(rs.uniform(1, ell)), type()));
      else if (pick == 2) w.constraints.push_back(entail(Relation::eq(), type()));
      else if (pick == 3) w.constraints.push_back(entail(Relation::neq(), type()));
      else w.constraints.push_back(counting(false));
    }
  }
  w.constraints = dedup_constraints(w.constraints);
  return w;
}

// n = 2k fully authorized users and Type-1 neq constraints on each step pair
// with probability `density`.
inline WorkflowInstance gen_scaling_instance(int k, double density, std::uint64_t seed) {
  detail::RandomSource rs(seed);
  WorkflowInstance w;
  w.steps = numbered("s", k);
  w.users = numbered("u", 2 * k);
  w.auth.assign(2 * k, StepSet::all(k));
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (rs.chance(density)) w.constraints.push_back(make_neq(StepSet::single(a), StepSet::single(b)));
  return w;
}

}  // namespace wsp

#endif
