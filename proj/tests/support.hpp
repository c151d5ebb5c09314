#ifndef WSP_TESTS_SUPPORT_HPP
#define WSP_TESTS_SUPPORT_HPP

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wsp/wsp.hpp"

namespace wsp::test {

inline StepSet S(std::initializer_list<int> ids) { return StepSet::of(ids); }
inline StepSet S1(int id) { return StepSet::single(id); }

// Purchase-order workflow: s1..s6 with five constraints.
inline WorkflowInstance fig1(int users) {
  WorkflowInstance w;
  w.steps = {"s1", "s2", "s3", "s4", "s5", "s6"};
  w.order = {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 5}};
  for (int u = 1; u <= users; ++u) {
    w.users.push_back("u" + std::to_string(u));
    w.auth.push_back(StepSet::all(6));
  }
  w.constraints = {make_eq(S1(0), S1(2)), make_neq(S1(2), S1(4)), make_neq(S1(0), S1(3)), make_neq(S1(0), S1(1)),
                   make_neq(S1(3), S1(5))};
  return w;
}

inline std::vector<Constraint> fig1_constraints() { return fig1(1).constraints; }

// Ten users a..j; j manages d and i, d manages a b c, i manages h and e,
// h manages f and g.
inline ManagementTree fig4_tree() {
  ManagementTree t;
  t.nodes = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  t.root = 9;
  t.edges = {{9, 3}, {9, 8}, {3, 0}, {3, 1}, {3, 2}, {8, 7}, {8, 4}, {7, 5}, {7, 6}};
  return t;
}

inline Hierarchy fig3a() { return from_management_tree(fig4_tree(), TreeMethod::FoldSubtrees); }

inline std::string partition_text(const Hierarchy& h, int level) {
  std::string out;
  for (const auto& block : h.blocks(level)) {
    if (!out.empty()) out += "|";
    for (UserId u : block) out += char('a' + u);
  }
  return out;
}

// Exhaustive plan enumeration using check_plan as the only semantics.
inline std::optional<Plan> brute_force(const WorkflowInstance& w) {
  int k = w.k(), n = w.n();
  if (k == 0) return Plan{};
  if (n == 0) return std::nullopt;
  Plan p{std::vector<UserId>(k, 0)};
  while (true) {
    if (check_plan(w, p).valid) return p;
    int s = 0;
    while (s < k && ++p.assignment[s] == n) p.assignment[s++] = 0;
    if (s == k) return std::nullopt;
  }
}

inline bool brute_sat(const WorkflowInstance& w) { return brute_force(w).has_value(); }

// Runs fn and returns the code of the wsp::Error it throws, if any.
template <class Fn>
std::optional<ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// k steps t1..tk, n users each authorized for everything.
inline WorkflowInstance open_instance(int k, int n, std::vector<Constraint> constraints = {}) {
  WorkflowInstance w;
  for (int s = 1; s <= k; ++s) w.steps.push_back("t" + std::to_string(s));
  for (int u = 1; u <= n; ++u) {
    w.users.push_back("p" + std::to_string(u));
    w.auth.push_back(StepSet::all(k));
  }
  w.constraints = std::move(constraints);
  return w;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) { return std::string(WSP_DATA_DIR) + "/" + name; }

inline WorkflowInstance random_instance(const std::string& mix, std::uint64_t seed, int kmax = 5, int nmax = 5) {
  RandomSpec spec;
  spec.k = 1 + int(seed % kmax);
  spec.n = 1 + int((seed / 7) % nmax);
  spec.constraints = 1 + int((seed / 3) % 5);
  spec.auth_density = 0.4 + 0.1 * double(seed % 6);
  spec.mix = mix;
  spec.seed = seed;
  return gen_random(spec);
}

}  // namespace wsp::test

#endif
