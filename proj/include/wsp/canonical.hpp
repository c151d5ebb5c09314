#ifndef WSP_CANONICAL_HPP
#define WSP_CANONICAL_HPP

#include <utility>
#include <vector>

#include "wsp/hierarchy.hpp"
#include "wsp/model.hpp"

namespace wsp {

struct CanonicalForm {
  Hierarchy hierarchy;
  std::vector<Constraint> constraints;
};

// Merges equal adjacent levels (moving sim/nsim constraints down to the
// surviving level first), then adds the singleton and whole-set levels when
// they are missing.
inline CanonicalForm canonicalize(const Hierarchy& h, const std::vector<Constraint>& constraints) {
  int n = h.users();
  int ell = h.levels();
  std::vector<int> new_level(ell + 1, 0);
  std::vector<std::vector<int>> kept;
  for (int i = 1; i <= ell; ++i) {
    if (!kept.empty() && h.block_count(i) == h.block_count(i - 1)) {
      new_level[i] = new_level[i - 1];
      continue;
    }
    kept.push_back(h.labels(i));
    new_level[i] = int(kept.size());
  }
  int shift = 0;
  if (n > 0) {
    if (kept.empty() || h.block_count(1) != n) {
      std::vector<int> singletons(n);
      for (int u = 0; u < n; ++u) singletons[u] = u;
      kept.insert(kept.begin(), singletons);
      shift = 1;
    }
    if (ell == 0 ? n > 1 : h.block_count(ell) != 1) kept.push_back(std::vector<int>(n, 0));
  }
  CanonicalForm out{Hierarchy::from_labels(kept), {}};
  for (auto c : constraints) {
    if (auto* e = std::get_if<Entailment>(&c);
        e && (e->rel.kind == RelationKind::Sim || e->rel.kind == RelationKind::Nsim)) {
      if (e->rel.level < 1 || e->rel.level > ell)
        throw Error(ErrorCode::LevelOutOfRange, "constraint level outside the hierarchy");
      e->rel.level = new_level[e->rel.level] + shift;
    }
    out.constraints.push_back(std::move(c));
  }
  out.constraints = dedup_constraints(out.constraints);
  return out;
}

inline WorkflowInstance canonicalize_instance(const WorkflowInstance& w) {
  if (!w.hierarchy) return w;
  auto form = canonicalize(*w.hierarchy, w.constraints);
  WorkflowInstance out = w;
  out.hierarchy = std::move(form.hierarchy);
  out.constraints = std::move(form.constraints);
  return out;
}

// The two-level hierarchy (singletons, everyone) over n users.
inline Hierarchy flat_hierarchy(int n) {
  std::vector<int> singletons(n), all(n, 0);
  for (int u = 0; u < n; ++u) singletons[u] = u;
  if (n <= 1) return Hierarchy::from_labels({singletons});
  return Hierarchy::from_labels({singletons, all});
}

}  // namespace wsp

#endif
