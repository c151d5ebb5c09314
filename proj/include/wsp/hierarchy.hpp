#ifndef WSP_HIERARCHY_HPP
#define WSP_HIERARCHY_HPP

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsp/error.hpp"
#include "wsp/step_set.hpp"

namespace wsp {

// A nested chain of partitions of the users. Level 1 is the finest; every
// level refines the next one. Block ids are normalized so that blocks are
// numbered in order of their first member.
class Hierarchy {
 public:
  Hierarchy() = default;

  // levels[i] lists the blocks of level i + 1. Throws NotAPartition or
  // NotARefinement.
  static Hierarchy from_blocks(const std::vector<std::vector<std::vector<UserId>>>& levels, int n) {
    Hierarchy h;
    h.n_ = n;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      std::vector<int> ids(n, -1);
      int block = 0;
      for (const auto& members : levels[li]) {
        if (members.empty()) throw Error(ErrorCode::NotAPartition, "empty block at level " + std::to_string(li + 1));
        for (UserId u : members) {
          if (u < 0 || u >= n) throw Error(ErrorCode::NotAPartition, "user out of range");
          if (ids[u] != -1)
            throw Error(ErrorCode::NotAPartition, "user in two blocks at level " + std::to_string(li + 1));
          ids[u] = block;
        }
        ++block;
      }
      if (std::find(ids.begin(), ids.end(), -1) != ids.end())
        throw Error(ErrorCode::NotAPartition, "level " + std::to_string(li + 1) + " misses a user");
      h.push_level(std::move(ids));
    }
    for (int i = 1; i < h.levels(); ++i) {
      std::vector<int> up(h.counts_[i - 1], -1);
      for (UserId u = 0; u < n; ++u) {
        int b = h.ids_[i - 1][u];
        if (up[b] == -1) up[b] = h.ids_[i][u];
        else if (up[b] != h.ids_[i][u])
          throw Error(ErrorCode::NotARefinement,
                      "level " + std::to_string(i) + " does not refine level " + std::to_string(i + 1));
      }
    }
    return h;
  }

  // Builds from per-level block labels (any integers). No refinement check.
  static Hierarchy from_labels(const std::vector<std::vector<int>>& labels) {
    Hierarchy h;
    h.n_ = labels.empty() ? 0 : int(labels.front().size());
    for (const auto& l : labels) h.push_level(l);
    return h;
  }

  int levels() const { return int(ids_.size()); }
  int users() const { return n_; }

  int block_of(UserId u, int level) const {
    check_level(level);
    return ids_[level - 1][u];
  }
  int block_count(int level) const {
    check_level(level);
    return counts_[level - 1];
  }
  bool same_block(UserId u, UserId v, int level) const {
    check_level(level);
    return ids_[level - 1][u] == ids_[level - 1][v];
  }
  const std::vector<int>& labels(int level) const {
    check_level(level);
    return ids_[level - 1];
  }

  std::vector<std::vector<UserId>> blocks(int level) const {
    check_level(level);
    std::vector<std::vector<UserId>> out(counts_[level - 1]);
    for (UserId u = 0; u < n_; ++u) out[ids_[level - 1][u]].push_back(u);
    return out;
  }

  bool is_canonical() const {
    if (levels() == 0) return n_ == 0;
    if (counts_.front() != n_ || counts_.back() != std::min(n_, 1)) return false;
    for (int i = 1; i < levels(); ++i)
      if (counts_[i] == counts_[i - 1]) return false;
    return true;
  }

  // Restriction to a subset of users, renumbered in the order given.
  Hierarchy restrict_to(const std::vector<UserId>& kept) const {
    std::vector<std::vector<int>> labels;
    for (const auto& l : ids_) {
      std::vector<int> r;
      for (UserId u : kept) r.push_back(l[u]);
      labels.push_back(std::move(r));
    }
    Hierarchy h = from_labels(labels);
    h.n_ = int(kept.size());
    return h;
  }

  friend bool operator==(const Hierarchy&, const Hierarchy&) = default;

 private:
  void check_level(int level) const {
    if (level < 1 || level > levels())
      throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level) + " not in [1, " +
                                                  std::to_string(levels()) + "]");
  }

  void push_level(const std::vector<int>& raw) {
    std::map<int, int> renum;
    std::vector<int> ids(raw.size());
    for (std::size_t u = 0; u < raw.size(); ++u) {
      auto it = renum.try_emplace(raw[u], int(renum.size())).first;
      ids[u] = it->second;
    }
    counts_.push_back(int(renum.size()));
    ids_.push_back(std::move(ids));
  }

  int n_ = 0;
  std::vector<std::vector<int>> ids_;
  std::vector<int> counts_;
};

inline Hierarchy validate_hierarchy(const std::vector<std::vector<std::vector<UserId>>>& levels, int n) {
  return Hierarchy::from_blocks(levels, n);
}

inline int block_of(const Hierarchy& h, UserId u, int level) { return h.block_of(u, level); }

//-----------------------------------------------------------------------------
// Management trees

struct ManagementTree {
  std::vector<std::string> nodes;
  int root = 0;
  std::vector<std::pair<int, int>> edges;  // (parent, child)
};

enum class TreeMethod { FoldSubtrees, CollapseRootAndLeaves };

inline TreeMethod parse_tree_method(std::string_view name) {
  if (name == "fold-subtrees") return TreeMethod::FoldSubtrees;
  if (name == "collapse-root-and-leaves") return TreeMethod::CollapseRootAndLeaves;
  throw Error(ErrorCode::InvalidArgument, "unknown tree method '" + std::string(name) + "'");
}

namespace detail {

inline std::vector<std::vector<int>> tree_children(const ManagementTree& t) {
  int n = int(t.nodes.size());
  if (n == 0) throw Error(ErrorCode::MalformedTree, "empty tree");
  if (t.root < 0 || t.root >= n) throw Error(ErrorCode::MalformedTree, "root out of range");
  std::vector<std::vector<int>> kids(n);
  std::vector<int> parent(n, -1);
  for (auto [p, c] : t.edges) {
    if (p < 0 || p >= n || c < 0 || c >= n) throw Error(ErrorCode::MalformedTree, "edge endpoint out of range");
    if (c == t.root) throw Error(ErrorCode::MalformedTree, "edge into the root");
    if (parent[c] != -1) throw Error(ErrorCode::MalformedTree, "node '" + t.nodes[c] + "' has two parents");
    parent[c] = p;
    kids[p].push_back(c);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{t.root};
  seen[t.root] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int c : kids[v]) {
      if (seen[c]) throw Error(ErrorCode::MalformedTree, "cycle");
      seen[c] = 1;
      ++reached;
      stack.push_back(c);
    }
  }
  if (reached != n) throw Error(ErrorCode::MalformedTree, "tree is not connected");
  for (int v = 0; v < n; ++v)
    if (kids[v].size() == 1)
      throw Error(ErrorCode::MalformedTree, "node '" + t.nodes[v] + "' has out-degree 1");
  return kids;
}

}  // namespace detail

// Derives a canonical hierarchy from a management tree. FoldSubtrees gives
// 2p + 1 levels and CollapseRootAndLeaves gives p + 1, where p is the tree
// height.
inline Hierarchy from_management_tree(const ManagementTree& t, TreeMethod method) {
  auto kids = detail::tree_children(t);
  int n = int(t.nodes.size());
  // Each live node carries the users folded into it so far.
  std::vector<int> label(n);
  for (int v = 0; v < n; ++v) label[v] = v;
  std::vector<char> alive(n, 1);
  std::vector<std::vector<int>> levels;
  auto snapshot = [&]() {
    std::vector<int> l(n);
    for (int u = 0; u < n; ++u) l[u] = label[u];
    levels.push_back(std::move(l));
  };
  // Members of each live node; label[u] is the live node holding u.
  std::vector<std::vector<int>> members(n);
  for (int v = 0; v < n; ++v) members[v] = {v};
  auto absorb = [&](int into, int from) {
    for (int u : members[from]) {
      label[u] = into;
      members[into].push_back(u);
    }
    members[from].clear();
    alive[from] = 0;
  };

  snapshot();
  while (true) {
    // Non-leaf nodes whose children are all leaves.
    std::vector<int> frontier;
    for (int v = 0; v < n; ++v) {
      if (!alive[v] || kids[v].empty()) continue;
      bool all_leaves = std::all_of(kids[v].begin(), kids[v].end(), [&](int c) { return kids[c].empty(); });
      if (all_leaves) frontier.push_back(v);
    }
    if (frontier.empty()) break;
    if (method == TreeMethod::FoldSubtrees) {
      for (int v : frontier) {
        int keep = kids[v].front();
        for (std::size_t i = 1; i < kids[v].size(); ++i) absorb(keep, kids[v][i]);
        kids[v] = {keep};
      }
      snapshot();
      for (int v : frontier) {
        absorb(v, kids[v].front());
        kids[v].clear();
      }
      snapshot();
    } else {
      for (int v : frontier) {
        for (int c : kids[v]) absorb(v, c);
        kids[v].clear();
      }
      snapshot();
    }
  }
  return Hierarchy::from_labels(levels);
}

//-----------------------------------------------------------------------------
// Significant blocks

struct BlockNode {
  std::vector<UserId> members;
  int first_level = 1;  // a: least level containing the block
  int last_level = 1;   // b: the block is absent from level b + 1
  int parent = -1;
  std::vector<int> children;
  bool is_leaf() const { return children.empty(); }
};

struct SignificantBlockTree {
  std::vector<BlockNode> nodes;
  int root = -1;

  // Children before parents.
  std::vector<int> postorder() const {
    std::vector<int> out;
    if (root < 0) return out;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < nodes[v].children.size()) {
        int c = nodes[v].children[i++];
        stack.push_back({c, 0});
      } else {
        out.push_back(v);
        stack.pop_back();
      }
    }
    return out;
  }
};

inline SignificantBlockTree significant_block_tree(const Hierarchy& h) {
  if (!h.is_canonical()) throw Error(ErrorCode::NotCanonical, "hierarchy is not canonical");
  SignificantBlockTree tree;
  int n = h.users();
  int ell = h.levels();
  if (n == 0) return tree;

  std::vector<std::vector<int>> size(ell);
  for (int i = 1; i <= ell; ++i) {
    size[i - 1].assign(h.block_count(i), 0);
    for (UserId u = 0; u < n; ++u) ++size[i - 1][h.block_of(u, i)];
  }
  // node_at[i-1][block] is the node of a block significant at level i.
  std::vector<std::vector<int>> node_at(ell);
  for (int i = 1; i <= ell; ++i) {
    node_at[i - 1].assign(h.block_count(i), -1);
    auto blocks = h.blocks(i);
    for (int b = 0; b < int(blocks.size()); ++b) {
      UserId rep = blocks[b].front();
      bool significant = i == ell || size[i][h.block_of(rep, i + 1)] != size[i - 1][b];
      if (!significant) continue;
      BlockNode node;
      node.members = blocks[b];
      node.last_level = i;
      int a = i;
      while (a > 1 && size[a - 2][h.block_of(rep, a - 1)] == size[i - 1][b]) --a;
      node.first_level = a;
      node_at[i - 1][b] = int(tree.nodes.size());
      tree.nodes.push_back(std::move(node));
    }
  }
  for (int v = 0; v < int(tree.nodes.size()); ++v) {
    BlockNode& node = tree.nodes[v];
    int a = node.first_level;
    if (a == 1) continue;
    std::vector<int> seen;
    for (UserId u : node.members) {
      int b = h.block_of(u, a - 1);
      if (std::find(seen.begin(), seen.end(), b) != seen.end()) continue;
      seen.push_back(b);
      int c = node_at[a - 2][b];
      if (c < 0) throw Error(ErrorCode::InternalInconsistency, "child block is not significant");
      node.children.push_back(c);
      tree.nodes[c].parent = v;
    }
  }
  tree.root = node_at[ell - 1][0];
  return tree;
}

}  // namespace wsp

#endif
