#ifndef WSP_IO_HPP
#define WSP_IO_HPP

#include <cstdlib>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wsp/error.hpp"
#include "wsp/generators.hpp"
#include "wsp/hierarchy.hpp"
#include "wsp/kernel.hpp"
#include "wsp/model.hpp"

namespace wsp {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') { ++line; col = 1; }
    else ++col;
  }
  return {line, col};
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
}

// Runs `fn` and reports JSON shape errors as parse errors at `where`.
template <typename Fn>
auto with_shape(std::string_view where, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(where) + ": " + e.what());
  }
}

inline std::vector<std::string> names_of(StepSet s, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  s.for_each([&](int i) { out.push_back(names[i]); });
  return out;
}

}  // namespace detail

//-----------------------------------------------------------------------------
// Instances

inline RawInstance parse_instance(std::string_view text) {
  Json j = detail::parse_json(text);
  return detail::with_shape("instance", [&] {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "instance must be a JSON object");
    static const std::vector<std::string> known = {"steps", "order", "users", "auth", "constraints", "hierarchy"};
    for (const auto& [key, _] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw Error(ErrorCode::ParseError, "unknown key '" + key + "'");
    RawInstance raw;
    raw.steps = j.value("steps", std::vector<std::string>{});
    raw.users = j.value("users", std::vector<std::string>{});
    if (j.contains("order"))
      for (const auto& p : j.at("order")) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ParseError, "order entries are [before, after]");
        raw.order.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
      }
    if (j.contains("auth"))
      for (const auto& [user, steps] : j.at("auth").items())
        raw.auth.emplace_back(user, steps.get<std::vector<std::string>>());
    if (j.contains("constraints")) {
      for (const auto& c : j.at("constraints")) {
        RawConstraint rc;
        rc.type = c.at("type").get<std::string>();
        if (rc.type == "counting") {
          rc.tl = c.at("tl").get<int>();
          rc.tr = c.at("tr").get<int>();
          rc.scope = c.at("scope").get<std::vector<std::string>>();
        } else if (rc.type == "entailment") {
          rc.relation = c.at("relation").get<std::string>();
          static const std::vector<std::string> relations = {"eq", "neq", "sim", "nsim", "pairs"};
          if (std::find(relations.begin(), relations.end(), rc.relation) == relations.end())
            throw Error(ErrorCode::ParseError, "unknown relation '" + rc.relation + "'");
          if (c.contains("level") && !c.at("level").is_null()) rc.level = c.at("level").get<int>();
          rc.scope1 = c.at("scope1").get<std::vector<std::string>>();
          rc.scope2 = c.at("scope2").get<std::vector<std::string>>();
          if (c.contains("pairs"))
            for (const auto& p : c.at("pairs")) {
              if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ParseError, "pairs entries are [user, user]");
              rc.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
            }
        } else {
          throw Error(ErrorCode::ParseError, "unknown constraint type '" + rc.type + "'");
        }
        raw.constraints.push_back(std::move(rc));
      }
    }
    if (j.contains("hierarchy") && !j.at("hierarchy").is_null())
      raw.hierarchy = j.at("hierarchy").at("levels").get<std::vector<std::vector<std::vector<std::string>>>>();
    return raw;
  });
}

inline WorkflowInstance read_instance(std::string_view text, int cap = kMaxSteps) {
  return validate_instance(parse_instance(text), cap);
}

inline OrderedJson hierarchy_json(const Hierarchy& h, const std::vector<std::string>& users) {
  OrderedJson levels = OrderedJson::array();
  for (int i = 1; i <= h.levels(); ++i) {
    OrderedJson level = OrderedJson::array();
    for (const auto& block : h.blocks(i)) {
      OrderedJson b = OrderedJson::array();
      for (UserId u : block) b.push_back(users[u]);
      level.push_back(b);
    }
    levels.push_back(level);
  }
  return OrderedJson{{"levels", levels}};
}

inline OrderedJson instance_json(const WorkflowInstance& w) {
  OrderedJson j;
  j["steps"] = w.steps;
  OrderedJson order = OrderedJson::array();
  for (auto [a, b] : w.order) order.push_back({w.steps[a], w.steps[b]});
  j["order"] = order;
  j["users"] = w.users;
  OrderedJson auth = OrderedJson::object();
  for (UserId u = 0; u < w.n(); ++u) auth[w.users[u]] = detail::names_of(w.auth[u], w.steps);
  j["auth"] = auth;
  OrderedJson cs = OrderedJson::array();
  for (const auto& c : w.constraints) {
    OrderedJson x;
    if (const auto* cc = as_counting(c)) {
      x["type"] = "counting";
      x["tl"] = cc->tl;
      x["tr"] = cc->tr;
      x["scope"] = detail::names_of(cc->scope, w.steps);
    } else {
      const auto& e = std::get<Entailment>(c);
      x["type"] = "entailment";
      x["relation"] = std::string(relation_name(e.rel.kind));
      if (e.rel.kind == RelationKind::Sim || e.rel.kind == RelationKind::Nsim) x["level"] = e.rel.level;
      x["scope1"] = detail::names_of(e.scope1, w.steps);
      x["scope2"] = detail::names_of(e.scope2, w.steps);
      if (e.rel.kind == RelationKind::Pairs) {
        OrderedJson pairs = OrderedJson::array();
        for (auto [a, b] : e.rel.pairs) pairs.push_back({w.users[a], w.users[b]});
        x["pairs"] = pairs;
      }
    }
    cs.push_back(x);
  }
  j["constraints"] = cs;
  if (w.hierarchy) j["hierarchy"] = hierarchy_json(*w.hierarchy, w.users);
  return j;
}

inline std::string serialize_instance(const WorkflowInstance& w) { return instance_json(w).dump(2) + "\n"; }

//-----------------------------------------------------------------------------
// Plans

inline Json plan_json(const WorkflowInstance& w, const std::optional<Plan>& p) {
  Json j;
  if (!p) {
    j["status"] = "unsat";
    return j;
  }
  j["status"] = "sat";
  Json plan = Json::object();  // keys come out in step-name order
  for (StepId s = 0; s < w.k(); ++s) plan[w.steps[s]] = w.users[p->assignment[s]];
  j["plan"] = plan;
  return j;
}

// Accepts {"plan": {...}} or a bare step -> user object.
inline Plan parse_plan(std::string_view text, const WorkflowInstance& w) {
  Json j = detail::parse_json(text);
  return detail::with_shape("plan", [&] {
    const Json& m = j.contains("plan") ? j.at("plan") : j;
    if (!m.is_object()) throw Error(ErrorCode::ParseError, "plan must map steps to users");
    auto sidx = detail::index_names(w.steps, "step");
    auto uidx = detail::index_names(w.users, "user");
    Plan p{std::vector<UserId>(w.k(), -1)};
    for (const auto& [step, user] : m.items())
      p.assignment[detail::lookup(sidx, step, "step")] = detail::lookup(uidx, user.get<std::string>(), "user");
    for (StepId s = 0; s < w.k(); ++s)
      if (p.assignment[s] < 0) throw Error(ErrorCode::InvalidArgument, "plan does not assign '" + w.steps[s] + "'");
    return p;
  });
}

inline Json verdict_json(const WorkflowInstance& w, const PlanVerdict& v) {
  Json j;
  j["valid"] = v.valid;
  Json violated = Json::array();
  for (int i : v.violated) violated.push_back(i);
  j["violated"] = violated;
  Json unauthorized = Json::array();
  for (StepId s : v.unauthorized) unauthorized.push_back(w.steps[s]);
  j["unauthorized"] = unauthorized;
  return j;
}

//-----------------------------------------------------------------------------
// Management trees

inline ManagementTree parse_tree(std::string_view text) {
  Json j = detail::parse_json(text);
  return detail::with_shape("tree", [&] {
    ManagementTree t;
    t.nodes = j.at("nodes").get<std::vector<std::string>>();
    auto idx = detail::index_names(t.nodes, "node");
    t.root = detail::lookup(idx, j.at("root").get<std::string>(), "node");
    for (const auto& e : j.value("edges", Json::array())) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "edges are [parent, child]");
      t.edges.emplace_back(detail::lookup(idx, e[0].get<std::string>(), "node"),
                           detail::lookup(idx, e[1].get<std::string>(), "node"));
    }
    return t;
  });
}

//-----------------------------------------------------------------------------
// Kernel traces

inline OrderedJson trace_json(const KernelResult& kr) {
  OrderedJson stages = OrderedJson::array();
  for (const auto& stage : kr.trace) {
    OrderedJson s;
    s["stage"] = std::string(stage_name(stage));
    if (const auto* m = std::get_if<MergeStage>(&stage)) {
      OrderedJson sup = OrderedJson::array();
      for (const auto& group : m->supersteps) {
        OrderedJson g = OrderedJson::array();
        for (StepId x : group) g.push_back(m->input.steps[x]);
        sup.push_back(g);
      }
      s["supersteps"] = sup;
    } else if (const auto* e = std::get_if<EasyStepStage>(&stage)) {
      OrderedJson easy = OrderedJson::array(), hard = OrderedJson::array(), users = OrderedJson::array();
      for (StepId x : e->easy_steps) easy.push_back(e->input.steps[x]);
      for (StepId x : e->hard_steps) hard.push_back(e->input.steps[x]);
      for (UserId u : e->kept_users) users.push_back(e->input.users[u]);
      s["easy_steps"] = easy;
      s["hard_steps"] = hard;
      s["kept_users"] = users;
    } else {
      const auto& mt = std::get<MatchingStage>(stage);
      OrderedJson matched = OrderedJson::array(), steps = OrderedJson::array(), users = OrderedJson::array();
      for (auto [x, u] : mt.matched) matched.push_back({mt.input.steps[x], mt.input.users[u]});
      for (StepId x : mt.kernel_steps) steps.push_back(mt.input.steps[x]);
      for (UserId u : mt.kernel_users) users.push_back(mt.input.users[u]);
      s["matched"] = matched;
      s["kernel_steps"] = steps;
      s["kernel_users"] = users;
    }
    stages.push_back(s);
  }
  OrderedJson j;
  j["stages"] = stages;
  j["verdict_shortcut"] = kr.verdict_shortcut ? OrderedJson(std::string(verdict_name(*kr.verdict_shortcut))) : OrderedJson();
  j["original"] = {{"k", kr.original.k()}, {"n", kr.original.n()}, {"c", kr.original.c()}};
  j["reduced"] = {{"k", kr.reduced.k()}, {"n", kr.reduced.n()}, {"c", kr.reduced.c()}};
  return j;
}

//-----------------------------------------------------------------------------
// Source-problem formats

namespace detail {

inline std::vector<std::pair<int, std::string>> content_lines(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream is{std::string(text)};
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == 'c' || line[first] == '%') continue;
    out.emplace_back(no, line);
  }
  return out;
}

[[noreturn]] inline void dimacs_error(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

// DIMACS CNF; every clause must have exactly three literals.
inline CnfFormula parse_cnf(std::string_view text) {
  CnfFormula f;
  bool header = false;
  int declared = 0;
  std::vector<int> pending;
  int last_line = 0;
  for (const auto& [no, line] : detail::content_lines(text)) {
    last_line = no;
    std::istringstream is(line);
    if (line.find_first_not_of(" \t") != std::string::npos && line[line.find_first_not_of(" \t")] == 'p') {
      std::string p, fmt;
      if (header || !(is >> p >> fmt >> f.vars >> declared) || fmt != "cnf" || f.vars < 0 || declared < 0)
        detail::dimacs_error(no, "bad problem line");
      header = true;
      continue;
    }
    if (!header) detail::dimacs_error(no, "clause before the problem line");
    std::string tok;
    while (is >> tok) {
      char* end = nullptr;
      long lit = std::strtol(tok.c_str(), &end, 10);
      if (*end != '\0') detail::dimacs_error(no, "bad literal '" + tok + "'");
      if (lit == 0) {
        if (pending.size() != 3) detail::dimacs_error(no, "clause must have exactly three literals");
        f.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
        continue;
      }
      if (std::labs(lit) > f.vars) detail::dimacs_error(no, "literal out of range");
      pending.push_back(int(lit));
    }
  }
  if (!header) detail::dimacs_error(last_line, "missing problem line");
  if (!pending.empty()) detail::dimacs_error(last_line, "unterminated clause");
  if (int(f.clauses.size()) != declared) detail::dimacs_error(last_line, "clause count differs from the header");
  return f;
}

inline std::string write_cnf(const CnfFormula& f) {
  std::ostringstream os;
  os << "p cnf " << f.vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) os << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
  return os.str();
}

inline HittingSetInstance parse_hitting_set(std::string_view text) {
  Json j = detail::parse_json(text);
  return detail::with_shape("hitting set", [&] {
    HittingSetInstance h;
    h.elements = j.at("elements").get<std::vector<std::string>>();
    auto idx = detail::index_names(h.elements, "element");
    for (const auto& s : j.at("sets")) {
      auto& set = h.sets.emplace_back();
      for (const auto& e : s) set.push_back(detail::lookup(idx, e.get<std::string>(), "element"));
    }
    h.k = j.at("k").get<int>();
    validate_hitting_set(h);
    return h;
  });
}

// One or more graphs, each opened by "p edge <vertices> <edges>" and followed
// by "e <u> <v>" lines with 1-based endpoints.
inline std::vector<Graph> parse_graphs(std::string_view text) {
  std::vector<Graph> graphs;
  std::vector<int> declared;
  int last_line = 0;
  for (const auto& [no, line] : detail::content_lines(text)) {
    last_line = no;
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag == "p") {
      std::string fmt;
      int v = 0, m = 0;
      if (!(is >> fmt >> v >> m) || fmt != "edge" || v < 0 || m < 0) detail::dimacs_error(no, "bad problem line");
      graphs.push_back(Graph{v, {}});
      declared.push_back(m);
    } else if (tag == "e") {
      if (graphs.empty()) detail::dimacs_error(no, "edge before the problem line");
      int a = 0, b = 0;
      if (!(is >> a >> b)) detail::dimacs_error(no, "bad edge line");
      if (a < 1 || b < 1 || a > graphs.back().vertices || b > graphs.back().vertices)
        detail::dimacs_error(no, "edge endpoint out of range");
      graphs.back().edges.emplace_back(a - 1, b - 1);
    } else {
      detail::dimacs_error(no, "unexpected line");
    }
  }
  if (graphs.empty()) detail::dimacs_error(last_line, "no graphs");
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (int(graphs[i].edges.size()) != declared[i])
      detail::dimacs_error(last_line, "graph " + std::to_string(i + 1) + " edge count differs from its header");
  return graphs;
}

inline std::string write_graphs(const std::vector<Graph>& graphs) {
  std::ostringstream os;
  for (const auto& g : graphs) {
    os << "p edge " << g.vertices << ' ' << g.edges.size() << '\n';
    for (auto [a, b] : g.edges) os << "e " << a + 1 << ' ' << b + 1 << '\n';
  }
  return os.str();
}

}  // namespace wsp

#endif
