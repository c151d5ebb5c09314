#ifndef WSP_CLI_HPP
#define WSP_CLI_HPP

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsp/bench.hpp"
#include "wsp/canonical.hpp"
#include "wsp/generators.hpp"
#include "wsp/io.hpp"
#include "wsp/kernel.hpp"
#include "wsp/solver.hpp"

namespace wsp::cli {

enum ExitCode { kSat = 0, kUnsat = 1, kUsage = 2, kCapability = 3 };

struct Options {
  std::string input;
  std::string output;
  std::uint64_t seed = 1;
  std::string route = "auto";
  bool emit_trace = false;
  bool serial = false;
  int cap = kMaxSteps;
  // per command
  std::string plan;
  std::string method = "fold-subtrees";
  int k = 5;
  int n = 4;
  int constraints = 4;
  double density = 0.5;
  std::string mix = "mixed";
  int k_min = 10;
  int k_max = 18;
  int reps = 1;
};

inline std::string read_text(const std::string& path, std::istream& fallback) {
  std::ostringstream ss;
  if (path.empty() || path == "-") {
    ss << fallback.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  ss << f.rdbuf();
  return ss.str();
}

class Output {
 public:
  Output(const std::string& path, std::ostream& out) : out_(out), path_(path) {}
  std::ostream& stream() { return path_.empty() ? out_ : buffer_; }
  void flush() {
    if (path_.empty()) return;
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path_ + "'");
    f << buffer_.str();
  }

 private:
  std::ostream& out_;
  std::string path_;
  std::ostringstream buffer_;
};

inline int cmd_solve(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  WorkflowInstance w = read_instance(read_text(o.input, in), o.cap);
  SolveOptions opt;
  opt.route = parse_route(o.route);
  opt.cap = o.cap;
  if (o.emit_trace) err << trace_json(kernelize(w)).dump(2) << '\n';
  SolveResult r = solve(w, opt);
  Output sink(o.output, out);
  sink.stream() << plan_json(w, r.plan).dump(2) << '\n';
  sink.flush();
  err << "route: " << r.stats.route << '\n';
  return r.sat() ? kSat : kUnsat;
}

inline int cmd_check(const Options& o, std::istream& in, std::ostream& out) {
  WorkflowInstance w = read_instance(read_text(o.input, in), o.cap);
  if (o.plan.empty()) throw Error(ErrorCode::InvalidArgument, "check needs --plan");
  Plan p = parse_plan(read_text(o.plan, in), w);
  PlanVerdict v = check_plan(w, p);
  Output sink(o.output, out);
  sink.stream() << verdict_json(w, v).dump(2) << '\n';
  sink.flush();
  return v.valid ? kSat : kUnsat;
}

inline int cmd_kernelize(const Options& o, std::istream& in, std::ostream& out) {
  WorkflowInstance w = read_instance(read_text(o.input, in), o.cap);
  KernelResult kr = kernelize(w);
  OrderedJson j = trace_json(kr);
  if (!kr.verdict_shortcut) j["instance"] = instance_json(kr.reduced);
  Output sink(o.output, out);
  sink.stream() << j.dump(2) << '\n';
  sink.flush();
  return kSat;
}

inline int cmd_gen(const std::string& kind, const Options& o, std::istream& in, std::ostream& out) {
  WorkflowInstance w;
  if (kind == "nae3sat") w = gen_nae3sat(parse_cnf(read_text(o.input, in)), o.cap);
  else if (kind == "hitting-set") w = gen_hitting_set_eq(parse_hitting_set(read_text(o.input, in)), o.cap);
  else if (kind == "hitting-set-counting")
    w = gen_hitting_set_counting(parse_hitting_set(read_text(o.input, in)), o.cap);
  else if (kind == "or-3col") w = gen_3coloring_or(parse_graphs(read_text(o.input, in)), o.cap);
  else {
    RandomSpec spec{o.k, o.n, o.constraints, o.density, o.mix, o.seed};
    if (spec.k > o.cap) throw Error(ErrorCode::StepLimitExceeded, "k exceeds the cap");
    w = gen_random(spec);
  }
  Output sink(o.output, out);
  sink.stream() << serialize_instance(w);
  sink.flush();
  return kSat;
}

inline int cmd_hierarchy(const std::string& kind, const Options& o, std::istream& in, std::ostream& out) {
  Output sink(o.output, out);
  if (kind == "from-tree") {
    ManagementTree t = parse_tree(read_text(o.input, in));
    Hierarchy h = from_management_tree(t, parse_tree_method(o.method));
    sink.stream() << hierarchy_json(h, t.nodes).dump(2) << '\n';
  } else {
    WorkflowInstance w = read_instance(read_text(o.input, in), o.cap);
    if (!w.hierarchy) throw Error(ErrorCode::MissingHierarchy, "instance has no hierarchy");
    sink.stream() << serialize_instance(canonicalize_instance(w));
  }
  sink.flush();
  return kSat;
}

inline int cmd_min_users(const Options& o, std::istream& in, std::ostream& out) {
  WorkflowInstance w = read_instance(read_text(o.input, in), o.cap);
  SolveOptions opt;
  opt.cap = o.cap;
  MinUsersResult r = min_fully_authorized_users(w.k(), w.constraints, opt);
  Json j;
  j["min_users"] = r.users ? Json(*r.users) : Json();
  j["solve_calls"] = r.solve_calls;
  Output sink(o.output, out);
  sink.stream() << j.dump(2) << '\n';
  sink.flush();
  return r.users ? kSat : kUnsat;
}

inline int cmd_bench(const Options& o, std::ostream& out) {
  BenchSpec spec;
  spec.k_min = o.k_min;
  spec.k_max = std::min(o.k_max, o.cap);
  spec.reps = o.reps;
  spec.density = o.density;
  spec.seed = o.seed;
  spec.routes = {parse_route(o.route == "auto" ? "flat" : o.route)};
  Output sink(o.output, out);
  write_bench_csv(sink.stream(), bench_run(spec));
  sink.flush();
  return kSat;
}

inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow satisfiability toolkit", "wsp"};
  app.require_subcommand(1, 1);
  Options o;
  app.add_option("--input,-i", o.input, "Input file (default: standard input)");
  app.add_option("--output,-o", o.output, "Output file (default: standard output)");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--route", o.route, "Solver route")
      ->check(CLI::IsMember({"auto", "flat", "quotient", "hierarchy", "oracle", "search"}));
  app.add_flag("--emit-trace", o.emit_trace, "Print the kernel trace to standard error");
  app.add_flag("--serial", o.serial, "Run benchmark instances one at a time");
  app.add_option("--cap", o.cap, "Step cap")->check(CLI::Range(0, kMaxSteps));

  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  auto* check_cmd = app.add_subcommand("check", "Check a plan against an instance");
  check_cmd->add_option("--plan,-p", o.plan, "Plan JSON")->required();
  auto* kernel_cmd = app.add_subcommand("kernelize", "Run the kernel pipeline");
  auto* gen_cmd = app.add_subcommand("gen", "Generate instances");
  gen_cmd->require_subcommand(1, 1);
  std::vector<std::pair<std::string, CLI::App*>> gens;
  for (const char* g : {"nae3sat", "hitting-set", "hitting-set-counting", "or-3col", "random"})
    gens.emplace_back(g, gen_cmd->add_subcommand(g, std::string("Generate ") + g + " instances"));
  auto* random_cmd = gens.back().second;
  random_cmd->add_option("--k", o.k, "Steps")->check(CLI::Range(0, kMaxSteps));
  random_cmd->add_option("--n", o.n, "Users")->check(CLI::Range(1, 100000));
  random_cmd->add_option("--constraints", o.constraints, "Constraint count")->check(CLI::NonNegativeNumber);
  random_cmd->add_option("--density", o.density, "Authorization density")->check(CLI::Range(0.0, 1.0));
  random_cmd->add_option("--mix", o.mix, "Constraint mix")->check(CLI::IsMember(random_mixes()));
  auto* hier_cmd = app.add_subcommand("hierarchy", "Hierarchy utilities");
  hier_cmd->require_subcommand(1, 1);
  auto* tree_cmd = hier_cmd->add_subcommand("from-tree", "Hierarchy from a management tree");
  tree_cmd->add_option("--method", o.method, "fold-subtrees or collapse-root-and-leaves")
      ->check(CLI::IsMember({"fold-subtrees", "collapse-root-and-leaves"}));
  auto* canon_cmd = hier_cmd->add_subcommand("canonicalize", "Canonicalize an instance's hierarchy");
  auto* min_cmd = app.add_subcommand("min-users", "Minimum number of fully authorized users");
  auto* bench_cmd = app.add_subcommand("bench", "Scaling benchmark as CSV");
  bench_cmd->add_option("--k-min", o.k_min, "Smallest k")->check(CLI::Range(1, kMaxSteps));
  bench_cmd->add_option("--k-max", o.k_max, "Largest k")->check(CLI::Range(1, kMaxSteps));
  bench_cmd->add_option("--reps", o.reps, "Instances per k")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--density", o.density, "Neq pair density")->check(CLI::Range(0.0, 1.0));
  for (CLI::App* sub : {solve_cmd, check_cmd, kernel_cmd, gen_cmd, hier_cmd, min_cmd, bench_cmd, tree_cmd, canon_cmd})
    sub->fallthrough();
  for (auto& [_, sub] : gens) sub->fallthrough();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSat;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(o, in, out, err);
    if (check_cmd->parsed()) return cmd_check(o, in, out);
    if (kernel_cmd->parsed()) return cmd_kernelize(o, in, out);
    if (gen_cmd->parsed())
      for (auto& [name, sub] : gens)
        if (sub->parsed()) return cmd_gen(name, o, in, out);
    if (tree_cmd->parsed()) return cmd_hierarchy("from-tree", o, in, out);
    if (canon_cmd->parsed()) return cmd_hierarchy("canonicalize", o, in, out);
    if (min_cmd->parsed()) return cmd_min_users(o, in, out);
    if (bench_cmd->parsed()) return cmd_bench(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_capability_error(e.code()) ? kCapability : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  err << "usage error: no command\n";
  return kUsage;
}

inline int run(int argc, char** argv, std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), in, out, err);
}

}  // namespace wsp::cli

#endif
