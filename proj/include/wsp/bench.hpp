#ifndef WSP_BENCH_HPP
#define WSP_BENCH_HPP

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsp/generators.hpp"
#include "wsp/solver.hpp"

namespace wsp {

struct BenchRecord {
  int k = 0;
  int n = 0;
  int c = 0;
  std::string route;
  Verdict verdict = Verdict::Unsat;
  double ms = 0;
  std::uint64_t subsets_visited = 0;
};

struct BenchSpec {
  int k_min = 10;
  int k_max = 18;
  int reps = 1;
  double density = 0.5;
  std::uint64_t seed = 1;
  std::vector<Route> routes{Route::Flat};
};

inline constexpr const char* kBenchHeader = "k,n,c,route,verdict,ms";

// One row per (instance, route), on the fully authorized neq family.
inline std::vector<BenchRecord> bench_run(const BenchSpec& spec) {
  if (spec.k_min < 1 || spec.k_max < spec.k_min || spec.k_max > kMaxSteps)
    throw Error(ErrorCode::InvalidArgument, "bad k range");
  if (spec.reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be positive");
  std::vector<BenchRecord> out;
  for (int k = spec.k_min; k <= spec.k_max; ++k) {
    for (int r = 0; r < spec.reps; ++r) {
      WorkflowInstance w = gen_scaling_instance(k, spec.density, spec.seed * 1000003u + std::uint64_t(k) * 101 + r);
      for (Route route : spec.routes) {
        SolveOptions opt;
        opt.route = route;
        SolveResult res = route == Route::Flat ? solve_flat(w) : solve(w, opt);
        out.push_back(BenchRecord{k, w.n(), w.c(), res.stats.route, res.status, res.stats.elapsed_ms,
                                  res.stats.subsets_visited});
      }
    }
  }
  return out;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& rows) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) {
    std::ostringstream ms;
    ms.setf(std::ios::fixed);
    ms.precision(3);
    ms << r.ms;
    os << r.k << ',' << r.n << ',' << r.c << ',' << r.route << ',' << verdict_name(r.verdict) << ',' << ms.str()
       << '\n';
  }
}

}  // namespace wsp

#endif
