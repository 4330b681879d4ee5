// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance --data <dir> [--seed N]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <dockalloc/dockalloc.hpp>
#include <dockalloc/io.hpp>

namespace {

using namespace dockalloc;

bool report(int criterion, const verify::CheckResult& r) {
  std::cout << (r.passed() ? "PASS" : "FAIL") << " criterion " << criterion << ": " << r.name << " ("
            << r.cases << " cases, " << r.violations << " violations)\n";
  for (const auto& d : r.details) std::cout << "    " << d << "\n";
  return r.passed();
}

// Greedy on the bundled 50-station scenario: per-move gains never increase and the run is fast.
verify::CheckResult check_synthetic(const std::string& data) {
  verify::CheckResult r{"synthetic_greedy_run", 0, 0, {}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = estimate_rates(io::read_trips_csv(data + "/trips.csv"), io::read_status_csv(data + "/status.csv"), 5);
  std::vector<PoissonProfile> profiles;
  for (const auto& s : est.stations) profiles.push_back(s.profile);
  auto sc = io::scenario_from_profiles(io::stations_from_json(io::read_json(data + "/stations.json")), profiles,
                                       io::Objective::Daily);
  const auto res = optimize(sc.constraints, sc.costs);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  r.cases = static_cast<long long>(res.log.size());
  if (sc.ids.size() != 50) r.fail("expected 50 stations, got " + std::to_string(sc.ids.size()));
  if (!sc.stations_without_demand.empty()) r.fail("stations without demand estimates");
  for (std::size_t k = 1; k < res.log.size(); ++k) {
    const double prev = res.log[k - 1].move.delta;
    const double cur = res.log[k].move.delta;
    if (cur < prev - 1e-9) {
      r.fail("move " + std::to_string(k) + " gains more than move " + std::to_string(k - 1) + ": " +
             io::fmt(cur) + " < " + io::fmt(prev));
    }
  }
  if (!(res.objective <= res.start_objective)) r.fail("objective increased");
  if (secs >= 120.0) r.fail("runtime " + io::fmt(secs) + " s");
  std::cout << "    " << res.log.size() << " moves, objective " << io::fmt(res.start_objective) << " -> "
            << io::fmt(res.objective) << ", " << io::fmt(secs) << " s\n";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::string data = "data";
  verify::SuiteOptions o;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--data") {
      data = argv[i + 1];
    } else if (flag == "--seed") {
      o.seed = std::strtoull(argv[i + 1], nullptr, 10);
    } else {
      std::cerr << "unknown flag " << flag << "\n";
      return 1;
    }
  }

  bool ok = true;
  try {
    ok &= report(1, verify::check_three_station());
    ok &= report(2, verify::check_prefix_optimality(o));
    ok &= report(3, verify::check_multimodularity(o));
    ok &= report(4, verify::check_simulation(o));
    ok &= report(5, verify::check_solver_equivalence(o));
    ok &= report(6, verify::check_longrun(o));
    ok &= report(7, verify::check_censoring_identity(o));
    ok &= report(8, verify::check_midpoint_fixture());
    ok &= report(9, check_synthetic(data));
  } catch (const std::exception& e) {
    std::cout << "FAIL uncaught exception: " << e.what() << "\n";
    return 1;
  }
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << "\n";
  return ok ? 0 : 1;
}
