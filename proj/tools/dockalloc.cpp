// Command-line front end: estimate, tables, optimize, longrun, posterior, verify.
// Exit codes: 0 success, 1 invalid input, 2 infeasible constraints, 3 failed checks.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <dockalloc/dockalloc.hpp>
#include <dockalloc/io.hpp>

namespace fs = std::filesystem;
using dockalloc::io::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::string out = "out";
  std::uint64_t seed = 1;
};

struct OptimizeArgs {
  std::string stations;
  std::string profiles;
  std::string tables;
  std::string instance;
  std::string objective = "daily";
  std::string solver = "hybrid";
  int granularity = 1;
  std::optional<int> bikes;
  std::optional<int> docks;
  std::optional<long long> max_moves;
  std::string tradeoff;
};

void write_manifest(const Common& common, const std::string& command, const json& config,
                    const std::vector<std::string>& outputs) {
  json m = {{"command", command},
            {"version", kVersion},
            {"seed", common.seed},
            {"config", config},
            {"config_hash", dockalloc::io::config_hash(config)},
            {"outputs", outputs}};
  dockalloc::io::write_file((fs::path(common.out) / "manifest.json").string(), m.dump(2) + "\n");
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::string out_path(const Common& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

int cmd_estimate(const Common& common, const std::string& trips, const std::string& status, int days,
                 const dockalloc::Horizon& horizon) {
  ensure_dir(common.out);
  const auto r = dockalloc::estimate_rates(dockalloc::io::read_trips_csv(trips),
                                           dockalloc::io::read_status_csv(status), days, horizon);
  dockalloc::io::write_file(out_path(common, "profiles.json"), dockalloc::io::estimates_to_json(r).dump(1) + "\n");
  const json config = {{"trips", trips}, {"status", status}, {"days", days},
                       {"horizon", dockalloc::io::horizon_to_json(horizon)}};
  write_manifest(common, "estimate", config, {"profiles.json"});
  std::cout << "estimated " << r.stations.size() << " stations (" << r.trips_outside_horizon
            << " trips outside the horizon)\n";
  return 0;
}

int cmd_tables(const Common& common, const std::string& profiles, int max_capacity, const std::string& objective) {
  const auto dir = out_path(common, "tables");
  ensure_dir(dir);
  const auto obj = dockalloc::io::parse_objective(objective);
  std::vector<std::string> outputs;
  for (const auto& p : dockalloc::io::profiles_from_json(dockalloc::io::read_json(profiles))) {
    auto model = std::make_shared<const dockalloc::PoissonStationModel>(p);
    const auto cost = obj == dockalloc::io::Objective::Daily ? dockalloc::make_poisson_cost(model)
                                                             : dockalloc::make_longrun_cost(model);
    const auto name = "tables/" + p.station_id + ".json";
    dockalloc::io::write_file(out_path(common, name),
                              dockalloc::io::cost_table_to_json(cost->table(max_capacity)).dump() + "\n");
    outputs.push_back(name);
  }
  const json config = {{"profiles", profiles}, {"max_capacity", max_capacity}, {"objective", objective}};
  write_manifest(common, "tables", config, outputs);
  std::cout << "wrote " << outputs.size() << " cost tables\n";
  return 0;
}

dockalloc::io::Scenario load_scenario(const OptimizeArgs& a) {
  namespace io = dockalloc::io;
  const auto obj = io::parse_objective(a.objective);
  if (!a.instance.empty()) return io::scenario_from_instance(io::instance_from_json(io::read_json(a.instance)), obj);
  if (a.stations.empty()) throw dockalloc::ValidationError("--stations or --instance is required");
  auto stations = io::stations_from_json(io::read_json(a.stations));
  if (!a.tables.empty()) {
    std::vector<dockalloc::CostTable> tables;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.tables)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) tables.push_back(io::cost_table_from_json(io::read_json(f.string())));
    return io::scenario_from_tables(std::move(stations), tables);
  }
  if (a.profiles.empty()) throw dockalloc::ValidationError("one of --profiles, --tables or --instance is required");
  return io::scenario_from_profiles(std::move(stations), io::profiles_from_json(io::read_json(a.profiles)), obj);
}

std::optional<dockalloc::Tradeoff> parse_tradeoff(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw dockalloc::ValidationError("--tradeoff expects k,M");
  dockalloc::Tradeoff t;
  t.unit_cost = static_cast<int>(dockalloc::io::parse_number(s.substr(0, comma), "--tradeoff k"));
  t.joint_budget = static_cast<int>(dockalloc::io::parse_number(s.substr(comma + 1), "--tradeoff M"));
  if (t.unit_cost < 1 || t.joint_budget < 0) throw dockalloc::ValidationError("--tradeoff needs k >= 1 and M >= 0");
  return t;
}

int cmd_optimize(const Common& common, OptimizeArgs a, const std::string& command) {
  namespace io = dockalloc::io;
  if (command == "longrun") a.objective = "longrun";
  auto sc = load_scenario(a);
  auto& c = sc.constraints;
  if (a.bikes) c.bikes = *a.bikes;
  if (a.docks) c.docks = *a.docks;
  c.max_moves = a.max_moves;
  c.tradeoff = parse_tradeoff(a.tradeoff);
  const auto solver = dockalloc::parse_solver(a.solver);
  if (a.granularity < 1) throw dockalloc::ValidationError("--granularity must be positive");

  ensure_dir(common.out);
  std::vector<double> baseline_costs;
  for (std::size_t i = 0; i < sc.ids.size(); ++i) {
    baseline_costs.push_back((*sc.costs[i])(c.baseline.open_docks[i], c.baseline.bikes[i]));
  }
  dockalloc::OptimizeResult result;
  json stats = {{"solver", dockalloc::solver_name(solver)}, {"granularity", a.granularity}};
  if (c.tradeoff) {
    const auto t = dockalloc::optimize_tradeoff(c, sc.costs);
    result = t.result;
    json cands = json::array();
    for (const auto& cand : t.candidates) {
      cands.push_back({{"purchased", cand.purchased}, {"moves", cand.moves}, {"objective", cand.objective}});
    }
    stats["tradeoff"] = {{"k", c.tradeoff->unit_cost}, {"M", c.tradeoff->joint_budget},
                         {"purchased", t.purchased}, {"placed", t.placed}, {"moves", t.moves},
                         {"candidates", cands}};
  } else if (solver == dockalloc::Solver::Greedy && a.granularity == 1) {
    result = dockalloc::optimize(c, sc.costs);
  } else {
    const auto plan = dockalloc::make_plan(solver, c.total_capacity(), a.granularity);
    const auto run = dockalloc::solve(c, sc.costs, plan);
    result = run.result;
    json phases = json::array();
    for (const auto& ph : run.phases) {
      json p = {{"step", ph.step}, {"bike_transfers", ph.bike_transfers}, {"dock_moves", ph.dock_moves},
                {"objective", ph.objective}, {"new_cost_rows", ph.new_rows}};
      if (c.max_moves) {
        p["projected_docks"] = ph.projected_docks;
        p["move_budget"] = ph.move_budget;
      }
      phases.push_back(p);
    }
    stats["plan"] = plan.steps;
    stats["phases"] = phases;
  }
  json rows = json::object();
  long long total_rows = 0;
  for (const auto& cost : sc.costs) {
    for (int cap : cost->computed_capacities()) {
      const auto key = std::to_string(cap);
      rows[key] = rows.value(key, 0LL) + 1;
      ++total_rows;
    }
  }
  stats["cost_rows_by_capacity"] = rows;
  stats["cost_rows"] = total_rows;
  stats["stations_without_demand"] = sc.stations_without_demand;

  std::vector<std::string> outputs{"allocation.json", "moves.csv", "improvement.csv", "stats.json"};
  json alloc = io::allocation_to_json(result, c.baseline, sc.ids, baseline_costs);
  alloc["objective_kind"] = a.objective;
  io::write_file(out_path(common, "allocation.json"), alloc.dump(1) + "\n");
  io::write_file(out_path(common, "moves.csv"), io::moves_csv(result.log, sc.ids));
  io::write_file(out_path(common, "improvement.csv"), io::improvement_csv(result));
  io::write_file(out_path(common, "stats.json"), stats.dump(1) + "\n");
  const bool located = std::any_of(sc.stations.begin(), sc.stations.end(),
                                   [](const io::StationRecord& s) { return s.lat && s.lon; });
  if (located) {
    io::write_file(out_path(common, "allocation.geojson"), io::geojson(result, c.baseline, sc.stations).dump(1) + "\n");
    outputs.push_back("allocation.geojson");
  }
  json config = {{"stations", a.stations}, {"profiles", a.profiles}, {"tables", a.tables},
                 {"instance", a.instance}, {"objective", a.objective}, {"solver", a.solver},
                 {"granularity", a.granularity}, {"bikes", c.bikes}, {"docks", c.docks},
                 {"max_moves", c.max_moves ? json(*c.max_moves) : json(nullptr)},
                 {"tradeoff", a.tradeoff}};
  write_manifest(common, command, config, outputs);
  std::cout << "objective " << io::fmt(result.start_objective) << " -> " << io::fmt(result.objective) << " in "
            << result.log.size() << " moves\n";
  return 0;
}

int cmd_posterior(const Common& common, const std::string& days_path, const std::string& profiles,
                  const std::string& mode, long long resamples) {
  namespace io = dockalloc::io;
  ensure_dir(common.out);
  const auto days = io::days_from_json(io::read_json(days_path));
  std::vector<dockalloc::PoissonProfile> profs;
  if (!profiles.empty()) profs = io::profiles_from_json(io::read_json(profiles));
  dockalloc::RebalancingMode m;
  if (mode == "strict") {
    m = dockalloc::RebalancingMode::Strict;
  } else if (mode == "optimistic") {
    m = dockalloc::RebalancingMode::Optimistic;
  } else {
    throw dockalloc::ValidationError("--mode must be 'strict' or 'optimistic'");
  }
  const auto rep = dockalloc::posterior_report(days, profs, m, resamples, common.seed);
  io::write_file(out_path(common, "posterior.json"), io::posterior_to_json(rep).dump(1) + "\n");
  const json config = {{"days", days_path}, {"profiles", profiles}, {"mode", mode}, {"resamples", resamples}};
  write_manifest(common, "posterior", config, {"posterior.json"});
  std::cout << "evaluated " << rep.days.size() << " station-days\n";
  return 0;
}

int cmd_verify(const Common& common, const dockalloc::verify::SuiteOptions& opt, bool simulation) {
  ensure_dir(common.out);
  const auto results = dockalloc::verify::run_suite(opt, simulation);
  json checks = json::array();
  long long violations = 0;
  for (const auto& r : results) {
    checks.push_back({{"name", r.name}, {"cases", r.cases}, {"violations", r.violations},
                      {"details", r.details}, {"passed", r.passed()}});
    violations += r.violations;
    std::cout << (r.passed() ? "ok   " : "FAIL ") << r.name << " (" << r.cases << " cases, " << r.violations
              << " violations)\n";
  }
  dockalloc::io::write_file(out_path(common, "verify.json"),
                            json{{"checks", checks}, {"violations", violations}}.dump(1) + "\n");
  const json config = {{"instances", opt.instances}, {"finite_tables", opt.finite_tables},
                       {"poisson_tables", opt.poisson_tables}, {"simulation", simulation},
                       {"simulation_cases", opt.simulation_cases}, {"trials", opt.trials},
                       {"identity_tuples", opt.identity_tuples}};
  write_manifest(common, "verify", config, {"verify.json"});
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
  return ok ? 0 : 3;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

void add_optimize_flags(CLI::App* sub, OptimizeArgs& a) {
  sub->add_option("--stations", a.stations, "Stations JSON");
  sub->add_option("--profiles", a.profiles, "Demand profiles JSON (from estimate)");
  sub->add_option("--tables", a.tables, "Directory of cost-table JSON files");
  sub->add_option("--instance", a.instance, "Self-contained instance JSON");
  sub->add_option("--objective", a.objective, "daily or longrun")->capture_default_str();
  sub->add_option("--solver", a.solver, "greedy, scaling or hybrid")->capture_default_str();
  sub->add_option("--granularity", a.granularity, "Move docks in multiples of N")->capture_default_str();
  sub->add_option("--bikes", a.bikes, "Bike budget B");
  sub->add_option("--docks", a.docks, "Empty-dock budget D");
  sub->add_option("--max-moves", a.max_moves, "Dock-move bound z");
  sub->add_option("--tradeoff", a.tradeoff, "k,M: k moves cost one new dock, joint budget M");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dock and bike allocation for bike-share systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common common;

  std::string trips;
  std::string status;
  int days = 1;
  dockalloc::Horizon horizon;
  auto* est = app.add_subcommand("estimate", "Estimate Poisson demand profiles from trips and status");
  add_common(est, common);
  est->add_option("--trips", trips, "Trips CSV")->required();
  est->add_option("--status", status, "Status CSV")->required();
  est->add_option("--days", days, "Number of days aggregated")->capture_default_str();
  est->add_option("--intervals", horizon.intervals, "Intervals per day")->capture_default_str();
  est->add_option("--minutes", horizon.minutes_per_interval, "Minutes per interval")->capture_default_str();
  est->add_option("--start-hour", horizon.start_hour, "Hour the horizon starts")->capture_default_str();

  std::string profiles;
  int max_capacity = 40;
  std::string table_objective = "daily";
  auto* tab = app.add_subcommand("tables", "Tabulate station cost functions");
  add_common(tab, common);
  tab->add_option("--profiles", profiles, "Demand profiles JSON")->required();
  tab->add_option("--max-capacity", max_capacity, "Largest capacity tabulated")->capture_default_str();
  tab->add_option("--objective", table_objective, "daily or longrun")->capture_default_str();

  OptimizeArgs opt_args;
  auto* opt = app.add_subcommand("optimize", "Reallocate docks and bikes");
  add_common(opt, common);
  add_optimize_flags(opt, opt_args);
  OptimizeArgs lr_args;
  auto* lr = app.add_subcommand("longrun", "Reallocate under the long-run average objective");
  add_common(lr, common);
  add_optimize_flags(lr, lr_args);

  std::string days_path;
  std::string post_profiles;
  std::string mode = "strict";
  long long resamples = 1000;
  auto* post = app.add_subcommand("posterior", "Estimate the effect of past capacity changes");
  add_common(post, common);
  post->add_option("--days", days_path, "Observed days JSON")->required();
  post->add_option("--profiles", post_profiles, "Demand profiles JSON for decensoring");
  post->add_option("--mode", mode, "Rebalancing treatment: strict or optimistic")->capture_default_str();
  post->add_option("--resamples", resamples, "Decensoring resamples")->capture_default_str();

  dockalloc::verify::SuiteOptions suite;
  bool simulation = false;
  auto* ver = app.add_subcommand("verify", "Run the randomised oracle suite");
  add_common(ver, common);
  ver->add_option("--instances", suite.instances, "Random allocation instances")->capture_default_str();
  ver->add_option("--identity-tuples", suite.identity_tuples, "Censoring identity samples")->capture_default_str();
  ver->add_flag("--simulation", simulation, "Include the Monte-Carlo comparison");
  ver->add_option("--trials", suite.trials, "Monte-Carlo trials per case")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*est) return cmd_estimate(common, trips, status, days, horizon);
    if (*tab) return cmd_tables(common, profiles, max_capacity, table_objective);
    if (*opt) return cmd_optimize(common, opt_args, "optimize");
    if (*lr) return cmd_optimize(common, lr_args, "longrun");
    if (*post) return cmd_posterior(common, days_path, post_profiles, mode, resamples);
    if (*ver) {
      suite.seed = common.seed;
      return cmd_verify(common, suite, simulation);
    }
  } catch (const dockalloc::InfeasibleError& e) {
    std::cerr << "infeasible:\n";
    for (const auto& r : e.reasons()) std::cerr << "  " << r << "\n";
    return 2;
  } catch (const dockalloc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dockalloc::CapacityLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
