#ifndef DOCKALLOC_IO_HPP_
#define DOCKALLOC_IO_HPP_

// File formats: trip and status CSV, profile / cost-table / station / instance /
// observed-day JSON, and the solver's output documents.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "allocator.hpp"
#include "demand.hpp"
#include "error.hpp"
#include "longrun.hpp"
#include "oracle.hpp"
#include "posterior.hpp"
#include "profile.hpp"
#include "udf.hpp"

namespace dockalloc::io {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

/// Shortest round-trip decimal form of a double.
inline std::string fmt(double v) { return json(v).dump(); }

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name, const std::string& source) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw ValidationError(source + ": missing column '" + name + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(cells));
  }
  if (first) throw ValidationError(source + ": empty file");
  return t;
}

inline double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where + ": '" + s + "' is not a number");
  }
}

/// Seconds since midnight from integer/decimal seconds or an ISO-8601 time
/// ("HH:MM[:SS]" optionally preceded by a date and 'T' or ' ').
inline double parse_timestamp(const std::string& raw, const std::string& where) {
  const bool numeric = !raw.empty() && raw.find(':') == std::string::npos;
  if (numeric) return parse_number(raw, where);
  std::string s = raw;
  const auto sep = s.find_first_of("T ");
  if (sep != std::string::npos) s = s.substr(sep + 1);
  const auto zone = s.find_first_of("Z+");
  if (zone != std::string::npos) s = s.substr(0, zone);
  int h = 0;
  int m = 0;
  double sec = 0.0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(s);
  in >> h >> c1 >> m;
  if (!in || c1 != ':') throw ValidationError(where + ": unreadable timestamp '" + raw + "'");
  if (in >> c2) {
    if (c2 != ':' || !(in >> sec)) throw ValidationError(where + ": unreadable timestamp '" + raw + "'");
  }
  return h * 3600.0 + m * 60.0 + sec;
}

inline Customer parse_kind(const std::string& s, const std::string& where) {
  if (s == "rental") return Customer::Rental;
  if (s == "return") return Customer::Return;
  throw ValidationError(where + ": kind must be 'rental' or 'return', got '" + s + "'");
}

inline std::vector<TripRecord> read_trips_csv(const std::string& path) {
  const auto t = parse_csv(read_file(path), path);
  const auto cid = t.column("station_id", path);
  const auto cts = t.column("timestamp", path);
  const auto ckind = t.column("kind", path);
  std::vector<TripRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + " row " + std::to_string(r + 1);
    out.push_back({t.rows[r][cid], parse_timestamp(t.rows[r][cts], where),
                   parse_kind(t.rows[r][ckind], where)});
  }
  return out;
}

inline std::vector<StatusRecord> read_status_csv(const std::string& path) {
  const auto t = parse_csv(read_file(path), path);
  const auto cid = t.column("station_id", path);
  const auto civ = t.column("interval", path);
  const auto cne = t.column("minutes_nonempty", path);
  const auto cnf = t.column("minutes_nonfull", path);
  std::vector<StatusRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + " row " + std::to_string(r + 1);
    const double iv = parse_number(t.rows[r][civ], where);
    out.push_back({t.rows[r][cid], static_cast<int>(iv), parse_number(t.rows[r][cne], where),
                   parse_number(t.rows[r][cnf], where)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Profiles

inline json horizon_to_json(const Horizon& h) {
  return {{"intervals", h.intervals}, {"minutes_per_interval", h.minutes_per_interval},
          {"start_hour", h.start_hour}};
}

inline Horizon horizon_from_json(const json& j) {
  Horizon h;
  h.intervals = j.value("intervals", h.intervals);
  h.minutes_per_interval = j.value("minutes_per_interval", h.minutes_per_interval);
  h.start_hour = j.value("start_hour", h.start_hour);
  return h;
}

inline json estimates_to_json(const EstimateResult& r) {
  json stations = json::array();
  for (const auto& s : r.stations) {
    stations.push_back({{"id", s.profile.station_id},
                        {"rental_rates", s.profile.rental_rate},
                        {"return_rates", s.profile.return_rate},
                        {"flags", s.flags}});
  }
  return {{"horizon", horizon_to_json(r.horizon)}, {"stations", stations},
          {"trips_outside_horizon", r.trips_outside_horizon}};
}

inline std::vector<PoissonProfile> profiles_from_json(const json& j) {
  try {
    const Horizon h = horizon_from_json(j.at("horizon"));
    std::vector<PoissonProfile> out;
    for (const auto& s : j.at("stations")) {
      PoissonProfile p;
      p.station_id = s.at("id").get<std::string>();
      p.horizon = h;
      p.rental_rate = s.at("rental_rates").get<std::vector<double>>();
      p.return_rate = s.at("return_rates").get<std::vector<double>>();
      p.validate();
      out.push_back(std::move(p));
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("profiles document: ") + e.what());
  }
}

inline ArrivalSequence sequence_from_json(const json& j) {
  ArrivalSequence s;
  for (const auto& v : j) s.push_back(customer_from_sign(v.get<int>()));
  return s;
}

inline json sequence_to_json(const ArrivalSequence& s) {
  json a = json::array();
  for (Customer c : s) a.push_back(sign(c));
  return a;
}

inline json profile_to_json(const DemandProfile& p) {
  if (const auto* f = std::get_if<FiniteProfile>(&p)) {
    json atoms = json::array();
    for (const auto& a : f->atoms) {
      atoms.push_back({{"sequence", sequence_to_json(a.sequence)}, {"probability", a.probability}});
    }
    return {{"kind", "finite"}, {"atoms", atoms}};
  }
  const auto& q = std::get<PoissonProfile>(p);
  return {{"kind", "poisson"},
          {"horizon", horizon_to_json(q.horizon)},
          {"rental_rates", q.rental_rate},
          {"return_rates", q.return_rate}};
}

inline DemandProfile profile_from_json(const json& j, const std::string& id) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "finite") {
    FiniteProfile f;
    for (const auto& a : j.at("atoms")) {
      f.atoms.push_back({sequence_from_json(a.at("sequence")), a.at("probability").get<double>()});
    }
    f.validate();
    return f;
  }
  if (kind == "poisson") {
    PoissonProfile p;
    p.station_id = id;
    p.horizon = horizon_from_json(j.at("horizon"));
    p.rental_rate = j.at("rental_rates").get<std::vector<double>>();
    p.return_rate = j.at("return_rates").get<std::vector<double>>();
    p.validate();
    return p;
  }
  throw ValidationError("profile kind must be 'finite' or 'poisson', got '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Cost tables

inline json cost_table_to_json(const CostTable& t) {
  return {{"station_id", t.station_id()}, {"max_capacity", t.max_capacity()},
          {"provenance", t.provenance()}, {"values", t.rows()}};
}

inline CostTable cost_table_from_json(const json& j) {
  try {
    auto rows = j.at("values").get<std::vector<std::vector<double>>>();
    const int cap = j.at("max_capacity").get<int>();
    if (static_cast<int>(rows.size()) != cap + 1) {
      throw ValidationError("cost table: values must have max_capacity + 1 rows");
    }
    return CostTable(j.at("station_id").get<std::string>(), std::move(rows),
                     j.value("provenance", std::string("finite")));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("cost table: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Stations

struct StationRecord {
  std::string id;
  int capacity = 0;  // current_docks: total docks, empty or holding a bike
  int bikes = 0;
  int lower = 0;
  int upper = 0;
  std::optional<double> lat;
  std::optional<double> lon;
};

inline std::vector<StationRecord> stations_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("stations") : j;
  std::vector<StationRecord> out;
  try {
    for (const auto& s : arr) {
      StationRecord r;
      r.id = s.at("id").get<std::string>();
      r.capacity = s.at("current_docks").get<int>();
      r.bikes = s.at("current_bikes").get<int>();
      r.lower = s.value("l", 0);
      r.upper = s.value("u", r.capacity);
      if (s.contains("lat")) r.lat = s.at("lat").get<double>();
      if (s.contains("lon")) r.lon = s.at("lon").get<double>();
      if (r.capacity < 0 || r.bikes < 0 || r.bikes > r.capacity) {
        throw ValidationError("station '" + r.id + "': need 0 <= current_bikes <= current_docks");
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("stations document: ") + e.what());
  }
  return out;
}

inline json stations_to_json(const std::vector<StationRecord>& st) {
  json arr = json::array();
  for (const auto& s : st) {
    json o = {{"id", s.id}, {"current_docks", s.capacity}, {"current_bikes", s.bikes},
              {"l", s.lower}, {"u", s.upper}};
    if (s.lat) o["lat"] = *s.lat;
    if (s.lon) o["lon"] = *s.lon;
    arr.push_back(o);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Scenarios: stations plus a cost source

enum class Objective { Daily, Longrun };

inline Objective parse_objective(const std::string& s) {
  if (s == "daily") return Objective::Daily;
  if (s == "longrun") return Objective::Longrun;
  throw ValidationError("objective must be 'daily' or 'longrun', got '" + s + "'");
}

struct Scenario {
  std::vector<StationRecord> stations;
  std::vector<std::string> ids;
  Constraints constraints;
  std::vector<StationCostPtr> costs;
  std::vector<std::string> stations_without_demand;
};

/// Baseline, budgets and bounds from station records. B and D default to the
/// current bikes and empty docks.
inline Scenario scenario_skeleton(std::vector<StationRecord> stations) {
  Scenario sc;
  std::vector<int> d;
  std::vector<int> b;
  for (const auto& s : stations) {
    sc.ids.push_back(s.id);
    d.push_back(s.capacity - s.bikes);
    b.push_back(s.bikes);
    sc.constraints.lower.push_back(s.lower);
    sc.constraints.upper.push_back(s.upper);
    sc.constraints.bikes += s.bikes;
    sc.constraints.docks += s.capacity - s.bikes;
  }
  sc.constraints.baseline = Allocation(std::move(d), std::move(b));
  sc.stations = std::move(stations);
  return sc;
}

/// Costs from Poisson profiles matched by station id; stations without a profile
/// have no demand and cost nothing.
inline Scenario scenario_from_profiles(std::vector<StationRecord> stations,
                                       const std::vector<PoissonProfile>& profiles, Objective objective) {
  Scenario sc = scenario_skeleton(std::move(stations));
  std::map<std::string, const PoissonProfile*> by_id;
  for (const auto& p : profiles) by_id[p.station_id] = &p;
  for (const auto& id : sc.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      sc.stations_without_demand.push_back(id);
      sc.costs.push_back(make_zero_cost(id));
      continue;
    }
    auto model = std::make_shared<const PoissonStationModel>(*it->second);
    sc.costs.push_back(objective == Objective::Daily ? make_poisson_cost(model) : make_longrun_cost(model));
  }
  return sc;
}

/// Costs from tabulated values matched by station id.
inline Scenario scenario_from_tables(std::vector<StationRecord> stations, const std::vector<CostTable>& tables) {
  Scenario sc = scenario_skeleton(std::move(stations));
  for (const auto& id : sc.ids) {
    const CostTable* hit = nullptr;
    for (const auto& t : tables) {
      if (t.station_id() == id) hit = &t;
    }
    if (!hit) throw ValidationError("no cost table for station '" + id + "'");
    sc.costs.push_back(make_table_cost(*hit));
  }
  return sc;
}

/// An instance document carries its own baseline, bounds and profiles.
inline Scenario scenario_from_instance(const InstanceSpec& spec, Objective objective) {
  Scenario sc;
  sc.ids = spec.ids;
  sc.constraints = spec.constraints;
  for (std::size_t i = 0; i < spec.ids.size(); ++i) {
    StationRecord r;
    r.id = spec.ids[i];
    r.capacity = spec.constraints.baseline.capacity(i);
    r.bikes = spec.constraints.baseline.bikes[i];
    r.lower = spec.constraints.lower[i];
    r.upper = spec.constraints.upper[i];
    sc.stations.push_back(r);
    const auto& p = spec.profiles[i];
    if (objective == Objective::Daily) {
      sc.costs.push_back(instance_costs(InstanceSpec{spec.name, {spec.ids[i]}, {p}, {}, 0}).front());
    } else if (const auto* f = std::get_if<FiniteProfile>(&p)) {
      sc.costs.push_back(make_longrun_cost(spec.ids[i], *f));
    } else {
      auto q = std::get<PoissonProfile>(p);
      q.station_id = spec.ids[i];
      sc.costs.push_back(make_longrun_cost(std::make_shared<const PoissonStationModel>(q)));
    }
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Instances

inline json instance_to_json(const InstanceSpec& s) {
  const auto& c = s.constraints;
  json st = json::array();
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    st.push_back({{"id", s.ids[i]},
                  {"profile", profile_to_json(s.profiles[i])},
                  {"lower", c.lower[i]},
                  {"upper", c.upper[i]},
                  {"open_docks", c.baseline.open_docks[i]},
                  {"bikes", c.baseline.bikes[i]}});
  }
  json j = {{"name", s.name}, {"stations", st}, {"bikes", c.bikes}, {"docks", c.docks},
            {"max_z", s.max_z}};
  j["max_moves"] = c.max_moves ? json(*c.max_moves) : json(nullptr);
  if (c.tradeoff) {
    j["tradeoff"] = {{"k", c.tradeoff->unit_cost}, {"M", c.tradeoff->joint_budget}};
  }
  return j;
}

inline InstanceSpec instance_from_json(const json& j) {
  try {
    InstanceSpec s;
    s.name = j.value("name", std::string());
    auto& c = s.constraints;
    std::vector<int> d;
    std::vector<int> b;
    for (const auto& st : j.at("stations")) {
      const auto id = st.at("id").get<std::string>();
      s.ids.push_back(id);
      s.profiles.push_back(profile_from_json(st.at("profile"), id));
      c.lower.push_back(st.at("lower").get<int>());
      c.upper.push_back(st.at("upper").get<int>());
      d.push_back(st.at("open_docks").get<int>());
      b.push_back(st.at("bikes").get<int>());
    }
    c.baseline = Allocation(std::move(d), std::move(b));
    c.bikes = j.at("bikes").get<int>();
    c.docks = j.at("docks").get<int>();
    if (j.contains("max_moves") && !j.at("max_moves").is_null()) {
      c.max_moves = j.at("max_moves").get<long long>();
    }
    if (j.contains("tradeoff")) {
      c.tradeoff = Tradeoff{j.at("tradeoff").at("k").get<int>(), j.at("tradeoff").at("M").get<int>()};
    }
    s.max_z = j.value("max_z", 0LL);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Observed days

inline std::vector<ObservedDay> days_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("days") : j;
  std::vector<ObservedDay> out;
  try {
    for (const auto& o : arr) {
      ObservedDay d;
      d.station_id = o.at("station_id").get<std::string>();
      for (const auto& e : o.value("events", json::array())) {
        d.events.push_back({e.at("time").get<double>(), parse_kind(e.at("kind").get<std::string>(), d.station_id)});
      }
      d.capacity_after = o.at("capacity_after").get<int>();
      d.bikes_at_open = o.at("bikes_at_open").get<int>();
      d.capacity_before = o.at("capacity_before").get<int>();
      for (const auto& p : o.value("full_periods", json::array())) {
        d.full_periods.push_back({p.at("interval").get<int>(), p.at("minutes").get<double>()});
      }
      for (const auto& p : o.value("empty_periods", json::array())) {
        d.empty_periods.push_back({p.at("interval").get<int>(), p.at("minutes").get<double>()});
      }
      for (const auto& r : o.value("rebalancing", json::array())) {
        d.rebalancing.push_back({r.at("time").get<double>(), r.at("count").get<int>()});
      }
      out.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("days document: ") + e.what());
  }
  return out;
}

inline json posterior_to_json(const PosteriorReport& r) {
  auto grid = [](const std::array<std::array<double, 2>, 2>& g) {
    json o;
    for (int rule = 0; rule < 2; ++rule) {
      const char* rn = bike_rule_name(rule == 0 ? BikeRule::Same : BikeRule::Proportional);
      o[rn] = {{"no_rebalancing", g[rule][0]}, {"rebalancing", g[rule][1]}};
    }
    return o;
  };
  json days = json::array();
  for (const auto& d : r.days) {
    days.push_back({{"station_id", d.station_id}, {"direction", d.direction},
                    {"reduction", grid(d.reduction)}});
  }
  return {{"rebalancing_mode", rebalancing_mode_name(r.mode)},
          {"resamples", r.resamples},
          {"seed", r.seed},
          {"days", days},
          {"total_reduction", grid(r.total)}};
}

// ---------------------------------------------------------------------------
// Solver outputs

inline std::string station_label(int idx, const std::vector<std::string>& ids) {
  if (idx < 0) return "";
  if (static_cast<std::size_t>(idx) < ids.size()) return ids[idx];
  return static_cast<std::size_t>(idx) == ids.size() ? "__depot__" : "__inventory__";
}

inline std::string moves_csv(const MoveLog& log, const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "iteration,kind,i,j,h,step,delta,objective\n";
  for (const auto& e : log) {
    out << e.iteration << ',' << move_kind_name(e.move.kind) << ',' << station_label(e.move.i, ids)
        << ',' << station_label(e.move.j, ids) << ',' << station_label(e.move.h, ids) << ','
        << e.move.step << ',' << fmt(e.move.delta) << ',' << fmt(e.objective) << '\n';
  }
  return out.str();
}

/// Objective after each number of moves, starting at zero moves.
inline std::string improvement_csv(const OptimizeResult& r) {
  std::ostringstream out;
  out << "moves,objective,improvement\n";
  out << 0 << ',' << fmt(r.start_objective) << ',' << fmt(0.0) << '\n';
  for (const auto& e : r.log) {
    out << e.iteration << ',' << fmt(e.objective) << ',' << fmt(r.start_objective - e.objective) << '\n';
  }
  return out.str();
}

inline json allocation_to_json(const OptimizeResult& r, const Allocation& baseline,
                               const std::vector<std::string>& ids,
                               const std::vector<double>& baseline_costs) {
  json st = json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    st.push_back({{"id", ids[i]},
                  {"docks_before", baseline.capacity(i)},
                  {"bikes_before", baseline.bikes[i]},
                  {"docks_after", r.allocation.capacity(i)},
                  {"bikes_after", r.allocation.bikes[i]},
                  {"open_docks_after", r.allocation.open_docks[i]},
                  {"dock_delta", r.allocation.capacity(i) - baseline.capacity(i)},
                  {"cost_before", baseline_costs[i]},
                  {"cost_after", r.station_costs[i]}});
  }
  return {{"objective", r.objective},
          {"start_objective", r.start_objective},
          {"moves", r.log.size()},
          {"dock_move_distance", dock_distance(r.allocation, baseline)},
          {"unallocated_bikes", r.unallocated_bikes},
          {"stations", st}};
}

/// Point features with a dock_delta property; red marks stations losing docks and
/// blue stations gaining them.
inline json geojson(const OptimizeResult& r, const Allocation& baseline,
                    const std::vector<StationRecord>& stations) {
  json features = json::array();
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (!stations[i].lat || !stations[i].lon) continue;
    const int delta = r.allocation.capacity(i) - baseline.capacity(i);
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", {*stations[i].lon, *stations[i].lat}}}},
         {"properties",
          {{"id", stations[i].id},
           {"dock_delta", delta},
           {"marker-color", delta < 0 ? "#d62728" : delta > 0 ? "#1f77b4" : "#7f7f7f"}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

/// FNV-1a over the canonical JSON text.
inline std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace dockalloc::io

#endif  // DOCKALLOC_IO_HPP_
