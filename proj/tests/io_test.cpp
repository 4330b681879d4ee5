#include <gtest/gtest.h>

#include <filesystem>

#include <dockalloc/io.hpp>

#include "support.hpp"

namespace dockalloc {
namespace {

using io::json;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dockalloc_io_" + name)).string();
}

TEST(Csv, QuotedFieldsAndCrlf) {
  const auto t = io::parse_csv("a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n\n1,2\n", "mem");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x,y");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_EQ(t.column("b", "mem"), 1u);
  EXPECT_THROW(static_cast<void>(t.column("c", "mem")), ValidationError);
  EXPECT_THROW(io::parse_csv("a,b\n1\n", "mem"), ValidationError);
  EXPECT_THROW(io::parse_csv("", "mem"), ValidationError);
}

TEST(Csv, Timestamps) {
  EXPECT_EQ(io::parse_timestamp("3600", "t"), 3600.0);
  EXPECT_EQ(io::parse_timestamp("07:30", "t"), 27000.0);
  EXPECT_EQ(io::parse_timestamp("2024-05-01T07:30:15Z", "t"), 27015.0);
  EXPECT_EQ(io::parse_timestamp("2024-05-01 00:00:01", "t"), 1.0);
  EXPECT_THROW(io::parse_timestamp("noon", "t"), ValidationError);
  EXPECT_THROW(io::parse_timestamp("12:xx", "t"), ValidationError);
}

TEST(Csv, TripAndStatusFiles) {
  const auto trips = temp_path("trips.csv");
  const auto status = temp_path("status.csv");
  io::write_file(trips, "station_id,timestamp,kind\na,06:10,rental\nb,22000,return\n");
  io::write_file(status, "station_id,interval,minutes_nonempty,minutes_nonfull\na,0,30,25.5\n");
  const auto t = io::read_trips_csv(trips);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].timestamp, 22200.0);
  EXPECT_EQ(t[1].kind, Customer::Return);
  const auto s = io::read_status_csv(status);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].minutes_nonfull, 25.5);
  io::write_file(trips, "station_id,timestamp,kind\na,06:10,borrow\n");
  EXPECT_THROW(io::read_trips_csv(trips), ValidationError);
  EXPECT_THROW(io::read_file(temp_path("missing.csv")), ValidationError);
}

TEST(Json, CostTableRoundTrip) {
  const auto costs = instance_costs(three_station_instance());
  const auto table = costs[2]->table(4);
  const auto back = io::cost_table_from_json(json::parse(io::cost_table_to_json(table).dump()));
  EXPECT_EQ(back.rows(), table.rows());
  EXPECT_EQ(back.station_id(), table.station_id());
  json bad = io::cost_table_to_json(table);
  bad["max_capacity"] = 9;
  EXPECT_THROW(io::cost_table_from_json(bad), ValidationError);
}

TEST(Json, InstanceRoundTrip) {
  for (const auto& spec : counterexample_fixtures()) {
    const auto back = io::instance_from_json(json::parse(io::instance_to_json(spec).dump()));
    EXPECT_EQ(back.ids, spec.ids);
    EXPECT_EQ(back.constraints.baseline, spec.constraints.baseline);
    EXPECT_EQ(back.constraints.lower, spec.constraints.lower);
    EXPECT_EQ(back.constraints.upper, spec.constraints.upper);
    EXPECT_EQ(back.constraints.max_moves, spec.constraints.max_moves);
    EXPECT_EQ(back.constraints.bikes, spec.constraints.bikes);
    const auto a = instance_costs(spec);
    const auto b = instance_costs(back);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->table(3).rows(), b[i]->table(3).rows());
  }
}

TEST(Json, PoissonProfileRoundTrip) {
  std::mt19937_64 rng(61);
  const DemandProfile p = testing::random_poisson_profile(rng, 4, 15.0, 0.5);
  const auto back = io::profile_from_json(io::profile_to_json(p), "p");
  EXPECT_EQ(std::get<PoissonProfile>(back).rental_rate, std::get<PoissonProfile>(p).rental_rate);
  EXPECT_THROW(io::profile_from_json(json{{"kind", "gamma"}}, "p"), ValidationError);
}

TEST(Json, EstimatesRoundTrip) {
  EstimateResult r;
  r.horizon = Horizon{2, 30.0, 6};
  StationEstimate e;
  e.profile.station_id = "a";
  e.profile.horizon = r.horizon;
  e.profile.rental_rate = {0.5, 0.0};
  e.profile.return_rate = {0.25, 1.0};
  r.stations.push_back(e);
  const auto ps = io::profiles_from_json(io::estimates_to_json(r));
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].return_rate, e.profile.return_rate);
  EXPECT_EQ(ps[0].horizon, r.horizon);
}

TEST(Json, StationsAndDays) {
  const json st = json::parse(R"({"stations": [
    {"id": "a", "current_docks": 5, "current_bikes": 2, "lat": 1.5, "lon": 2.5},
    {"id": "b", "current_docks": 3, "current_bikes": 0, "l": 1, "u": 6}]})");
  const auto s = io::stations_from_json(st);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].upper, 5);
  EXPECT_EQ(s[1].lower, 1);
  EXPECT_FALSE(s[1].lat.has_value());
  EXPECT_EQ(io::stations_from_json(io::stations_to_json(s))[0].lat, 1.5);
  EXPECT_THROW(io::stations_from_json(json::parse(R"([{"id": "x", "current_docks": 1, "current_bikes": 2}])")),
               ValidationError);

  const json days = json::parse(R"({"days": [{"station_id": "a", "capacity_after": 2, "bikes_at_open": 0,
    "capacity_before": 1, "events": [{"time": 10, "kind": "return"}, {"time": 20, "kind": "return"},
    {"time": 30, "kind": "rental"}], "rebalancing": [{"time": 15, "count": -1}],
    "full_periods": [{"interval": 0, "minutes": 5}]}]})");
  const auto d = io::days_from_json(days);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].events.size(), 3u);
  EXPECT_EQ(d[0].rebalancing[0].count, -1);
  EXPECT_EQ(d[0].full_periods[0].minutes, 5.0);
  EXPECT_EQ(added_capacity_impact(d[0]), 1);
}

TEST(Outputs, MovesImprovementAndGeojson) {
  const auto spec = three_station_instance();
  const auto costs = instance_costs(spec);
  const auto r = optimize(spec.constraints, costs);
  const auto moves = io::moves_csv(r.log, spec.ids);
  EXPECT_EQ(moves.substr(0, moves.find('\n')), "iteration,kind,i,j,h,step,delta,objective");
  EXPECT_NE(moves.find(",-0.5,1.0\n"), std::string::npos);
  EXPECT_EQ(io::improvement_csv(r), "moves,objective,improvement\n0,1.5,0.0\n1,1.0,0.5\n");

  std::vector<io::StationRecord> st;
  for (std::size_t i = 0; i < 3; ++i) {
    io::StationRecord rec;
    rec.id = spec.ids[i];
    rec.lat = 40.0 + static_cast<double>(i);
    rec.lon = -3.0;
    st.push_back(rec);
  }
  const auto g = io::geojson(r, spec.constraints.baseline, st);
  ASSERT_EQ(g["features"].size(), 3u);
  EXPECT_EQ(g["features"][1]["properties"]["dock_delta"], -1);
  EXPECT_EQ(g["features"][1]["properties"]["marker-color"], "#d62728");
  EXPECT_EQ(g["features"][2]["properties"]["marker-color"], "#1f77b4");
  EXPECT_EQ(g["features"][0]["geometry"]["coordinates"][0], -3.0);

  const auto a = io::allocation_to_json(r, spec.constraints.baseline, spec.ids, {0.5, 0.0, 1.0});
  EXPECT_EQ(a["objective"], 1.0);
  EXPECT_EQ(a["dock_move_distance"], 2);
  EXPECT_EQ(io::station_label(3, spec.ids), "__depot__");
  EXPECT_EQ(io::station_label(4, spec.ids), "__inventory__");
}

TEST(Outputs, ConfigHashIsStable) {
  const json a = {{"solver", "hybrid"}, {"seed", 1}};
  const json b = json::parse(R"({"seed": 1, "solver": "hybrid"})");
  EXPECT_EQ(io::config_hash(a), io::config_hash(b));
  EXPECT_EQ(io::config_hash(a).size(), 16u);
  EXPECT_NE(io::config_hash(a), io::config_hash(json{{"solver", "greedy"}, {"seed", 1}}));
}

TEST(Outputs, PosteriorJsonLayout) {
  std::vector<ObservedDay> days(1);
  days[0].station_id = "a";
  days[0].capacity_after = 2;
  days[0].capacity_before = 1;
  days[0].events = {{1.0, Customer::Return}, {2.0, Customer::Return}};
  const auto j = io::posterior_to_json(posterior_report(days, {}, RebalancingMode::Optimistic, 5, 3));
  EXPECT_EQ(j["rebalancing_mode"], "optimistic");
  EXPECT_EQ(j["days"][0]["reduction"]["same"]["no_rebalancing"], 1.0);
  EXPECT_EQ(j["total_reduction"]["proportional"]["rebalancing"], 1.0);
}

}  // namespace
}  // namespace dockalloc
