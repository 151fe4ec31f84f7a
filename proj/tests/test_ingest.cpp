#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "peergraph/error.hpp"
#include "peergraph/ingest.hpp"

using namespace peergraph;

namespace {

const Date kDay = Date::parse("2020-01-01");

const char* kTwoNetworks = R"({
  "net": {"data": [
    {"asn": 10, "name": "A", "info_ratio": "Heavy Outbound", "info_scope": "Global", "info_type": "Content"},
    {"asn": 20, "name": "B", "info_type": "Cable/DSL/ISP"}
  ]},
  "ix": {"data": [{"id": 1, "name": "X", "country": "DE"}]},
  "netixlan": {"data": [
    {"asn": 10, "ix_id": 1, "speed": 10000},
    {"asn": 20, "ix_id": 1, "speed": 1000}
  ]}
})";

}  // namespace

TEST_CASE("dump with two networks, one exchange and two ports") {
  const auto s = parse_snapshot_text(kTwoNetworks, kDay);
  CHECK(s.networks.size() == 2);
  CHECK(s.ixps.size() == 1);
  CHECK(s.memberships.size() == 2);
  CHECK(s.stats.dropped_memberships() == 0);
  CHECK(s.date == kDay);
}

TEST_CASE("missing traffic ratio is Not Disclosed") {
  const auto s = parse_snapshot_text(kTwoNetworks, kDay);
  REQUIRE(s.find_network(20));
  CHECK(s.find_network(20)->info_ratio == TrafficClass::NotDisclosed);
  CHECK(s.find_network(10)->info_ratio == TrafficClass::HeavyOutbound);
}

TEST_CASE("traffic class text and abbreviations") {
  CHECK(traffic_class_from_text("Mostly Inbound") == TrafficClass::MostlyInbound);
  CHECK(traffic_class_from_text("") == TrafficClass::NotDisclosed);
  CHECK(traffic_class_from_text("sideways") == TrafficClass::NotDisclosed);
  for (auto c : kAllTrafficClasses) {
    CHECK(traffic_class_from_abbreviation(abbreviation(c)) == c);
    CHECK(traffic_class_from_text(to_string(c)) == c);
  }
  CHECK_THROWS_AS(traffic_class_from_abbreviation("XX"), ParseError);
  CHECK(normalize_info_type("Cable/DSL/ISP") == "Cable/DSL/ISP");
  CHECK(normalize_info_type("Spaceship operator") == "Not Disclosed");
}

TEST_CASE("membership to an unknown exchange is dropped and counted") {
  const auto s = parse_snapshot_text(R"({
    "net": [{"asn": 1, "name": "A"}],
    "ix": [{"id": 5, "name": "X", "country": "FR"}],
    "netixlan": [{"asn": 1, "ix_id": 5, "speed": 10}, {"asn": 1, "ix_id": 6, "speed": 10},
                 {"asn": 2, "ix_id": 5, "speed": 10}]
  })",
                                     kDay);
  CHECK(s.memberships.size() == 1);
  CHECK(s.stats.unresolved_memberships == 2);
  CHECK(s.stats.dropped_memberships() == 2);
}

TEST_CASE("every kept membership resolves") {
  const auto s = parse_snapshot(std::filesystem::path(PEERGRAPH_TEST_DATA) / "fixture_snapshot.json", kDay);
  CHECK(s.stats.unresolved_memberships == 1);
  for (const auto& m : s.memberships) {
    CHECK(s.find_network(m.asn) != nullptr);
    CHECK(s.find_ixp(m.ixp_id) != nullptr);
  }
}

TEST_CASE("malformed records are counted, not fatal") {
  const auto s = parse_snapshot_text(R"({
    "net": [{"asn": 1, "name": "A"}, {"asn": "x"}, {"asn": 1, "name": "dup"}, {"asn": 0}],
    "ix": [{"id": 5, "name": "X", "country": "germany"}, {"name": "no id"}],
    "netixlan": [{"asn": 1, "ix_id": 5, "speed": -3}, {"asn": 1, "ix_id": 5},
                 {"asn": 1, "ix_id": 5, "speed": "fast"}]
  })",
                                     kDay);
  CHECK(s.networks.size() == 1);
  CHECK(s.networks[0].name == "A");
  CHECK(s.stats.duplicate_networks == 1);
  CHECK(s.stats.malformed_networks == 2);
  CHECK(s.stats.malformed_ixps == 1);
  CHECK(s.ixps[0].country.empty());
  CHECK(s.stats.malformed_memberships == 2);
  REQUIRE(s.memberships.size() == 1);
  CHECK(s.memberships[0].port_size == 0.0);
}

TEST_CASE("bad top level structure is fatal") {
  CHECK_THROWS_AS(parse_snapshot_text("[1, 2]", kDay), ParseError);
  CHECK_THROWS_AS(parse_snapshot_text("{\"net\": []}", kDay), ParseError);
  CHECK_THROWS_AS(parse_snapshot_text("{not json", kDay), ParseError);
  CHECK_THROWS_AS(parse_snapshot("/nonexistent/dump.json", kDay), ParseError);
}

TEST_CASE("parsing is a function of the bytes") {
  const auto a = parse_snapshot_text(kTwoNetworks, kDay);
  const auto b = parse_snapshot_text(kTwoNetworks, kDay);
  REQUIRE(a.networks.size() == b.networks.size());
  for (std::size_t i = 0; i < a.networks.size(); ++i) {
    CHECK(a.networks[i].asn == b.networks[i].asn);
    CHECK(a.networks[i].name == b.networks[i].name);
  }
  REQUIRE(a.memberships.size() == b.memberships.size());
  for (std::size_t i = 0; i < a.memberships.size(); ++i) CHECK(a.memberships[i].port_size == b.memberships[i].port_size);
}

TEST_CASE("outlier screening uses a strict threshold") {
  RawSnapshot s;
  s.networks = {{1, "big"}, {2, "edge"}, {3, "small"}};
  s.ixps = {{1, "X", "DE"}};
  s.memberships = {{1, 1, 1000.0}, {2, 1, 100.0}, {3, 1, 5.0}};
  auto flagged = validate_snapshot(s, 10.0);
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].asn == 1);
  CHECK(flagged[0].ratio == doctest::Approx(100.0));
  CHECK(flagged[0].memberships.size() == 1);
  CHECK(validate_snapshot(s, 1000.0).empty());
  CHECK(validate_snapshot(RawSnapshot{}, 1.0).empty());
}

TEST_CASE("ground truth rows") {
  GroundTruth t;
  parse_asorg_text("asn,country\n15169,US\n# note\nAS3320|DE\n15169,IE\nbad row\n", t);
  CHECK(t.country_of(15169) == "IE");
  CHECK(t.country_of(3320) == "DE");
  CHECK(t.stats.duplicate_rows == 1);
  CHECK(t.stats.malformed_rows == 1);
  CHECK_FALSE(t.country_of(1).has_value());

  parse_apnic_text("7922,US,15.0,3\n7922\tUS\t101\t1\n1,US,5,0\n", t);
  REQUIRE(t.eums.contains({7922, "US"}));
  CHECK(t.eums.at({7922, "US"}).percent == 15.0);
  CHECK(t.eums.at({7922, "US"}).national_rank == 3);
  CHECK(t.eums_of(7922, "US") == 15.0);
  CHECK(t.eums_of(7922, "DE") == 0.0);
  CHECK(t.stats.malformed_rows == 3);
}

TEST_CASE("ground truth files") {
  const std::filesystem::path dir(PEERGRAPH_TEST_DATA);
  const std::vector<std::filesystem::path> apnic{dir / "fixture_apnic.csv"};
  const auto t = load_ground_truth(dir / "fixture_asorg.csv", apnic);
  CHECK(t.as_country.size() == 31);
  CHECK(t.eums.size() == 12);
  CHECK(t.stats.malformed_rows == 0);
  CHECK_THROWS_AS(load_ground_truth(dir / "missing.csv", {}), ParseError);
}

TEST_CASE("capacity time series") {
  RawSnapshot s;
  s.date = kDay;
  s.networks = {{1, "a"}};
  s.ixps = {{1, "X", ""}};
  s.memberships = {{1, 1, 10.0}, {1, 1, 20.0}, {1, 1, 30.0}};
  RawSnapshot empty;
  empty.date = Date::parse("2019-06-01");
  const std::vector<RawSnapshot> snaps{s, empty};
  const auto ts = capacity_timeseries(snaps);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].date == empty.date);
  CHECK(ts[0].capacity == 0.0);
  CHECK(ts[1].capacity == 60.0);

  // Additivity: splitting the memberships splits the total.
  RawSnapshot left = s, right = s;
  left.memberships = {s.memberships[0]};
  right.memberships = {s.memberships[1], s.memberships[2]};
  const std::vector<RawSnapshot> l{left}, r{right};
  CHECK(capacity_timeseries(l)[0].capacity + capacity_timeseries(r)[0].capacity == ts[1].capacity);
}

TEST_CASE("dates") {
  CHECK(Date::parse("2020-02-29").str() == "2020-02-29");
  CHECK_THROWS_AS(Date::parse("2021-02-29"), ParseError);
  CHECK_THROWS_AS(Date::parse("2020-1-1"), ParseError);
  CHECK(Date::parse("2020-01-02").day_number() - Date::parse("2020-01-01").day_number() == 1);
}
