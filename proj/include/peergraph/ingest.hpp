#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peergraph/date.hpp"

namespace peergraph {

using Asn = std::uint32_t;
using IxpId = std::uint32_t;

// Declared inbound/outbound traffic profile of a network (PeeringDB info_ratio).
enum class TrafficClass {
  Balanced,
  HeavyInbound,
  HeavyOutbound,
  MostlyInbound,
  MostlyOutbound,
  NotDisclosed,
};

inline constexpr TrafficClass kAllTrafficClasses[] = {
    TrafficClass::Balanced,      TrafficClass::HeavyInbound,   TrafficClass::HeavyOutbound,
    TrafficClass::MostlyInbound, TrafficClass::MostlyOutbound, TrafficClass::NotDisclosed,
};

// Free text as found in dumps ("Heavy Outbound", ...). Unknown text maps to NotDisclosed.
TrafficClass traffic_class_from_text(std::string_view text);
std::string_view to_string(TrafficClass c);
// Two-letter abbreviation used in tables (B, HI, HO, MI, MO, ND).
std::string_view abbreviation(TrafficClass c);
// Inverse of abbreviation(); throws ParseError on unknown codes.
TrafficClass traffic_class_from_abbreviation(std::string_view code);

bool is_inbound(TrafficClass c);
bool is_outbound(TrafficClass c);

inline constexpr std::string_view kNotDisclosed = "Not Disclosed";

// Maps a business type to one of PeeringDB's known values, or "Not Disclosed".
std::string normalize_info_type(std::string_view text);

struct NetworkRecord {
  Asn asn = 0;
  std::string name;
  TrafficClass info_ratio = TrafficClass::NotDisclosed;
  std::string info_scope;
  std::string info_type{kNotDisclosed};
};

struct IxpRecord {
  IxpId ixp_id = 0;
  std::string name;
  std::string country;  // ISO-3166 alpha-2, may be empty
};

struct MembershipRecord {
  Asn asn = 0;
  IxpId ixp_id = 0;
  double port_size = 0.0;  // Mbit/s, one record per router port
};

// Bookkeeping for records that could not be loaded. Per-record problems are
// never fatal.
struct ParseStats {
  std::size_t malformed_networks = 0;
  std::size_t duplicate_networks = 0;
  std::size_t malformed_ixps = 0;
  std::size_t duplicate_ixps = 0;
  std::size_t malformed_memberships = 0;
  std::size_t unresolved_memberships = 0;

  std::size_t dropped_memberships() const { return malformed_memberships + unresolved_memberships; }
};

struct RawSnapshot {
  Date date;
  std::vector<NetworkRecord> networks;        // ascending asn
  std::vector<IxpRecord> ixps;                // ascending ixp_id
  std::vector<MembershipRecord> memberships;  // file order
  ParseStats stats;

  const NetworkRecord* find_network(Asn asn) const;
  const IxpRecord* find_ixp(IxpId id) const;
};

// Parses a PeeringDB dump (JSON object with "net", "ix", "netixlan"; each either
// an array or an object holding a "data" array). Throws ParseError when the file
// cannot be read or the top-level structure is wrong.
RawSnapshot parse_snapshot(const std::filesystem::path& path, Date date);
RawSnapshot parse_snapshot_text(std::string_view json_text, Date date);

// Sum of port sizes per AS, ascending asn.
std::map<Asn, double> as_capacities(const RawSnapshot& s);

struct OutlierReport {
  Asn asn = 0;
  double capacity = 0.0;
  double ratio = 0.0;  // capacity / reference
  std::vector<MembershipRecord> memberships;
};

inline constexpr double kDefaultOutlierFactor = 10.0;

// ASes whose total port capacity strictly exceeds factor * reference_capacity.
std::vector<OutlierReport> validate_snapshot(const RawSnapshot& s, double reference_capacity,
                                             double factor = kDefaultOutlierFactor);

struct EumsEntry {
  double percent = 0.0;
  int national_rank = 0;
};

struct GroundTruthStats {
  std::size_t malformed_rows = 0;
  std::size_t duplicate_rows = 0;
};

struct GroundTruth {
  std::map<Asn, std::string> as_country;
  std::map<std::pair<Asn, std::string>, EumsEntry> eums;
  GroundTruthStats stats;

  std::optional<std::string> country_of(Asn asn) const;
  // 0 when the AS is absent from every table.
  double eums_of(Asn asn, const std::string& country) const;
};

// AS-org rows: asn, country_code. APNIC rows: asn, country_code, eums_percent,
// national_rank. Fields split on ',', '|' or tab; '#' comments and a leading
// header row are skipped. Duplicate keys: last occurrence wins.
GroundTruth load_ground_truth(const std::optional<std::filesystem::path>& asorg_path,
                              std::span<const std::filesystem::path> apnic_paths);
void parse_asorg_text(std::string_view text, GroundTruth& truth);
void parse_apnic_text(std::string_view text, GroundTruth& truth);

struct CapacityPoint {
  Date date;
  double capacity = 0.0;  // Mbit/s
};

std::vector<CapacityPoint> capacity_timeseries(std::span<const RawSnapshot> snapshots);

}  // namespace peergraph
