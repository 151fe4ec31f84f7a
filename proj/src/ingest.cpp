#include "peergraph/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "peergraph/error.hpp"

namespace peergraph {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ParseError("error while reading '" + path.string() + "'");
  return buf.str();
}

// Positive integer id from a JSON number or numeric string.
std::optional<std::uint32_t> as_id(const json& v) {
  if (v.is_number_unsigned()) {
    auto x = v.get<std::uint64_t>();
    if (x == 0 || x > 0xffffffffULL) return std::nullopt;
    return static_cast<std::uint32_t>(x);
  }
  if (v.is_number_integer()) {
    auto x = v.get<std::int64_t>();
    if (x <= 0 || x > 0xffffffffLL) return std::nullopt;
    return static_cast<std::uint32_t>(x);
  }
  if (v.is_string()) {
    auto s = trim(v.get_ref<const std::string&>());
    std::uint32_t x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size() || x == 0) return std::nullopt;
    return x;
  }
  return std::nullopt;
}

std::string text_field(const json& rec, const char* key) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

const json& record_array(const json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end()) throw ParseError(std::string("dump has no '") + key + "' section");
  if (it->is_array()) return *it;
  if (it->is_object()) {
    auto data = it->find("data");
    if (data != it->end() && data->is_array()) return *data;
  }
  throw ParseError(std::string("dump section '") + key + "' is not a record array");
}

// Splits a delimiter-separated row on the first delimiter found among , | tab.
std::vector<std::string_view> split_row(std::string_view line) {
  char delim = ',';
  for (char c : {'|', '\t', ','}) {
    if (line.find(c) != std::string_view::npos) {
      delim = c;
      break;
    }
  }
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool valid_country(std::string_view cc) {
  return cc.size() == 2 && std::isalpha(static_cast<unsigned char>(cc[0])) &&
         std::isalpha(static_cast<unsigned char>(cc[1]));
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

// Iterates data rows of a delimited file, skipping blanks, comments and a
// header line whose first field is not numeric.
template <typename Fn>
void for_each_row(std::string_view text, Fn&& fn) {
  bool first = true;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    auto line = trim(text.substr(start, end == std::string_view::npos ? end : end - start));
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_row(line);
    if (first) {
      first = false;
      std::uint32_t probe = 0;
      std::string_view head = fields[0];
      if (!head.empty() && (head[0] == 'A' || head[0] == 'a') && head.size() > 2 &&
          (head[1] == 'S' || head[1] == 's') && parse_number(head.substr(2), probe)) {
        // "AS1234" style first field is data
      } else if (!parse_number(head, probe)) {
        continue;
      }
    }
    fn(fields);
  }
}

std::optional<Asn> parse_asn_field(std::string_view s) {
  if (s.size() > 2 && (s[0] == 'A' || s[0] == 'a') && (s[1] == 'S' || s[1] == 's')) s.remove_prefix(2);
  Asn asn = 0;
  if (!parse_number(s, asn) || asn == 0) return std::nullopt;
  return asn;
}

}  // namespace

TrafficClass traffic_class_from_text(std::string_view text) {
  auto t = lower(trim(text));
  if (t == "balanced") return TrafficClass::Balanced;
  if (t == "heavy inbound") return TrafficClass::HeavyInbound;
  if (t == "heavy outbound") return TrafficClass::HeavyOutbound;
  if (t == "mostly inbound") return TrafficClass::MostlyInbound;
  if (t == "mostly outbound") return TrafficClass::MostlyOutbound;
  return TrafficClass::NotDisclosed;
}

std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::Balanced: return "Balanced";
    case TrafficClass::HeavyInbound: return "Heavy Inbound";
    case TrafficClass::HeavyOutbound: return "Heavy Outbound";
    case TrafficClass::MostlyInbound: return "Mostly Inbound";
    case TrafficClass::MostlyOutbound: return "Mostly Outbound";
    case TrafficClass::NotDisclosed: return "Not Disclosed";
  }
  return "Not Disclosed";
}

std::string_view abbreviation(TrafficClass c) {
  switch (c) {
    case TrafficClass::Balanced: return "B";
    case TrafficClass::HeavyInbound: return "HI";
    case TrafficClass::HeavyOutbound: return "HO";
    case TrafficClass::MostlyInbound: return "MI";
    case TrafficClass::MostlyOutbound: return "MO";
    case TrafficClass::NotDisclosed: return "ND";
  }
  return "ND";
}

TrafficClass traffic_class_from_abbreviation(std::string_view code) {
  for (auto c : kAllTrafficClasses) {
    if (abbreviation(c) == code) return c;
  }
  throw ParseError("unknown traffic class '" + std::string(code) + "'");
}

bool is_inbound(TrafficClass c) {
  return c == TrafficClass::HeavyInbound || c == TrafficClass::MostlyInbound;
}

bool is_outbound(TrafficClass c) {
  return c == TrafficClass::HeavyOutbound || c == TrafficClass::MostlyOutbound;
}

std::string normalize_info_type(std::string_view text) {
  static constexpr std::array<std::string_view, 11> known = {
      "Cable/DSL/ISP", "NSP",        "Content",         "Enterprise",      "Educational/Research",
      "Non-Profit",    "Government", "Route Server",    "Route Collector", "Network Services",
      "Not Disclosed"};
  auto t = lower(trim(text));
  for (auto k : known) {
    if (lower(k) == t) return std::string(k);
  }
  return std::string(kNotDisclosed);
}

const NetworkRecord* RawSnapshot::find_network(Asn asn) const {
  auto it = std::lower_bound(networks.begin(), networks.end(), asn,
                             [](const NetworkRecord& n, Asn a) { return n.asn < a; });
  return it != networks.end() && it->asn == asn ? &*it : nullptr;
}

const IxpRecord* RawSnapshot::find_ixp(IxpId id) const {
  auto it = std::lower_bound(ixps.begin(), ixps.end(), id,
                             [](const IxpRecord& x, IxpId i) { return x.ixp_id < i; });
  return it != ixps.end() && it->ixp_id == id ? &*it : nullptr;
}

RawSnapshot parse_snapshot_text(std::string_view json_text, Date date) {
  json root = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw ParseError("dump is not valid JSON");
  if (!root.is_object()) throw ParseError("dump top level is not an object");

  const json& nets = record_array(root, "net");
  const json& ixs = record_array(root, "ix");
  const json& links = record_array(root, "netixlan");

  RawSnapshot s;
  s.date = date;

  std::set<Asn> seen_asn;
  for (const auto& rec : nets) {
    std::optional<Asn> asn;
    if (rec.is_object() && rec.contains("asn")) asn = as_id(rec["asn"]);
    if (!asn) {
      ++s.stats.malformed_networks;
      continue;
    }
    if (!seen_asn.insert(*asn).second) {
      ++s.stats.duplicate_networks;
      continue;
    }
    NetworkRecord n;
    n.asn = *asn;
    n.name = text_field(rec, "name");
    n.info_ratio = traffic_class_from_text(text_field(rec, "info_ratio"));
    n.info_scope = text_field(rec, "info_scope");
    if (n.info_scope.empty()) n.info_scope = std::string(kNotDisclosed);
    n.info_type = normalize_info_type(text_field(rec, "info_type"));
    s.networks.push_back(std::move(n));
  }
  std::sort(s.networks.begin(), s.networks.end(),
            [](const NetworkRecord& a, const NetworkRecord& b) { return a.asn < b.asn; });

  std::set<IxpId> seen_ix;
  for (const auto& rec : ixs) {
    std::optional<IxpId> id;
    if (rec.is_object() && rec.contains("id")) id = as_id(rec["id"]);
    if (!id) {
      ++s.stats.malformed_ixps;
      continue;
    }
    if (!seen_ix.insert(*id).second) {
      ++s.stats.duplicate_ixps;
      continue;
    }
    IxpRecord x;
    x.ixp_id = *id;
    x.name = text_field(rec, "name");
    auto cc = trim(text_field(rec, "country"));
    x.country = valid_country(cc) ? upper(cc) : std::string{};
    s.ixps.push_back(std::move(x));
  }
  std::sort(s.ixps.begin(), s.ixps.end(),
            [](const IxpRecord& a, const IxpRecord& b) { return a.ixp_id < b.ixp_id; });

  for (const auto& rec : links) {
    if (!rec.is_object() || !rec.contains("asn") || !rec.contains("ix_id")) {
      ++s.stats.malformed_memberships;
      continue;
    }
    auto asn = as_id(rec["asn"]);
    auto ix = as_id(rec["ix_id"]);
    if (!asn || !ix) {
      ++s.stats.malformed_memberships;
      continue;
    }
    double speed = 0.0;
    if (auto it = rec.find("speed"); it != rec.end()) {
      if (it->is_number()) {
        speed = it->get<double>();
      } else if (!it->is_null()) {
        ++s.stats.malformed_memberships;
        continue;
      }
    }
    if (!(speed >= 0.0)) {
      ++s.stats.malformed_memberships;
      continue;
    }
    if (!s.find_network(*asn) || !s.find_ixp(*ix)) {
      ++s.stats.unresolved_memberships;
      continue;
    }
    s.memberships.push_back({*asn, *ix, speed});
  }
  return s;
}

RawSnapshot parse_snapshot(const std::filesystem::path& path, Date date) {
  try {
    return parse_snapshot_text(read_file(path), date);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::map<Asn, double> as_capacities(const RawSnapshot& s) {
  std::map<Asn, double> cap;
  for (const auto& m : s.memberships) cap[m.asn] += m.port_size;
  return cap;
}

std::vector<OutlierReport> validate_snapshot(const RawSnapshot& s, double reference_capacity,
                                             double factor) {
  if (!(reference_capacity > 0.0)) throw Error("reference capacity must be positive");
  if (!(factor > 0.0)) throw Error("outlier factor must be positive");
  std::vector<OutlierReport> out;
  const double limit = factor * reference_capacity;
  for (const auto& [asn, cap] : as_capacities(s)) {
    if (cap > limit) {
      OutlierReport r{asn, cap, cap / reference_capacity, {}};
      for (const auto& m : s.memberships) {
        if (m.asn == asn) r.memberships.push_back(m);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::optional<std::string> GroundTruth::country_of(Asn asn) const {
  auto it = as_country.find(asn);
  if (it == as_country.end()) return std::nullopt;
  return it->second;
}

double GroundTruth::eums_of(Asn asn, const std::string& country) const {
  auto it = eums.find({asn, country});
  return it == eums.end() ? 0.0 : it->second.percent;
}

void parse_asorg_text(std::string_view text, GroundTruth& truth) {
  for_each_row(text, [&](const std::vector<std::string_view>& f) {
    auto asn = f.size() >= 2 ? parse_asn_field(f[0]) : std::nullopt;
    if (!asn || !valid_country(f[1])) {
      ++truth.stats.malformed_rows;
      return;
    }
    auto [it, inserted] = truth.as_country.insert_or_assign(*asn, upper(f[1]));
    if (!inserted) ++truth.stats.duplicate_rows;
  });
}

void parse_apnic_text(std::string_view text, GroundTruth& truth) {
  for_each_row(text, [&](const std::vector<std::string_view>& f) {
    auto asn = f.size() >= 4 ? parse_asn_field(f[0]) : std::nullopt;
    double pct = -1.0;
    int rank = 0;
    if (!asn || !valid_country(f[1]) || !parse_number(f[2], pct) || !(pct >= 0.0 && pct <= 100.0) ||
        !parse_number(f[3], rank) || rank < 1) {
      ++truth.stats.malformed_rows;
      return;
    }
    auto [it, inserted] = truth.eums.insert_or_assign({*asn, upper(f[1])}, EumsEntry{pct, rank});
    if (!inserted) ++truth.stats.duplicate_rows;
  });
}

GroundTruth load_ground_truth(const std::optional<std::filesystem::path>& asorg_path,
                              std::span<const std::filesystem::path> apnic_paths) {
  GroundTruth truth;
  if (asorg_path) parse_asorg_text(read_file(*asorg_path), truth);
  for (const auto& p : apnic_paths) parse_apnic_text(read_file(p), truth);
  return truth;
}

std::vector<CapacityPoint> capacity_timeseries(std::span<const RawSnapshot> snapshots) {
  std::vector<CapacityPoint> series;
  series.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    double total = 0.0;
    for (const auto& m : s.memberships) total += m.port_size;
    series.push_back({s.date, total});
  }
  std::stable_sort(series.begin(), series.end(),
                   [](const CapacityPoint& a, const CapacityPoint& b) { return a.date < b.date; });
  return series;
}

}  // namespace peergraph
