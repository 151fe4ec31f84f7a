#include "peergraph/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "peergraph/error.hpp"
#include "peergraph/parallel.hpp"

namespace peergraph {

CountryAssignment classify_countries(const CGraph& g, const ClassifyOptions& options) {
  CountryAssignment out;
  for (NodeIndex a = 0; a < g.num_ases(); ++a) {
    std::map<std::string, std::size_t> votes;
    std::size_t total = 0;
    for (std::size_t k : g.incident(a)) {
      const auto& country = g.ixp(g.edges()[k].ixp_node).country;
      if (country.empty()) continue;
      ++votes[country];
      ++total;
    }
    std::string label(kTied);
    std::size_t best = 0;
    bool unique = false;
    for (const auto& [country, n] : votes) {
      if (n > best) {
        best = n;
        label = country;
        unique = true;
      } else if (n == best) {
        unique = false;
      }
    }
    const bool wins = options.plurality ? unique : 2 * best > total;
    out[g.network(a).asn] = (best > 0 && wins) ? label : std::string(kTied);
  }
  return out;
}

ClassificationReport classification_metrics(const CountryAssignment& assignment, const GroundTruth& truth,
                                            std::span<const std::string> countries) {
  ClassificationReport report;
  std::vector<std::pair<std::string, std::string>> pairs;  // (truth, predicted)
  for (const auto& [asn, predicted] : assignment) {
    if (auto t = truth.country_of(asn)) pairs.emplace_back(*t, predicted);
  }
  report.evaluated = pairs.size();
  for (const auto& c : countries) {
    CountryMetrics m;
    m.country = c;
    for (const auto& [t, p] : pairs) {
      const bool is_true = t == c, is_pred = p == c;
      if (is_true && is_pred) ++m.true_positives;
      if (!is_true && is_pred) ++m.false_positives;
      if (is_true && !is_pred) ++m.false_negatives;
    }
    m.support = m.true_positives + m.false_negatives;
    const double tp = static_cast<double>(m.true_positives);
    if (m.true_positives + m.false_positives > 0) m.precision = tp / static_cast<double>(m.true_positives + m.false_positives);
    if (m.support > 0) m.recall = tp / static_cast<double>(m.support);
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    if (m.support == 0) report.zero_support.push_back(c);
    report.countries.push_back(m);
  }
  return report;
}

bool is_as_node(const CGraph& g, NodeIndex i) { return g.is_as(i); }

RankTable hypergiants(const CGraph& g, const PageRankVector& reverse_pr, std::size_t k) {
  if (k == 0) throw Error("hypergiant count must be at least 1");
  if (k > g.num_ases()) {
    throw Error("requested " + std::to_string(k) + " hypergiants but the graph has only " +
                std::to_string(g.num_ases()) + " ASes");
  }
  auto table = rank_table(reverse_pr, [&](NodeIndex i) { return g.is_as(i); });
  table.resize(k);
  return table;
}

RankTable hypergiants(const CGraph& g, std::size_t k, const SpectralOptions& options) {
  if (k == 0 || k > g.num_ases()) return hypergiants(g, PageRankVector{}, k);
  const GoogleMatrix G(g, options.alpha, Direction::Reverse);
  return hypergiants(g, pagerank(G, options.pagerank), k);
}

std::string business_type_from_code(std::string_view code) {
  std::string c(code);
  std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return std::toupper(ch); });
  if (c == "ISP" || c == "CABLE/DSL/ISP") return "Cable/DSL/ISP";
  if (c == "ND" || c == "NOT DISCLOSED") return std::string(kNotDisclosed);
  if (c == "NSP") return "NSP";
  if (c == "CONTENT") return "Content";
  const std::string full = normalize_info_type(code);
  if (full == kNotDisclosed) throw Error("unknown business type '" + std::string(code) + "'");
  return full;
}

ReceiverTable traffic_receivers(const CGraph& g, const PageRankVector& forward_pr,
                                const CountryAssignment& assignment, std::span<const std::string> countries,
                                const ReceiverOptions& options) {
  if (forward_pr.values.size() != g.num_nodes()) throw Error("PageRank vector does not match the graph");
  ReceiverTable out;
  for (const auto& country : countries) {
    auto table = rank_table(forward_pr, [&](NodeIndex i) {
      if (!g.is_as(i)) return false;
      const auto& net = g.network(i);
      auto it = assignment.find(net.asn);
      if (it == assignment.end() || it->second != country) return false;
      if (!options.business_types.contains(net.info_type)) return false;
      return !options.hypergiants.contains(net.asn) && !options.exclusions.contains(net.asn);
    });
    if (table.size() > options.per_country) table.resize(options.per_country);
    out[country] = std::move(table);
  }
  return out;
}

std::map<std::string, double> eums_coverage(const CGraph& g, const ReceiverTable& receivers,
                                            const GroundTruth& truth) {
  std::map<std::string, double> out;
  for (const auto& [country, table] : receivers) {
    double total = 0.0;
    for (const auto& e : table) total += truth.eums_of(g.network(e.node).asn, country);
    out[country] = total;
  }
  return out;
}

std::vector<ClassShare> info_ratio_summary(const CGraph& g) {
  std::vector<ClassShare> shares;
  for (auto c : kAllTrafficClasses) shares.push_back({c});
  auto slot = [&](TrafficClass c) -> ClassShare& {
    return shares[static_cast<std::size_t>(std::find(std::begin(kAllTrafficClasses), std::end(kAllTrafficClasses), c) -
                                           std::begin(kAllTrafficClasses))];
  };
  const auto metrics = node_metrics(g);
  double total_capacity = 0.0;
  for (NodeIndex a = 0; a < g.num_ases(); ++a) {
    auto& s = slot(g.network(a).info_ratio);
    ++s.count;
    s.capacity += metrics[a].port_capacity;
    total_capacity += metrics[a].port_capacity;
  }
  for (auto& s : shares) {
    s.count_percent = 100.0 * static_cast<double>(s.count) / static_cast<double>(g.num_ases());
    s.capacity_percent = total_capacity > 0.0 ? 100.0 * s.capacity / total_capacity : 0.0;
  }
  return shares;
}

std::vector<double> linspace(double low, double high, std::size_t n) {
  std::vector<double> v;
  if (n == 0) return v;
  if (n == 1) return {low};
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return v;
}

std::vector<Asn> default_probes(const CGraph& g, std::size_t per_class) {
  const auto metrics = node_metrics(g);
  std::vector<Asn> probes;
  for (auto c : kAllTrafficClasses) {
    std::vector<NodeIndex> members;
    for (NodeIndex a = 0; a < g.num_ases(); ++a) {
      if (g.network(a).info_ratio == c) members.push_back(a);
    }
    std::stable_sort(members.begin(), members.end(), [&](NodeIndex x, NodeIndex y) {
      return metrics[x].port_capacity > metrics[y].port_capacity;
    });
    for (std::size_t k = 0; k < std::min(per_class, members.size()); ++k) probes.push_back(g.network(members[k]).asn);
  }
  return probes;
}

namespace {

struct ProbeSample {
  std::vector<std::size_t> pr_rank, rpr_rank;
  std::vector<double> pr, rpr;
};

ProbeSample sample_probes(const RawSnapshot& s, const BetaParams& beta, std::span<const Asn> probes,
                          const SpectralOptions& spectral) {
  const auto g = build_cgraph(s, beta);
  const auto pr = pagerank(GoogleMatrix(g, spectral.alpha, Direction::Forward), spectral.pagerank);
  const auto rpr = pagerank(GoogleMatrix(g, spectral.alpha, Direction::Reverse), spectral.pagerank);
  const auto pr_ranks = ranks_by_node(pr);
  const auto rpr_ranks = ranks_by_node(rpr);
  ProbeSample out;
  for (Asn asn : probes) {
    auto node = g.find_as(asn);
    if (!node) throw Error("probe AS" + std::to_string(asn) + " is not in the graph");
    out.pr_rank.push_back(pr_ranks[*node]);
    out.rpr_rank.push_back(rpr_ranks[*node]);
    out.pr.push_back(pr.values[*node]);
    out.rpr.push_back(rpr.values[*node]);
  }
  return out;
}

}  // namespace

StabilityReport beta_stability_sweep(const RawSnapshot& s, std::span<const double> grid_h,
                                     std::span<const double> grid_m, const SweepOptions& options) {
  if (grid_h.empty() || grid_m.empty()) throw Error("sweep grids must be non-empty");
  for (double h : grid_h) {
    if (!(h >= 0.0 && h < 1.0)) throw Error("beta_h grid values must lie in [0, 1); beta_h = 1 is excluded");
  }
  for (double m : grid_m) {
    if (!(m >= 0.0 && m <= 1.0)) throw Error("beta_m grid values must lie in [0, 1]");
  }

  std::vector<Asn> probes = options.probes;
  if (probes.empty()) probes = default_probes(build_cgraph(s, options.reference), options.per_class);

  const auto reference = sample_probes(s, options.reference, probes, options.spectral);

  std::vector<BetaParams> grid;
  for (double h : grid_h) {
    for (double m : grid_m) grid.push_back({options.reference.beta_b, m, h});
  }
  std::vector<ProbeSample> samples(grid.size());
  parallel_for(grid.size(), options.threads,
               [&](std::size_t k) { samples[k] = sample_probes(s, grid[k], probes, options.spectral); });

  StabilityReport report;
  report.reference = options.reference;
  report.grid_points = grid.size();
  const auto g = build_cgraph(s, options.reference);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    ProbeStability ps;
    ps.asn = probes[p];
    ps.traffic_class = g.network(*g.find_as(probes[p])).info_ratio;
    ps.pr = reference.pr[p];
    ps.rpr = reference.rpr[p];
    ps.pr_rank = reference.pr_rank[p];
    ps.rpr_rank = reference.rpr_rank[p];
    std::size_t pr_lo = std::numeric_limits<std::size_t>::max(), pr_hi = 0;
    std::size_t rpr_lo = pr_lo, rpr_hi = 0;
    double prv_lo = std::numeric_limits<double>::infinity(), prv_hi = -prv_lo;
    double rprv_lo = prv_lo, rprv_hi = -prv_lo;
    for (const auto& smp : samples) {
      pr_lo = std::min(pr_lo, smp.pr_rank[p]);
      pr_hi = std::max(pr_hi, smp.pr_rank[p]);
      rpr_lo = std::min(rpr_lo, smp.rpr_rank[p]);
      rpr_hi = std::max(rpr_hi, smp.rpr_rank[p]);
      prv_lo = std::min(prv_lo, smp.pr[p]);
      prv_hi = std::max(prv_hi, smp.pr[p]);
      rprv_lo = std::min(rprv_lo, smp.rpr[p]);
      rprv_hi = std::max(rprv_hi, smp.rpr[p]);
    }
    ps.delta_pr = pr_hi - pr_lo;
    ps.delta_rpr = rpr_hi - rpr_lo;
    ps.delta_pr_value = prv_hi - prv_lo;
    ps.delta_rpr_value = rprv_hi - rprv_lo;
    report.probes.push_back(ps);
  }
  return report;
}

}  // namespace peergraph
