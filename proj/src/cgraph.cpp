#include "peergraph/cgraph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "peergraph/error.hpp"

namespace peergraph {

void BetaParams::validate() const {
  for (double b : {beta_b, beta_m, beta_h}) {
    if (!(b >= 0.0 && b <= 1.0)) throw Error("beta coefficients must lie in [0, 1]");
  }
}

double BetaParams::for_class(TrafficClass c) const {
  switch (c) {
    case TrafficClass::HeavyInbound:
    case TrafficClass::HeavyOutbound: return beta_h;
    case TrafficClass::MostlyInbound:
    case TrafficClass::MostlyOutbound: return beta_m;
    case TrafficClass::Balanced:
    case TrafficClass::NotDisclosed: return beta_b;
  }
  return beta_b;
}

std::string CGraph::label(NodeIndex i) const {
  return is_as(i) ? "AS" + std::to_string(network(i).asn) : "IX" + std::to_string(ixp(i).ixp_id);
}

std::string CGraph::name(NodeIndex i) const { return is_as(i) ? network(i).name : ixp(i).name; }

std::optional<NodeIndex> CGraph::find_as(Asn asn) const {
  auto it = std::lower_bound(as_nodes_.begin(), as_nodes_.end(), asn,
                             [](const NetworkRecord& n, Asn a) { return n.asn < a; });
  if (it == as_nodes_.end() || it->asn != asn) return std::nullopt;
  return static_cast<NodeIndex>(it - as_nodes_.begin());
}

std::optional<NodeIndex> CGraph::find_ixp(IxpId id) const {
  auto it = std::lower_bound(ixp_nodes_.begin(), ixp_nodes_.end(), id,
                             [](const IxpRecord& x, IxpId v) { return x.ixp_id < v; });
  if (it == ixp_nodes_.end() || it->ixp_id != id) return std::nullopt;
  return as_nodes_.size() + static_cast<NodeIndex>(it - ixp_nodes_.begin());
}

std::optional<NodeIndex> CGraph::find_label(std::string_view label) const {
  auto number = [](std::string_view s) -> std::optional<std::uint32_t> {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
  };
  if (label.starts_with("AS") || label.starts_with("as")) {
    auto v = number(label.substr(2));
    return v ? find_as(*v) : std::nullopt;
  }
  if (label.starts_with("IX") || label.starts_with("ix")) {
    auto v = number(label.substr(2));
    return v ? find_ixp(*v) : std::nullopt;
  }
  auto v = number(label);
  return v ? find_as(*v) : std::nullopt;
}

std::span<const std::size_t> CGraph::incident(NodeIndex i) const {
  return std::span(incident_).subspan(incident_offsets_[i], incident_offsets_[i + 1] - incident_offsets_[i]);
}

std::span<const WeightEntry> CGraph::out_links(NodeIndex i) const {
  return std::span(out_).subspan(out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]);
}

std::span<const WeightEntry> CGraph::in_links(NodeIndex i) const {
  return std::span(in_).subspan(in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]);
}

double CGraph::weight(NodeIndex to, NodeIndex from) const {
  for (const auto& e : in_links(to)) {
    if (e.node == from) return e.weight;
  }
  return 0.0;
}

CGraph build_cgraph(const RawSnapshot& s, const BetaParams& beta, const BuildOptions& options) {
  beta.validate();

  // Aggregate router ports per (AS, IXP).
  std::map<std::pair<Asn, IxpId>, double> ps;
  for (const auto& m : s.memberships) {
    if (!s.find_network(m.asn) || !s.find_ixp(m.ixp_id)) continue;
    ps[{m.asn, m.ixp_id}] += m.port_size;
  }
  std::erase_if(ps, [](const auto& kv) { return !(kv.second > 0.0); });

  if (options.min_members > 0) {
    std::map<IxpId, std::size_t> members;
    for (const auto& [key, _] : ps) ++members[key.second];
    std::erase_if(ps, [&](const auto& kv) { return members[kv.first.second] < options.min_members; });
  }
  if (ps.empty()) throw Error("graph is empty: no membership with positive port size");

  CGraph g;
  g.date_ = s.date;
  g.beta_ = beta;

  std::vector<Asn> asns;
  std::vector<IxpId> ixps;
  for (const auto& [key, _] : ps) {
    asns.push_back(key.first);
    ixps.push_back(key.second);
  }
  std::sort(asns.begin(), asns.end());
  asns.erase(std::unique(asns.begin(), asns.end()), asns.end());
  std::sort(ixps.begin(), ixps.end());
  ixps.erase(std::unique(ixps.begin(), ixps.end()), ixps.end());
  for (Asn a : asns) g.as_nodes_.push_back(*s.find_network(a));
  for (IxpId x : ixps) g.ixp_nodes_.push_back(*s.find_ixp(x));

  // std::map iteration gives edges sorted by (asn, ixp id).
  for (const auto& [key, value] : ps) {
    Edge e;
    e.as_node = *g.find_as(key.first);
    e.ixp_node = *g.find_ixp(key.second);
    e.ps = value;
    const TrafficClass c = g.network(e.as_node).info_ratio;
    const double reduced = (1.0 - beta.for_class(c)) * value;
    if (is_outbound(c)) {
      e.weight_to_as = reduced;
      e.weight_to_ixp = value;
    } else {
      e.weight_to_as = value;
      e.weight_to_ixp = reduced;
    }
    g.edges_.push_back(e);
  }

  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.as_node];
    ++deg[e.ixp_node];
  }
  g.incident_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.incident_offsets_[i + 1] = g.incident_offsets_[i] + deg[i];
  g.incident_.resize(g.incident_offsets_[n]);
  std::vector<std::size_t> fill(g.incident_offsets_.begin(), g.incident_offsets_.end() - 1);
  for (std::size_t k = 0; k < g.edges_.size(); ++k) {
    g.incident_[fill[g.edges_[k].as_node]++] = k;
    g.incident_[fill[g.edges_[k].ixp_node]++] = k;
  }

  // Directed adjacency. Zero weights (beta = 1) are not stored.
  std::vector<std::size_t> out_count(n, 0), in_count(n, 0);
  auto each_link = [&](auto&& fn) {
    for (const auto& e : g.edges_) {
      if (e.weight_to_as > 0.0) fn(e.ixp_node, e.as_node, e.weight_to_as);
      if (e.weight_to_ixp > 0.0) fn(e.as_node, e.ixp_node, e.weight_to_ixp);
    }
  };
  each_link([&](NodeIndex from, NodeIndex to, double) {
    ++out_count[from];
    ++in_count[to];
  });
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    g.out_offsets_[i + 1] = g.out_offsets_[i] + out_count[i];
    g.in_offsets_[i + 1] = g.in_offsets_[i] + in_count[i];
  }
  g.out_.resize(g.out_offsets_[n]);
  g.in_.resize(g.in_offsets_[n]);
  std::vector<std::size_t> out_fill(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  each_link([&](NodeIndex from, NodeIndex to, double w) {
    g.out_[out_fill[from]++] = {to, w};
    g.in_[in_fill[to]++] = {from, w};
  });
  auto by_node = [](const WeightEntry& a, const WeightEntry& b) { return a.node < b.node; };
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.out_.begin() + g.out_offsets_[i], g.out_.begin() + g.out_offsets_[i + 1], by_node);
    std::sort(g.in_.begin() + g.in_offsets_[i], g.in_.begin() + g.in_offsets_[i + 1], by_node);
  }
  return g;
}

std::vector<NodeMetrics> node_metrics(const CGraph& g) {
  std::vector<NodeMetrics> m(g.num_nodes());
  for (const auto& e : g.edges()) {
    m[e.as_node].w_in += e.weight_to_as;
    m[e.as_node].w_out += e.weight_to_ixp;
    m[e.ixp_node].w_in += e.weight_to_ixp;
    m[e.ixp_node].w_out += e.weight_to_as;
    m[e.as_node].port_capacity += e.ps;
    m[e.ixp_node].port_capacity += e.ps;
  }
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) m[i].degree = g.incident(i).size();
  return m;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  return s;
}

BalanceReport ixp_balance(const CGraph& g) {
  const auto metrics = node_metrics(g);
  BalanceReport r;
  r.balance.resize(g.num_ixps());
  std::vector<double> defined;
  for (std::size_t k = 0; k < g.num_ixps(); ++k) {
    const auto& m = metrics[g.ixp_node(k)];
    const double total = m.w_out + m.w_in;
    if (total > 0.0) {
      r.balance[k] = (m.w_out - m.w_in) / total;
      defined.push_back(*r.balance[k]);
    } else {
      ++r.undefined;
    }
  }
  r.summary = summarize(std::move(defined));
  return r;
}

std::vector<double> degrees(const CGraph& g, NodeKind side) {
  std::vector<double> d;
  const NodeIndex begin = side == NodeKind::As ? 0 : g.num_ases();
  const NodeIndex end = side == NodeKind::As ? g.num_ases() : g.num_nodes();
  for (NodeIndex i = begin; i < end; ++i) d.push_back(static_cast<double>(g.incident(i).size()));
  return d;
}

std::map<std::size_t, double> degree_distribution(const CGraph& g, NodeKind side) {
  const auto d = degrees(g, side);
  if (d.empty()) throw Error("degree distribution of an empty node set");
  std::map<std::size_t, std::size_t> counts;
  for (double v : d) ++counts[static_cast<std::size_t>(v)];
  std::map<std::size_t, double> p;
  for (const auto& [k, c] : counts) p[k] = static_cast<double>(c) / static_cast<double>(d.size());
  return p;
}

double largest_component_fraction(const CGraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : g.edges()) {
    auto a = find(e.as_node), b = find(e.ixp_node);
    if (a != b) parent[a] = b;
  }
  std::vector<std::size_t> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++size[find(i)];
  return static_cast<double>(*std::max_element(size.begin(), size.end())) / static_cast<double>(n);
}

}  // namespace peergraph
