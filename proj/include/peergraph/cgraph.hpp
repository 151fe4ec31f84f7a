#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peergraph/ingest.hpp"

namespace peergraph {

// Fraction of an edge's port size withheld from the minority direction, per
// traffic-class family.
struct BetaParams {
  double beta_b = 0.0;   // Balanced and Not Disclosed
  double beta_m = 0.75;  // Mostly Inbound / Mostly Outbound
  double beta_h = 0.95;  // Heavy Inbound / Heavy Outbound

  // Throws Error unless every coefficient lies in [0, 1].
  void validate() const;
  double for_class(TrafficClass c) const;

  bool operator==(const BetaParams&) const = default;
};

enum class NodeKind { As, Ixp };

using NodeIndex = std::size_t;

// One aggregated AS-IXP link with both directed weights.
struct Edge {
  NodeIndex as_node = 0;
  NodeIndex ixp_node = 0;
  double ps = 0.0;           // summed port size, Mbit/s
  double weight_to_as = 0.0;   // W[as][ixp], link ixp -> as
  double weight_to_ixp = 0.0;  // W[ixp][as], link as -> ixp
};

struct WeightEntry {
  NodeIndex node = 0;
  double weight = 0.0;
};

struct BuildOptions {
  // IXPs with fewer distinct AS members are removed; ASes left without any
  // IXP disappear with them. 0 keeps everything.
  std::size_t min_members = 0;
};

// Weighted directed bipartite AS-IXP graph. Node indices place ASes first in
// ascending AS number, then IXPs in ascending id. W[i][j] is the weight of the
// directed link j -> i. Immutable after construction.
class CGraph {
 public:
  std::size_t num_nodes() const { return as_nodes_.size() + ixp_nodes_.size(); }
  std::size_t num_ases() const { return as_nodes_.size(); }
  std::size_t num_ixps() const { return ixp_nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  NodeKind kind(NodeIndex i) const { return i < as_nodes_.size() ? NodeKind::As : NodeKind::Ixp; }
  bool is_as(NodeIndex i) const { return i < as_nodes_.size(); }
  NodeIndex ixp_node(std::size_t k) const { return as_nodes_.size() + k; }

  const NetworkRecord& network(NodeIndex i) const { return as_nodes_.at(i); }
  const IxpRecord& ixp(NodeIndex i) const { return ixp_nodes_.at(i - as_nodes_.size()); }
  std::span<const NetworkRecord> networks() const { return as_nodes_; }
  std::span<const IxpRecord> ixps() const { return ixp_nodes_; }

  // "AS<asn>" or "IX<id>".
  std::string label(NodeIndex i) const;
  std::string name(NodeIndex i) const;
  std::optional<NodeIndex> find_as(Asn asn) const;
  std::optional<NodeIndex> find_ixp(IxpId id) const;
  // Accepts labels produced by label() or a bare AS number.
  std::optional<NodeIndex> find_label(std::string_view label) const;

  std::span<const Edge> edges() const { return edges_; }
  // Edges touching node i, as indices into edges().
  std::span<const std::size_t> incident(NodeIndex i) const;
  // Entries W[k][i] for every k: the weighted links leaving i.
  std::span<const WeightEntry> out_links(NodeIndex i) const;
  // Entries W[i][k] for every k: the weighted links entering i.
  std::span<const WeightEntry> in_links(NodeIndex i) const;
  // W[to][from]; zero if no link.
  double weight(NodeIndex to, NodeIndex from) const;

  const BetaParams& beta() const { return beta_; }
  const Date& date() const { return date_; }

 private:
  friend CGraph build_cgraph(const RawSnapshot&, const BetaParams&, const BuildOptions&);

  Date date_;
  BetaParams beta_;
  std::vector<NetworkRecord> as_nodes_;
  std::vector<IxpRecord> ixp_nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> incident_offsets_, incident_;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<WeightEntry> out_, in_;
};

// Aggregates router ports per (AS, IXP) by summation, drops zero-capacity
// links and orients weights by each AS's traffic class. Throws Error when no
// positive-capacity membership remains.
CGraph build_cgraph(const RawSnapshot& s, const BetaParams& beta = {}, const BuildOptions& options = {});

struct NodeMetrics {
  double w_in = 0.0;   // sum_j W[i][j]
  double w_out = 0.0;  // sum_j W[j][i]
  std::size_t degree = 0;
  double port_capacity = 0.0;
};

std::vector<NodeMetrics> node_metrics(const CGraph& g);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double q1 = 0.0, median = 0.0, q3 = 0.0;
};

// Linear-interpolated quantiles (the common "type 7" definition).
Summary summarize(std::vector<double> values);

struct BalanceReport {
  // Indexed by IXP position (node index minus num_ases()); nullopt when the
  // IXP carries no weight.
  std::vector<std::optional<double>> balance;
  std::size_t undefined = 0;
  Summary summary;
};

// B(i) = (w_out - w_in) / (w_out + w_in) for every IXP.
BalanceReport ixp_balance(const CGraph& g);

// Empirical probability of each undirected degree among the nodes of one side.
std::map<std::size_t, double> degree_distribution(const CGraph& g, NodeKind side);
std::vector<double> degrees(const CGraph& g, NodeKind side);

// Fraction of nodes in the largest (weakly) connected component.
double largest_component_fraction(const CGraph& g);

}  // namespace peergraph
