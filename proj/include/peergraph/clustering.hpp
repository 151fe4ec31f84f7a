#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "peergraph/cgraph.hpp"

namespace peergraph {

struct UndirectedEdge {
  NodeIndex u = 0;  // AS side
  NodeIndex v = 0;  // IXP side
  double weight = 0.0;
};

// Undirected weighted bipartite graph. Every edge joins an AS to an IXP.
struct BipartiteGraph {
  std::vector<NodeKind> side;
  std::vector<UndirectedEdge> edges;

  std::size_t size() const { return side.size(); }
  // Throws Error when an edge joins two nodes of the same side.
  void validate() const;
};

// A = W + W^T. Each AS-IXP edge carries ps + (1 - beta) ps.
BipartiteGraph symmetrize(const CGraph& g);

// Barber bipartite modularity
//   Q = (1/m) sum_{i in AS, j in IXP} [A_ij - k_i d_j / m] delta(c_i, c_j)
// with k, d the weighted degrees on each side and m the total edge weight.
double barber_modularity(const BipartiteGraph& A, std::span<const std::size_t> community);

struct Partition {
  std::vector<std::size_t> community;  // ids contiguous from 0, by first appearance
  std::size_t num_communities = 0;
  double modularity = 0.0;
  std::vector<double> level_modularity;  // after each aggregation level
};

struct LouvainOptions {
  std::uint64_t seed = 0;
  bool shuffle = false;  // visit nodes in a seeded random order instead of ascending
  std::size_t max_levels = 64;
  // After each level, let single nodes move between the projected communities.
  bool refine = true;
  // Additional runs in seeded shuffled orders; the best partition is kept.
  std::size_t restarts = 9;
};

// Louvain (local moves + aggregation) maximizing Barber modularity. Ties keep
// the current community, so a run is fully determined by graph, seed and order.
Partition louvain_bipartite(const BipartiteGraph& A, const LouvainOptions& options = {});

struct ClusterProfile {
  std::size_t community = 0;
  std::map<std::string, std::size_t> ixp_countries;  // empty country counted as ""
  std::size_t distinct_countries = 0;                // non-empty codes only
  std::size_t ixps = 0, ases = 0;
  double capacity_percent = 0.0;  // of total IXP port capacity
  double ixp_percent = 0.0;       // of all IXPs
};

// Per-community IXP statistics, ordered by capacity share (descending).
std::vector<ClusterProfile> cluster_profile(const Partition& p, const CGraph& g);

// "US: 74 | CA: 12" style summary of the most frequent countries.
std::string country_summary(const ClusterProfile& profile, std::size_t top = 3);

}  // namespace peergraph
