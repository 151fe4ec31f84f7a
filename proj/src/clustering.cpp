#include "peergraph/clustering.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>

#include "peergraph/error.hpp"

namespace peergraph {

void BipartiteGraph::validate() const {
  for (const auto& e : edges) {
    if (e.u >= side.size() || e.v >= side.size()) throw Error("edge endpoint out of range");
    if (side[e.u] == side[e.v]) throw Error("edge joins two nodes of the same side");
    if (!(e.weight >= 0.0)) throw Error("edge weights must be non-negative");
  }
}

BipartiteGraph symmetrize(const CGraph& g) {
  BipartiteGraph A;
  A.side.resize(g.num_nodes());
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) A.side[i] = g.kind(i);
  for (const auto& e : g.edges()) A.edges.push_back({e.as_node, e.ixp_node, e.weight_to_as + e.weight_to_ixp});
  return A;
}

double barber_modularity(const BipartiteGraph& A, std::span<const std::size_t> community) {
  if (community.size() != A.size()) throw Error("partition size does not match graph");
  const std::size_t nc = community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<double> inside(nc, 0.0), k_as(nc, 0.0), k_ix(nc, 0.0);
  double m = 0.0;
  for (const auto& e : A.edges) {
    m += e.weight;
    const NodeIndex a = A.side[e.u] == NodeKind::As ? e.u : e.v;
    const NodeIndex x = a == e.u ? e.v : e.u;
    k_as[community[a]] += e.weight;
    k_ix[community[x]] += e.weight;
    if (community[a] == community[x]) inside[community[a]] += e.weight;
  }
  if (m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t c = 0; c < nc; ++c) q += inside[c] / m - k_as[c] * k_ix[c] / (m * m);
  return q;
}

namespace {

// Graph at one Louvain level. Nodes carry weighted degree toward each side of
// the original bipartition.
struct Level {
  std::vector<double> k_as, k_ix;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self loops
};

constexpr double kMinGain = 1e-13;

// One round of local moves. Returns true if any node changed community.
bool local_moves(const Level& L, double m, std::vector<std::size_t>& comm, const LouvainOptions& options,
                 std::mt19937_64& rng) {
  const std::size_t n = L.adj.size();
  std::vector<double> tot_as(n, 0.0), tot_ix(n, 0.0);
  std::vector<std::size_t> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    tot_as[comm[i]] += L.k_as[i];
    tot_ix[comm[i]] += L.k_ix[i];
    ++size[comm[i]];
  }
  std::vector<std::size_t> empty;
  for (std::size_t c = n; c-- > 0;) {
    if (size[c] == 0) empty.push_back(c);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  const double m2 = m * m;
  bool any = false;
  while (true) {
    if (options.shuffle) std::shuffle(order.begin(), order.end(), rng);
    bool moved = false;
    for (std::size_t node : order) {
      const std::size_t current = comm[node];
      for (const auto& [nb, w] : L.adj[node]) {
        if (link[comm[nb]] == 0.0) touched.push_back(comm[nb]);
        link[comm[nb]] += w;
      }
      tot_as[current] -= L.k_as[node];
      tot_ix[current] -= L.k_ix[node];
      --size[current];

      auto gain = [&](std::size_t c) {
        return link[c] / m - (L.k_as[node] * tot_ix[c] + L.k_ix[node] * tot_as[c]) / m2;
      };
      // Ties keep the current community, except that a node left alone joins
      // a tied neighbor community.
      const bool alone = size[current] == 0;
      std::size_t best = current;
      double best_gain = gain(current);
      for (std::size_t c : touched) {
        if (c == current) continue;
        const double g = gain(c);
        if (g > best_gain + kMinGain || (alone && best == current && g >= best_gain - kMinGain)) {
          best = c;
          best_gain = g;
        }
      }
      // A fresh singleton community has gain 0.
      if (size[current] > 0 && 0.0 > best_gain + kMinGain && !empty.empty()) {
        best = empty.back();
        best_gain = 0.0;
      }

      if (best != current) {
        if (size[best] == 0) empty.pop_back();
        if (size[current] == 0) empty.push_back(current);
        comm[node] = best;
        moved = true;
      }
      tot_as[best] += L.k_as[node];
      tot_ix[best] += L.k_ix[node];
      ++size[best];

      for (std::size_t c : touched) link[c] = 0.0;
      touched.clear();
    }
    if (!moved) break;
    any = true;
  }
  return any;
}

// Renumbers communities by first appearance; returns the count.
std::size_t renumber(std::vector<std::size_t>& comm) {
  std::vector<std::size_t> map(comm.size(), SIZE_MAX);
  std::size_t next = 0;
  for (auto& c : comm) {
    if (map[c] == SIZE_MAX) map[c] = next++;
    c = map[c];
  }
  return next;
}

Level aggregate(const Level& L, const std::vector<std::size_t>& comm, std::size_t nc) {
  Level out;
  out.k_as.assign(nc, 0.0);
  out.k_ix.assign(nc, 0.0);
  out.adj.resize(nc);
  std::vector<std::map<std::size_t, double>> acc(nc);
  for (std::size_t i = 0; i < L.adj.size(); ++i) {
    out.k_as[comm[i]] += L.k_as[i];
    out.k_ix[comm[i]] += L.k_ix[i];
    for (const auto& [j, w] : L.adj[i]) {
      if (comm[i] != comm[j]) acc[comm[i]][comm[j]] += w;
    }
  }
  for (std::size_t c = 0; c < nc; ++c) out.adj[c].assign(acc[c].begin(), acc[c].end());
  return out;
}

}  // namespace

namespace {

Partition louvain_once(const BipartiteGraph& A, const LouvainOptions& options, bool shuffle, std::uint64_t seed) {
  const std::size_t n = A.size();
  Partition p;
  p.community.resize(n);
  std::iota(p.community.begin(), p.community.end(), 0);
  if (n == 0) return p;

  Level L;
  L.k_as.assign(n, 0.0);
  L.k_ix.assign(n, 0.0);
  L.adj.resize(n);
  double m = 0.0;
  {
    std::vector<std::map<std::size_t, double>> acc(n);
    for (const auto& e : A.edges) {
      if (e.weight == 0.0) continue;
      m += e.weight;
      const NodeIndex a = A.side[e.u] == NodeKind::As ? e.u : e.v;
      const NodeIndex x = a == e.u ? e.v : e.u;
      L.k_as[a] += e.weight;
      L.k_ix[x] += e.weight;
      acc[a][x] += e.weight;
      acc[x][a] += e.weight;
    }
    for (std::size_t i = 0; i < n; ++i) L.adj[i].assign(acc[i].begin(), acc[i].end());
  }
  if (m == 0.0) {
    p.num_communities = renumber(p.community);
    return p;
  }

  std::mt19937_64 rng(seed);
  LouvainOptions run = options;
  run.shuffle = shuffle;
  const Level base = L;
  p.num_communities = n;
  for (std::size_t level = 0; level < options.max_levels; ++level) {
    std::vector<std::size_t> comm(L.adj.size());
    std::iota(comm.begin(), comm.end(), 0);
    const bool moved = local_moves(L, m, comm, run, rng);
    if (moved) {
      for (auto& c : p.community) c = comm[c];
    }
    // Refinement: single original nodes may leave the community their
    // aggregate was merged into.
    const bool refined = options.refine && local_moves(base, m, p.community, run, rng);
    if (!moved && !refined) break;
    const std::size_t nc = renumber(p.community);
    p.num_communities = nc;
    p.level_modularity.push_back(barber_modularity(A, p.community));
    if (nc == L.adj.size() && !refined) break;
    L = aggregate(base, p.community, nc);
  }
  p.num_communities = renumber(p.community);
  p.modularity = barber_modularity(A, p.community);
  return p;
}

}  // namespace

Partition louvain_bipartite(const BipartiteGraph& A, const LouvainOptions& options) {
  A.validate();
  Partition best = louvain_once(A, options, options.shuffle, options.seed);
  // Extra runs visit nodes in shuffled orders seeded from options.seed; the
  // first run with the highest modularity wins.
  for (std::size_t r = 1; r <= options.restarts; ++r) {
    auto p = louvain_once(A, options, true, options.seed + r);
    if (p.modularity > best.modularity + kMinGain) best = std::move(p);
  }
  return best;
}

std::vector<ClusterProfile> cluster_profile(const Partition& p, const CGraph& g) {
  if (p.community.size() != g.num_nodes()) throw Error("partition does not cover the graph");
  const auto metrics = node_metrics(g);
  std::vector<ClusterProfile> profiles(p.num_communities);
  double total_capacity = 0.0;
  for (std::size_t c = 0; c < profiles.size(); ++c) profiles[c].community = c;
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    auto& prof = profiles.at(p.community[i]);
    if (g.is_as(i)) {
      ++prof.ases;
      continue;
    }
    ++prof.ixps;
    ++prof.ixp_countries[g.ixp(i).country];
    prof.capacity_percent += metrics[i].port_capacity;
    total_capacity += metrics[i].port_capacity;
  }
  for (auto& prof : profiles) {
    prof.distinct_countries = prof.ixp_countries.size() - (prof.ixp_countries.contains("") ? 1 : 0);
    prof.capacity_percent = total_capacity > 0.0 ? 100.0 * prof.capacity_percent / total_capacity : 0.0;
    prof.ixp_percent = g.num_ixps() > 0 ? 100.0 * static_cast<double>(prof.ixps) / static_cast<double>(g.num_ixps()) : 0.0;
  }
  std::stable_sort(profiles.begin(), profiles.end(), [](const ClusterProfile& a, const ClusterProfile& b) {
    return a.capacity_percent > b.capacity_percent;
  });
  return profiles;
}

std::string country_summary(const ClusterProfile& profile, std::size_t top) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  for (const auto& [cc, n] : profile.ixp_countries) {
    if (!cc.empty()) counts.emplace_back(cc, n);
  }
  std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string out;
  for (std::size_t k = 0; k < std::min(top, counts.size()); ++k) {
    if (!out.empty()) out += " | ";
    out += counts[k].first + ": " + std::to_string(counts[k].second);
  }
  return out;
}

}  // namespace peergraph
