#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "peergraph/cgraph.hpp"
#include "peergraph/spectral.hpp"

namespace peergraph {

inline constexpr std::string_view kTied = "Tied";

// AS number -> ISO country or "Tied".
using CountryAssignment = std::map<Asn, std::string>;

struct ClassifyOptions {
  // Accept a unique plurality winner instead of requiring a strict majority.
  bool plurality = false;
};

// One vote per IXP the AS belongs to; IXPs without a country do not vote.
CountryAssignment classify_countries(const CGraph& g, const ClassifyOptions& options = {});

struct CountryMetrics {
  std::string country;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // ground-truth ASes of this country among those evaluated
  std::size_t true_positives = 0, false_positives = 0, false_negatives = 0;
};

struct ClassificationReport {
  std::vector<CountryMetrics> countries;
  std::size_t evaluated = 0;  // assigned ASes that have a ground-truth country
  std::vector<std::string> zero_support;
};

// Per-country precision/recall/F1 over ASes present in both the assignment and
// the ground truth. "Tied" predictions are negatives for every country.
ClassificationReport classification_metrics(const CountryAssignment& assignment, const GroundTruth& truth,
                                            std::span<const std::string> countries);

struct SpectralOptions {
  double alpha = kDefaultAlpha;
  PageRankOptions pagerank;
};

bool is_as_node(const CGraph& g, NodeIndex i);

// Top-k ASes by reverse PageRank; IXPs are not ranked. Throws Error when k is
// zero or exceeds the AS count.
RankTable hypergiants(const CGraph& g, std::size_t k = 20, const SpectralOptions& options = {});
RankTable hypergiants(const CGraph& g, const PageRankVector& reverse_pr, std::size_t k = 20);

struct ReceiverOptions {
  std::set<std::string> business_types{"Cable/DSL/ISP", std::string(kNotDisclosed)};
  std::set<Asn> hypergiants;
  std::set<Asn> exclusions;
  std::size_t per_country = 4;
};

// Maps a short type code (ISP, ND, NSP, Content, ...) or a full PeeringDB type
// to the PeeringDB spelling.
std::string business_type_from_code(std::string_view code);

using ReceiverTable = std::map<std::string, RankTable>;

// Per country, the top PageRank ASes assigned to it whose business type passes
// the filter and that are neither hypergiants nor excluded. Ranks restart at 1
// per country. A country with no qualifying AS maps to an empty table.
ReceiverTable traffic_receivers(const CGraph& g, const PageRankVector& forward_pr,
                                const CountryAssignment& assignment, std::span<const std::string> countries,
                                const ReceiverOptions& options = {});

// Sum of APNIC end-user market share of each country's receivers.
std::map<std::string, double> eums_coverage(const CGraph& g, const ReceiverTable& receivers,
                                            const GroundTruth& truth);

struct ClassShare {
  TrafficClass traffic_class = TrafficClass::NotDisclosed;
  std::size_t count = 0;
  double capacity = 0.0;
  double count_percent = 0.0;
  double capacity_percent = 0.0;
};

// Share of AS count and AS port capacity per traffic class.
std::vector<ClassShare> info_ratio_summary(const CGraph& g);

struct ProbeStability {
  Asn asn = 0;
  TrafficClass traffic_class = TrafficClass::NotDisclosed;
  double pr = 0.0, rpr = 0.0;             // at the reference beta
  std::size_t pr_rank = 0, rpr_rank = 0;  // among all nodes
  std::size_t delta_pr = 0, delta_rpr = 0;  // max - min rank over the grid
  double delta_pr_value = 0.0, delta_rpr_value = 0.0;
};

struct StabilityReport {
  BetaParams reference;
  std::size_t grid_points = 0;
  std::vector<ProbeStability> probes;
};

struct SweepOptions {
  BetaParams reference;             // beta_b is kept fixed over the grid
  std::vector<Asn> probes;          // empty: top per_class port-capacity ASes of each class
  std::size_t per_class = 4;
  SpectralOptions spectral;
  unsigned threads = 0;
};

// n evenly spaced values from low to high inclusive.
std::vector<double> linspace(double low, double high, std::size_t n);

// Probe selection used when none is given: for each traffic class, the
// per_class ASes with the largest port capacity (ties by AS number).
std::vector<Asn> default_probes(const CGraph& g, std::size_t per_class);

// Rebuilds the graph at every (beta_h, beta_m) grid point and records the rank
// spread of each probe AS under PageRank and reverse PageRank. beta_h = 1 is
// rejected.
StabilityReport beta_stability_sweep(const RawSnapshot& s, std::span<const double> grid_h,
                                     std::span<const double> grid_m, const SweepOptions& options = {});

}  // namespace peergraph
