#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "peergraph/cgraph.hpp"
#include "peergraph/dense.hpp"

namespace peergraph {

// Forward uses W as is; Reverse uses its transpose (all links inverted).
enum class Direction { Forward, Reverse };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view text);

inline constexpr double kDefaultAlpha = 0.85;
inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr int kDefaultMaxIterations = 10000;

// Directed weighted link from -> to, i.e. the entry W[to][from].
struct Link {
  NodeIndex from = 0;
  NodeIndex to = 0;
  double weight = 0.0;
};

// Links of the graph in the requested direction.
std::vector<Link> directed_links(const CGraph& g, Direction direction);

// G = alpha * S + (1 - alpha) / N, kept implicit. S[i][j] = W[i][j] / w_out(j)
// for columns with outgoing weight, 1/N for dangling columns. Applying G costs
// O(nnz + N).
class GoogleMatrix {
 public:
  GoogleMatrix(const CGraph& g, double alpha = kDefaultAlpha, Direction direction = Direction::Forward);
  // Arbitrary weighted digraph on n nodes; parallel links are summed.
  GoogleMatrix(std::size_t n, std::span<const Link> links, double alpha = kDefaultAlpha,
               Direction direction = Direction::Forward);

  std::size_t size() const { return n_; }
  double alpha() const { return alpha_; }
  Direction direction() const { return direction_; }
  bool dangling(NodeIndex j) const { return dangling_[j] != 0; }

  // y = G x.
  void apply(std::span<const double> x, std::span<double> y) const;
  // y = alpha * S' x where S' is S with dangling columns zeroed. Adds to y.
  void apply_sparse_part(std::span<const double> x, std::span<double> y) const;
  // Column j of G, length N.
  void column(NodeIndex j, std::span<double> out) const;
  double entry(NodeIndex i, NodeIndex j) const;
  // Materialized N x N matrix; intended for small graphs and checks.
  DenseMatrix dense() const;

 private:
  void init(std::vector<Link> links);

  std::size_t n_ = 0;
  double alpha_ = kDefaultAlpha;
  Direction direction_ = Direction::Forward;
  std::vector<std::size_t> col_offsets_;
  std::vector<NodeIndex> rows_;
  std::vector<double> values_;  // S entries of non-dangling columns
  std::vector<char> dangling_;
};

struct PageRankOptions {
  double tol = kDefaultTolerance;  // L1 change between successive iterates
  int max_iter = kDefaultMaxIterations;
};

struct PageRankVector {
  std::vector<double> values;
  int iterations = 0;
  double residual = 0.0;
};

// Power iteration from the uniform vector. Throws ConvergenceError when
// max_iter is reached first.
PageRankVector pagerank(const GoogleMatrix& G, const PageRankOptions& options = {});

struct RankEntry {
  NodeIndex node = 0;
  double value = 0.0;
  std::size_t rank = 0;  // 1-based
};

using RankTable = std::vector<RankEntry>;
using NodeFilter = std::function<bool(NodeIndex)>;

// Descending by value, ties by ascending node index; ranks are contiguous over
// the nodes kept by the filter.
RankTable rank_table(const PageRankVector& P, const NodeFilter& keep = {});

// Rank (1-based) of every node in a full table; position = node index.
std::vector<std::size_t> ranks_by_node(const PageRankVector& P, const NodeFilter& keep = {});

struct ReduceOptions {
  double tol = kDefaultTolerance;
  int max_iter = 100000;
  unsigned threads = 0;
  PageRankOptions pagerank{1e-13, 100000};
};

struct ReducedGoogleMatrix {
  std::vector<NodeIndex> subset;
  std::vector<std::string> labels;  // one per subset node, same order
  DenseMatrix gr;                   // N_r x N_r, column-stochastic
  std::vector<double> pr;           // full PageRank restricted to the subset
  Direction direction = Direction::Forward;
  std::optional<Date> date;
};

// Stochastic complement G_R = G_rr + G_rs (1 - G_ss)^-1 G_sr of the subset.
// Each column solves (1 - G_ss) y = G_sr[:, c]; the teleport/dangling part of
// G_ss is rank one and is handled by Sherman-Morrison, leaving a Neumann series
// in alpha * S'_ss, which contracts at rate alpha. Subset nodes must be
// distinct and valid; the subset may be the whole node set.
ReducedGoogleMatrix reduced_google_matrix(const GoogleMatrix& G, std::span<const NodeIndex> subset,
                                          const ReduceOptions& options = {},
                                          std::span<const std::string> labels = {});

// Convenience: labels and date taken from the graph.
ReducedGoogleMatrix reduced_google_matrix(const CGraph& g, const GoogleMatrix& G,
                                          std::span<const NodeIndex> subset,
                                          const ReduceOptions& options = {});

// Zero the diagonal and rescale each column to sum 1. Throws Error naming the
// node when a column has no off-diagonal mass.
ReducedGoogleMatrix censor_diagonal(const ReducedGoogleMatrix& R);

struct ChangeMatrix {
  std::vector<std::string> labels;
  DenseMatrix delta;          // (R2 - R1) / R1
  std::vector<char> defined;  // column-major like delta; 0 where R1 == 0
  std::optional<Date> d1, d2;
  std::optional<std::pair<double, double>> cap;  // display clamp only

  bool is_defined(std::size_t i, std::size_t j) const { return defined[j * delta.rows() + i] != 0; }
  // delta clamped to cap when one is set.
  double display(std::size_t i, std::size_t j) const;
};

// Element-wise relative change between two reduced matrices over the same
// labelled subset. Throws Error("subset mismatch ...") otherwise.
ChangeMatrix relative_change(const ReducedGoogleMatrix& r1, const ReducedGoogleMatrix& r2,
                             std::optional<std::pair<double, double>> cap = std::nullopt);

}  // namespace peergraph
