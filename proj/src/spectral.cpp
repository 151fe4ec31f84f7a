#include "peergraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "peergraph/error.hpp"
#include "peergraph/parallel.hpp"

namespace peergraph {

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

Direction direction_from_string(std::string_view text) {
  if (text == "forward") return Direction::Forward;
  if (text == "reverse") return Direction::Reverse;
  throw Error("unknown direction '" + std::string(text) + "', expected forward or reverse");
}

std::vector<Link> directed_links(const CGraph& g, Direction direction) {
  std::vector<Link> links;
  links.reserve(2 * g.num_edges());
  for (NodeIndex j = 0; j < g.num_nodes(); ++j) {
    for (const auto& e : g.out_links(j)) {
      if (direction == Direction::Forward) {
        links.push_back({j, e.node, e.weight});
      } else {
        links.push_back({e.node, j, e.weight});
      }
    }
  }
  return links;
}

GoogleMatrix::GoogleMatrix(const CGraph& g, double alpha, Direction direction)
    : n_(g.num_nodes()), alpha_(alpha), direction_(direction) {
  init(directed_links(g, direction));
}

GoogleMatrix::GoogleMatrix(std::size_t n, std::span<const Link> links, double alpha, Direction direction)
    : n_(n), alpha_(alpha), direction_(direction) {
  std::vector<Link> own(links.begin(), links.end());
  if (direction == Direction::Reverse) {
    for (auto& l : own) std::swap(l.from, l.to);
  }
  init(std::move(own));
}

void GoogleMatrix::init(std::vector<Link> links) {
  if (!(alpha_ >= 0.0 && alpha_ < 1.0)) throw Error("alpha must lie in [0, 1)");
  if (n_ == 0) throw Error("Google matrix of an empty graph");
  for (const auto& l : links) {
    if (l.from >= n_ || l.to >= n_) throw Error("link endpoint out of range");
    if (!(l.weight >= 0.0)) throw Error("link weights must be non-negative");
  }
  std::sort(links.begin(), links.end(),
            [](const Link& a, const Link& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });

  col_offsets_.assign(n_ + 1, 0);
  dangling_.assign(n_, 1);
  std::vector<double> w_out(n_, 0.0);
  for (std::size_t k = 0; k < links.size();) {
    const auto& l = links[k];
    double w = 0.0;
    std::size_t m = k;
    for (; m < links.size() && links[m].from == l.from && links[m].to == l.to; ++m) w += links[m].weight;
    if (w > 0.0) {
      rows_.push_back(l.to);
      values_.push_back(w);
      ++col_offsets_[l.from + 1];
      w_out[l.from] += w;
    }
    k = m;
  }
  for (std::size_t j = 0; j < n_; ++j) col_offsets_[j + 1] += col_offsets_[j];
  for (std::size_t j = 0; j < n_; ++j) {
    if (w_out[j] > 0.0) {
      dangling_[j] = 0;
      for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) values_[k] /= w_out[j];
    }
  }
}

void GoogleMatrix::apply_sparse_part(std::span<const double> x, std::span<double> y) const {
  for (std::size_t j = 0; j < n_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double ax = alpha_ * xj;
    for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) y[rows_[k]] += values_[k] * ax;
  }
}

void GoogleMatrix::apply(std::span<const double> x, std::span<double> y) const {
  // Rank-one part: each column j contributes ((1 - alpha) + alpha [j dangling]) x_j / N.
  double shared = 0.0;
  for (std::size_t j = 0; j < n_; ++j) shared += ((1.0 - alpha_) + (dangling_[j] ? alpha_ : 0.0)) * x[j];
  shared /= static_cast<double>(n_);
  std::fill(y.begin(), y.end(), shared);
  apply_sparse_part(x, y);
}

void GoogleMatrix::column(NodeIndex j, std::span<double> out) const {
  const double base = ((1.0 - alpha_) + (dangling_[j] ? alpha_ : 0.0)) / static_cast<double>(n_);
  std::fill(out.begin(), out.end(), base);
  for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) out[rows_[k]] += alpha_ * values_[k];
}

double GoogleMatrix::entry(NodeIndex i, NodeIndex j) const {
  double v = ((1.0 - alpha_) + (dangling_[j] ? alpha_ : 0.0)) / static_cast<double>(n_);
  for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) {
    if (rows_[k] == i) v += alpha_ * values_[k];
  }
  return v;
}

DenseMatrix GoogleMatrix::dense() const {
  DenseMatrix m(n_, n_);
  for (std::size_t j = 0; j < n_; ++j) column(j, m.col(j));
  return m;
}

PageRankVector pagerank(const GoogleMatrix& G, const PageRankOptions& options) {
  if (!(options.tol > 0.0)) throw Error("PageRank tolerance must be positive");
  const std::size_t n = G.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n)), next(n);
  PageRankVector result;
  for (int it = 1; it <= options.max_iter; ++it) {
    G.apply(p, next);
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= sum;
      diff += std::abs(next[i] - p[i]);
    }
    p.swap(next);
    if (diff < options.tol) {
      result.values = std::move(p);
      result.iterations = it;
      result.residual = diff;
      return result;
    }
  }
  throw ConvergenceError("PageRank did not converge within " + std::to_string(options.max_iter) +
                         " iterations");
}

RankTable rank_table(const PageRankVector& P, const NodeFilter& keep) {
  RankTable table;
  for (NodeIndex i = 0; i < P.values.size(); ++i) {
    if (!keep || keep(i)) table.push_back({i, P.values[i], 0});
  }
  std::sort(table.begin(), table.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.node < b.node;
  });
  for (std::size_t k = 0; k < table.size(); ++k) table[k].rank = k + 1;
  return table;
}

std::vector<std::size_t> ranks_by_node(const PageRankVector& P, const NodeFilter& keep) {
  std::vector<std::size_t> ranks(P.values.size(), 0);
  for (const auto& e : rank_table(P, keep)) ranks[e.node] = e.rank;
  return ranks;
}

namespace {

// Solves (I - alpha S'_ss) z = b on the complement nodes (mask == 1) by the
// Neumann series. Vectors are full length with zeros outside the complement.
std::vector<double> neumann_solve(const GoogleMatrix& G, std::span<const char> in_complement,
                                  std::vector<double> b, const ReduceOptions& options) {
  const std::size_t n = G.size();
  double b_norm = 0.0;
  for (double v : b) b_norm += std::abs(v);
  if (b_norm == 0.0) return b;
  // The update shrinks geometrically; stop well below the caller tolerance so
  // the Sherman-Morrison correction does not amplify truncation error.
  const double stop = options.tol * 1e-4 * b_norm;
  std::vector<double> z = b, term = b, next(n);
  for (int it = 0; it < options.max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    G.apply_sparse_part(term, next);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_complement[i]) next[i] = 0.0;
      z[i] += next[i];
      norm += std::abs(next[i]);
    }
    term.swap(next);
    if (norm <= stop || norm == 0.0) return z;
  }
  throw ConvergenceError("reduced Google matrix: series solve did not converge within " +
                         std::to_string(options.max_iter) + " iterations");
}

}  // namespace

ReducedGoogleMatrix reduced_google_matrix(const GoogleMatrix& G, std::span<const NodeIndex> subset,
                                          const ReduceOptions& options, std::span<const std::string> labels) {
  const std::size_t n = G.size();
  const std::size_t nr = subset.size();
  if (nr == 0) throw Error("reduced Google matrix needs a non-empty subset");
  if (!labels.empty() && labels.size() != nr) throw Error("one label per subset node required");
  std::vector<char> in_complement(n, 1);
  for (NodeIndex v : subset) {
    if (v >= n) throw Error("subset node " + std::to_string(v) + " out of range");
    if (!in_complement[v]) throw Error("subset node " + std::to_string(v) + " listed twice");
    in_complement[v] = 0;
  }

  ReducedGoogleMatrix R;
  R.subset.assign(subset.begin(), subset.end());
  if (labels.empty()) {
    for (NodeIndex v : subset) R.labels.push_back(std::to_string(v));
  } else {
    R.labels.assign(labels.begin(), labels.end());
  }
  R.direction = G.direction();
  R.gr = DenseMatrix(nr, nr);

  const auto P = pagerank(G, options.pagerank);
  for (NodeIndex v : subset) R.pr.push_back(P.values[v]);

  // G_ss = alpha S'_ss + u v^T with u = 1_s / N and v_j = (1 - alpha) + alpha [j dangling].
  const double inv_n = 1.0 / static_cast<double>(n);
  auto v_weight = [&](NodeIndex j) { return (1.0 - G.alpha()) + (G.dangling(j) ? G.alpha() : 0.0); };
  auto v_dot = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_complement[j]) s += v_weight(j) * x[j];
    }
    return s;
  };

  std::vector<double> w;
  double denom = 1.0;
  const bool has_complement = nr < n;
  if (has_complement) {
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) u[i] = in_complement[i] ? inv_n : 0.0;
    w = neumann_solve(G, in_complement, std::move(u), options);
    denom = 1.0 - v_dot(w);
    if (!(denom > 0.0)) throw ConvergenceError("reduced Google matrix: singular complement block");
  }

  parallel_for(nr, options.threads, [&](std::size_t c) {
    std::vector<double> col(n);
    G.column(subset[c], col);
    auto out = R.gr.col(c);
    for (std::size_t r = 0; r < nr; ++r) out[r] = col[subset[r]];
    if (!has_complement) return;

    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) b[i] = in_complement[i] ? col[i] : 0.0;
    auto y = neumann_solve(G, in_complement, std::move(b), options);
    const double scale = v_dot(y) / denom;
    for (std::size_t i = 0; i < n; ++i) y[i] += scale * w[i];

    std::vector<double> gy(n);
    G.apply(y, gy);
    for (std::size_t r = 0; r < nr; ++r) out[r] += gy[subset[r]];
  });
  return R;
}

ReducedGoogleMatrix reduced_google_matrix(const CGraph& g, const GoogleMatrix& G,
                                          std::span<const NodeIndex> subset, const ReduceOptions& options) {
  if (G.size() != g.num_nodes()) throw Error("Google matrix does not belong to this graph");
  std::vector<std::string> labels;
  for (NodeIndex v : subset) {
    if (v >= g.num_nodes()) throw Error("subset node " + std::to_string(v) + " out of range");
    labels.push_back(g.label(v));
  }
  auto R = reduced_google_matrix(G, subset, options, labels);
  R.date = g.date();
  return R;
}

ReducedGoogleMatrix censor_diagonal(const ReducedGoogleMatrix& R) {
  ReducedGoogleMatrix out = R;
  const std::size_t nr = R.gr.rows();
  for (std::size_t j = 0; j < nr; ++j) {
    out.gr(j, j) = 0.0;
    const double mass = out.gr.column_sum(j);
    if (!(mass > 0.0)) {
      throw Error("cannot censor diagonal: column " + R.labels[j] + " has no off-diagonal mass");
    }
    for (double& v : out.gr.col(j)) v /= mass;
  }
  return out;
}

double ChangeMatrix::display(std::size_t i, std::size_t j) const {
  const double v = delta(i, j);
  return cap ? std::clamp(v, cap->first, cap->second) : v;
}

ChangeMatrix relative_change(const ReducedGoogleMatrix& r1, const ReducedGoogleMatrix& r2,
                             std::optional<std::pair<double, double>> cap) {
  if (r1.labels != r2.labels || r1.gr.rows() != r2.gr.rows() || r1.gr.cols() != r2.gr.cols()) {
    throw Error("subset mismatch: reduced matrices cover different node lists");
  }
  if (cap && !(cap->first < cap->second)) throw Error("display cap must satisfy low < high");
  ChangeMatrix c;
  c.labels = r1.labels;
  c.d1 = r1.date;
  c.d2 = r2.date;
  c.cap = cap;
  const std::size_t nr = r1.gr.rows();
  c.delta = DenseMatrix(nr, nr);
  c.defined.assign(nr * nr, 0);
  for (std::size_t j = 0; j < nr; ++j) {
    for (std::size_t i = 0; i < nr; ++i) {
      const double a = r1.gr(i, j);
      if (a == 0.0) {
        c.delta(i, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      c.delta(i, j) = (r2.gr(i, j) - a) / a;
      c.defined[j * nr + i] = 1;
    }
  }
  return c;
}

}  // namespace peergraph
