#pragma once

#include <optional>
#include <span>
#include <vector>

#include "peergraph/ingest.hpp"

namespace peergraph {

// Discrete power law p(x) = x^-gamma / zeta(gamma, xmin) for integer x >= xmin.
struct PowerLawFit {
  double gamma = 0.0;
  double xmin = 0.0;
  std::size_t n_tail = 0;
  double ks_distance = 0.0;
};

inline constexpr std::size_t kMinTailSamples = 10;

// Maximum-likelihood exponent over the tail x >= xmin. Without xmin, every
// distinct sample value with enough tail samples is tried and the one
// minimizing the Kolmogorov-Smirnov distance wins. Samples must be positive
// integers. Throws Error on too few or degenerate (all-equal) tail samples.
PowerLawFit powerlaw_fit(std::span<const double> samples, std::optional<double> xmin = std::nullopt);

// P(X >= x) under a fitted discrete power law.
double powerlaw_ccdf(double gamma, double xmin, double x);

struct BreakpointFit {
  std::size_t break_index = 0;  // the break point closes segment 1 and opens segment 2
  double break_t = 0.0;
  double slope1 = 0.0, intercept1 = 0.0;
  double slope2 = 0.0, intercept2 = 0.0;
  double sse = 0.0;
};

// Single-breakpoint piecewise linear least squares. Every interior point is
// tried as the break; each segment has at least two points. Needs >= 4 points
// with strictly increasing t.
BreakpointFit breakpoint_fit(std::span<const double> t, std::span<const double> y);

struct DatedBreakpointFit {
  Date break_date;
  double slope1 = 0.0;  // value units per day
  double slope2 = 0.0;
  double sse = 0.0;
};

DatedBreakpointFit breakpoint_fit(std::span<const CapacityPoint> series);

}  // namespace peergraph
