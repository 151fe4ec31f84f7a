#include "peergraph/fitting.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <limits>

#include "peergraph/error.hpp"

namespace peergraph {

namespace {

double hurwitz_zeta(double s, double q) {
  gsl_sf_result r;
  if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS) return std::numeric_limits<double>::infinity();
  return r.val;
}

struct GslQuiet {
  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  ~GslQuiet() { gsl_set_error_handler(previous); }
};

constexpr double kGammaLow = 1.0 + 1e-6;
constexpr double kGammaHigh = 20.0;

// tail must be sorted ascending, all >= xmin.
PowerLawFit fit_tail(std::span<const double> tail, double xmin) {
  const double n = static_cast<double>(tail.size());
  double sum_log = 0.0;
  for (double x : tail) sum_log += std::log(x);
  auto nll = [&](double gamma) { return n * std::log(hurwitz_zeta(gamma, xmin)) + gamma * sum_log; };
  const auto [gamma, _] = boost::math::tools::brent_find_minima(nll, kGammaLow, kGammaHigh, 52);

  // KS distance between the empirical tail CCDF and the fitted one, evaluated
  // at each distinct value.
  double ks = 0.0;
  const double z0 = hurwitz_zeta(gamma, xmin);
  std::size_t i = 0;
  while (i < tail.size()) {
    const double x = tail[i];
    const double emp = (n - static_cast<double>(i)) / n;  // P(X >= x)
    const double fit = hurwitz_zeta(gamma, x) / z0;
    ks = std::max(ks, std::abs(emp - fit));
    while (i < tail.size() && tail[i] == x) ++i;
  }
  return {gamma, xmin, tail.size(), ks};
}

std::pair<double, double> least_squares(std::span<const double> t, std::span<const double> y, double& sse) {
  const double n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  const double slope = sty / stt;
  const double intercept = my - slope * mt;
  sse = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (intercept + slope * t[i]);
    sse += r * r;
  }
  return {slope, intercept};
}

}  // namespace

double powerlaw_ccdf(double gamma, double xmin, double x) {
  GslQuiet quiet;
  return hurwitz_zeta(gamma, x) / hurwitz_zeta(gamma, xmin);
}

PowerLawFit powerlaw_fit(std::span<const double> samples, std::optional<double> xmin) {
  GslQuiet quiet;
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!(x >= 1.0) || std::floor(x) != x) throw Error("power-law samples must be positive integers");
  }
  std::sort(sorted.begin(), sorted.end());

  if (sorted.size() < kMinTailSamples) throw Error("too few samples for a power-law fit");
  auto tail_from = [&](double cut) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), cut);
    return std::span<const double>(sorted).subspan(static_cast<std::size_t>(it - sorted.begin()));
  };
  auto usable = [](std::span<const double> tail) {
    return tail.size() >= kMinTailSamples && tail.front() != tail.back();
  };

  if (xmin) {
    if (!(*xmin >= 1.0)) throw Error("xmin must be >= 1");
    auto tail = tail_from(*xmin);
    if (tail.size() < kMinTailSamples) throw Error("too few samples above xmin for a power-law fit");
    if (!usable(tail)) throw Error("degenerate tail: all samples equal");
    return fit_tail(tail, *xmin);
  }

  std::vector<double> candidates(sorted.begin(), sorted.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::optional<PowerLawFit> best;
  for (double cut : candidates) {
    auto tail = tail_from(cut);
    if (!usable(tail)) break;  // tails only shrink from here on
    auto fit = fit_tail(tail, cut);
    if (!best || fit.ks_distance < best->ks_distance) best = fit;
  }
  if (!best) throw Error("degenerate tail: all samples equal");
  return *best;
}

BreakpointFit breakpoint_fit(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw Error("breakpoint fit: t and y differ in length");
  if (t.size() < 4) throw Error("breakpoint fit needs at least 4 points");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw Error("breakpoint fit: t must be strictly increasing");
  }
  std::optional<BreakpointFit> best;
  for (std::size_t b = 1; b + 1 < t.size(); ++b) {
    double sse1 = 0.0, sse2 = 0.0;
    auto [s1, c1] = least_squares(t.subspan(0, b + 1), y.subspan(0, b + 1), sse1);
    auto [s2, c2] = least_squares(t.subspan(b), y.subspan(b), sse2);
    const double sse = sse1 + sse2;
    if (!best || sse < best->sse) best = BreakpointFit{b, t[b], s1, c1, s2, c2, sse};
  }
  return *best;
}

DatedBreakpointFit breakpoint_fit(std::span<const CapacityPoint> series) {
  std::vector<double> t, y;
  for (const auto& p : series) {
    t.push_back(p.date.day_number());
    y.push_back(p.capacity);
  }
  const auto fit = breakpoint_fit(t, y);
  return {series[fit.break_index].date, fit.slope1, fit.slope2, fit.sse};
}

}  // namespace peergraph
