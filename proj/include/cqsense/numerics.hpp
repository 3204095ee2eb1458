#ifndef CQSENSE_NUMERICS_HPP
#define CQSENSE_NUMERICS_HPP

// One-dimensional quadrature, search and grid helpers.

#include <cmath>
#include <functional>
#include <vector>

#include "cqsense/errors.hpp"

namespace cqsense::numerics {

using ScalarFn = std::function<double(double)>;

inline std::vector<double> linear_space(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

inline std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > 0.0)) {
    throw DomainError("logarithmic grid needs positive bounds");
  }
  std::vector<double> out = linear_space(std::log(lo), std::log(hi), n);
  for (double& x : out) x = std::exp(x);
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace detail {

inline double simpson_step(const ScalarFn& f, double a, double fa, double b,
                           double fb, double m, double fm, double whole,
                           double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature to the given relative tolerance. The
/// interval is pre-split into `pieces` panels so that narrow features are
/// not missed by the first estimate.
inline double adaptive_simpson(const ScalarFn& f, double a, double b,
                               double rel_tol = 1e-8, int pieces = 16,
                               int max_depth = 20) {
  if (a == b) return 0.0;
  const std::vector<double> nodes = linear_space(a, b, pieces + 1);
  double coarse = 0.0;
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = f(nodes[i]);
  std::vector<double> mids(pieces), fmids(pieces);
  for (int i = 0; i < pieces; ++i) {
    mids[i] = 0.5 * (nodes[i] + nodes[i + 1]);
    fmids[i] = f(mids[i]);
    coarse += (nodes[i + 1] - nodes[i]) / 6.0 * (values[i] + 4.0 * fmids[i] + values[i + 1]);
  }
  const double tol = rel_tol * std::max(std::abs(coarse), 1e-300) / pieces;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double whole =
        (nodes[i + 1] - nodes[i]) / 6.0 * (values[i] + 4.0 * fmids[i] + values[i + 1]);
    total += detail::simpson_step(f, nodes[i], values[i], nodes[i + 1], values[i + 1],
                                  mids[i], fmids[i], whole, tol, max_depth);
  }
  return total;
}

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section maximization of a unimodal function on [lo, hi].
inline Extremum golden_section_maximize(const ScalarFn& f, double lo, double hi,
                                        double rel_tol = 1e-6) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(b - a) <= rel_tol * std::max(std::abs(c), 1e-300)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Extremum best = fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
  const double fa = f(lo), fb = f(hi);
  if (fa > best.value) best = {lo, fa};
  if (fb > best.value) best = {hi, fb};
  return best;
}

/// Grid scan followed by golden-section refinement around the best node.
/// Throws SearchError if the objective is non-finite on the grid.
inline Extremum grid_maximize(const ScalarFn& f, double lo, double hi,
                              int points = 128, bool logarithmic = true,
                              double rel_tol = 1e-6) {
  if (!(hi > lo)) throw SearchError("search bracket is empty");
  const std::vector<double> grid =
      logarithmic ? log_space(lo, hi, points) : linear_space(lo, hi, points);
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double value = f(grid[i]);
    if (!std::isfinite(value)) {
      throw SearchError("objective is not finite inside the search bracket");
    }
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  const double left = grid[best == 0 ? 0 : best - 1];
  const double right = grid[best + 1 == grid.size() ? best : best + 1];
  Extremum refined = golden_section_maximize(f, left, right, rel_tol);
  if (!(refined.value >= best_value)) refined = {grid[best], best_value};
  return refined;
}

/// Root of a continuous function with a sign change on [lo, hi].
inline double bisect(const ScalarFn& f, double lo, double hi, double rel_tol = 1e-14) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw SearchError("root is not bracketed");
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::abs(mid)) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cqsense::numerics

#endif  // CQSENSE_NUMERICS_HPP
