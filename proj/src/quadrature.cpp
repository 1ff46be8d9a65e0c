#include "spinelab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace spinelab {

namespace {

struct Panel {
  double lo, mid, hi;
  double f_lo, f_mid, f_hi;
  double whole;
  double tolerance;
  int depth;
};

double simpson(double width, double f_lo, double f_mid, double f_hi) {
  return width / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  const QuadratureOptions& options) {
  QuadratureResult result;
  if (hi == lo) {
    result.converged = true;
    return result;
  }
  const double mid = 0.5 * (lo + hi);
  const double f_lo = f(lo), f_mid = f(mid), f_hi = f(hi);

  std::vector<Panel> stack;
  stack.push_back({lo, mid, hi, f_lo, f_mid, f_hi, simpson(hi - lo, f_lo, f_mid, f_hi),
                   options.abs_tolerance, 0});
  result.intervals = 1;
  result.converged = true;

  constexpr int kMaxDepth = 60;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();

    const double lm = 0.5 * (p.lo + p.mid);
    const double rm = 0.5 * (p.mid + p.hi);
    const double f_lm = f(lm), f_rm = f(rm);
    const double left = simpson(p.mid - p.lo, p.f_lo, f_lm, p.f_mid);
    const double right = simpson(p.hi - p.mid, p.f_mid, f_rm, p.f_hi);
    const double delta = left + right - p.whole;

    // Round-off floor: refining below a few ulps of the panel value is noise.
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(left + right);
    const bool at_limit = result.intervals >= options.max_intervals || p.depth >= kMaxDepth;
    if (std::fabs(delta) <= 15.0 * std::max(p.tolerance, floor) || at_limit) {
      if (at_limit && std::fabs(delta) > 15.0 * std::max(p.tolerance, floor)) {
        result.converged = false;
      }
      result.value += left + right + delta / 15.0;
      result.error_estimate += std::fabs(delta) / 15.0;
      continue;
    }
    ++result.intervals;
    stack.push_back({p.mid, rm, p.hi, p.f_mid, f_rm, p.f_hi, right, 0.5 * p.tolerance, p.depth + 1});
    stack.push_back({p.lo, lm, p.mid, p.f_lo, f_lm, p.f_mid, left, 0.5 * p.tolerance, p.depth + 1});
  }
  return result;
}

}  // namespace spinelab
