#include "dsm/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "dsm/errors.hpp"

namespace dsm {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const ScalarFn& f, const Panel& p, double abs_tol, double rel_tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double sum = left + right;
  const double err = (sum - p.whole) / 15.0;
  const double tol = std::max(abs_tol, rel_tol * std::abs(sum));
  if (depth <= 0 || std::abs(err) <= tol || !std::isfinite(sum)) return sum + err;
  return recurse(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * abs_tol, rel_tol, depth - 1) +
         recurse(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double abs_tol, double rel_tol,
                        int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, abs_tol, rel_tol, max_depth);
  // Split into a few panels first so narrow features are not skipped entirely.
  constexpr int kPanels = 8;
  const double width = (b - a) / kPanels;
  double total = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double lo = a + k * width;
    const double hi = k + 1 == kPanels ? b : a + (k + 1) * width;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo);
    const double fmid = f(mid);
    const double fhi = f(hi);
    const Panel p{lo, mid, hi, flo, fmid, fhi, simpson(lo, hi, flo, fmid, fhi)};
    total += recurse(f, p, abs_tol / kPanels, rel_tol, max_depth);
  }
  return total;
}

TailIntegral integrate_to_infinity(const ScalarFn& f, double a, double abs_tol, double max_horizon) {
  TailIntegral out;
  double lo = a;
  double width = 1.0;
  double peak = std::abs(f(a));
  while (lo < max_horizon) {
    const double hi = lo + width;
    const double piece = adaptive_simpson(f, lo, hi, abs_tol * 1e-2, 1e-12);
    out.value += piece;
    const double fhi = std::abs(f(hi));
    peak = std::max(peak, fhi);
    lo = hi;
    width *= 2.0;
    if (fhi <= 1e-14 * peak && std::abs(piece) <= abs_tol) {
      out.converged = true;
      break;
    }
  }
  out.horizon = lo;
  return out;
}

double bisect_increasing(const ScalarFn& g, double lo, double hi, double rel_tol) {
  if (!(lo <= hi)) throw UsageError("bisect: need lo <= hi");
  if (g(lo) >= 0.0) return lo;
  if (g(hi) < 0.0) throw NumericError("bisect: no sign change on bracket");
  for (int it = 0; it < 400 && (hi - lo) > rel_tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace dsm
