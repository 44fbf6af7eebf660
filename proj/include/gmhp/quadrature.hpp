#ifndef GMHP_QUADRATURE_HPP
#define GMHP_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <sstream>

#include "gmhp/errors.hpp"

namespace gmhp::detail {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  int max_depth = 48;
};

// Adaptive Simpson integration on [a, b]. The integrand must be smooth on the
// interval; callers split known kinks (event times) beforehand.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {}) {
  if (!(b > a)) return 0.0;

  struct Worker {
    const std::function<double(double)>& f;
    const QuadratureOptions& opts;

    double simpson(double lo, double hi, double flo, double fmid, double fhi) const {
      return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    }

    double run(double lo, double hi, double flo, double fmid, double fhi, double whole,
               int depth) const {
      const double mid = 0.5 * (lo + hi);
      const double lm = f(0.5 * (lo + mid));
      const double rm = f(0.5 * (mid + hi));
      const double left = simpson(lo, mid, flo, lm, fmid);
      const double right = simpson(mid, hi, fmid, rm, fhi);
      const double err = left + right - whole;
      const double scale = std::max(opts.abs_tol, opts.rel_tol * std::abs(left + right));
      if (std::abs(err) <= 15.0 * scale) return left + right + err / 15.0;
      if (depth >= opts.max_depth) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << lo << ", " << hi
            << "] (residual " << err << ", depth " << depth << ")";
        throw NumericalError(msg.str());
      }
      return run(lo, mid, flo, lm, fmid, left, depth + 1) +
             run(mid, hi, fmid, rm, fhi, right, depth + 1);
    }
  };

  const double fa = f(a), fb = f(b);
  const double fm = f(0.5 * (a + b));
  Worker w{f, opts};
  return w.run(a, b, fa, fm, fb, w.simpson(a, b, fa, fm, fb), 0);
}

}  // namespace gmhp::detail

#endif
