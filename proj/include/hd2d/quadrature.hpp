#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hd2d/errors.hpp"

namespace hd2d {

enum class LaplaceMethod { ClosedForm, Quadrature, Empirical };

inline std::string_view to_string(LaplaceMethod m) {
  switch (m) {
    case LaplaceMethod::ClosedForm: return "closed_form";
    case LaplaceMethod::Quadrature: return "quadrature";
    case LaplaceMethod::Empirical: return "empirical";
  }
  return "?";
}

/// Value of an interference Laplace transform and how it was obtained.
struct LaplaceEvaluation {
  double value = 1.0;
  LaplaceMethod method = LaplaceMethod::ClosedForm;
  double abs_error = 0.0;     // quadrature error estimate on the value
  double ci_halfwidth = 0.0;  // empirical only, 95 %
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  unsigned max_depth = 12;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  double l1 = 0.0;
};

/// Adaptive Gauss-Kronrod over [a, b], split at the interior `breaks`.
/// Throws QuadratureError when the summed error estimate exceeds rel_tol * L1.
template <class F>
QuadratureResult integrate_piecewise(F&& f, double a, double b, std::vector<double> breaks,
                                     const QuadratureOptions& opt = {}) {
  require(a <= b, "integration bounds out of order");
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double x) { return !(x > a && x < b) || !std::isfinite(x); }),
               breaks.end());
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double err = 0.0, l1 = 0.0;
    out.value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, breaks[i], breaks[i + 1], opt.max_depth, opt.rel_tol * 1e-2, &err, &l1);
    out.abs_error += err;
    out.l1 += l1;
  }
  if (out.l1 > 0.0 && out.abs_error > opt.rel_tol * out.l1) throw QuadratureError(out.abs_error / out.l1, opt.rel_tol);
  return out;
}

}  // namespace hd2d
