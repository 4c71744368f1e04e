#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

namespace spike::detail {

/// Bracketed root of f on [a, b] (f(a), f(b) of opposite sign or zero),
/// refined until the bracket is narrower than tol.
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iters = 200;
  auto done = [tol](double x, double y) { return std::fabs(x - y) <= tol; };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, done, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace spike::detail
