#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <boost/math/constants/constants.hpp>

#include "lcgf/errors.hpp"

namespace lcgf {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

namespace detail {

template <typename Scalar>
inline constexpr long kMaxSeriesTerms = 2000000;

// One of two equivalent single-index expansions of the ā = 1 Green's function
// of the unit square, with sines in coordinate i and the exact 1D Green's
// function of -d²/dt² + (mπ)² in coordinate j. `strip` subtracts the closed-form
// Green's function of the strip (0,1) x R, leaving a series in reflected terms only.
template <typename Scalar>
Scalar square_series(Scalar xi, Scalar yi, Scalar s, Scalar t, bool strip, Scalar rate, Scalar tol) {
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  const Scalar pi = boost::math::constants::pi<Scalar>();
  const Scalar delta = std::abs(s - t);
  const Scalar sigma = s + t;
  Scalar sum = 0;
  if (strip) {
    const Scalar sh = sinh(pi * delta / 2);
    const Scalar num = 2 * sh * sh + 2 * std::pow(sin(pi * (xi + yi) / 2), 2);
    const Scalar den = 2 * sh * sh + 2 * std::pow(sin(pi * (xi - yi) / 2), 2);
    sum = log(num / den) / (4 * pi);
  }
  const Scalar tail_scale = 2 / (pi * (1 - exp(-2 * pi)));
  const Scalar q = exp(-pi * rate);
  for (long m = 1; m <= kMaxSeriesTerms<Scalar>; ++m) {
    const Scalar a = pi * static_cast<Scalar>(m);
    const Scalar denom = 2 * a * (1 - exp(-2 * a));
    Scalar numer;
    if (strip)
      numer = exp(-a * (2 + delta)) + exp(-a * (2 - delta)) - exp(-a * (2 - sigma)) - exp(-a * sigma);
    else
      numer = exp(-a * delta) + exp(-a * (2 - delta)) - exp(-a * sigma) - exp(-a * (2 - sigma));
    sum += 2 * sin(a * xi) * sin(a * yi) * numer / denom;
    const Scalar tail = tail_scale / static_cast<Scalar>(m + 1) * std::pow(q, static_cast<Scalar>(m + 1)) / (1 - q);
    if (tail < tol) return sum;
  }
  throw NumericalError("series", "continuum Green series did not reach tolerance");
}

}  // namespace detail

/// Green's function of -ā Δ on (0,1)^2 with Dirichlet data, x != y.
template <typename Scalar>
Scalar continuum_green_square(const Vec2<Scalar>& x, const Vec2<Scalar>& y, Scalar abar = 1,
                              Scalar tolerance = Scalar(1e-8)) {
  for (int k = 0; k < 2; ++k)
    if (!(x[k] > 0 && x[k] < 1 && y[k] > 0 && y[k] < 1))
      throw ParameterError("continuum_green_square: points must lie in the open unit square");
  if (x == y) throw ParameterError("continuum_green_square: x == y (use boundary_correction_f)");
  if (!(abar > 0)) throw ParameterError("abar must be positive");

  // Pick the expansion with the fastest geometric decay.
  int best_j = 0;
  bool best_strip = false;
  Scalar best_rate = -1;
  for (int j = 0; j < 2; ++j) {
    const Scalar delta = std::abs(x[j] - y[j]);
    const Scalar sigma = x[j] + y[j];
    const Scalar plain = delta;
    const Scalar strip = std::min({sigma, 2 - sigma, 2 - delta});
    if (plain > best_rate) best_rate = plain, best_j = j, best_strip = false;
    if (strip > best_rate) best_rate = strip, best_j = j, best_strip = true;
  }
  const int i = 1 - best_j;
  const Scalar g = detail::square_series<Scalar>(x[i], y[i], x[best_j], y[best_j], best_strip, best_rate,
                                                 tolerance * abar);
  return g / abar;
}

/// Green's function of the continuum box w + (-1, N)^2, via the scaling relation.
template <typename Scalar>
Scalar continuum_green_box(const Vec2<Scalar>& x, const Vec2<Scalar>& y, const Vec2<Scalar>& w, Scalar N,
                           Scalar abar = 1, Scalar tolerance = Scalar(1e-8)) {
  const Vec2<Scalar> shift = w - Vec2<Scalar>::Ones();
  return continuum_green_square<Scalar>((x - shift) / (N + 1), (y - shift) / (N + 1), abar, tolerance);
}

/// h(x,y) = 2πā Ḡ^ā(x,y); independent of ā.
template <typename Scalar>
Scalar regular_part_h(const Vec2<Scalar>& x, const Vec2<Scalar>& y, Scalar abar = 1,
                      Scalar tolerance = Scalar(1e-8)) {
  const Scalar two_pi = 2 * boost::math::constants::pi<Scalar>();
  return two_pi * abar * continuum_green_square<Scalar>(x, y, abar, tolerance / (two_pi * abar));
}

/// f(x) = lim_{y->x} 2πā Ḡ^ā(x,y) + log|x - y|; independent of ā.
template <typename Scalar>
Scalar boundary_correction_f(const Vec2<Scalar>& x, Scalar abar = 1, Scalar tolerance = Scalar(1e-10)) {
  using std::exp;
  using std::log;
  using std::sin;
  if (!(x[0] > 0 && x[0] < 1 && x[1] > 0 && x[1] < 1))
    throw ParameterError("boundary_correction_f: x must lie in the open unit square");
  if (!(abar > 0)) throw ParameterError("abar must be positive");
  const Scalar pi = boost::math::constants::pi<Scalar>();
  // Expand in the coordinate nearest to 1/2: its reflected terms decay fastest.
  const bool swap = std::abs(x[0] - Scalar(0.5)) < std::abs(x[1] - Scalar(0.5));
  const Scalar xi = swap ? x[1] : x[0];
  const Scalar s = swap ? x[0] : x[1];
  const Scalar rate = 2 * std::min(s, 1 - s);
  const Scalar q = exp(-pi * rate);
  const Scalar tail_scale = 4 * pi * 2 / (2 * pi * (1 - exp(-2 * pi)));
  Scalar sum = log(2 * sin(pi * xi) / pi);
  for (long m = 1; m <= detail::kMaxSeriesTerms<Scalar>; ++m) {
    const Scalar a = pi * static_cast<Scalar>(m);
    const Scalar d = (-2 * exp(-2 * a) + exp(-2 * a * (1 - s)) + exp(-2 * a * s)) / (2 * a * (1 - exp(-2 * a)));
    const Scalar sn = sin(a * xi);
    sum -= 4 * pi * sn * sn * d;
    const Scalar tail = tail_scale / static_cast<Scalar>(m + 1) * std::pow(q, static_cast<Scalar>(m + 1)) / (1 - q);
    if (tail < tolerance) return sum;
  }
  throw NumericalError("series", "boundary correction series did not reach tolerance");
}

}  // namespace lcgf
