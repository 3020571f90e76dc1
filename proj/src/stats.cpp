/*
 * Copyright 2026 the kgcert authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kgcert/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kgcert {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Rational approximation of the inverse normal CDF (Acklam). Relative error
// below 1.15e-9 over (0, 1); Newton polishing below brings it to full double
// precision in the central range.
double phi_inverse_initial(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Continued fraction for I_x(a, b), evaluated with the modified Lentz method.
double incomplete_beta_cf(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double phi_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("phi_inverse: p must lie strictly in (0, 1), got " +
                            std::to_string(p));
  }
  double z = phi_inverse_initial(p);
  // Two Newton steps against the erf-based CDF. The expm1-free form is fine
  // here: pdf(z) never underflows for the z reachable from double p.
  for (int step = 0; step < 2; ++step) {
    const double err = normal_cdf(z) - p;
    z -= err / normal_pdf(z);
  }
  return z;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("regularized_incomplete_beta: a, b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fastest for x below the mean a/(a+b);
  // otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incomplete_beta_cf(a, b, x) / a;
  }
  return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

double clopper_pearson_lcb(int64_t trials, int64_t successes, double confidence) {
  if (trials < 1) throw std::domain_error("clopper_pearson_lcb: trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw std::domain_error("clopper_pearson_lcb: successes out of range");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::domain_error("clopper_pearson_lcb: confidence must lie in (0, 1)");
  }
  if (successes == 0) return 0.0;

  // The bound is the p solving P(X >= successes | trials, p) = 1 - confidence,
  // where the binomial tail is I_p(successes, trials - successes + 1). The
  // tail is monotone increasing in p, so bisection is safe.
  const double a = static_cast<double>(successes);
  const double b = static_cast<double>(trials - successes) + 1.0;
  const double target = 1.0 - confidence;

  double lo = 0.0;
  double hi = static_cast<double>(successes) / static_cast<double>(trials);
  // The bound never exceeds the empirical rate; still, guard against the
  // degenerate all-success case where the root sits exactly at hi.
  if (regularized_incomplete_beta(a, b, hi) < target) hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(a, b, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace kgcert
