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

#ifndef KGCERT_STATS_HPP_
#define KGCERT_STATS_HPP_

#include <cstdint>

namespace kgcert {

// Standard normal CDF, erf-based.
double normal_cdf(double z);

// Standard normal density.
double normal_pdf(double z);

// Inverse standard normal CDF for p in (0, 1), absolute error below 1e-9.
// Rational initial approximation polished by Newton steps on normal_cdf.
double phi_inverse(double p);

// Regularized incomplete beta function I_x(a, b), continued-fraction based.
double regularized_incomplete_beta(double a, double b, double x);

// Exact one-sided Clopper-Pearson lower confidence bound for a binomial
// success probability, given `successes` out of `trials` at confidence level
// `confidence` (e.g. 0.999). Solved by bisection to 1e-10.
double clopper_pearson_lcb(int64_t trials, int64_t successes, double confidence);

}  // namespace kgcert

#endif  // KGCERT_STATS_HPP_
