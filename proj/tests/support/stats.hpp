#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace testsup {

// Regularized upper incomplete gamma Q(a, x) via series / continued fraction
// (Numerical Recipes style); enough accuracy for goodness-of-fit tests.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // lower series
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - gln);
    return 1.0 - p;
  }
  // continued fraction (modified Lentz)
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

// p-value of a chi-square statistic with the given degrees of freedom.
inline double chi2_pvalue(double stat, int dof) { return gamma_q(dof / 2.0, stat / 2.0); }

// Pearson statistic for observed counts vs expected probabilities.
inline double chi2_statistic(const std::vector<long>& observed,
                             const std::vector<double>& probs, long total) {
  double stat = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double expected = probs[i] * total;
    if (expected <= 0.0) throw std::invalid_argument("chi2: zero expected count");
    const double d = observed[i] - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace testsup
