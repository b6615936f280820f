#pragma once
// Independent reference implementations used only by tests. Each one is
// written from the defining formula, not from the library code paths it
// checks, so agreement is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

// Position-by-position mismatch count over boolean views of the entries.
inline std::size_t mismatch_count(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] != 0.0) != (b[i] != 0.0)) ++c;
  return c;
}

// Textbook Pearson correlation, single pass over explicit sums.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  double num = n * sxy - sx * sy;
  double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
  return num / den;
}

// Full-table LCS length over token sequences.
inline std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = (a[i - 1] == b[j - 1]) ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

// Classic Levenshtein edit distance between two words.
inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  return d[a.size()][b.size()];
}

// Exact one-sided sign-permutation p-value for a one-sample test against 0:
// the fraction of the 2^n sign assignments whose sum is >= the observed sum.
// Feasible for n <= ~20; tests use n = 10.
inline double sign_permutation_p(const std::vector<double>& d) {
  std::size_t n = d.size();
  double observed = 0;
  for (double v : d) observed += v;
  std::size_t total = std::size_t{1} << n;
  std::size_t at_least = 0;
  for (std::size_t mask = 0; mask < total; ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1) ? d[i] : -d[i];
    if (s >= observed - 1e-12) ++at_least;
  }
  return static_cast<double>(at_least) / static_cast<double>(total);
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fb, double fm, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fb, fm, eps, 60);
}

}  // namespace detail

// Upper-tail probability P(T >= t) for Student's t with df degrees of
// freedom, by numerical integration of the density. The infinite tail is
// folded onto a finite interval with x = t + u/(1-u).
inline double student_t_upper_tail(double t, int df) {
  double v = static_cast<double>(df);
  double log_norm = std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0) -
                    0.5 * std::log(v * std::acos(-1.0));
  auto pdf = [&](double x) { return std::exp(log_norm - (v + 1.0) / 2.0 * std::log1p(x * x / v)); };
  if (t < 0.0) return 1.0 - student_t_upper_tail(-t, df);
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    double x = t + u / (1.0 - u);
    double jac = 1.0 / ((1.0 - u) * (1.0 - u));
    return pdf(x) * jac;
  };
  return detail::integrate(g, 0.0, 1.0 - 1e-9, 1e-13);
}

}  // namespace oracle
