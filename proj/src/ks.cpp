#include "npsr/ks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "npsr/error.hpp"

namespace npsr {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptyInput("KS test needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double kolmogorov_survival(double lambda, int terms) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0) throw EmptyInput("KS test needs two non-empty samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("significance must be in (0, 1)");
  // Q is decreasing in lambda; bisect Q(lambda) = alpha.
  double lo = 0.1, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 0.5 * (lo + hi) * std::sqrt((dn + dm) / (dn * dm));
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  KsResult r;
  r.statistic = ks_statistic(a, b);
  r.critical_value = ks_critical_value(a.size(), b.size(), alpha);
  const double dn = static_cast<double>(a.size());
  const double dm = static_cast<double>(b.size());
  r.p_value = kolmogorov_survival(r.statistic * std::sqrt(dn * dm / (dn + dm)));
  r.reject = r.statistic > r.critical_value;
  return r;
}

}  // namespace npsr
