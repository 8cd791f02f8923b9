#pragma once

#include <cstddef>
#include <span>

namespace npsr {

/// sup_x |F_a(x) - F_b(x)| over the two empirical CDFs.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), truncated at `terms`.
double kolmogorov_survival(double lambda, int terms = 100);

/// Asymptotic critical value of the two-sample statistic at significance `alpha`.
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

struct KsResult {
  double statistic;
  double critical_value;
  double p_value;  ///< asymptotic
  bool reject;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha);

}  // namespace npsr
