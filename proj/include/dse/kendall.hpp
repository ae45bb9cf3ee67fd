#pragma once

#include <cmath>
#include <span>

#include <nlohmann/json.hpp>

#include "dse/errors.hpp"

namespace dse {

struct TauReport {
  double tau = 0.0;
  int n = 0;
  double p_value = 1.0;
  long long concordant = 0;
  long long discordant = 0;
  long long tied = 0;  // pairs where either series ties
};

/// Two-sided p-value under the null of independence, using the normal
/// approximation z = 3 tau sqrt(n(n-1)) / sqrt(2(2n+5)).
inline double tau_pvalue(double tau, int n) {
  if (n < 2) throw LengthError("p-value needs n >= 2");
  const double nn = static_cast<double>(n);
  const double z = 3.0 * tau * std::sqrt(nn * (nn - 1.0)) / std::sqrt(2.0 * (2.0 * nn + 5.0));
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
  return std::min(1.0, std::max(0.0, p));
}

/// Kendall's tau-a over all pairs: tau = 2/(n(n-1)) sum sign(dM) sign(dP).
/// Tied pairs contribute zero; no tie correction is applied.
inline TauReport kendall_tau(std::span<const double> metric, std::span<const double> perf) {
  if (metric.size() != perf.size())
    throw LengthError("series lengths differ: " + std::to_string(metric.size()) + " vs " +
                      std::to_string(perf.size()));
  if (metric.size() < 2) throw LengthError("Kendall's tau needs at least two checkpoints");
  for (double v : metric)
    if (!std::isfinite(v)) throw DataError("non-finite value in metric series");
  for (double v : perf)
    if (!std::isfinite(v)) throw DataError("non-finite value in performance series");

  TauReport report;
  report.n = static_cast<int>(metric.size());
  for (std::size_t i = 0; i + 1 < metric.size(); ++i) {
    for (std::size_t j = i + 1; j < metric.size(); ++j) {
      const double dm = metric[j] - metric[i];
      const double dp = perf[j] - perf[i];
      if (dm == 0.0 || dp == 0.0) {
        ++report.tied;
      } else if ((dm > 0.0) == (dp > 0.0)) {
        ++report.concordant;
      } else {
        ++report.discordant;
      }
    }
  }
  const double pairs = static_cast<double>(report.n) * (report.n - 1) / 2.0;
  report.tau = static_cast<double>(report.concordant - report.discordant) / pairs;
  report.p_value = tau_pvalue(report.tau, report.n);
  return report;
}

inline void to_json(nlohmann::json& j, const TauReport& r) {
  j = nlohmann::json{{"tau", r.tau},           {"n", r.n},
                     {"p_value", r.p_value},   {"concordant", r.concordant},
                     {"discordant", r.discordant}, {"tied", r.tied}};
}

}  // namespace dse
