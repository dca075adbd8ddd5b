#include "cardbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cardbench/error.hpp"

namespace cardbench {

QError q_error_checked(double estimated, double truth) {
  QError out;
  if (truth <= 0.0) {
    truth = 1.0;
    out.zero_truth = true;
  }
  estimated = std::max(estimated, 1.0);
  out.value = std::max(estimated / truth, truth / estimated);
  return out;
}

double q_error(double estimated, double truth) { return q_error_checked(estimated, truth).value; }

double p_error(const Query& query, const CardinalityMap& estimated, const CardinalityMap& truth,
               const CostParams& params) {
  const double best = ppc(query, truth, truth, params);
  if (!(best > 0.0)) fail(ErrorCode::kInvariantViolation, query.id + ": optimal plan cost is not positive");
  return ppc(query, estimated, truth, params) / best;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) fail(ErrorCode::kEmptyInput, "percentile of an empty list");
  if (!(p > 0.0 && p <= 100.0)) fail(ErrorCode::kInvalidArgument, "percentile rank must be in (0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()) / 100.0));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::kInvalidArgument, "pearson needs series of equal length");
  if (xs.empty()) fail(ErrorCode::kEmptyInput, "pearson of empty series");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kDegenerateVariance, "pearson of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ErrorDistribution ErrorDistribution::of(std::string method, std::vector<double> values) {
  ErrorDistribution d;
  d.method = std::move(method);
  d.p50 = percentile(values, 50);
  d.p90 = percentile(values, 90);
  d.p99 = percentile(values, 99);
  d.values = std::move(values);
  return d;
}

}  // namespace cardbench
