#pragma once

#include <span>
#include <string>
#include <vector>

#include "cardbench/planner.hpp"

namespace cardbench {

struct QError {
  double value = 1.0;
  bool zero_truth = false;  // truth was 0 and was clamped to 1
};

// max(est/truth, truth/est). Zero truth is clamped to 1 and flagged.
QError q_error_checked(double estimated, double truth);
double q_error(double estimated, double truth);

// ppc(estimated, truth) / ppc(truth, truth).
double p_error(const Query& query, const CardinalityMap& estimated, const CardinalityMap& truth,
               const CostParams& params = {});

// Nearest rank: the element at 1-based index ceil(p/100 * n) of the sorted values. Throws EmptyInput.
double percentile(std::span<const double> values, double p);

// Throws InvalidArgument on length mismatch or empty input, DegenerateVariance on a constant series.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct ErrorDistribution {
  std::string method;
  std::vector<double> values;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;

  static ErrorDistribution of(std::string method, std::vector<double> values);
};

}  // namespace cardbench
