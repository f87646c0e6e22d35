#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace avatar {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Shapiro-Wilk W and its p-value (Royston's AS R94 approximation; exact for
/// n = 3). Requires 3 <= n <= 5000 and a non-constant sample.
TestResult shapiro_wilk(std::vector<double> sample);

/// Upper-tailed one-sample t-test on paired differences (H1: mean > 0).
TestResult paired_t_upper(const std::vector<double>& differences);

/// Upper-tailed Wilcoxon signed-rank test. Zero differences are dropped and
/// tied magnitudes get average ranks. The statistic is the positive rank sum;
/// p is exact for n <= 20 and from the normal approximation (tie-corrected, no
/// continuity correction) above. Needs at least 5 non-zero differences.
TestResult wilcoxon_upper(const std::vector<double>& differences);

struct GatedTest {
  std::string test;  // "paired_t", "wilcoxon" or "none"
  double statistic = 0.0;
  double p_value = 1.0;
  double normality_w = 0.0;
  double normality_p = 0.0;
  bool significant = false;  // p < alpha
  bool degenerate = false;   // sample too small or constant; no test run
  std::string note;

  nlohmann::json to_json() const;
};

/// Shapiro-Wilk on the differences; p < 0.05 selects the Wilcoxon test,
/// otherwise the paired t-test. Degenerate inputs are flagged with p = 1
/// instead of throwing.
GatedTest gated_paired_test(const std::vector<double>& differences, double alpha = 0.05);

}  // namespace avatar
