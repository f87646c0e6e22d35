#include "avatar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "avatar/error.hpp"

namespace avatar {
namespace {

double poly(std::initializer_list<double> c, double x) {
  double result = 0.0;
  double power = 1.0;
  for (double coeff : c) {
    result += coeff * power;
    power *= x;
  }
  return result;
}

const boost::math::normal kStdNormal;

double upper_normal(double z) { return boost::math::cdf(boost::math::complement(kStdNormal, z)); }

// Royston's coefficients a_1..a_{n/2} for the order-statistic weights.
std::vector<double> shapiro_coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
    return a;
  }
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = boost::math::quantile(kStdNormal, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly({0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056}, rsn) - m[0] / ssumm2;

  std::size_t first = 1;
  double fac;
  if (n > 5) {
    first = 2;
    const double a2 = -m[1] / ssumm2 + poly({0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633}, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

TestResult shapiro_wilk(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 3 || n > 5000) throw InvalidInput("shapiro_wilk: sample size must lie in [3, 5000]");
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() < 1e-19 * std::max(1.0, std::abs(x.front()))) {
    throw DegenerateInput("shapiro_wilk: constant sample");
  }

  const auto a = shapiro_coefficients(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  double b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) b += a[i] * (x[n - 1 - i] - x[i]);
  const double w = std::min(1.0, b * b / ss);

  TestResult r{w, 1.0};
  if (n == 3) {
    constexpr double kPi6 = 6.0 / std::numbers::pi;
    constexpr double kStqr = std::numbers::pi / 3.0;
    r.p_value = std::max(0.0, kPi6 * (std::asin(std::sqrt(w)) - kStqr));
    return r;
  }
  const double an = static_cast<double>(n);
  double y = std::log(1.0 - w);
  double m, s;
  if (n <= 11) {
    const double gamma = poly({-2.273, 0.459}, an);
    if (y >= gamma) {
      r.p_value = 1e-99;
      return r;
    }
    y = -std::log(gamma - y);
    m = poly({0.544, -0.39978, 0.025054, -6.714e-4}, an);
    s = std::exp(poly({1.3822, -0.77857, 0.062767, -0.0020322}, an));
  } else {
    const double ln = std::log(an);
    m = poly({-1.5861, -0.31082, -0.083751, 0.0038915}, ln);
    s = std::exp(poly({-0.4803, -0.082676, 0.0030302}, ln));
  }
  r.p_value = upper_normal((y - m) / s);
  return r;
}

TestResult paired_t_upper(const std::vector<double>& d) {
  const std::size_t n = d.size();
  if (n < 2) throw InvalidInput("paired_t_upper: need at least two differences");
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateInput("paired_t_upper: zero variance");
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return {t, boost::math::cdf(boost::math::complement(dist, t))};
}

TestResult wilcoxon_upper(const std::vector<double>& differences) {
  std::vector<double> d;
  for (double v : differences) {
    if (v != 0.0) d.push_back(v);
  }
  if (d.empty()) throw DegenerateInput("wilcoxon_upper: all differences are zero");
  const std::size_t n = d.size();
  if (n < 5) throw InvalidInput("wilcoxon_upper: need at least 5 non-zero differences");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });
  // Doubled ranks keep average ranks of ties integral.
  std::vector<std::size_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const std::size_t doubled = i + j + 2;  // 2 * average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::size_t r_plus2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0) r_plus2 += rank2[i];
  }
  const double r_plus = static_cast<double>(r_plus2) / 2.0;

  if (n <= 20) {
    // Count sign assignments by doubled positive rank sum.
    const std::size_t total2 = std::accumulate(rank2.begin(), rank2.end(), std::size_t{0});
    std::vector<double> ways(total2 + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t r : rank2) {
      for (std::size_t s = total2 + 1; s-- > r;) ways[s] += ways[s - r];
    }
    double tail = 0.0;
    for (std::size_t s = r_plus2; s <= total2; ++s) tail += ways[s];
    return {r_plus, tail / std::ldexp(1.0, static_cast<int>(n))};
  }
  const double an = static_cast<double>(n);
  const double mean = an * (an + 1.0) / 4.0;
  const double var = an * (an + 1.0) * (2.0 * an + 1.0) / 24.0 - tie_term / 48.0;
  return {r_plus, upper_normal((r_plus - mean) / std::sqrt(var))};
}

GatedTest gated_paired_test(const std::vector<double>& differences, double alpha) {
  GatedTest g;
  g.test = "none";
  try {
    const TestResult normality = shapiro_wilk(differences);
    g.normality_w = normality.statistic;
    g.normality_p = normality.p_value;
    const TestResult r = normality.p_value < 0.05 ? wilcoxon_upper(differences) : paired_t_upper(differences);
    g.test = normality.p_value < 0.05 ? "wilcoxon" : "paired_t";
    g.statistic = r.statistic;
    g.p_value = r.p_value;
    g.significant = r.p_value < alpha;
  } catch (const Error& e) {
    g.degenerate = true;
    g.p_value = 1.0;
    g.note = e.what();
  }
  return g;
}

nlohmann::json GatedTest::to_json() const {
  nlohmann::json j{{"test", test},
                   {"statistic", statistic},
                   {"p_value", p_value},
                   {"normality_w", normality_w},
                   {"normality_p", normality_p},
                   {"significant", significant},
                   {"degenerate", degenerate}};
  if (!note.empty()) j["note"] = note;
  return j;
}

}  // namespace avatar
