#include "avatar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/random.hpp"

namespace avatar {

SystemTruth split_system(const VariantSet& v_s, double ratio, std::uint64_t seed) {
  if (v_s.size() < 2) throw InvalidInput("split_system: need at least two variants");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("split_system: ratio must lie in (0,1)");
  const std::size_t n = v_s.size();
  // The epsilon keeps exact products such as 0.7 * 10 from flooring to 6.
  auto observed = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  observed = std::clamp<std::size_t>(observed, 1, n - 1);

  std::vector<Variant> order(v_s.begin(), v_s.end());
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t max_len = max_variant_len(v_s);
  const auto first_max = std::find_if(order.begin(), order.end(), [&](const Variant& v) { return v.size() == max_len; });
  if (first_max - order.begin() >= static_cast<std::ptrdiff_t>(observed)) {
    std::iter_swap(order.begin() + static_cast<std::ptrdiff_t>(observed) - 1, first_max);
  }

  SystemTruth t;
  t.v_s = v_s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < observed) {
      t.lplus.insert(order[i]);
    } else {
      t.v_u.insert(order[i]);
    }
  }
  return t;
}

namespace {

template <typename Set>
std::size_t overlap(const VariantSet& v_hat_s, const Set& other) {
  std::size_t n = 0;
  for (const auto& v : other) n += v_hat_s.count(v);
  return n;
}

}  // namespace

MetricsReport compute_rates(const VariantSet& v_hat_s, const VariantSet& v_s, const UniqueVariantLog& lplus,
                            const VariantSet& v_u, const UniqueVariantLog& lplus_e) {
  if (v_s.empty()) throw InvalidInput("compute_rates: empty system variant set");
  MetricsReport r;
  r.v_hat_s_count = v_hat_s.size();
  const std::size_t realistic = overlap(v_hat_s, v_s);
  r.tp = {realistic, v_hat_s.size()};
  r.tp_s = {realistic, v_s.size()};
  r.tp_o = {overlap(v_hat_s, lplus), lplus.size()};
  r.tp_u = {overlap(v_hat_s, v_u), v_u.size()};
  r.tp_e = {overlap(v_hat_s, lplus_e), lplus_e.size()};
  return r;
}

MetricsReport compute_rates(std::size_t estimate_size, const std::function<bool(const Variant&)>& contains,
                            const VariantSet& v_s, const UniqueVariantLog& lplus, const VariantSet& v_u,
                            const UniqueVariantLog& lplus_e) {
  if (v_s.empty()) throw InvalidInput("compute_rates: empty system variant set");
  auto hits = [&](const auto& set) {
    std::size_t n = 0;
    for (const auto& v : set) n += contains(v) ? 1 : 0;
    return n;
  };
  MetricsReport r;
  r.v_hat_s_count = estimate_size;
  const std::size_t realistic = hits(v_s);
  if (realistic > estimate_size) throw InvalidInput("compute_rates: membership test disagrees with estimate size");
  r.tp = {realistic, estimate_size};
  r.tp_s = {realistic, v_s.size()};
  r.tp_o = {hits(lplus), lplus.size()};
  r.tp_u = {hits(v_u), v_u.size()};
  r.tp_e = {hits(lplus_e), lplus_e.size()};
  return r;
}

double score_s(double tp, double tp_u) {
  if (!(tp >= 0.0 && tp <= 1.0 && tp_u >= 0.0 && tp_u <= 1.0)) {
    throw InvalidInput("score_s: rates must lie in [0,1]");
  }
  return (tp + tp_u) / std::numbers::sqrt2;
}

double MetricsReport::s() const { return score_s(tp.value(), tp_u.value()); }

nlohmann::json MetricsReport::to_json() const {
  auto rate = [](const Ratio& r) { return nlohmann::json{{"num", r.num}, {"den", r.den}, {"value", r.value()}}; };
  return {{"v_hat_s", v_hat_s_count}, {"tp", rate(tp)},     {"fp", fp()},
          {"tp_S", rate(tp_s)},       {"tp_o", rate(tp_o)}, {"tp_u", rate(tp_u)},
          {"tp_e", rate(tp_e)},       {"s", s()}};
}

}  // namespace avatar
