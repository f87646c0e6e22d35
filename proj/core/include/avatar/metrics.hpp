#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <nlohmann/json_fwd.hpp>

#include "avatar/log.hpp"

namespace avatar {

/// Ground-truth variant set split into observed (L+) and unobserved (V_u).
struct SystemTruth {
  VariantSet v_s;
  UniqueVariantLog lplus;
  VariantSet v_u;
};

/// |L+| = floor(ratio * |V_S|), clamped to [1, |V_S| - 1]. If the seeded draw
/// misses every maximal-length variant, one is swapped in.
SystemTruth split_system(const VariantSet& v_s, double ratio, std::uint64_t seed);

/// A rate kept as its integer numerator and denominator.
struct Ratio {
  std::size_t num = 0;
  std::size_t den = 0;

  double value() const noexcept { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
};

struct MetricsReport {
  Ratio tp;    // |V̂_S ∩ V_S| / |V̂_S|
  Ratio tp_s;  // |V̂_S ∩ V_S| / |V_S|
  Ratio tp_o;  // |V̂_S ∩ L+| / |L+|
  Ratio tp_u;  // |V̂_S ∩ V_u| / |V_u|
  Ratio tp_e;  // |V̂_S ∩ L+_e| / |L+_e|
  std::size_t v_hat_s_count = 0;

  double fp() const noexcept { return v_hat_s_count == 0 ? 1.0 : 1.0 - tp.value(); }
  double s() const;

  nlohmann::json to_json() const;
};

/// Exact set-intersection rates. An empty estimate gives tp = 0, fp = 1.
/// lplus_e may be empty, in which case tp_e is 0/0 and reported as 0.
MetricsReport compute_rates(const VariantSet& v_hat_s, const VariantSet& v_s, const UniqueVariantLog& lplus,
                            const VariantSet& v_u, const UniqueVariantLog& lplus_e = {});

/// Same rates for an estimate given only by its size and a membership test,
/// e.g. the playout language of a net.
MetricsReport compute_rates(std::size_t estimate_size, const std::function<bool(const Variant&)>& contains,
                            const VariantSet& v_s, const UniqueVariantLog& lplus, const VariantSet& v_u,
                            const UniqueVariantLog& lplus_e = {});

/// (tp + tp_u) / sqrt(2).
double score_s(double tp, double tp_u);

}  // namespace avatar
