#include "avatar/log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "avatar/error.hpp"
#include "avatar/random.hpp"

namespace avatar {

std::string Variant::str() const {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ',';
    out += labels[i];
  }
  return out;
}

std::size_t VariantHash::operator()(const Variant& v) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& label : v.labels) {
    h ^= std::hash<std::string>{}(label) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Trace::Trace(std::string case_id, std::vector<EventInstance> events)
    : case_id_(std::move(case_id)), events_(std::move(events)) {
  if (events_.empty()) throw InvalidInput("trace '" + case_id_ + "' is empty");
  for (std::size_t i = 1; i < events_.size(); ++i) {
    if (events_[i].timestamp <= events_[i - 1].timestamp) {
      throw InvalidInput("trace '" + case_id_ + "': timestamps must be strictly increasing");
    }
  }
  for (const auto& e : events_) {
    if (e.activity.empty()) throw InvalidInput("trace '" + case_id_ + "': empty activity label");
  }
}

UniqueVariantLog::UniqueVariantLog(const std::vector<Variant>& variants) {
  for (const auto& v : variants) insert(v);
}

bool UniqueVariantLog::insert(const Variant& v) {
  if (!index_.insert(v).second) return false;
  items_.push_back(v);
  return true;
}

Variant variant_of(const Trace& trace) {
  Variant v;
  v.labels.reserve(trace.size());
  for (const auto& e : trace.events()) v.labels.push_back(e.activity);
  return v;
}

std::size_t max_trace_len(const EventLog& log) {
  if (log.empty()) throw InvalidInput("max_trace_len: empty event log");
  std::size_t best = 0;
  for (const auto& t : log.traces) best = std::max(best, t.size());
  return best;
}

std::size_t max_variant_len(const std::vector<Variant>& variants) {
  if (variants.empty()) throw InvalidInput("max_variant_len: no variants");
  std::size_t best = 0;
  for (const auto& v : variants) best = std::max(best, v.size());
  return best;
}

std::size_t max_variant_len(const VariantSet& variants) {
  if (variants.empty()) throw InvalidInput("max_variant_len: no variants");
  std::size_t best = 0;
  for (const auto& v : variants) best = std::max(best, v.size());
  return best;
}

VariantLogs build_variant_logs(const EventLog& log) {
  if (log.empty()) throw InvalidInput("build_variant_logs: empty event log");
  VariantLogs out;
  out.lstar.reserve(log.size());
  for (const auto& t : log.traces) {
    out.lstar.push_back(variant_of(t));
    out.lplus.insert(out.lstar.back());
  }
  return out;
}

HoldoutSplit split_holdout(const UniqueVariantLog& lplus, double fraction, std::uint64_t seed) {
  const std::size_t n = lplus.size();
  if (n < 2) throw InvalidInput("split_holdout: need at least two variants");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidInput("split_holdout: fraction must lie in (0, 1)");
  }
  // The epsilon keeps exact products such as 0.9 * 10 from rounding up.
  auto train_size = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  train_size = std::clamp<std::size_t>(train_size, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < train_size; ++i) in_train[order[i]] = true;

  HoldoutSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? split.train : split.holdout).insert(lplus[i]);
  }
  return split;
}

EventLog synth_event_log(const VariantSet& variants, std::uint64_t seed) {
  if (variants.empty()) throw InvalidInput("synth_event_log: empty variant set");
  std::vector<Variant> ordered(variants.begin(), variants.end());
  Rng rng(seed);
  rng.shuffle(ordered);

  const Timestamp epoch{std::chrono::sys_days{std::chrono::year{2000} / 1 / 1}};
  EventLog log;
  log.traces.reserve(ordered.size());
  char case_id[32];
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    std::vector<EventInstance> events;
    events.reserve(ordered[i].size());
    for (std::size_t j = 0; j < ordered[i].size(); ++j) {
      events.push_back({ordered[i][j], epoch + std::chrono::seconds(static_cast<long>(j))});
    }
    std::snprintf(case_id, sizeof case_id, "case_%06zu", i + 1);
    log.traces.emplace_back(case_id, std::move(events));
  }
  return log;
}

std::set<Label> alphabet_of(const std::vector<Variant>& variants) {
  std::set<Label> out;
  for (const auto& v : variants) out.insert(v.labels.begin(), v.labels.end());
  return out;
}

}  // namespace avatar
