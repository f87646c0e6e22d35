#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace avatar {

using Label = std::string;
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// Label-sequence projection of a trace. Equality and ordering are
/// element-wise on the labels (lexicographic), which gives every variant set a
/// canonical iteration order.
struct Variant {
  std::vector<Label> labels;

  Variant() = default;
  explicit Variant(std::vector<Label> l) : labels(std::move(l)) {}
  Variant(std::initializer_list<Label> l) : labels(l) {}

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  const Label& operator[](std::size_t i) const { return labels[i]; }
  auto begin() const noexcept { return labels.begin(); }
  auto end() const noexcept { return labels.end(); }

  // "a,b,c" -- for diagnostics only; the variant file format is TAB separated.
  std::string str() const;

  auto operator<=>(const Variant&) const = default;
  bool operator==(const Variant&) const = default;
};

struct VariantHash {
  std::size_t operator()(const Variant& v) const noexcept;
};

using VariantSet = std::set<Variant>;

struct EventInstance {
  Label activity;
  Timestamp timestamp;
};

/// Chronologically ordered, non-empty sequence of event instances of one case.
class Trace {
 public:
  // Throws InvalidInput when empty or when timestamps are not strictly increasing.
  Trace(std::string case_id, std::vector<EventInstance> events);

  const std::string& case_id() const noexcept { return case_id_; }
  const std::vector<EventInstance>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }

 private:
  std::string case_id_;
  std::vector<EventInstance> events_;
};

/// Recorded traces. Kept as a sequence: duplicate traces are meaningful.
struct EventLog {
  std::vector<Trace> traces;

  std::size_t size() const noexcept { return traces.size(); }
  bool empty() const noexcept { return traces.empty(); }
};

/// One variant per trace of the source log (a multiset, L*).
using VariantLog = std::vector<Variant>;

/// Distinct variants in first-occurrence order (L+).
class UniqueVariantLog {
 public:
  UniqueVariantLog() = default;
  explicit UniqueVariantLog(const std::vector<Variant>& variants);

  // Returns false when the variant was already present.
  bool insert(const Variant& v);
  bool contains(const Variant& v) const { return index_.count(v) != 0; }

  const std::vector<Variant>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const Variant& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

  VariantSet to_set() const { return VariantSet(items_.begin(), items_.end()); }

 private:
  std::vector<Variant> items_;
  std::unordered_set<Variant, VariantHash> index_;
};

struct VariantLogs {
  VariantLog lstar;
  UniqueVariantLog lplus;
};

struct HoldoutSplit {
  UniqueVariantLog train;
  UniqueVariantLog holdout;
};

Variant variant_of(const Trace& trace);

// Longest trace length; throws InvalidInput on an empty log.
std::size_t max_trace_len(const EventLog& log);

// Longest variant length of a non-empty collection.
std::size_t max_variant_len(const std::vector<Variant>& variants);
std::size_t max_variant_len(const VariantSet& variants);

VariantLogs build_variant_logs(const EventLog& log);

/// Seeded partition with |train| = ceil(fraction * |lplus|). The relative
/// first-occurrence order of lplus is preserved inside both halves.
HoldoutSplit split_holdout(const UniqueVariantLog& lplus, double fraction, std::uint64_t seed);

/// One trace per variant, events one second apart from a fixed epoch. The seed
/// only permutes trace order (and thus case ids).
EventLog synth_event_log(const VariantSet& variants, std::uint64_t seed);

/// Union of labels over all variants, sorted.
std::set<Label> alphabet_of(const std::vector<Variant>& variants);

// --- file formats ----------------------------------------------------------

// CSV with header `case_id,activity,timestamp`; rows may be in any order and are
// grouped by case id then sorted by timestamp. Timestamps are ISO-8601.
EventLog read_event_log_csv(std::istream& in);
void write_event_log_csv(std::ostream& out, const EventLog& log);

// One variant per line, labels separated by TAB.
std::vector<Variant> read_variants_tsv(std::istream& in);
void write_variants_tsv(std::ostream& out, const std::vector<Variant>& variants);
void write_variants_tsv(std::ostream& out, const VariantSet& variants);

Timestamp parse_iso8601(const std::string& text);
std::string format_iso8601(Timestamp ts);

}  // namespace avatar
