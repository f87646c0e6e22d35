#include <sstream>

#include <gtest/gtest.h>

#include "avatar/error.hpp"
#include "avatar/log.hpp"

using namespace avatar;

namespace {

Trace make_trace(const std::string& id, std::initializer_list<const char*> labels) {
  std::vector<EventInstance> events;
  Timestamp t = parse_iso8601("2021-03-01T08:00:00Z");
  for (const char* l : labels) {
    events.push_back({l, t});
    t += std::chrono::minutes(5);
  }
  return Trace(id, std::move(events));
}

}  // namespace

TEST(Variant, OrderingIsLexicographicOnLabels) {
  EXPECT_LT((Variant{"a", "b"}), (Variant{"a", "c"}));
  EXPECT_LT((Variant{"a"}), (Variant{"a", "a"}));
  EXPECT_EQ((Variant{"x", "y"}).str(), "x,y");
}

TEST(Trace, RejectsEmptyAndUnorderedEvents) {
  EXPECT_THROW(Trace("c", {}), InvalidInput);
  const Timestamp t = parse_iso8601("2021-03-01T08:00:00Z");
  EXPECT_THROW(Trace("c", {{"a", t}, {"b", t}}), InvalidInput);
}

TEST(VariantLogs, DuplicatesCollapseInFirstOccurrenceOrder) {
  EventLog log;
  log.traces.push_back(make_trace("1", {"a", "b", "c"}));
  log.traces.push_back(make_trace("2", {"a", "c"}));
  log.traces.push_back(make_trace("3", {"a", "b", "c"}));
  const auto logs = build_variant_logs(log);
  ASSERT_EQ(logs.lstar.size(), 3u);
  ASSERT_EQ(logs.lplus.size(), 2u);
  EXPECT_EQ(logs.lplus[0], (Variant{"a", "b", "c"}));
  EXPECT_EQ(logs.lplus[1], (Variant{"a", "c"}));
  EXPECT_EQ(max_trace_len(log), 3u);
  EXPECT_THROW(build_variant_logs(EventLog{}), InvalidInput);
  EXPECT_THROW(max_trace_len(EventLog{}), InvalidInput);
}

TEST(UniqueVariantLog, InsertReportsNovelty) {
  UniqueVariantLog u;
  EXPECT_TRUE(u.insert({"a"}));
  EXPECT_FALSE(u.insert({"a"}));
  EXPECT_TRUE(u.contains({"a"}));
  EXPECT_FALSE(u.contains({"b"}));
}

TEST(SplitHoldout, SizesAndDisjointness) {
  std::vector<Variant> vs;
  for (int i = 0; i < 10; ++i) vs.push_back({"v" + std::to_string(i)});
  const UniqueVariantLog lplus(vs);
  const auto split = split_holdout(lplus, 0.9, 3);
  EXPECT_EQ(split.train.size(), 9u);
  EXPECT_EQ(split.holdout.size(), 1u);
  for (const auto& v : split.holdout) EXPECT_FALSE(split.train.contains(v));

  // ceil(0.99 * 10) = 10 would leave nothing to hold out.
  EXPECT_EQ(split_holdout(lplus, 0.99, 3).holdout.size(), 1u);
  EXPECT_THROW(split_holdout(UniqueVariantLog({{"a"}}), 0.5, 1), InvalidInput);
  EXPECT_THROW(split_holdout(lplus, 1.0, 1), InvalidInput);
}

TEST(SplitHoldout, SeededAndOrderPreserving) {
  std::vector<Variant> vs;
  for (int i = 0; i < 20; ++i) vs.push_back({"v" + std::to_string(i)});
  const UniqueVariantLog lplus(vs);
  const auto a = split_holdout(lplus, 0.7, 11);
  const auto b = split_holdout(lplus, 0.7, 11);
  EXPECT_EQ(a.train.items(), b.train.items());
  for (std::size_t i = 1; i < a.train.size(); ++i) {
    EXPECT_LT(std::stoi(a.train[i - 1][0].substr(1)), std::stoi(a.train[i][0].substr(1)));
  }
}

TEST(SynthEventLog, OneTracePerVariantRoundTrips) {
  const VariantSet vs{{"a", "b"}, {"c"}, {"a", "a", "d"}};
  const auto log = synth_event_log(vs, 5);
  ASSERT_EQ(log.size(), 3u);
  const auto logs = build_variant_logs(log);
  EXPECT_EQ(logs.lplus.to_set(), vs);
  EXPECT_THROW(synth_event_log({}, 1), InvalidInput);
}

TEST(Iso8601, ParsesAndFormats) {
  const auto t = parse_iso8601("2020-02-29T23:59:58.250Z");
  EXPECT_EQ(format_iso8601(t), "2020-02-29T23:59:58.250000Z");
  EXPECT_EQ(format_iso8601(parse_iso8601("2020-01-01 00:00:00")), "2020-01-01T00:00:00Z");
  EXPECT_THROW(parse_iso8601("2020-13-01T00:00:00"), InvalidInput);
  EXPECT_THROW(parse_iso8601("yesterday"), InvalidInput);
}

TEST(EventLogCsv, GroupsByCaseAndSortsByTime) {
  std::istringstream in(
      "case_id,activity,timestamp\n"
      "c2,x,2021-01-01T00:00:02Z\n"
      "c1,b,2021-01-01T00:00:05Z\n"
      "c1,a,2021-01-01T00:00:01Z\n"
      "c2,y,2021-01-01T00:00:03Z\n");
  const auto log = read_event_log_csv(in);
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(variant_of(log.traces[0]), (Variant{"a", "b"}));
  EXPECT_EQ(variant_of(log.traces[1]), (Variant{"x", "y"}));

  std::ostringstream out;
  write_event_log_csv(out, log);
  std::istringstream again(out.str());
  const auto log2 = read_event_log_csv(again);
  EXPECT_EQ(build_variant_logs(log2).lstar, build_variant_logs(log).lstar);
}

TEST(EventLogCsv, ReportsMissingColumnsAndBadRows) {
  std::istringstream no_ts("case_id,activity\nc,a\n");
  EXPECT_THROW(read_event_log_csv(no_ts), InvalidInput);
  std::istringstream short_row("case_id,activity,timestamp\nc,a\n");
  EXPECT_THROW(read_event_log_csv(short_row), InvalidInput);
}

TEST(VariantTsv, RoundTrip) {
  const std::vector<Variant> vs{{"a", "b"}, {"c"}};
  std::ostringstream out;
  write_variants_tsv(out, vs);
  EXPECT_EQ(out.str(), "a\tb\nc\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_variants_tsv(in), vs);
  std::istringstream bad("a\t\tb\n");
  EXPECT_THROW(read_variants_tsv(bad), InvalidInput);
}
