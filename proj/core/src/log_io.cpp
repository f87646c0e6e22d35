#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "avatar/error.hpp"
#include "avatar/log.hpp"

namespace avatar {
namespace {

bool read_digits(const std::string& s, std::size_t& pos, std::size_t count, int& value) {
  if (pos + count > s.size()) return false;
  value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    value = value * 10 + (c - '0');
  }
  pos += count;
  return true;
}

bool expect(const std::string& s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw InvalidInput("CSV line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Timestamp parse_iso8601(const std::string& text) {
  const std::string s = trim(text);
  auto fail = [&]() -> Timestamp { throw InvalidInput("invalid ISO-8601 timestamp: '" + text + "'"); };
  std::size_t pos = 0;
  int y, mo, d, h, mi, sec;
  if (!read_digits(s, pos, 4, y) || !expect(s, pos, '-') || !read_digits(s, pos, 2, mo) ||
      !expect(s, pos, '-') || !read_digits(s, pos, 2, d)) {
    return fail();
  }
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) return fail();
  ++pos;
  if (!read_digits(s, pos, 2, h) || !expect(s, pos, ':') || !read_digits(s, pos, 2, mi) ||
      !expect(s, pos, ':') || !read_digits(s, pos, 2, sec)) {
    return fail();
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return fail();

  long micros = 0;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    int digits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      if (digits < 6) micros = micros * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return fail();
    for (int i = digits; i < 6; ++i) micros *= 10;
  }

  long offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '+' ? 1 : -1;
      ++pos;
      int oh, om = 0;
      if (!read_digits(s, pos, 2, oh)) return fail();
      if (pos < s.size()) {
        expect(s, pos, ':');
        if (!read_digits(s, pos, 2, om)) return fail();
      }
      offset_minutes = sign * (oh * 60 + om);
    } else {
      return fail();
    }
  }
  if (pos != s.size()) return fail();

  Timestamp ts = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + microseconds{micros};
  return ts - minutes{offset_minutes};
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  auto rest = ts - day_point;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto mi = duration_cast<minutes>(rest);
  rest -= mi;
  const auto sec = duration_cast<seconds>(rest);
  rest -= sec;
  const long micros = static_cast<long>(rest.count());

  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lld", int(ymd.year()),
                        unsigned(ymd.month()), unsigned(ymd.day()), static_cast<long>(h.count()),
                        static_cast<long>(mi.count()), static_cast<long long>(sec.count()));
  if (micros != 0) n += std::snprintf(buf + n, sizeof buf - n, ".%06ld", micros);
  std::snprintf(buf + n, sizeof buf - n, "Z");
  return buf;
}

EventLog read_event_log_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InvalidInput("event log CSV: missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = split_csv_row(line, line_no);
  for (auto& h : header) h = trim(h);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidInput("event log CSV: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t case_col = column("case_id");
  const std::size_t act_col = column("activity");
  const std::size_t ts_col = column("timestamp");

  // std::map keeps case ids sorted, so trace order is canonical.
  std::map<std::string, std::vector<EventInstance>> cases;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_row(line, line_no);
    if (fields.size() != header.size()) {
      throw InvalidInput("event log CSV line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    Timestamp ts;
    try {
      ts = parse_iso8601(fields[ts_col]);
    } catch (const InvalidInput& e) {
      throw InvalidInput("event log CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    cases[fields[case_col]].push_back({fields[act_col], ts});
  }

  EventLog log;
  for (auto& [case_id, events] : cases) {
    std::stable_sort(events.begin(), events.end(),
                     [](const EventInstance& a, const EventInstance& b) { return a.timestamp < b.timestamp; });
    log.traces.emplace_back(case_id, std::move(events));
  }
  return log;
}

void write_event_log_csv(std::ostream& out, const EventLog& log) {
  out << "case_id,activity,timestamp\n";
  for (const auto& trace : log.traces) {
    for (const auto& e : trace.events()) {
      out << csv_escape(trace.case_id()) << ',' << csv_escape(e.activity) << ','
          << format_iso8601(e.timestamp) << '\n';
    }
  }
}

std::vector<Variant> read_variants_tsv(std::istream& in) {
  std::vector<Variant> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Variant v;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      std::string label = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
      if (label.empty()) {
        throw InvalidInput("variant file line " + std::to_string(line_no) + ": empty label");
      }
      v.labels.push_back(std::move(label));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    out.push_back(std::move(v));
  }
  return out;
}

void write_variants_tsv(std::ostream& out, const std::vector<Variant>& variants) {
  for (const auto& v : variants) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out << '\t';
      out << v[i];
    }
    out << '\n';
  }
}

void write_variants_tsv(std::ostream& out, const VariantSet& variants) {
  write_variants_tsv(out, std::vector<Variant>(variants.begin(), variants.end()));
}

}  // namespace avatar
