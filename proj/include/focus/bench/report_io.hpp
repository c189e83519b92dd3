#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "focus/bench/evaluate.hpp"

namespace focus::bench {

inline constexpr int kFormatVersion = 1;

// %.17g; non-finite values become JSON null / empty CSV cells.
std::string format_number(double v);

// One flat-or-nested JSON object, keys kept in insertion order.
class JsonRecord {
 public:
  JsonRecord& add(std::string_view key, double value);
  JsonRecord& add(std::string_view key, std::int64_t value);
  JsonRecord& add(std::string_view key, std::size_t value);
  JsonRecord& add(std::string_view key, int value) { return add(key, static_cast<std::int64_t>(value)); }
  JsonRecord& add(std::string_view key, bool value);
  JsonRecord& add(std::string_view key, std::string_view value);
  JsonRecord& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  JsonRecord& add(std::string_view key, const std::vector<double>& values);
  JsonRecord& add(std::string_view key, const JsonRecord& nested);

  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_escape(std::string_view s);

// Summary fields of a report (no per-sample outcomes).
JsonRecord report_record(const EvalReport& report);

// Flat CSV of report summaries; `prefix_header` / `prefix_values` name and
// fill leading columns (for example the learning rate).
std::string report_csv_header(std::string_view prefix_header = {});
std::string report_csv_row(const EvalReport& report, std::string_view prefix_values = {});

// label,original,refined,delta12,diverged,result per evaluated sample.
void write_outcomes_csv(std::ostream& out, const EvalReport& report);

std::string_view to_string(SampleResult result);

}  // namespace focus::bench
