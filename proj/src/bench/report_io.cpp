#include "focus/bench/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace focus::bench {

std::string format_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

JsonRecord& JsonRecord::add(std::string_view key, double value) {
  const std::string n = format_number(value);
  fields_.emplace_back(key, n.empty() ? "null" : n);
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view key, std::int64_t value) {
  fields_.emplace_back(key, std::to_string(value));
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view key, std::size_t value) {
  fields_.emplace_back(key, std::to_string(value));
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view key, bool value) {
  fields_.emplace_back(key, value ? "true" : "false");
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view key, std::string_view value) {
  fields_.emplace_back(key, json_escape(value));
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view key, const std::vector<double>& values) {
  std::string arr = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string n = format_number(values[i]);
    arr += (i ? "," : "") + (n.empty() ? std::string("null") : n);
  }
  fields_.emplace_back(key, arr + "]");
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view key, const JsonRecord& nested) {
  fields_.emplace_back(key, nested.str());
  return *this;
}

std::string JsonRecord::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i) out += ',';
    out += json_escape(fields_[i].first) + ':' + fields_[i].second;
  }
  return out + "}";
}

std::string_view to_string(SampleResult result) {
  switch (result) {
    case SampleResult::kGated:
      return "gated";
    case SampleResult::kUnchanged:
      return "unchanged";
    case SampleResult::kFixed:
      return "fixed";
    case SampleResult::kBroken:
      return "broken";
    case SampleResult::kSwitchedWrong:
      return "switched_wrong";
  }
  return "unknown";
}

JsonRecord report_record(const EvalReport& r) {
  JsonRecord focus;
  focus.add("eta", r.config.eta)
      .add("iterations", r.config.iterations)
      .add("n_f", r.config.focus_count)
      .add("d12", r.config.gap_threshold)
      .add("loss", refine::to_string(r.config.loss))
      .add("weighted", r.config.weighted)
      .add("clip_norm", r.config.clip_norm);
  JsonRecord rec;
  rec.add("focus", focus)
      .add("n_total", r.n_total)
      .add("n_uncertain", r.n_uncertain)
      .add("n_evaluated", r.n_evaluated)
      .add("empty", r.empty())
      .add("fraction_uncertain", r.fraction_uncertain)
      .add("acc_base", r.acc_base)
      .add("acc_opt", r.acc_opt)
      .add("delta_acc", r.delta_acc)
      .add("gated", r.gated)
      .add("unchanged", r.unchanged)
      .add("changed", r.changed)
      .add("fixed", r.fixed)
      .add("broken", r.broken)
      .add("diverged", r.diverged);
  return rec;
}

std::string report_csv_header(std::string_view prefix_header) {
  std::string h(prefix_header);
  if (!h.empty()) h += ',';
  return h +
         "loss,weighted,eta,iterations,n_f,d12,n_total,n_uncertain,n_evaluated,fraction_uncertain,"
         "acc_base,acc_opt,delta_acc,gated,unchanged,changed,fixed,broken,diverged";
}

std::string report_csv_row(const EvalReport& r, std::string_view prefix_values) {
  std::string row(prefix_values);
  if (!row.empty()) row += ',';
  row += std::string(refine::to_string(r.config.loss)) + ',' + (r.config.weighted ? "1" : "0") + ',' +
         format_number(r.config.eta) + ',' + std::to_string(r.config.iterations) + ',' +
         std::to_string(r.config.focus_count) + ',' + format_number(r.config.gap_threshold) + ',' +
         std::to_string(r.n_total) + ',' + std::to_string(r.n_uncertain) + ',' +
         std::to_string(r.n_evaluated) + ',' + format_number(r.fraction_uncertain) + ',' +
         format_number(r.acc_base) + ',' + format_number(r.acc_opt) + ',' + format_number(r.delta_acc) +
         ',' + std::to_string(r.gated) + ',' + std::to_string(r.unchanged) + ',' +
         std::to_string(r.changed) + ',' + std::to_string(r.fixed) + ',' + std::to_string(r.broken) +
         ',' + std::to_string(r.diverged);
  return row;
}

void write_outcomes_csv(std::ostream& out, const EvalReport& report) {
  out << "index,label,original,refined,delta12,diverged,result\n";
  for (const auto& s : report.outcomes) {
    out << s.index << ',' << s.label << ',' << s.original << ',' << s.refined << ','
        << format_number(s.delta12) << ',' << (s.diverged ? 1 : 0) << ',' << to_string(s.result) << '\n';
  }
}

}  // namespace focus::bench
