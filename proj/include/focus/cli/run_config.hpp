#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "focus/bench/benchmark.hpp"
#include "focus/bench/evaluate.hpp"
#include "focus/bench/report_io.hpp"
#include "focus/refine/focus.hpp"

namespace focus::cli {

// Unknown key, unparsable value or out-of-range value. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyInfo {
  std::string name;
  std::string default_value;
  std::string help;
};

// Every accepted key, in the order used for echoing.
const std::vector<KeyInfo>& known_keys();

// Resolved key/value settings for one command.
class RunConfig {
 public:
  RunConfig();

  // Throws ConfigError for unknown keys.
  void set(std::string_view key, std::string value);
  const std::string& raw(std::string_view key) const;

  double real(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  std::uint64_t seed() const;
  bool flag(std::string_view key) const;
  std::vector<double> reals(std::string_view key) const;
  std::vector<int> ints(std::string_view key) const;
  std::vector<std::size_t> counts(std::string_view key) const;
  std::vector<std::string> words(std::string_view key) const;

  // Parses and range-checks every key.
  void validate() const;

  bench::JsonRecord echo() const;

  bench::BenchmarkSpec benchmark_spec() const;
  refine::FocusConfig focus_config() const;
  bench::EvalOptions eval_options() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// `key = value` lines; blank lines and text after `#` are ignored. Values
// override those already in `base`.
RunConfig parse_config_text(std::istream& in, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

}  // namespace focus::cli
