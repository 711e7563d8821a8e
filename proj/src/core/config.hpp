#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/mixture.hpp"

namespace predlab {

// Flat, sectioned key-value configuration:
//
//   # comment
//   experiment = mixture-bound
//   seed = 1
//   [params]
//   class = bernoulli_grid{r=10}
//   horizons = [4, 8]
//
// Section keys are addressed as "section.key". Values are typed scalars
// (int, real, bool, string) or an inline list of scalars.
struct ConfigValue {
  enum class Type { integer, real, boolean, string, list };
  Type type = Type::string;
  int64_t i = 0;
  double r = 0.0;
  bool b = false;
  std::string s;
  std::string raw;  // source text as written (keeps leading zeros in patterns)
  std::vector<ConfigValue> items;

  double as_real() const;
  int64_t as_int() const;
  std::string to_text() const;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const ConfigValue& get(const std::string& key) const;

  int64_t get_int(const std::string& key, std::optional<int64_t> fallback = std::nullopt) const;
  double get_real(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
  std::string get_string(const std::string& key, std::optional<std::string> fallback = {}) const;
  std::vector<int64_t> get_int_list(const std::string& key,
                                    std::optional<std::vector<int64_t>> fallback = {}) const;
  std::vector<double> get_real_list(const std::string& key,
                                    std::optional<std::vector<double>> fallback = {}) const;

  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }
  std::string echo() const;  // canonical round-trippable text

 private:
  std::map<std::string, ConfigValue> values_;
};

// Measure / class specification grammar: name{key=value, ...}.
// Families: bernoulli{p}, uniform{m}, laplace{m}, kt{m},
//           dirac{pattern, tail, repeat}, markov{k, table, start},
//           chain{variant, pattern, tail, horizon}.
// Classes:  bernoulli_grid{r}, markov_grid{K, r, cap}, explicit{specs=[...]}.
struct SpecCall {
  std::string name;
  std::map<std::string, ConfigValue> args;
};

SpecCall parse_spec_call(const std::string& text);
MeasurePtr build_measure_spec(const std::string& text);
ModelClass build_class_spec(const std::string& text);

}  // namespace predlab
