#include "core/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "core/chain.hpp"

namespace predlab {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& s, int64_t* out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, *out);
  return res.ec == std::errc() && res.ptr == e;
}

bool parse_real(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// split on top-level commas, respecting nested {..} [..] and quotes
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  bool quoted = false;
  std::string cur;
  for (char c : s) {
    if (quoted) {
      if (c == '"') quoted = false;
      cur.push_back(c);
      continue;
    }
    if (c == '"') quoted = true;
    if (c == '{' || c == '[') ++depth;
    if (c == '}' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

ConfigValue parse_value(const std::string& raw) {
  ConfigValue v;
  std::string s = trim(raw);
  v.raw = s;
  if (s.empty()) fail(Errc::parse_error, "empty value");
  if (s.front() == '[') {
    if (s.back() != ']') fail(Errc::parse_error, "unterminated list: " + s);
    v.type = ConfigValue::Type::list;
    for (const std::string& item : split_top_level(s.substr(1, s.size() - 2)))
      v.items.push_back(parse_value(item));
    return v;
  }
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(Errc::parse_error, "unterminated string: " + s);
    v.type = ConfigValue::Type::string;
    v.s = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.type = ConfigValue::Type::boolean;
    v.b = s == "true";
    return v;
  }
  if (parse_int(s, &v.i)) {
    v.type = ConfigValue::Type::integer;
    return v;
  }
  if (parse_real(s, &v.r)) {
    v.type = ConfigValue::Type::real;
    return v;
  }
  v.type = ConfigValue::Type::string;
  v.s = s;
  return v;
}

}  // namespace

double ConfigValue::as_real() const {
  if (type == Type::real) return r;
  if (type == Type::integer) return static_cast<double>(i);
  fail(Errc::parse_error, "expected a numeric value, got: " + to_text());
}

int64_t ConfigValue::as_int() const {
  if (type == Type::integer) return i;
  fail(Errc::parse_error, "expected an integer value, got: " + to_text());
}

std::string ConfigValue::to_text() const {
  switch (type) {
    case Type::integer: return std::to_string(i);
    case Type::real: {
      std::ostringstream os;
      os << r;
      return os.str();
    }
    case Type::boolean: return b ? "true" : "false";
    case Type::string: return s;
    case Type::list: {
      std::string out = "[";
      for (size_t j = 0; j < items.size(); ++j) {
        if (j) out += ", ";
        out += items[j].to_text();
      }
      return out + "]";
    }
  }
  return "";
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        fail(Errc::parse_error, "line " + std::to_string(lineno) + ": bad section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    size_t eq = std::string::npos;
    {
      int depth = 0;
      bool quoted = false;
      for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quoted) {
          if (c == '"') quoted = false;
          continue;
        }
        if (c == '"') quoted = true;
        else if (c == '{' || c == '[') ++depth;
        else if (c == '}' || c == ']') --depth;
        else if (c == '=' && depth == 0) {
          eq = i;
          break;
        }
      }
    }
    if (eq == std::string::npos)
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(Errc::parse_error, "line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = parse_value(s.substr(eq + 1));
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ConfigValue& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(Errc::invalid_argument, "missing config key: " + key);
  return it->second;
}

int64_t Config::get_int(const std::string& key, std::optional<int64_t> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(Errc::invalid_argument, "missing config key: " + key);
  }
  return get(key).as_int();
}

double Config::get_real(const std::string& key, std::optional<double> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(Errc::invalid_argument, "missing config key: " + key);
  }
  return get(key).as_real();
}

bool Config::get_bool(const std::string& key, std::optional<bool> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(Errc::invalid_argument, "missing config key: " + key);
  }
  const ConfigValue& v = get(key);
  if (v.type != ConfigValue::Type::boolean)
    fail(Errc::parse_error, key + ": expected true/false");
  return v.b;
}

std::string Config::get_string(const std::string& key,
                               std::optional<std::string> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(Errc::invalid_argument, "missing config key: " + key);
  }
  const ConfigValue& v = get(key);
  if (v.type == ConfigValue::Type::string) return v.s;
  return v.to_text();
}

std::vector<int64_t> Config::get_int_list(const std::string& key,
                                          std::optional<std::vector<int64_t>> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(Errc::invalid_argument, "missing config key: " + key);
  }
  const ConfigValue& v = get(key);
  if (v.type != ConfigValue::Type::list) fail(Errc::parse_error, key + ": expected a list");
  std::vector<int64_t> out;
  for (const auto& item : v.items) out.push_back(item.as_int());
  return out;
}

std::vector<double> Config::get_real_list(const std::string& key,
                                          std::optional<std::vector<double>> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(Errc::invalid_argument, "missing config key: " + key);
  }
  const ConfigValue& v = get(key);
  if (v.type != ConfigValue::Type::list) fail(Errc::parse_error, key + ": expected a list");
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(item.as_real());
  return out;
}

std::string Config::echo() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v.to_text() << "\n";
  return os.str();
}

// --- spec grammar ---------------------------------------------------------------

SpecCall parse_spec_call(const std::string& text) {
  std::string s = trim(text);
  size_t brace = s.find('{');
  if (brace == std::string::npos || s.back() != '}')
    fail(Errc::parse_error, "expected name{...}: " + text);
  SpecCall call;
  call.name = trim(s.substr(0, brace));
  std::string body = s.substr(brace + 1, s.size() - brace - 2);
  for (const std::string& part : split_top_level(body)) {
    size_t eq = part.find('=');
    if (eq == std::string::npos) fail(Errc::parse_error, "spec argument needs key=value: " + part);
    call.args[trim(part.substr(0, eq))] = parse_value(part.substr(eq + 1));
  }
  return call;
}

namespace {

const ConfigValue& spec_arg(const SpecCall& c, const std::string& key) {
  auto it = c.args.find(key);
  if (it == c.args.end())
    fail(Errc::parse_error, c.name + ": missing argument '" + key + "'");
  return it->second;
}

Seq spec_pattern(const SpecCall& c, const std::string& key, const Alphabet& a) {
  const ConfigValue& v = spec_arg(c, key);
  if (v.type == ConfigValue::Type::list) {
    Seq out;
    for (const auto& item : v.items) out.push_back(static_cast<Symbol>(item.as_int()));
    for (Symbol s : out) check_symbol(a, s);
    return out;
  }
  // raw text keeps leading zeros that the integer reading would drop
  if (v.type == ConfigValue::Type::string) return seq_from_string(v.s, a);
  return seq_from_string(v.raw, a);
}

}  // namespace

MeasurePtr build_measure_spec(const std::string& text) {
  SpecCall c = parse_spec_call(text);
  if (c.name == "bernoulli") return make_bernoulli(spec_arg(c, "p").as_real());
  if (c.name == "uniform")
    return make_uniform_iid(make_alphabet(static_cast<int>(spec_arg(c, "m").as_int())));
  if (c.name == "laplace") {
    int m = c.args.count("m") ? static_cast<int>(c.args.at("m").as_int()) : 2;
    return make_laplace(make_alphabet(m));
  }
  if (c.name == "kt") {
    int m = c.args.count("m") ? static_cast<int>(c.args.at("m").as_int()) : 2;
    return make_kt(make_alphabet(m));
  }
  if (c.name == "dirac") {
    int m = c.args.count("m") ? static_cast<int>(c.args.at("m").as_int()) : 2;
    Alphabet a = make_alphabet(m);
    Seq pattern = spec_pattern(c, "pattern", a);
    bool repeat = c.args.count("repeat") && c.args.at("repeat").b;
    if (repeat) return make_dirac_repeat(a, std::move(pattern));
    Symbol tail = c.args.count("tail") ? static_cast<Symbol>(c.args.at("tail").as_int()) : 0;
    return make_dirac(a, std::move(pattern), tail);
  }
  if (c.name == "markov") {
    int k = static_cast<int>(spec_arg(c, "k").as_int());
    Alphabet a{2};
    const ConfigValue& table = spec_arg(c, "table");
    if (table.type != ConfigValue::Type::list)
      fail(Errc::parse_error, "markov: table must be a list of P(0|ctx)");
    size_t nctx = static_cast<size_t>(1) << k;
    if (table.items.size() != nctx)
      fail(Errc::parse_error, "markov: table needs one entry per context (2^k)");
    std::vector<std::vector<double>> rows(nctx);
    for (size_t i = 0; i < nctx; ++i) {
      double p0 = table.items[i].as_real();
      rows[i] = {p0, 1.0 - p0};
    }
    std::optional<std::vector<double>> initial;
    if (c.args.count("start")) {
      const ConfigValue& st = c.args.at("start");
      if (st.type == ConfigValue::Type::list) {
        std::vector<double> init;
        for (const auto& item : st.items) init.push_back(item.as_real());
        initial = std::move(init);
      } else if (st.to_text() != "stationary") {
        fail(Errc::parse_error, "markov: start must be 'stationary' or an explicit law");
      }
    }
    return make_markov(a, k, std::move(rows), std::move(initial));
  }
  if (c.name == "chain") {
    ChainSpec spec;
    std::string variant = spec_arg(c, "variant").to_text();
    if (variant == "stationary-plus") spec.variant = ChainSpec::Variant::stationary_plus;
    else if (variant == "hidden-markov") spec.variant = ChainSpec::Variant::hidden_markov;
    else fail(Errc::parse_error, "chain: unknown variant " + variant);
    if (c.args.count("horizon"))
      spec.max_horizon = static_cast<int>(c.args.at("horizon").as_int());
    Seq pattern = spec_pattern(c, "pattern", Alphabet{2});
    Symbol tail = c.args.count("tail") ? static_cast<Symbol>(c.args.at("tail").as_int()) : 0;
    return make_chain_measure(spec, std::move(pattern), tail);
  }
  fail(Errc::parse_error, "unknown measure family: " + c.name);
}

ModelClass build_class_spec(const std::string& text) {
  SpecCall c = parse_spec_call(text);
  if (c.name == "bernoulli_grid")
    return build_bernoulli_grid(static_cast<int>(spec_arg(c, "r").as_int()));
  if (c.name == "markov_grid") {
    size_t cap = c.args.count("cap") ? static_cast<size_t>(c.args.at("cap").as_int())
                                     : kDefaultClassCap;
    return build_markov_grid(static_cast<int>(spec_arg(c, "K").as_int()),
                             static_cast<int>(spec_arg(c, "r").as_int()), cap);
  }
  if (c.name == "explicit") {
    const ConfigValue& specs = spec_arg(c, "specs");
    if (specs.type != ConfigValue::Type::list)
      fail(Errc::parse_error, "explicit: specs must be a list");
    ModelClass out;
    out.label = "explicit";
    for (const auto& item : specs.items) out.measures.push_back(build_measure_spec(item.to_text()));
    out.alphabet();  // validates consistency
    return out;
  }
  fail(Errc::parse_error, "unknown class family: " + c.name);
}

}  // namespace predlab
