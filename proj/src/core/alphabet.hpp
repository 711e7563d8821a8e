#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/errors.hpp"

namespace predlab {

using Symbol = int;
using Seq = std::vector<Symbol>;
using SeqView = std::span<const Symbol>;

struct Alphabet {
  int size = 2;

  // M, the per-symbol information ceiling in bits.
  double bits() const { return std::log2(static_cast<double>(size)); }

  bool operator==(const Alphabet&) const = default;
};

inline Alphabet make_alphabet(int size) {
  if (size < 2) fail(Errc::invalid_argument, "alphabet size must be >= 2");
  return Alphabet{size};
}

inline void check_symbol(const Alphabet& a, Symbol s) {
  if (s < 0 || s >= a.size) fail(Errc::invalid_argument, "symbol out of alphabet range");
}

inline Seq seq_from_string(std::string_view text, const Alphabet& a = Alphabet{2}) {
  Seq out;
  out.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '9') fail(Errc::parse_error, "sequence string must be digits");
    Symbol s = c - '0';
    check_symbol(a, s);
    out.push_back(s);
  }
  return out;
}

inline std::string seq_to_string(SeqView x) {
  std::string s;
  s.reserve(x.size());
  for (Symbol a : x) s.push_back(static_cast<char>('0' + (a % 10)));
  return s;
}

// |X|^n, guarded against the enumeration cap.
inline uint64_t cell_count(const Alphabet& a, int n, uint64_t cap) {
  uint64_t c = 1;
  for (int i = 0; i < n; ++i) {
    c *= static_cast<uint64_t>(a.size);
    if (c > cap) fail(Errc::resource_limit, "enumeration over X^n exceeds the configured cap");
  }
  return c;
}

// Word <-> integer code, most significant symbol first.
inline uint64_t word_code(SeqView x, int base) {
  uint64_t c = 0;
  for (Symbol s : x) c = c * static_cast<uint64_t>(base) + static_cast<uint64_t>(s);
  return c;
}

inline Seq word_from_code(uint64_t code, int length, int base) {
  Seq x(static_cast<size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    x[static_cast<size_t>(i)] = static_cast<Symbol>(code % static_cast<uint64_t>(base));
    code /= static_cast<uint64_t>(base);
  }
  return x;
}

}  // namespace predlab
