#pragma once

#include <stdexcept>
#include <string>

namespace predlab {

enum class Errc {
  invalid_argument = 1,
  parse_error = 2,
  unknown_experiment = 3,
  resource_limit = 4,
  undefined_conditional = 5,
  mixture_annihilated = 6,
  io_error = 7,
  not_applicable = 8,
  internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace predlab
