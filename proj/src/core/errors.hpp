#ifndef PHASEFILTER_ERRORS_HPP
#define PHASEFILTER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pf {

// Error categories, aligned with the CLI exit codes (parse -> 2, numeric -> 3).
enum class ErrorKind {
  invalid_argument,  // contract violation by the caller
  parse,             // malformed config / CSV / missing artifact
  numeric,           // ill-conditioned or non-finite numerical state
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorKind::invalid_argument, msg);
}
[[noreturn]] inline void throw_parse(const std::string& msg) {
  throw Error(ErrorKind::parse, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}

}  // namespace pf

#endif
