// Error taxonomy shared by the library and the CLI.
//
// Every throw carries one of three kinds; the CLI maps them to process
// exit codes (parse/schema = 2, numerical = 3, precondition = 4).
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace loewner {

enum class ErrorKind {
  Parse = 2,        // malformed input files, schema violations
  Numerical = 3,    // rank/conditioning failures discovered mid-computation
  Precondition = 4, // caller handed in data that violates a documented contract
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string name, const std::string& detail)
      : std::runtime_error(name + ": " + detail),
        kind_(kind),
        name_(std::move(name)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int exit_code() const { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
  std::string name_;
};

[[noreturn]] inline void throw_parse(const std::string& name,
                                     const std::string& detail) {
  throw Error(ErrorKind::Parse, name, detail);
}
[[noreturn]] inline void throw_numerical(const std::string& name,
                                         const std::string& detail) {
  throw Error(ErrorKind::Numerical, name, detail);
}
[[noreturn]] inline void throw_precondition(const std::string& name,
                                            const std::string& detail) {
  throw Error(ErrorKind::Precondition, name, detail);
}

}  // namespace loewner
