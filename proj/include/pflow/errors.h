#ifndef PFLOW_ERRORS_H_
#define PFLOW_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class KernelDegenerate : public Error {
 public:
  using Error::Error;
};

// Forward message with no mass left to propagate.
class DeadFlow : public Error {
 public:
  using Error::Error;
};

class InvalidGoal : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  using Error::Error;
};

class NoFeasiblePath : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace pflow

#endif  // PFLOW_ERRORS_H_
