#pragma once

#include <stdexcept>
#include <string>

namespace squidharm {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
  invalid_argument = 1,
  config = 2,
  solver = 3,
  no_convergence = 4,
  degenerate_data = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& what) : Error(ErrorKind::solver, what) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::no_convergence, what) {}
};
struct DegenerateDataError : Error {
  explicit DegenerateDataError(const std::string& what) : Error(ErrorKind::degenerate_data, what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace squidharm
