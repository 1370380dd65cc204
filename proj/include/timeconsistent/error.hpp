#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tc {

enum class ErrorKind {
  Domain,
  Kink,
  Divergence,
  NoEquilibrium,
  NonConvergence,
  InadmissibleIterate,
  WindowViolation,
  Diagnostic,
  Config,
};

const char* to_string(ErrorKind kind);

// Every error message is prefixed with the module that raised it so the CLI
// can report "module: violated precondition" without extra bookkeeping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what),
        kind_(kind),
        module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string module, const std::string& what,
                      std::vector<double> residual_history)
      : Error(ErrorKind::NonConvergence, std::move(module), what),
        history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept {
    return history_;
  }
  double last_residual() const {
    return history_.empty() ? 0.0 : history_.back();
  }

 private:
  std::vector<double> history_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& module,
                              const std::string& what) {
  throw Error(kind, module, what);
}

// Hot paths call this; keep the success branch free of string construction.
inline void require(bool cond, const char* module, const char* what) {
  if (!cond) throw Error(ErrorKind::Domain, module, what);
}
inline void require(bool cond, const std::string& module,
                    const std::string& what) {
  if (!cond) throw Error(ErrorKind::Domain, module, what);
}

}  // namespace tc
