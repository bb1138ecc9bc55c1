#ifndef SCSPARC_ERRORS_HPP
#define SCSPARC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scsparc {

// Error categories mirror the status codes of the C API.
enum class ErrorCode {
  param = 2,       // invalid argument / configuration
  experiment = 3,  // too many failed trials, bad experiment setup
  numeric = 4,     // quadrature / root finding / overflow failure
  resource = 5,    // memory estimate above the configured cap
  diverged = 6,    // non-finite decoder iterate
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct ParamError : Error {
  explicit ParamError(const std::string& what) : Error(ErrorCode::param, what) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};
struct ResourceError : Error {
  explicit ResourceError(const std::string& what) : Error(ErrorCode::resource, what) {}
};
struct DivergedError : Error {
  explicit DivergedError(const std::string& what) : Error(ErrorCode::diverged, what) {}
};
struct ExperimentError : Error {
  explicit ExperimentError(const std::string& what) : Error(ErrorCode::experiment, what) {}
};

}  // namespace scsparc

#endif
