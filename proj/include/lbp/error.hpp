#pragma once

#include <stdexcept>
#include <string>

namespace lbp {

/// Base class for every error raised by the library. `kind()` is the stable,
/// machine-readable name written into batch error summaries.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define LBP_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                         \
  public:                                                             \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

LBP_DEFINE_ERROR(SchemaError)
LBP_DEFINE_ERROR(BoundsError)
LBP_DEFINE_ERROR(SyncError)
LBP_DEFINE_ERROR(OrientationError)
LBP_DEFINE_ERROR(MissingPlayerError)
LBP_DEFINE_ERROR(EmptyOpponentsError)
LBP_DEFINE_ERROR(DegeneratePassError)
LBP_DEFINE_ERROR(PlanInfeasibleError)
LBP_DEFINE_ERROR(UnknownMetricError)
LBP_DEFINE_ERROR(MissingInputError)
LBP_DEFINE_ERROR(ConfigError)

#undef LBP_DEFINE_ERROR

}  // namespace lbp
