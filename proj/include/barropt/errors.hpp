#pragma once

#include <stdexcept>
#include <string>

namespace barropt {

struct InvalidModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidReward : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidBarriers : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidPush : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidPair : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OutOfRegime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct UnsupportedModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnboundedSearch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSignChange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyD : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MatchingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace barropt
