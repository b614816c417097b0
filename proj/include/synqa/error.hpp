#ifndef SYNQA_ERROR_HPP_
#define SYNQA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace synqa {

// Bad template file, run config, endpoint definition and the like. Raised
// before any work starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that disagree with each other, e.g. a run record whose question id
// is not in the eval set.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synqa

#endif  // SYNQA_ERROR_HPP_
