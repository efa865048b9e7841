#pragma once

#include <stdexcept>

namespace grasplog {

/// File system or format failure, carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A generated artifact broke one of its own invariants.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace grasplog
