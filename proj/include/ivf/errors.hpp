#pragma once

#include <stdexcept>
#include <string>

#include "ivf/vec.hpp"

namespace ivf {

/// An iterate (or an integrated state) left the declared domain.
class DomainEscape : public std::runtime_error {
 public:
  DomainEscape(long index, Vec last, const std::string& what)
      : std::runtime_error(what), index_(index), last_(last) {}
  /// Iterate index at which the escape was detected (0 for non-iterate contexts).
  long index() const { return index_; }
  /// The offending state, in lifted coordinates.
  const Vec& last() const { return last_; }

 private:
  long index_;
  Vec last_;
};

/// Config or contract violation that a caller can fix.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ivf
