#pragma once

#include <stdexcept>
#include <string>

namespace mzf {

/// Invalid user or library configuration (bad modulation order, empty SNR list, ...).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A matrix that has to be (numerically) full rank is not.
class RankError : public std::runtime_error {
 public:
  RankError(const std::string& what, int index) : std::runtime_error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// An exhaustive search was asked to enumerate more points than its guard allows.
class SearchSpaceError : public std::runtime_error {
 public:
  SearchSpaceError(const std::string& what, double points)
      : std::runtime_error(what), points_(points) {}
  double points() const noexcept { return points_; }

 private:
  double points_;
};

}  // namespace mzf
