#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vilt/rng.hpp"

namespace vilt {

/// Block-selection rule: which subset of {0,...,U-1} an iteration processes.
/// Every supported kind guarantees that each index is selected at least once
/// within any `window()` consecutive iterations:
///   cyclic           - singletons 0,1,...,U-1,0,...   (window U)
///   shuffled_cyclic  - a fresh permutation per epoch  (window 2U-1)
///   explicit_sets    - a user list repeated cyclically, coverage-checked
///                      against the declared window at construction.
class Schedule {
 public:
  enum class Kind { cyclic, shuffled_cyclic, explicit_sets };

  static Schedule cyclic(std::size_t universe);
  static Schedule shuffled_cyclic(std::size_t universe, std::uint64_t seed);
  static Schedule explicit_sets(std::size_t universe,
                                std::vector<std::vector<std::size_t>> sets,
                                std::size_t window);
  /// Everything every iteration: explicit [{0..U-1}] with window 1.
  static Schedule full(std::size_t universe);

  /// Selection for the next iteration. Valid until the following call.
  const std::vector<std::size_t>& next();

  Kind kind() const { return kind_; }
  std::size_t universe() const { return universe_; }
  std::size_t window() const { return window_; }

 private:
  Schedule(Kind k, std::size_t universe, std::size_t window, std::uint64_t seed)
      : kind_(k), universe_(universe), window_(window), rng_(seed) {}

  Kind kind_;
  std::size_t universe_;
  std::size_t window_;
  Rng rng_;
  std::vector<std::vector<std::size_t>> sets_;  // explicit payload
  std::vector<std::size_t> perm_;               // shuffled-cyclic epoch
  std::vector<std::size_t> current_;
  std::size_t cursor_ = 0;
};

/// Scans a finite selection history and returns the start of the first
/// length-`window` span whose union misses an index of {0..universe-1},
/// or nullopt when every complete window covers the universe.
std::optional<std::size_t> verify_coverage(
    std::size_t universe, std::size_t window,
    const std::vector<std::vector<std::size_t>>& history);

}  // namespace vilt
