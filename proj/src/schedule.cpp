#include "vilt/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vilt {

Schedule Schedule::cyclic(std::size_t universe) {
  if (universe == 0) throw std::invalid_argument("schedule: empty universe");
  Schedule s(Kind::cyclic, universe, universe, 0);
  s.current_.resize(1);
  return s;
}

Schedule Schedule::shuffled_cyclic(std::size_t universe, std::uint64_t seed) {
  if (universe == 0) throw std::invalid_argument("schedule: empty universe");
  Schedule s(Kind::shuffled_cyclic, universe, 2 * universe - 1, seed);
  s.perm_.resize(universe);
  std::iota(s.perm_.begin(), s.perm_.end(), std::size_t{0});
  s.current_.resize(1);
  return s;
}

Schedule Schedule::explicit_sets(std::size_t universe,
                                 std::vector<std::vector<std::size_t>> sets,
                                 std::size_t window) {
  if (universe == 0) throw std::invalid_argument("schedule: empty universe");
  if (sets.empty()) throw std::invalid_argument("schedule: no selection sets");
  if (window == 0) throw std::invalid_argument("schedule: zero window");
  for (const auto& set : sets) {
    if (set.empty()) throw std::invalid_argument("schedule: empty selection set");
    for (std::size_t k : set) {
      if (k >= universe) {
        throw std::invalid_argument("schedule: index " + std::to_string(k) +
                                    " outside universe of " +
                                    std::to_string(universe));
      }
    }
  }
  // Coverage check over the cyclic repetition of the list: every window of
  // `window` consecutive selections must reach the whole universe. A window
  // longer than the list sees every set, so the scan is capped at the
  // list length.
  const std::size_t m = sets.size();
  const std::size_t scan = std::min(window, m);
  for (std::size_t start = 0; start < m; ++start) {
    std::vector<bool> seen(universe, false);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < scan && covered < universe; ++i) {
      for (std::size_t k : sets[(start + i) % m]) {
        if (!seen[k]) {
          seen[k] = true;
          ++covered;
        }
      }
    }
    if (covered < universe) {
      throw std::invalid_argument(
          "schedule: window starting at iteration " + std::to_string(start) +
          " does not select every index");
    }
  }
  Schedule s(Kind::explicit_sets, universe, window, 0);
  s.sets_ = std::move(sets);
  return s;
}

Schedule Schedule::full(std::size_t universe) {
  std::vector<std::size_t> all(universe);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return explicit_sets(universe, {std::move(all)}, 1);
}

const std::vector<std::size_t>& Schedule::next() {
  switch (kind_) {
    case Kind::cyclic:
      current_[0] = cursor_;
      cursor_ = (cursor_ + 1) % universe_;
      return current_;
    case Kind::shuffled_cyclic:
      if (cursor_ == 0) rng_.shuffle(std::span<std::size_t>(perm_));
      current_[0] = perm_[cursor_];
      cursor_ = (cursor_ + 1) % universe_;
      return current_;
    case Kind::explicit_sets: {
      const auto& set = sets_[cursor_];
      cursor_ = (cursor_ + 1) % sets_.size();
      return set;
    }
  }
  throw std::logic_error("schedule: bad kind");
}

std::optional<std::size_t> verify_coverage(
    std::size_t universe, std::size_t window,
    const std::vector<std::vector<std::size_t>>& history) {
  if (history.size() < window) return std::nullopt;
  for (std::size_t start = 0; start + window <= history.size(); ++start) {
    std::vector<bool> seen(universe, false);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < window && covered < universe; ++i) {
      for (std::size_t k : history[start + i]) {
        if (k < universe && !seen[k]) {
          seen[k] = true;
          ++covered;
        }
      }
    }
    if (covered < universe) return start;
  }
  return std::nullopt;
}

}  // namespace vilt
