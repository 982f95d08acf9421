#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace skirental {

/// A number of skiing days: a finite nonnegative count or unbounded.
///
/// Unbounded is a distinct state rather than a large sentinel count, so
/// sums saturate to infinity instead of overflowing.
class Days {
 public:
  constexpr Days() noexcept = default;
  constexpr explicit Days(std::uint64_t count) noexcept : count_(count) {}

  static constexpr Days infinite() noexcept {
    Days d;
    d.infinite_ = true;
    return d;
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_finite() const noexcept { return !infinite_; }

  constexpr std::uint64_t count() const {
    if (infinite_) throw std::logic_error("Days::count() on an infinite day count");
    return count_;
  }

  friend constexpr Days operator+(Days a, Days b) {
    if (a.infinite_ || b.infinite_) return infinite();
    if (a.count_ > std::numeric_limits<std::uint64_t>::max() - b.count_)
      throw std::overflow_error("day count overflow");
    return Days{a.count_ + b.count_};
  }

  constexpr Days& operator+=(Days other) { return *this = *this + other; }

  /// Repeats a duration; zero repetitions of anything cover zero days.
  friend constexpr Days operator*(Days a, std::uint64_t times) {
    if (times == 0) return Days{};
    if (a.infinite_) return infinite();
    if (a.count_ != 0 && times > std::numeric_limits<std::uint64_t>::max() / a.count_)
      throw std::overflow_error("day count overflow");
    return Days{a.count_ * times};
  }

  friend constexpr bool operator==(Days a, Days b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.count_ == b.count_);
  }

  friend constexpr std::strong_ordering operator<=>(Days a, Days b) noexcept {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.count_ <=> b.count_;
  }

  std::string to_string() const { return infinite_ ? "inf" : std::to_string(count_); }

 private:
  std::uint64_t count_ = 0;
  bool infinite_ = false;
};

constexpr bool is_infinite(const Days& d) noexcept { return d.is_infinite(); }

}  // namespace skirental
