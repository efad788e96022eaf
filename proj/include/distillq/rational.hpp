#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace distillq {

__extension__ using WideInt = __int128;

/// Exact positive-or-zero fraction in lowest terms. Used for production rates
/// so that integer-step scheduling never accumulates floating point drift.
class Rational {
public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  /// Accepts "p/q", an integer, or a finite decimal such as "0.25".
  static Rational parse(std::string_view text);

  [[nodiscard]] std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] std::int64_t den() const noexcept { return den_; }
  [[nodiscard]] double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  /// Always "p/q", also for whole numbers.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) noexcept {
    return static_cast<WideInt>(a.num_) * b.den_ <=>
           static_cast<WideInt>(b.num_) * a.den_;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

} // namespace distillq
