#include "distillq/rational.hpp"

#include "distillq/error.hpp"

#include <charconv>
#include <limits>
#include <numeric>

namespace distillq {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw InvalidConfig("not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) {
    throw InvalidConfig("rational with zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::parse(std::string_view text) {
  const auto whole = text;
  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return {parse_int(trim(text.substr(0, slash)), whole),
            parse_int(trim(text.substr(slash + 1)), whole)};
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto int_part = text.substr(0, dot);
    const auto frac_part = text.substr(dot + 1);
    if (frac_part.size() > 15 || frac_part.empty()) {
      throw InvalidConfig("decimal rate needs 1..15 fraction digits: '" +
                          std::string(whole) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) {
      scale *= 10;
    }
    const bool negative = !int_part.empty() && int_part.front() == '-';
    const auto ip = int_part.empty() || int_part == "-" ? 0
                                                        : parse_int(int_part, whole);
    const auto fp = parse_int(frac_part, whole);
    if (ip > std::numeric_limits<std::int64_t>::max() / scale - 1) {
      throw InvalidConfig("rate out of range: '" + std::string(whole) + "'");
    }
    const auto magnitude = (ip < 0 ? -ip : ip) * scale + fp;
    return {negative ? -magnitude : magnitude, scale};
  }
  return {parse_int(text, whole), 1};
}

std::string Rational::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

} // namespace distillq
