#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rotfactor {

struct ArithmeticOverflow : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Exact rational number on 64-bit integers, always in lowest terms with a
// positive denominator. Intermediate products use 128-bit integers and every
// result is range-checked; overflow throws rather than wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Largest integer <= value.
    std::int64_t floor() const;
    // value - floor(value), in [0, 1).
    Rational frac() const { return *this - Rational(floor()); }

    Rational operator-() const;
    friend Rational operator+(const Rational &a, const Rational &b);
    friend Rational operator-(const Rational &a, const Rational &b);
    friend Rational operator*(const Rational &a, const Rational &b);
    friend Rational operator/(const Rational &a, const Rational &b);
    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }

    friend bool operator==(const Rational &a, const Rational &b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);

    // "p/q" in lowest terms, sign on the numerator; integers print as "p".
    std::string to_string() const;
    // Accepts "p", "-p", "p/q".
    static Rational parse(std::string_view text);

    // Exact square root when both numerator and denominator are perfect squares.
    bool is_perfect_square() const;
    Rational sqrt_exact() const;

private:
    static Rational from_wide(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace rotfactor
