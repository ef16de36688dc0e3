#include "rotfactor/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace rotfactor {

namespace {

__int128 gcd_wide(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits(__int128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t isqrt_exact(std::int64_t v, bool &ok) {
    if (v < 0) {
        ok = false;
        return 0;
    }
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
    while (r > 0 && static_cast<__int128>(r) * r > v) --r;
    while (static_cast<__int128>(r + 1) * (r + 1) <= v) ++r;
    ok = static_cast<__int128>(r) * r == v;
    return r;
}

} // namespace

Rational Rational::from_wide(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = gcd_wide(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (!fits(n) || !fits(d)) throw ArithmeticOverflow("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational Rational::operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

Rational operator+(const Rational &a, const Rational &b) {
    if (a.den_ == b.den_) return Rational::from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational &a, const Rational &b) { return a + (-b); }

Rational operator*(const Rational &a, const Rational &b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational &a, const Rational &b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto parse_int = [&](std::string_view s) {
        s = trim(s);
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
        }
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    std::int64_t d = parse_int(text.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), d);
}

bool Rational::is_perfect_square() const {
    bool ok_n = false;
    bool ok_d = false;
    isqrt_exact(num_, ok_n);
    isqrt_exact(den_, ok_d);
    return ok_n && ok_d;
}

Rational Rational::sqrt_exact() const {
    bool ok_n = false;
    bool ok_d = false;
    auto n = isqrt_exact(num_, ok_n);
    auto d = isqrt_exact(den_, ok_d);
    if (!ok_n || !ok_d) throw std::domain_error("rational is not a perfect square: " + to_string());
    return Rational(n, d);
}

} // namespace rotfactor
