#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rotfactor/point.hpp"
#include "rotfactor/rational.hpp"

namespace rotfactor {

// Float-path tolerance for equality and zero tests.
inline constexpr double kFloatTolerance = 1e-12;

// A real coordinate, either exact (rational) or binary64.
class Scalar {
public:
    Scalar() : value_(Rational(0)) {}
    Scalar(Rational r) : value_(r) {} // NOLINT(google-explicit-constructor)
    Scalar(double d) : value_(d) {}   // NOLINT(google-explicit-constructor)

    bool is_exact() const { return std::holds_alternative<Rational>(value_); }
    const Rational &exact() const { return std::get<Rational>(value_); }
    double to_double() const;

    // Reduction into [0, 1). Exact on the rational path.
    Scalar frac() const;
    bool is_zero() const;

    friend Scalar operator+(const Scalar &a, const Scalar &b);
    friend Scalar operator*(std::int64_t n, const Scalar &s);

    friend bool operator==(const Scalar &a, const Scalar &b) { return a.value_ == b.value_; }

    // "p/q" for rationals, shortest round-trip decimal for floats.
    std::string to_string() const;
    // Accepts "p/q" or an integer (exact) or a decimal literal (float).
    static Scalar parse(std::string_view text);

private:
    std::variant<Rational, double> value_;
};

class ThetaVector {
public:
    ThetaVector() = default;
    explicit ThetaVector(std::vector<Scalar> comps) : comps_(std::move(comps)) {}
    static ThetaVector zero(int d) { return ThetaVector(std::vector<Scalar>(static_cast<std::size_t>(d))); }
    // Comma separated components, e.g. "1/4, 1/3".
    static ThetaVector parse(std::string_view text);

    int dim() const { return static_cast<int>(comps_.size()); }
    const Scalar &operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }
    const std::vector<Scalar> &components() const { return comps_; }
    bool is_exact() const;
    bool is_zero() const;
    std::string to_string() const;

    friend bool operator==(const ThetaVector &, const ThetaVector &) = default;

private:
    std::vector<Scalar> comps_;
};

// Point of the k-torus with every component in [0, 1).
class TorusPoint {
public:
    TorusPoint() = default;
    explicit TorusPoint(std::vector<Scalar> comps);

    int k() const { return static_cast<int>(comps_.size()); }
    const Scalar &operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }
    const std::vector<Scalar> &components() const { return comps_; }
    bool is_exact() const;
    std::string to_string() const;

    friend bool operator==(const TorusPoint &, const TorusPoint &) = default;

private:
    std::vector<Scalar> comps_;
};

// Distance to 0 on the torus. `squared` is present on the exact path.
struct TorusNorm {
    std::optional<Rational> squared;
    double value = 0.0;

    bool is_exact() const { return squared.has_value(); }
    bool is_zero() const { return squared ? squared->is_zero() : value <= kFloatTolerance; }
    // The distance itself when it is rational (always for k = 1 on the exact path).
    std::optional<Rational> exact_value() const;
    std::string to_string() const;
};

// Which rotation the analysis targets: one circle or the product torus.
enum class TorusKind { One, Full };

int torus_dim(TorusKind kind, int d);

// <theta, p> mod 1.
TorusPoint c_map_1(const ThetaVector &theta, const Point &p);
// (theta_i * p_i mod 1)_i.
TorusPoint c_map_d(const ThetaVector &theta, const Point &p);
TorusPoint c_map(TorusKind kind, const ThetaVector &theta, const Point &p);

TorusNorm torus_distance(const TorusPoint &t);

// Componentwise addition mod 1.
TorusPoint torus_add(const TorusPoint &a, const TorusPoint &b);

// a <= b for torus norms; exact when both are exact.
bool norm_less_equal(const TorusNorm &a, const TorusNorm &b);
bool norm_less(const TorusNorm &a, const TorusNorm &b);

} // namespace rotfactor
