#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rotfactor/errors.hpp"
#include "rotfactor/torus.hpp"

using namespace rotfactor;

namespace {

Rational q(std::int64_t n, std::int64_t d) { return {n, d}; }

ThetaVector theta(std::initializer_list<Rational> xs) {
    std::vector<Scalar> v(xs.begin(), xs.end());
    return ThetaVector(v);
}

Rational random_unit_rational(std::mt19937_64 &rng) {
    std::uniform_int_distribution<std::int64_t> den(1, 60);
    auto d = den(rng);
    std::uniform_int_distribution<std::int64_t> num(0, d - 1);
    return {num(rng), d};
}

} // namespace

TEST_CASE("rational canonical form and parsing") {
    CHECK(Rational(6, -4).to_string() == "-3/2");
    CHECK(Rational::parse(" 13/6 ").frac() == q(1, 6));
    CHECK(Rational::parse("-1/3").frac() == q(2, 3));
    CHECK(Rational::parse("7").to_string() == "7");
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("abc"));
    CHECK(q(9, 16).sqrt_exact() == q(3, 4));
    CHECK_FALSE(q(1, 2).is_perfect_square());
}

TEST_CASE("rational overflow is reported, not wrapped") {
    Rational big(std::int64_t{1} << 62);
    CHECK_THROWS_AS(big * big, ArithmeticOverflow);
}

TEST_CASE("scalar parsing picks the representation") {
    CHECK(Scalar::parse("1/4").is_exact());
    CHECK_FALSE(Scalar::parse("0.25").is_exact());
    CHECK(Scalar::parse("0.1").to_string() == "0.1");
    CHECK(ThetaVector::parse("1/3, 1/2").dim() == 2);
}

TEST_CASE("c_map_1 examples") {
    CHECK(c_map_1(theta({q(2, 7), q(5, 9)}), Point{0, 0})[0].exact() == Rational(0));
    CHECK(c_map_1(theta({q(1, 3), q(1, 2)}), Point{2, 3})[0].exact() == q(1, 6));
    CHECK(c_map_1(theta({q(1, 4)}), Point{6})[0].exact() == q(1, 2));
    CHECK_THROWS_AS(c_map_1(theta({q(1, 4)}), Point{1, 2}), DimensionMismatch);
}

TEST_CASE("c_map_d examples") {
    auto t = c_map_d(theta({q(1, 3), q(1, 2)}), Point{2, 3});
    CHECK(t[0].exact() == q(2, 3));
    CHECK(t[1].exact() == q(1, 2));
    auto z = c_map_d(theta({q(1, 2), q(1, 2)}), Point{2, 4});
    CHECK(z[0].exact().is_zero());
    CHECK(z[1].exact().is_zero());
    auto o = c_map_d(theta({q(3, 5), q(1, 7)}), Point{0, 0});
    CHECK(torus_distance(o).is_zero());
}

TEST_CASE("torus_distance examples") {
    CHECK(torus_distance(TorusPoint({Scalar(Rational(0))})).exact_value() == Rational(0));
    CHECK(torus_distance(TorusPoint({Scalar(q(5, 6))})).exact_value() == q(1, 6));
    auto half = torus_distance(TorusPoint({Scalar(q(1, 2)), Scalar(q(1, 2))}));
    CHECK(*half.squared == q(1, 2));
    CHECK(half.value == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK_FALSE(half.exact_value().has_value());
}

TEST_CASE("float path reduces mod 1 and measures distance") {
    ThetaVector golden({Scalar((std::sqrt(5.0) - 1.0) / 2.0)});
    auto t = c_map_1(golden, Point{13});
    CHECK_FALSE(t.is_exact());
    // 13 * 0.618... = 8.0344..., distance to nearest integer 0.0344...
    CHECK(torus_distance(t).value == doctest::Approx(std::abs(13 * golden[0].to_double() - 8.0)).epsilon(1e-12));
}

TEST_CASE("torus metric properties on random rational inputs") {
    std::mt19937_64 rng(20261018);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 1 + trial % 3;
        std::vector<Scalar> a;
        std::vector<Scalar> b;
        for (int i = 0; i < k; ++i) {
            a.emplace_back(random_unit_rational(rng));
            b.emplace_back(random_unit_rational(rng));
        }
        TorusPoint ta(a);
        TorusPoint tb(b);
        auto na = torus_distance(ta);
        auto nb = torus_distance(tb);
        auto nab = torus_distance(torus_add(ta, tb));
        // Triangle inequality |a+b| <= |a| + |b|, squared twice to stay exact.
        Rational lhs = *nab.squared - *na.squared - *nb.squared;
        bool holds = lhs.sign() <= 0 || lhs * lhs <= Rational(4) * *na.squared * *nb.squared;
        CHECK(holds);

        bool all_zero = std::all_of(a.begin(), a.end(), [](const Scalar &s) { return s.is_zero(); });
        CHECK(na.is_zero() == all_zero);

        std::vector<Scalar> neg;
        for (const auto &s : a) neg.emplace_back((Rational(0) - s.exact()).frac());
        CHECK(*torus_distance(TorusPoint(neg)).squared == *na.squared);
    }
}

TEST_CASE("c-maps are additive homomorphisms and ignore integer shifts of theta") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> coord(-50, 50);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 1 + trial % 3;
        std::vector<Scalar> th;
        std::vector<Scalar> shifted;
        for (int i = 0; i < d; ++i) {
            auto r = random_unit_rational(rng);
            th.emplace_back(r);
            shifted.emplace_back(r + Rational(coord(rng)));
        }
        ThetaVector t(th);
        ThetaVector ts(shifted);
        Point p(d);
        Point r(d);
        for (int i = 0; i < d; ++i) {
            p[i] = coord(rng);
            r[i] = coord(rng);
        }
        for (auto kind : {TorusKind::One, TorusKind::Full}) {
            CHECK(c_map(kind, t, p + r) == torus_add(c_map(kind, t, p), c_map(kind, t, r)));
            CHECK(c_map(kind, t, p) == c_map(kind, ts, p));
        }
    }
}
