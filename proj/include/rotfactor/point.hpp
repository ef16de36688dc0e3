#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace rotfactor {

// Exact geometry is capped at three dimensions.
inline constexpr int kMaxDim = 3;

// Integer lattice vector in Z^d, d <= kMaxDim. Unused trailing coordinates
// are kept at zero so that comparisons and hashing can ignore `dim`.
struct Point {
    int dim = 0;
    std::array<std::int64_t, kMaxDim> c{};

    Point() = default;
    explicit Point(int d) : dim(d) { check_dim(d); }
    Point(std::initializer_list<std::int64_t> coords) : dim(static_cast<int>(coords.size())) {
        check_dim(dim);
        int i = 0;
        for (auto v : coords) c[i++] = v;
    }

    static Point zero(int d) { return Point(d); }

    std::int64_t &operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }

    // Squared Euclidean norm; exact.
    std::int64_t norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
    double norm() const;

    Point &operator+=(const Point &o) {
        for (int i = 0; i < kMaxDim; ++i) c[i] += o.c[i];
        return *this;
    }
    Point &operator-=(const Point &o) {
        for (int i = 0; i < kMaxDim; ++i) c[i] -= o.c[i];
        return *this;
    }
    friend Point operator+(Point a, const Point &b) { return a += b; }
    friend Point operator-(Point a, const Point &b) { return a -= b; }
    friend Point operator-(Point a) {
        for (auto &v : a.c) v = -v;
        return a;
    }
    friend Point operator*(std::int64_t s, Point a) {
        for (auto &v : a.c) v *= s;
        return a;
    }

    friend bool operator==(const Point &a, const Point &b) { return a.c == b.c; }
    // Lexicographic coordinate order; used for every tie-break in the library.
    friend std::strong_ordering operator<=>(const Point &a, const Point &b) { return a.c <=> b.c; }

    std::string to_string() const;

private:
    static void check_dim(int d) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("point dimension must be in 1..3");
    }
};

inline std::int64_t dot(const Point &a, const Point &b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

inline std::int64_t distance2(const Point &a, const Point &b) { return (a - b).norm2(); }

struct PointHash {
    std::size_t operator()(const Point &p) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto v : p.c) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace rotfactor

template <> struct std::hash<rotfactor::Point> : rotfactor::PointHash {};
