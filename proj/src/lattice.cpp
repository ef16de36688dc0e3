#include "rotfactor/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rotfactor/errors.hpp"

namespace rotfactor {

Window::Window(Point lo_, Point hi_) : lo(lo_), hi(hi_) {
    if (lo.dim != hi.dim) throw DimensionMismatch("window corners have different dimensions");
}

Window Window::cube(int d, std::int64_t half_width) {
    Point lo(d);
    Point hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = -half_width;
        hi[i] = half_width;
    }
    return {lo, hi};
}

std::int64_t Window::volume() const {
    if (empty()) return 0;
    std::int64_t v = 1;
    for (int i = 0; i < dim(); ++i) v *= extent(i);
    return v;
}

bool Window::contains(const Point &p) const {
    for (int i = 0; i < dim(); ++i) {
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    return true;
}

bool Window::contains(const Window &w) const { return contains(w.lo) && contains(w.hi); }

std::int64_t Window::boundary_distance(const Point &p) const {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int i = 0; i < dim(); ++i) best = std::min({best, p[i] - lo[i], hi[i] - p[i]});
    return best;
}

std::size_t Window::index(const Point &p) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) {
        idx = idx * static_cast<std::size_t>(extent(i)) + static_cast<std::size_t>(p[i] - lo[i]);
    }
    return idx;
}

Point Window::point_at(std::size_t index) const {
    Point p(dim());
    for (int i = dim() - 1; i >= 0; --i) {
        auto e = static_cast<std::size_t>(extent(i));
        p[i] = lo[i] + static_cast<std::int64_t>(index % e);
        index /= e;
    }
    return p;
}

Window Window::shrunk(std::int64_t by) const {
    Window w = *this;
    for (int i = 0; i < dim(); ++i) {
        w.lo[i] += by;
        w.hi[i] -= by;
    }
    return w;
}

bool Window::empty() const {
    for (int i = 0; i < dim(); ++i) {
        if (hi[i] < lo[i]) return true;
    }
    return false;
}

std::string Window::to_string() const { return "[" + lo.to_string() + ".." + hi.to_string() + "]"; }

LatticeMask::LatticeMask(const Window &w, std::span<const Point> pts) : LatticeMask(w) {
    for (const auto &p : pts) insert(p);
}

std::vector<Point> ball_offsets(int d, double radius) {
    std::vector<Point> out;
    if (radius < 1.0) return out;
    const auto r = static_cast<std::int64_t>(std::floor(radius));
    const double limit = radius * radius + 1e-9;
    Point p(d);
    Window box = Window::cube(d, r);
    const auto n = static_cast<std::size_t>(box.volume());
    for (std::size_t i = 0; i < n; ++i) {
        p = box.point_at(i);
        if (p.is_zero()) continue;
        if (static_cast<double>(p.norm2()) <= limit) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const Point &a, const Point &b) {
        auto na = a.norm2();
        auto nb = b.norm2();
        return na != nb ? na < nb : a < b;
    });
    return out;
}

} // namespace rotfactor
