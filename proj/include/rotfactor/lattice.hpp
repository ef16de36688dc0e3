#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rotfactor/point.hpp"

namespace rotfactor {

// Inclusive axis-aligned box of lattice points.
struct Window {
    Point lo;
    Point hi;

    Window() = default;
    Window(Point lo_, Point hi_);
    static Window cube(int d, std::int64_t half_width);

    int dim() const { return lo.dim; }
    std::int64_t extent(int axis) const { return hi[axis] - lo[axis] + 1; }
    std::int64_t volume() const;
    bool contains(const Point &p) const;
    bool contains(const Window &w) const;
    // Distance from p to the complement of the box along the closest axis;
    // negative outside. For points inside this is the Euclidean distance to
    // the box boundary.
    std::int64_t boundary_distance(const Point &p) const;
    // Row-major index (last axis fastest) of a contained point.
    std::size_t index(const Point &p) const;
    Point point_at(std::size_t index) const;
    Window shrunk(std::int64_t by) const;
    bool empty() const;

    friend bool operator==(const Window &, const Window &) = default;
    std::string to_string() const;
};

// Dense membership bitmap over a window.
class LatticeMask {
public:
    LatticeMask() = default;
    explicit LatticeMask(const Window &w) : window_(w), bits_(static_cast<std::size_t>(w.volume()), 0) {}
    LatticeMask(const Window &w, std::span<const Point> pts);

    void insert(const Point &p) { bits_[window_.index(p)] = 1; }
    bool contains(const Point &p) const { return window_.contains(p) && bits_[window_.index(p)] != 0; }
    const Window &window() const { return window_; }

private:
    Window window_;
    std::vector<std::uint8_t> bits_;
};

// All nonzero lattice vectors v with |v| <= radius, sorted by (|v|^2, lex).
std::vector<Point> ball_offsets(int d, double radius);

} // namespace rotfactor
