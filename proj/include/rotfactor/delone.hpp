#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rotfactor/lattice.hpp"
#include "rotfactor/point.hpp"

namespace rotfactor {

// Finite sample of a Delone set in Z^d. Points are kept sorted and unique.
// Points at distance >= interior_margin from the window boundary form the
// interior subset; only interior points ever produce reported structure.
class PointSet {
public:
    PointSet() = default;
    PointSet(Window window, std::vector<Point> points, double interior_margin = 0.0);

    int dim() const { return window_.dim(); }
    const Window &window() const { return window_; }
    std::span<const Point> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool contains(const Point &p) const { return mask_.contains(p); }
    const LatticeMask &mask() const { return mask_; }

    double interior_margin() const { return margin_; }
    void set_interior_margin(double m) { margin_ = m; }
    bool is_interior(const Point &p) const;
    std::vector<Point> interior_points() const;

    // Text format: header line "window d lo_1..lo_d hi_1..hi_d", then one
    // point per line as space-separated integers.
    void write(std::ostream &os) const;
    static PointSet read(std::istream &is);

private:
    Window window_;
    std::vector<Point> points_;
    LatticeMask mask_;
    double margin_ = 0.0;
};

struct DeloneRadii {
    // Minimum squared distance between interior points; r = sqrt(.)/2.
    std::int64_t min_distance2 = 0;
    // 4 R^2, the covering radius sampled on the half-integer grid.
    std::int64_t covering2_x4 = 0;
    double packing = 0.0;
    double covering = 0.0;
    // R + sqrt(d)/4: a guaranteed upper bound on the covering radius over
    // all real points of the eroded window. Used for pruning and margins.
    double safe_covering = 0.0;
    // Half-grid sample points (doubled coordinates) at distance >= the first
    // pass estimate from the boundary.
    Window eroded_x2;
};

// Covering radius on the half-integer grid: returns 4 R^2 and the eroded
// doubled window. One fixpoint pass: the first estimate over the whole
// window defines the erosion for the second.
std::pair<std::int64_t, Window> covering_radius_x4(const PointSet &set);
std::pair<std::int64_t, Window> covering_radius_x4_serial(const PointSet &set);

// Exact squared Euclidean distance transform on the doubled grid of the
// window: entry i is 4 * dist(half-grid point i, set)^2.
std::vector<std::int64_t> half_grid_distance_transform(const PointSet &set);
std::vector<std::int64_t> half_grid_distance_transform_serial(const PointSet &set);
Window doubled_window(const Window &w);

DeloneRadii packing_covering_radii(const PointSet &set);

struct NeighborGraph {
    // Unordered pairs stored as (a, b) with a < b, sorted.
    std::vector<std::pair<Point, Point>> edges;
    // Interior points whose pruning ball leaves the window.
    std::vector<Point> excluded;
    double pruning_radius = 0.0;

    bool has_edge(const Point &a, const Point &b) const;
    std::vector<Point> neighbors_of(const Point &p) const;
    void write(std::ostream &os) const;
};

// Exact Voronoi neighbor relation restricted to interior points. Two sites
// are neighbors iff their closed cells meet (corner contacts included).
NeighborGraph voronoi_neighbors(const PointSet &set, const DeloneRadii &radii);
NeighborGraph voronoi_neighbors_serial(const PointSet &set, const DeloneRadii &radii);

// Closed-cell intersection test for x, x' against the competitor sites
// (given relative to x). Pure function of its arguments.
bool cells_touch(const Point &delta, std::span<const Point> competitors);

struct FirstReturnSet {
    std::vector<Point> vectors; // sorted, symmetric, nonzero
    // One neighbor pair (a, b) with a - b = v for each vector v.
    std::map<Point, std::pair<Point, Point>> witness;

    bool contains(const Point &v) const;
    bool empty() const { return vectors.empty(); }
    double max_norm() const;
};

FirstReturnSet first_return_vectors(const NeighborGraph &graph);

// Length of the shortest word over F summing to u, searched by BFS inside
// the ball of radius |u| + max|F| (or `radius` when given).
// Throws NotGenerated when u is not reached.
std::int64_t f_distance(const Point &u, const FirstReturnSet &f, std::optional<double> radius = std::nullopt);

// Single-source BFS distances from `source` to each target; nullopt where
// unreachable inside the ball of radius max|t - source| + max|F|.
std::vector<std::optional<std::int64_t>> f_distances_from(const Point &source, std::span<const Point> targets,
                                                          const FirstReturnSet &f);

// Maximal F-distance over pairs of P. Throws NotGenerated.
std::int64_t f_diameter(std::span<const Point> patch, const FirstReturnSet &f);

} // namespace rotfactor
