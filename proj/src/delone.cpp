#include "rotfactor/delone.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include <omp.h>

#include "rotfactor/errors.hpp"
#include "rotfactor/feasibility.hpp"

namespace rotfactor {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t ceil_sqrt(std::int64_t v) {
    if (v <= 0) return 0;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
    while (r * r < v) ++r;
    while (r > 0 && (r - 1) * (r - 1) >= v) --r;
    return r;
}

// Lower envelope of parabolas along one line of the grid.
void transform_line(std::int64_t *data, std::size_t n, std::size_t stride, std::vector<std::int64_t> &f,
                    std::vector<std::int64_t> &v, std::vector<double> &z) {
    f.resize(n);
    v.resize(n);
    z.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) f[i] = data[i * stride];
    std::int64_t k = -1;
    for (std::int64_t q = 0; q < static_cast<std::int64_t>(n); ++q) {
        if (f[q] >= kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -std::numeric_limits<double>::infinity();
            z[1] = std::numeric_limits<double>::infinity();
            continue;
        }
        double s = 0;
        while (true) {
            const std::int64_t p = v[k];
            s = static_cast<double>((f[q] + q * q) - (f[p] + p * p)) / static_cast<double>(2 * (q - p));
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) return;
    k = 0;
    for (std::int64_t q = 0; q < static_cast<std::int64_t>(n); ++q) {
        while (z[k + 1] < static_cast<double>(q)) ++k;
        const std::int64_t p = v[k];
        data[q * stride] = (q - p) * (q - p) + f[p];
    }
}

std::vector<std::int64_t> seed_grid(const PointSet &set, const Window &w2) {
    std::vector<std::int64_t> grid(static_cast<std::size_t>(w2.volume()), kInf);
    for (const auto &p : set.points()) grid[w2.index(2 * p)] = 0;
    return grid;
}

std::pair<std::int64_t, Window> covering_from_transform(const std::vector<std::int64_t> &grid, const Window &w2) {
    std::int64_t first = 0;
    for (auto v : grid) first = std::max(first, v);
    if (first >= kInf) throw WindowTooSmall("point set is empty");
    // Doubled units: a real distance R0 is 2 R0 = sqrt(first) grid steps.
    Window eroded = w2.shrunk(ceil_sqrt(first));
    if (eroded.empty()) throw WindowTooSmall("window too small: erosion by the covering estimate leaves nothing");
    std::int64_t second = 0;
    const auto n = static_cast<std::size_t>(eroded.volume());
    for (std::size_t i = 0; i < n; ++i) second = std::max(second, grid[w2.index(eroded.point_at(i))]);
    return {second, eroded};
}

struct VectorHash {
    std::size_t operator()(const std::vector<std::int64_t> &v) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto x : v) {
            h ^= static_cast<std::uint64_t>(x);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

using TouchCache = std::unordered_map<std::vector<std::int64_t>, bool, VectorHash>;

// Competitor sites (relative to x) for the pair (x, x + delta).
std::vector<Point> competitors_for(const PointSet &set, const Point &x, const Point &delta,
                                   std::span<const Point> offsets) {
    std::vector<Point> out;
    const Point other = x + delta;
    for (const auto &off : offsets) {
        if (off != delta && set.contains(x + off)) out.push_back(off);
        const Point rel = delta + off;
        if (!rel.is_zero() && set.contains(other + off)) out.push_back(rel);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool eligible(const PointSet &set, const Point &p, double rho) {
    return set.is_interior(p) && static_cast<double>(set.window().boundary_distance(p)) >= rho - 1e-9;
}

NeighborGraph neighbors_impl(const PointSet &set, const DeloneRadii &radii, bool parallel) {
    NeighborGraph graph;
    const double rho = 2.0 * radii.safe_covering;
    graph.pruning_radius = rho;
    const auto offsets = ball_offsets(set.dim(), rho);
    const auto interior = set.interior_points();

    std::vector<std::vector<std::pair<Point, Point>>> per_point(interior.size());
    std::vector<std::uint8_t> excluded(interior.size(), 0);

    auto work = [&](std::size_t i, TouchCache *cache) {
        const Point &x = interior[i];
        if (!eligible(set, x, rho)) {
            excluded[i] = 1;
            return;
        }
        for (const auto &off : offsets) {
            if (!(off > Point::zero(set.dim()))) continue; // x' > x lexicographically
            const Point xp = x + off;
            if (!set.contains(xp) || !eligible(set, xp, rho)) continue;
            auto comp = competitors_for(set, x, off, offsets);
            bool touch = false;
            if (cache != nullptr) {
                std::vector<std::int64_t> key;
                key.reserve(3 * (comp.size() + 1));
                key.insert(key.end(), off.c.begin(), off.c.end());
                for (const auto &c : comp) key.insert(key.end(), c.c.begin(), c.c.end());
                auto it = cache->find(key);
                if (it == cache->end()) it = cache->emplace(std::move(key), cells_touch(off, comp)).first;
                touch = it->second;
            } else {
                touch = cells_touch(off, comp);
            }
            if (touch) per_point[i].emplace_back(x, xp);
        }
    };

    if (parallel) {
        std::vector<TouchCache> caches(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(interior.size()); ++i) {
            work(static_cast<std::size_t>(i), &caches[static_cast<std::size_t>(omp_get_thread_num())]);
        }
    } else {
        for (std::size_t i = 0; i < interior.size(); ++i) work(i, nullptr);
    }

    for (std::size_t i = 0; i < interior.size(); ++i) {
        if (excluded[i]) graph.excluded.push_back(interior[i]);
        graph.edges.insert(graph.edges.end(), per_point[i].begin(), per_point[i].end());
    }
    std::sort(graph.edges.begin(), graph.edges.end());
    return graph;
}

// Dense BFS over the box of half-width ceil(radius) around `source`.
class BallSearch {
public:
    BallSearch(const Point &source, const FirstReturnSet &f, double radius) : source_(source) {
        const int d = source.dim;
        const auto r = static_cast<std::int64_t>(std::ceil(radius));
        box_ = Window(source - Window::cube(d, r).hi, source + Window::cube(d, r).hi);
        dist_.assign(static_cast<std::size_t>(box_.volume()), -1);
        const double limit = radius * radius + 1e-9;
        std::deque<Point> queue;
        dist_[box_.index(source)] = 0;
        queue.push_back(source);
        while (!queue.empty()) {
            Point p = queue.front();
            queue.pop_front();
            const std::int64_t dp = dist_[box_.index(p)];
            for (const auto &step : f.vectors) {
                Point q = p + step;
                if (!box_.contains(q)) continue;
                if (static_cast<double>((q - source).norm2()) > limit) continue;
                auto &slot = dist_[box_.index(q)];
                if (slot >= 0) continue;
                slot = dp + 1;
                queue.push_back(q);
            }
        }
    }

    std::optional<std::int64_t> distance_to(const Point &p) const {
        if (!box_.contains(p)) return std::nullopt;
        auto v = dist_[box_.index(p)];
        if (v < 0) return std::nullopt;
        return v;
    }

private:
    Point source_;
    Window box_;
    std::vector<std::int64_t> dist_;
};

} // namespace

PointSet::PointSet(Window window, std::vector<Point> points, double interior_margin)
    : window_(std::move(window)), points_(std::move(points)), margin_(interior_margin) {
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    for (const auto &p : points_) {
        if (p.dim != window_.dim()) throw DimensionMismatch("point " + p.to_string() + " has wrong dimension");
        if (!window_.contains(p)) {
            throw ConfigError("point " + p.to_string() + " lies outside window " + window_.to_string());
        }
    }
    mask_ = LatticeMask(window_, points_);
}

bool PointSet::is_interior(const Point &p) const {
    return static_cast<double>(window_.boundary_distance(p)) >= margin_ - 1e-9;
}

std::vector<Point> PointSet::interior_points() const {
    std::vector<Point> out;
    for (const auto &p : points_) {
        if (is_interior(p)) out.push_back(p);
    }
    return out;
}

void PointSet::write(std::ostream &os) const {
    os << "window " << dim();
    for (int i = 0; i < dim(); ++i) os << ' ' << window_.lo[i];
    for (int i = 0; i < dim(); ++i) os << ' ' << window_.hi[i];
    os << '\n';
    for (const auto &p : points_) {
        for (int i = 0; i < dim(); ++i) os << (i ? " " : "") << p[i];
        os << '\n';
    }
}

PointSet PointSet::read(std::istream &is) {
    std::string line;
    auto next_line = [&]() {
        while (std::getline(is, line)) {
            auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw ConfigError("point file is empty");
    std::istringstream header(line);
    std::string tag;
    int d = 0;
    header >> tag >> d;
    if (tag != "window" || d < 1 || d > kMaxDim) throw ConfigError("point file must start with 'window d lo.. hi..'");
    Point lo(d);
    Point hi(d);
    for (int i = 0; i < d; ++i) header >> lo[i];
    for (int i = 0; i < d; ++i) header >> hi[i];
    if (!header) throw ConfigError("malformed window header in point file");
    std::vector<Point> pts;
    while (next_line()) {
        std::istringstream row(line);
        Point p(d);
        for (int i = 0; i < d; ++i) row >> p[i];
        if (!row) throw ConfigError("malformed point line: '" + line + "'");
        pts.push_back(p);
    }
    return {Window(lo, hi), std::move(pts)};
}

Window doubled_window(const Window &w) { return {2 * w.lo, 2 * w.hi}; }

std::vector<std::int64_t> half_grid_distance_transform(const PointSet &set) {
    const Window w2 = doubled_window(set.window());
    auto grid = seed_grid(set, w2);
    const int d = set.dim();
    for (int axis = 0; axis < d; ++axis) {
        std::size_t stride = 1;
        for (int j = axis + 1; j < d; ++j) stride *= static_cast<std::size_t>(w2.extent(j));
        const auto n = static_cast<std::size_t>(w2.extent(axis));
        const std::size_t lines = grid.size() / n;
        // Line l starts at (l / stride) * stride * n + l % stride.
#pragma omp parallel
        {
            std::vector<std::int64_t> f;
            std::vector<std::int64_t> v;
            std::vector<double> z;
#pragma omp for schedule(static)
            for (std::int64_t l = 0; l < static_cast<std::int64_t>(lines); ++l) {
                const auto ul = static_cast<std::size_t>(l);
                const std::size_t start = (ul / stride) * stride * n + ul % stride;
                transform_line(grid.data() + start, n, stride, f, v, z);
            }
        }
    }
    return grid;
}

std::vector<std::int64_t> half_grid_distance_transform_serial(const PointSet &set) {
    const Window w2 = doubled_window(set.window());
    std::vector<std::int64_t> grid(static_cast<std::size_t>(w2.volume()), kInf);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point y = w2.point_at(i);
        for (const auto &p : set.points()) grid[i] = std::min(grid[i], (y - 2 * p).norm2());
    }
    return grid;
}

std::pair<std::int64_t, Window> covering_radius_x4(const PointSet &set) {
    return covering_from_transform(half_grid_distance_transform(set), doubled_window(set.window()));
}

std::pair<std::int64_t, Window> covering_radius_x4_serial(const PointSet &set) {
    return covering_from_transform(half_grid_distance_transform_serial(set), doubled_window(set.window()));
}

DeloneRadii packing_covering_radii(const PointSet &set) {
    DeloneRadii radii;
    auto [cov_x4, eroded] = covering_radius_x4(set);
    radii.covering2_x4 = cov_x4;
    radii.eroded_x2 = eroded;
    radii.covering = std::sqrt(static_cast<double>(cov_x4)) / 2.0;
    radii.safe_covering = radii.covering + std::sqrt(static_cast<double>(set.dim())) / 4.0;

    const auto interior = set.interior_points();
    if (interior.size() < 2) throw WindowTooSmall("window too small: fewer than 2 interior points");
    const LatticeMask interior_mask(set.window(), interior);
    const auto offsets = ball_offsets(set.dim(), 2.0 * radii.safe_covering);
    std::int64_t best = kInf;
    for (const auto &x : interior) {
        for (const auto &off : offsets) {
            if (off.norm2() >= best) break;
            if (interior_mask.contains(x + off)) {
                best = off.norm2();
                break;
            }
        }
    }
    if (best >= kInf) {
        for (std::size_t i = 0; i < interior.size(); ++i) {
            for (std::size_t j = i + 1; j < interior.size(); ++j) best = std::min(best, distance2(interior[i], interior[j]));
        }
    }
    radii.min_distance2 = best;
    radii.packing = std::sqrt(static_cast<double>(best)) / 2.0;
    return radii;
}

bool cells_touch(const Point &delta, std::span<const Point> competitors) {
    const int d = delta.dim;
    // y relative to x: |y|^2 <= |y - z|^2  <=>  2 z.y <= |z|^2.
    std::vector<LinearInequality> rows;
    rows.reserve(competitors.size());
    for (const auto &z : competitors) {
        LinearInequality r;
        for (int i = 0; i < d; ++i) r.coeffs[i] = 2 * z[i];
        r.bound = z.norm2();
        rows.push_back(r);
    }
    LinearEquation eq;
    for (int i = 0; i < d; ++i) eq.coeffs[i] = 2 * delta[i];
    eq.value = delta.norm2();
    return is_feasible(rows, std::span<const LinearEquation>(&eq, 1), d);
}

NeighborGraph voronoi_neighbors(const PointSet &set, const DeloneRadii &radii) {
    return neighbors_impl(set, radii, true);
}

NeighborGraph voronoi_neighbors_serial(const PointSet &set, const DeloneRadii &radii) {
    return neighbors_impl(set, radii, false);
}

bool NeighborGraph::has_edge(const Point &a, const Point &b) const {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return std::binary_search(edges.begin(), edges.end(), key);
}

std::vector<Point> NeighborGraph::neighbors_of(const Point &p) const {
    std::vector<Point> out;
    for (const auto &[a, b] : edges) {
        if (a == p) out.push_back(b);
        if (b == p) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void NeighborGraph::write(std::ostream &os) const {
    for (const auto &[a, b] : edges) {
        for (int i = 0; i < a.dim; ++i) os << (i ? " " : "") << a[i];
        for (int i = 0; i < b.dim; ++i) os << ' ' << b[i];
        os << '\n';
    }
}

bool FirstReturnSet::contains(const Point &v) const { return std::binary_search(vectors.begin(), vectors.end(), v); }

double FirstReturnSet::max_norm() const {
    double m = 0;
    for (const auto &v : vectors) m = std::max(m, v.norm());
    return m;
}

FirstReturnSet first_return_vectors(const NeighborGraph &graph) {
    FirstReturnSet f;
    for (const auto &[a, b] : graph.edges) {
        f.witness.try_emplace(a - b, a, b);
        f.witness.try_emplace(b - a, b, a);
    }
    f.vectors.reserve(f.witness.size());
    for (const auto &[v, w] : f.witness) f.vectors.push_back(v);
    return f;
}

std::int64_t f_distance(const Point &u, const FirstReturnSet &f, std::optional<double> radius) {
    if (u.is_zero()) return 0;
    if (f.empty()) throw NotGenerated("empty first-return set cannot generate " + u.to_string());
    const double r = radius.value_or(u.norm() + f.max_norm());
    BallSearch search(Point::zero(u.dim), f, r);
    auto d = search.distance_to(u);
    if (!d) throw NotGenerated("vector " + u.to_string() + " is not generated by the first-return set within radius " +
                               std::to_string(r));
    return *d;
}

std::vector<std::optional<std::int64_t>> f_distances_from(const Point &source, std::span<const Point> targets,
                                                          const FirstReturnSet &f) {
    double reach = 0;
    for (const auto &t : targets) reach = std::max(reach, (t - source).norm());
    std::vector<std::optional<std::int64_t>> out;
    out.reserve(targets.size());
    if (f.empty()) {
        for (const auto &t : targets) out.push_back(t == source ? std::optional<std::int64_t>(0) : std::nullopt);
        return out;
    }
    BallSearch search(source, f, reach + f.max_norm());
    for (const auto &t : targets) out.push_back(search.distance_to(t));
    return out;
}

std::int64_t f_diameter(std::span<const Point> patch, const FirstReturnSet &f) {
    if (patch.empty()) throw std::invalid_argument("f_diameter of an empty patch");
    std::int64_t best = 0;
    for (std::size_t i = 0; i + 1 < patch.size(); ++i) {
        auto rest = patch.subspan(i + 1);
        auto dists = f_distances_from(patch[i], rest, f);
        for (std::size_t j = 0; j < dists.size(); ++j) {
            if (!dists[j]) {
                throw NotGenerated("patch difference " + (rest[j] - patch[i]).to_string() +
                                   " is not generated by the first-return set");
            }
            best = std::max(best, *dists[j]);
        }
    }
    return best;
}

} // namespace rotfactor
