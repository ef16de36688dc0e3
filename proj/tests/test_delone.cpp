#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "rotfactor/delone.hpp"
#include "rotfactor/errors.hpp"

using namespace rotfactor;

namespace {

// Points p of the window with p_i divisible by steps[i].
PointSet lattice_set(const Window &w, std::vector<std::int64_t> steps, double margin = 0.0) {
    std::vector<Point> pts;
    const auto n = static_cast<std::size_t>(w.volume());
    for (std::size_t i = 0; i < n; ++i) {
        Point p = w.point_at(i);
        bool keep = true;
        for (int a = 0; a < w.dim(); ++a) keep = keep && (p[a] % steps[static_cast<std::size_t>(a)] == 0);
        if (keep) pts.push_back(p);
    }
    return {w, pts, margin};
}

PointSet random_set(int d, std::int64_t half, double keep, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(keep);
    Window w = Window::cube(d, half);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < static_cast<std::size_t>(w.volume()); ++i) {
        if (coin(rng)) pts.push_back(w.point_at(i));
    }
    return {w, pts};
}

// Analyze with the default margin (twice the safe covering radius).
struct Analysis {
    PointSet set;
    DeloneRadii radii;
    NeighborGraph graph;
    FirstReturnSet first;
};

Analysis analyze(PointSet set) {
    auto [cov_x4, eroded] = covering_radius_x4(set);
    (void)eroded;
    const double safe = std::sqrt(static_cast<double>(cov_x4)) / 2.0 + std::sqrt(static_cast<double>(set.dim())) / 4.0;
    set.set_interior_margin(2.0 * safe);
    auto radii = packing_covering_radii(set);
    auto graph = voronoi_neighbors(set, radii);
    auto first = first_return_vectors(graph);
    return {std::move(set), radii, std::move(graph), std::move(first)};
}

std::vector<Point> cube_neighbors(int d) {
    std::vector<Point> out;
    Window w = Window::cube(d, 1);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w.volume()); ++i) {
        auto p = w.point_at(i);
        if (!p.is_zero()) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Test-only oracle: plain BFS over Z^d with a generous norm cap.
std::optional<std::int64_t> plain_bfs(const Point &u, const std::vector<Point> &steps, double cap) {
    std::map<Point, std::int64_t> seen;
    std::deque<Point> queue{Point::zero(u.dim)};
    seen[Point::zero(u.dim)] = 0;
    while (!queue.empty()) {
        auto p = queue.front();
        queue.pop_front();
        if (p == u) return seen[p];
        for (const auto &s : steps) {
            auto q = p + s;
            if (q.norm() > cap || seen.count(q)) continue;
            seen[q] = seen[p] + 1;
            queue.push_back(q);
        }
    }
    return std::nullopt;
}

} // namespace

TEST_CASE("packing and covering radii examples") {
    auto z2 = packing_covering_radii(lattice_set(Window::cube(2, 5), {1, 1}));
    CHECK(z2.min_distance2 == 1);
    CHECK(z2.packing == doctest::Approx(0.5));
    CHECK(z2.covering2_x4 == 2);
    CHECK(z2.covering == doctest::Approx(std::sqrt(2.0) / 2));

    auto even = packing_covering_radii(lattice_set(Window::cube(1, 10), {2}));
    CHECK(even.packing == doctest::Approx(1.0));
    CHECK(even.covering == doctest::Approx(1.0));

    // (2Z) x Z: brute-force scan below confirms the deep hole at (1, 1/2).
    auto rect_set = lattice_set(Window::cube(2, 8), {2, 1});
    auto rect = packing_covering_radii(rect_set);
    CHECK(rect.packing == doctest::Approx(0.5));
    CHECK(rect.covering2_x4 == 5);
    std::int64_t worst = 0;
    for (std::int64_t a = -8; a <= 8; ++a) {
        for (std::int64_t b = -8; b <= 8; ++b) {
            Point y{a, b}; // doubled coordinates of the half-integer grid
            std::int64_t best = 1 << 30;
            for (const auto &p : rect_set.points()) best = std::min(best, (y - 2 * p).norm2());
            if (std::abs(a) <= 4 && std::abs(b) <= 4) worst = std::max(worst, best);
        }
    }
    CHECK(worst == 5);
}

TEST_CASE("radii need two interior points") {
    PointSet tiny(Window::cube(1, 3), {Point{0}}, 0.0);
    CHECK_THROWS_AS(packing_covering_radii(tiny), WindowTooSmall);
}

TEST_CASE("radii satisfy the Delone ball properties") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto a = analyze(random_set(2, 12, 0.45, seed));
        auto interior = a.set.interior_points();
        for (std::size_t i = 0; i < interior.size(); ++i) {
            for (std::size_t j = i + 1; j < interior.size(); ++j) {
                CHECK(distance2(interior[i], interior[j]) >= a.radii.min_distance2);
            }
        }
        // Every closed R-ball centered on the eroded half-grid reaches a point.
        const Window &e = a.radii.eroded_x2;
        for (std::size_t i = 0; i < static_cast<std::size_t>(e.volume()); ++i) {
            auto y = e.point_at(i);
            bool hit = false;
            for (const auto &p : a.set.points()) {
                if ((y - 2 * p).norm2() <= a.radii.covering2_x4) {
                    hit = true;
                    break;
                }
            }
            CHECK(hit);
        }
    }
}

TEST_CASE("distance transform kernel matches the brute-force reference") {
    for (int d = 1; d <= 3; ++d) {
        auto set = random_set(d, d == 3 ? 3 : 7, 0.3, 40 + static_cast<std::uint64_t>(d));
        CHECK(half_grid_distance_transform(set) == half_grid_distance_transform_serial(set));
        CHECK(covering_radius_x4(set).first == covering_radius_x4_serial(set).first);
    }
}

TEST_CASE("neighbors of the integer lattices include corner contacts") {
    for (int d = 1; d <= 3; ++d) {
        auto a = analyze(lattice_set(Window::cube(d, d == 3 ? 5 : 8), std::vector<std::int64_t>(d, 1)));
        auto nb = a.graph.neighbors_of(Point::zero(d));
        std::vector<Point> rel;
        for (auto &p : nb) rel.push_back(p);
        CHECK(rel == cube_neighbors(d));
        CHECK(a.first.vectors == cube_neighbors(d));
    }
}

TEST_CASE("neighbors of (2Z) x Z agree with the rectangle-cell oracle") {
    auto a = analyze(lattice_set(Window::cube(2, 12), {2, 1}));
    std::vector<Point> expected{{-2, -1}, {-2, 0}, {-2, 1}, {0, -1}, {0, 1}, {2, -1}, {2, 0}, {2, 1}};
    CHECK(a.graph.neighbors_of(Point{0, 0}) == expected);
    // Cells are [x-1, x+1] x [y-1/2, y+1/2]; closed rectangles meet iff
    // |dx| <= 2 and |dy| <= 1.
    auto interior = a.set.interior_points();
    for (std::size_t i = 0; i < interior.size(); ++i) {
        for (std::size_t j = i + 1; j < interior.size(); ++j) {
            auto diff = interior[j] - interior[i];
            bool oracle = std::abs(diff[0]) <= 2 && std::abs(diff[1]) <= 1;
            CHECK(a.graph.has_edge(interior[i], interior[j]) == oracle);
        }
    }
}

TEST_CASE("neighbor kernel matches the serial reference and is symmetric under restriction") {
    for (std::uint64_t seed : {11u, 12u}) {
        auto a = analyze(random_set(2, 14, 0.4, seed));
        auto serial = voronoi_neighbors_serial(a.set, a.radii);
        CHECK(serial.edges == a.graph.edges);
        CHECK(serial.excluded == a.graph.excluded);

        // Sub-window restriction.
        Window sub(Point{-9, -9}, Point{9, 9});
        std::vector<Point> inside;
        for (const auto &p : a.set.points()) {
            if (sub.contains(p)) inside.push_back(p);
        }
        auto b = analyze(PointSet(sub, inside));
        for (const auto &[x, y] : b.graph.edges) {
            if (a.set.is_interior(x) && a.set.is_interior(y)) CHECK(a.graph.has_edge(x, y));
        }
        for (const auto &[x, y] : a.graph.edges) {
            if (b.set.is_interior(x) && b.set.is_interior(y)) CHECK(b.graph.has_edge(x, y));
        }
    }
}

TEST_CASE("first return vectors") {
    auto z = analyze(lattice_set(Window::cube(1, 10), {1}));
    CHECK(z.first.vectors == std::vector<Point>{Point{-1}, Point{1}});
    for (std::int64_t n = 0; n <= 4; ++n) {
        const std::int64_t step = std::int64_t{1} << n;
        auto a = analyze(lattice_set(Window::cube(1, 64), {step}));
        CHECK(a.first.vectors == std::vector<Point>{Point{-step}, Point{step}});
    }
    auto r = analyze(random_set(2, 12, 0.5, 99));
    for (const auto &v : r.first.vectors) {
        CHECK(r.first.contains(-v));
        CHECK_FALSE(v.is_zero());
        auto [x, y] = r.first.witness.at(v);
        CHECK(x - y == v);
        CHECK(r.graph.has_edge(x, y));
    }
}

TEST_CASE("f_distance examples") {
    FirstReturnSet unit;
    unit.vectors = {Point{-1}, Point{1}};
    CHECK(f_distance(Point{0}, unit) == 0);
    CHECK(f_distance(Point{5}, unit) == 5);

    FirstReturnSet king;
    king.vectors = cube_neighbors(2);
    CHECK(f_distance(Point{3, 2}, king) == 3);

    FirstReturnSet evens;
    evens.vectors = {Point{-2}, Point{2}};
    CHECK_THROWS_AS(f_distance(Point{3}, evens), NotGenerated);
}

TEST_CASE("f_diameter examples") {
    FirstReturnSet unit;
    unit.vectors = {Point{-1}, Point{1}};
    std::vector<Point> single{Point{4}};
    CHECK(f_diameter(single, unit) == 0);
    std::vector<Point> three{Point{0}, Point{1}, Point{2}};
    CHECK(f_diameter(three, unit) == 2);

    FirstReturnSet king;
    king.vectors = cube_neighbors(2);
    std::vector<Point> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK(f_diameter(square, king) == 1);
}

TEST_CASE("f_distance agrees with a plain BFS oracle on random inputs") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> coord(-9, 9);
    std::uniform_int_distribution<std::int64_t> step(-3, 3);
    int checked = 0;
    while (checked < 200) {
        const int d = 1 + checked % 2;
        FirstReturnSet f;
        std::set<Point> steps;
        for (int i = 0; i < 3; ++i) {
            Point s(d);
            for (int a = 0; a < d; ++a) s[a] = step(rng);
            if (s.is_zero()) continue;
            steps.insert(s);
            steps.insert(-s);
        }
        if (steps.empty()) continue;
        f.vectors.assign(steps.begin(), steps.end());
        Point u(d);
        for (int a = 0; a < d; ++a) u[a] = coord(rng);
        auto oracle = plain_bfs(u, f.vectors, u.norm() + f.max_norm());
        if (oracle) {
            CHECK(f_distance(u, f) == *oracle);
        } else {
            CHECK_THROWS_AS(f_distance(u, f), NotGenerated);
        }
        ++checked;
    }
}

TEST_CASE("first returns generate the sampled return vectors") {
    auto a = analyze(random_set(2, 16, 0.35, 2024));
    auto interior = a.set.interior_points();
    REQUIRE(interior.size() > 20);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    for (int i = 0; i < 200; ++i) {
        auto u = interior[pick(rng)] - interior[pick(rng)];
        CHECK_NOTHROW(f_distance(u, a.first));
    }
}

TEST_CASE("point set text format round trip") {
    auto set = random_set(2, 4, 0.5, 3);
    std::stringstream ss;
    set.write(ss);
    auto back = PointSet::read(ss);
    CHECK(back.window() == set.window());
    CHECK(std::equal(back.points().begin(), back.points().end(), set.points().begin(), set.points().end()));
    std::stringstream bad("window 2 0 0 3 3\n1 2\n9 9\n");
    CHECK_THROWS_AS(PointSet::read(bad), ConfigError);
}
