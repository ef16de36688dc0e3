#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "rotfactor/errors.hpp"
#include "rotfactor/hierarchy.hpp"

using namespace rotfactor;

namespace {

std::vector<Point> range1(std::int64_t a, std::int64_t b, std::int64_t step = 1) {
    std::vector<Point> out;
    for (std::int64_t x = a; x <= b; x += step) out.push_back(Point{x});
    return out;
}

PointSet lattice_set(const Window &w, std::int64_t step) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < static_cast<std::size_t>(w.volume()); ++i) {
        Point p = w.point_at(i);
        bool keep = true;
        for (int a = 0; a < p.dim; ++a) keep = keep && p[a] % step == 0;
        if (keep) pts.push_back(p);
    }
    return PointSet(w, pts);
}

CombinatorialData lattice_data(int d, int max_level, std::int64_t half_width = 0) {
    std::vector<std::int64_t> q(static_cast<std::size_t>(d), 2);
    std::int64_t hw = half_width ? half_width : (d == 1 ? 8 : 4) * (std::int64_t{1} << max_level);
    return build_combinatorial_data(lattice_model_return_sets(q, Window::cube(d, hw), max_level));
}

ReturnSet as_return_set(PointSet set, int level) { return ReturnSet{std::move(set), Window(), level, true, {}}; }

// Plain BFS over F inside a box around the patch; word-metric diameter.
std::int64_t bfs_diameter(const std::vector<Point> &patch, const FirstReturnSet &f) {
    const int d = patch.front().dim;
    std::int64_t span = 0;
    for (const auto &a : patch) {
        for (const auto &b : patch) {
            for (int i = 0; i < d; ++i) span = std::max(span, std::abs(a[i] - b[i]));
        }
    }
    std::int64_t fmax = 0;
    for (const auto &v : f.vectors) {
        for (int i = 0; i < d; ++i) fmax = std::max(fmax, std::abs(v[i]));
    }
    std::int64_t best = 0;
    for (const auto &src : patch) {
        std::map<Point, std::int64_t> dist{{src, 0}};
        std::deque<Point> queue{src};
        const std::int64_t box = span + 2 * fmax;
        while (!queue.empty()) {
            Point x = queue.front();
            queue.pop_front();
            for (const auto &v : f.vectors) {
                Point y = x + v;
                bool inside = true;
                for (int i = 0; i < d; ++i) inside = inside && std::abs(y[i] - src[i]) <= box;
                if (inside && dist.emplace(y, dist[x] + 1).second) queue.push_back(y);
            }
        }
        for (const auto &t : patch) best = std::max(best, dist.at(t));
    }
    return best;
}

} // namespace

TEST_CASE("Z over 2Z gives patches {m, m+1}") {
    const Window w(Point{-20}, Point{20});
    auto part = voronoi_partition(PointSet(w, range1(-20, 20)), PointSet(w, range1(-20, 20, 2)), 0.0, 1.5);
    for (std::int64_t m = -18; m <= 18; m += 2) {
        REQUIRE(part.patch_of(Point{m}) != nullptr);
        CHECK(*part.patch_of(Point{m}) == std::vector<Point>{Point{m}, Point{m + 1}});
    }
}

TEST_CASE("Z^2 over 2Z^2 gives patches m + {0,1}^2 and k = 1") {
    const Window w = Window::cube(2, 12);
    auto part = voronoi_partition(lattice_set(w, 1), lattice_set(w, 2), 0.0, 1.5);
    for (std::size_t i = 0; i < part.owners.size(); ++i) {
        if (!part.complete[i]) continue;
        const Point m = part.owners[i];
        std::vector<Point> expected{m, m + Point{0, 1}, m + Point{1, 0}, m + Point{1, 1}};
        CHECK(part.patches[i] == expected);
    }
    auto levels = lattice_model_return_sets(std::vector<std::int64_t>{2, 2}, w, 1);
    auto data = build_combinatorial_data(levels);
    CHECK(*data.levels[0].k == 1);
}

TEST_CASE("identical levels give singleton patches, k = 0 and a (iii) failure") {
    const Window w(Point{-30}, Point{30});
    auto set = lattice_set(w, 2);
    auto data = build_combinatorial_data({as_return_set(set, 0), as_return_set(set, 1)});
    const auto &part = *data.levels[0].partition;
    for (const auto &p : part.patches) CHECK(p.size() == 1);
    CHECK(*data.levels[0].k == 0);
    auto reports = check_well_distributed(data);
    CHECK_FALSE(reports[0].iii);
}

TEST_CASE("partition kernel matches the brute-force serial reference") {
    std::mt19937_64 rng(3);
    std::bernoulli_distribution coin(0.2);
    for (int d = 1; d <= 3; ++d) {
        const Window w = Window::cube(d, d == 1 ? 200 : (d == 2 ? 20 : 7));
        std::vector<Point> lower;
        std::vector<Point> upper;
        for (std::size_t i = 0; i < static_cast<std::size_t>(w.volume()); ++i) {
            Point p = w.point_at(i);
            bool grid = true;
            for (int a = 0; a < d; ++a) grid = grid && p[a] % 4 == 0;
            if (grid || coin(rng)) {
                upper.push_back(p);
                lower.push_back(p);
            } else if (coin(rng) || coin(rng)) {
                lower.push_back(p);
            }
        }
        PointSet lo(w, lower);
        PointSet hi(w, upper);
        for (auto tie : {TieBreak::LexSmallest, TieBreak::LexLargest}) {
            auto a = voronoi_partition(lo, hi, 2.0, 3.5, tie);
            auto b = voronoi_partition_serial(lo, hi, 2.0, 3.5, tie);
            CHECK(a.owners == b.owners);
            CHECK(a.patches == b.patches);
            CHECK(a.complete == b.complete);
        }
    }
}

TEST_CASE("partition postconditions on lattice data") {
    auto data = lattice_data(2, 3);
    for (const auto &level : data.levels) {
        if (!level.partition) continue;
        const auto &part = *level.partition;
        std::set<Point> seen;
        std::size_t total = 0;
        for (std::size_t i = 0; i < part.owners.size(); ++i) {
            std::size_t upper_hits = 0;
            for (const auto &p : part.patches[i]) {
                seen.insert(p);
                upper_hits += data.level(level.n + 1).returns.base.contains(p);
            }
            total += part.patches[i].size();
            CHECK(upper_hits == 1);
            CHECK(std::binary_search(part.patches[i].begin(), part.patches[i].end(), part.owners[i]));
        }
        CHECK(seen.size() == total);
        std::size_t assignable = 0;
        for (const auto &p : level.returns.base.points()) {
            assignable += static_cast<double>(level.returns.base.window().boundary_distance(p)) >= part.margin;
        }
        CHECK(total == assignable);
    }
}

TEST_CASE("lattice model q = 2 hierarchy: k = 1, well distributed, linearly recurrent") {
    auto data = lattice_data(1, 6);
    for (const auto &level : data.levels) {
        const std::int64_t step = std::int64_t{1} << level.n;
        CHECK(level.first_returns.vectors == std::vector<Point>{Point{-step}, Point{step}});
        if (level.k) CHECK(*level.k == 1);
    }
    auto reports = check_well_distributed(data);
    CHECK(reports.size() == 6);
    CHECK(all_well_distributed(reports));
    auto lr = linear_recurrence_report(data);
    CHECK(lr.bound == 1);
    CHECK(lr.flagged);

    auto thinned = thin_to_well_distributed(data);
    REQUIRE(thinned.levels.size() == data.levels.size());
    for (std::size_t i = 0; i < thinned.levels.size(); ++i) CHECK(thinned.levels[i].n == data.levels[i].n);

    auto data2 = lattice_data(2, 3);
    auto r2 = check_well_distributed(data2);
    CHECK(all_well_distributed(r2));
    auto lr2 = linear_recurrence_report(data2);
    for (auto k : lr2.k) CHECK(k == lr2.k.front());
}

TEST_CASE("k(n) equals a plain all-pairs BFS diameter on every complete patch") {
    for (int d = 1; d <= 2; ++d) {
        auto data = lattice_data(d, d == 1 ? 6 : 3);
        for (const auto &level : data.levels) {
            if (!level.partition) continue;
            std::int64_t oracle = 0;
            const auto &part = *level.partition;
            for (std::size_t i = 0; i < part.owners.size(); ++i) {
                if (part.complete[i]) oracle = std::max(oracle, bfs_diameter(part.patches[i], level.first_returns));
            }
            CHECK(*level.k == oracle);
        }
    }
}

TEST_CASE("thinning drops a defective middle level") {
    const Window w = Window::cube(1, 256);
    std::vector<ReturnSet> sets{as_return_set(lattice_set(w, 1), 0), as_return_set(lattice_set(w, 1), 1),
                                as_return_set(lattice_set(w, 2), 2), as_return_set(lattice_set(w, 4), 3),
                                as_return_set(lattice_set(w, 8), 4)};
    auto data = build_combinatorial_data(sets);
    CHECK_FALSE(all_well_distributed(check_well_distributed(data)));
    auto thinned = thin_to_well_distributed(data);
    std::vector<int> kept;
    for (const auto &l : thinned.levels) kept.push_back(l.n);
    CHECK(kept == std::vector<int>{0, 2, 3, 4});
    // Idempotence: the thinned data passes on its own levels once partitions are rebuilt.
    std::vector<ReturnSet> again;
    for (const auto &l : thinned.levels) again.push_back(l.returns);
    auto rebuilt = build_combinatorial_data(again);
    CHECK(all_well_distributed(check_well_distributed(rebuilt)));
    auto twice = thin_to_well_distributed(rebuilt);
    CHECK(twice.levels.size() == rebuilt.levels.size());
}

TEST_CASE("linear recurrence report") {
    std::vector<std::int64_t> growing{0, 1, 2, 3, 4, 5};
    auto r = linear_recurrence_report(growing);
    CHECK_FALSE(r.flagged);
    CHECK(r.bound == 5);
    std::vector<std::int64_t> settles{3, 1, 2, 2, 2, 2};
    auto s = linear_recurrence_report(settles);
    CHECK(s.flagged);
    CHECK(s.bound == 3);
}

TEST_CASE("composite patches on the lattice model") {
    auto data = lattice_data(1, 4);
    CHECK(composite_patch(data, 2, 2, Point{0}) == std::vector<Point>{Point{0}});
    CHECK(composite_patch(data, 0, 2, Point{0}) == range1(0, 3));
    CHECK(composite_patch(data, 0, 3, Point{0}) == range1(0, 7));
    auto data2 = lattice_data(2, 3);
    for (int n = 0; n <= 3; ++n) {
        for (int m = n; m <= 3; ++m) {
            auto patch = composite_patch(data2, n, m, Point{0, 0});
            CHECK(patch.size() == static_cast<std::size_t>(1) << (2 * (m - n)));
        }
    }
}

TEST_CASE("address examples") {
    auto data = lattice_data(1, 4);
    auto a = address(data, Point{5}, 0);
    CHECK(a.m0 == 3);
    CHECK(a.path == std::vector<Point>{Point{0}, Point{4}, Point{4}, Point{5}});
    auto z = address(data, Point{0}, 2);
    CHECK(z.m0 == 2);
    CHECK(z.path == std::vector<Point>{Point{0}});
    CHECK_THROWS_AS(address(data, Point{-3}, 0), WindowTooSmall);
    CHECK_THROWS_AS(address(data, Point{3}, 1), std::invalid_argument);
    auto data2 = lattice_data(2, 2);
    auto b = address(data2, Point{1, 1}, 0);
    CHECK(b.m0 == 1);
    CHECK(b.path == std::vector<Point>{Point{0, 0}, Point{1, 1}});
}

TEST_CASE("address is the unique path found by exhaustive enumeration") {
    auto data = lattice_data(1, 5);
    // Membership oracle: x in P_n(owner) via the brute nearest-owner rule with smallest ties.
    auto owner_at = [&](int n, const Point &x) {
        const auto &upper = data.level(n + 1).returns.base;
        std::optional<Point> best;
        for (const auto &m : upper.points()) {
            if (!best || distance2(x, m) < distance2(x, *best)) best = m;
        }
        return *best;
    };
    std::function<bool(int, int, const Point &, const Point &)> in_composite = [&](int n0, int m, const Point &q,
                                                                                   const Point &p) {
        if (m == n0) return p == q;
        Point mid = p;
        // p lies in P^m_{n0}(q) iff its chain of owners from n0 upward reaches q.
        for (int j = n0; j < m; ++j) mid = owner_at(j, mid);
        return mid == q;
    };
    for (std::int64_t x = 0; x <= 31; ++x) {
        const Point p{x};
        int m0 = 0;
        while (!in_composite(0, m0, Point{0}, p)) ++m0;
        // Enumerate every sequence 0 = p_0, p_l in R_{m0-l} near p, checking all conditions.
        std::vector<std::vector<Point>> paths{{Point{0}}};
        for (int l = 1; l <= m0; ++l) {
            std::vector<std::vector<Point>> next;
            for (const auto &path : paths) {
                for (std::int64_t c = -64; c <= 64; ++c) {
                    const Point cand{c};
                    if (!data.level(m0 - l).returns.base.contains(cand)) continue;
                    if (owner_at(m0 - l, cand) != path.back()) continue;
                    if (!in_composite(0, m0 - l, cand, p)) continue;
                    auto extended = path;
                    extended.push_back(cand);
                    next.push_back(extended);
                }
            }
            paths = std::move(next);
        }
        REQUIRE(paths.size() == 1);
        CHECK(paths.front().back() == p);
        auto a = address(data, p, 0);
        CHECK(a.m0 == m0);
        CHECK(a.path == paths.front());
    }
}

TEST_CASE("period-doubling hierarchy") {
    GeneratorSpec pd;
    pd.kind = GeneratorKind::BlockSubstitution;
    pd.rules = "a:ab, b:aa";
    auto r = realize(pd, 7);
    auto data = build_combinatorial_data(r.levels);
    for (const auto &level : data.levels) {
        const std::int64_t s = std::int64_t{1} << level.n;
        CHECK(level.first_returns.vectors == std::vector<Point>{Point{-2 * s}, Point{-s}, Point{s}, Point{2 * s}});
    }
    auto lr = linear_recurrence_report(data);
    CHECK(lr.flagged);
    auto thinned = thin_to_well_distributed(data);
    CHECK(thinned.levels.front().n == 0);
    CHECK(all_well_distributed(check_well_distributed(thinned)));
}
