#include "rotfactor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <unordered_map>

#include "rotfactor/errors.hpp"
#include "rotfactor/pipeline.hpp"

namespace rotfactor {

namespace {

// Calls fn(p) for every lattice point of the box center +- h (inclusive).
template <class Fn>
void for_box(const Point &center, std::int64_t h, Fn &&fn) {
    const int d = center.dim;
    Point p = center;
    for (int i = 0; i < d; ++i) p[i] = center[i] - h;
    while (true) {
        fn(p);
        int a = d - 1;
        while (a >= 0 && p[a] == center[a] + h) {
            p[a] = center[a] - h;
            --a;
        }
        if (a < 0) return;
        ++p[a];
    }
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t scaled_distance2(const Point &z, std::int64_t scale, const Point &site) {
    std::int64_t s = 0;
    for (int i = 0; i < z.dim; ++i) {
        const std::int64_t diff = z[i] - scale * site[i];
        s += diff * diff;
    }
    return s;
}

std::int64_t inf_norm(const Point &p) {
    std::int64_t m = 0;
    for (int i = 0; i < p.dim; ++i) m = std::max(m, std::abs(p[i]));
    return m;
}

} // namespace

std::vector<Point> nearest_sites(const Point &z, std::int64_t scale, const PointSet &sites) {
    Point center(z.dim);
    for (int i = 0; i < z.dim; ++i) center[i] = floor_div(z[i], scale);
    const Window &w = sites.window();
    std::int64_t reach = 0;
    for (int i = 0; i < z.dim; ++i) reach = std::max(reach, w.extent(i));
    std::optional<std::int64_t> first;
    for (std::int64_t h = 1; !first; h *= 2) {
        for_box(center, h, [&](const Point &p) {
            if (sites.contains(p)) {
                auto d2 = scaled_distance2(z, scale, p);
                if (!first || d2 < *first) first = d2;
            }
        });
        if (h > 2 * reach) break;
    }
    if (!first) return {};
    const auto h = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(*first)) / static_cast<double>(scale))) + 1;
    std::int64_t best = *first;
    std::vector<Point> out;
    for_box(center, h, [&](const Point &p) {
        if (!sites.contains(p)) return;
        auto d2 = scaled_distance2(z, scale, p);
        if (d2 < best) {
            best = d2;
            out.clear();
        }
        if (d2 == best) out.push_back(p);
    });
    std::sort(out.begin(), out.end());
    return out;
}

Point brute_owner(const Point &x, const PointSet &owners) {
    auto near = nearest_sites(x, 1, owners);
    if (near.empty()) throw WindowTooSmall("no owner for " + x.to_string());
    return near.front();
}

std::vector<std::pair<Point, Point>> half_grid_neighbor_pairs(const PointSet &set, std::span<const Point> eligible,
                                                              double reach) {
    const std::set<Point> ok(eligible.begin(), eligible.end());
    std::set<std::pair<Point, Point>> pairs;
    const auto reach_x4 = static_cast<std::int64_t>(std::floor(4.0 * reach * reach));
    const Window &w = set.window();
    Point lo(w.dim()), hi(w.dim());
    for (int i = 0; i < w.dim(); ++i) {
        lo[i] = 2 * w.lo[i];
        hi[i] = 2 * w.hi[i];
    }
    const Window doubled(lo, hi);
    for (std::int64_t i = 0; i < doubled.volume(); ++i) {
        const Point z = doubled.point_at(static_cast<std::size_t>(i));
        auto near = nearest_sites(z, 2, set);
        if (near.size() < 2 || scaled_distance2(z, 2, near.front()) > reach_x4) continue;
        for (std::size_t a = 0; a < near.size(); ++a) {
            for (std::size_t b = a + 1; b < near.size(); ++b) {
                if (ok.count(near[a]) && ok.count(near[b])) pairs.emplace(near[a], near[b]);
            }
        }
    }
    return {pairs.begin(), pairs.end()};
}

bool cells_share_grid_point(const PointSet &set, const Point &a, const Point &b, std::int64_t scale) {
    const Point diff = b - a;
    const std::int64_t h = scale * (inf_norm(diff) / 2 + 1);
    Point mid(a.dim);
    for (int i = 0; i < a.dim; ++i) mid[i] = scale * a[i] + scale * diff[i] / 2;
    bool found = false;
    for_box(mid, h, [&](const Point &z) {
        if (found) return;
        auto near = nearest_sites(z, scale, set);
        found = std::binary_search(near.begin(), near.end(), a) && std::binary_search(near.begin(), near.end(), b);
    });
    return found;
}

std::optional<std::int64_t> plain_bfs_distance(const Point &u, const FirstReturnSet &f) {
    if (u.is_zero()) return 0;
    std::int64_t fmax = 0;
    for (const auto &v : f.vectors) fmax = std::max(fmax, inf_norm(v));
    const std::int64_t box = inf_norm(u) + (u.dim + 1) * fmax;
    std::unordered_map<Point, std::int64_t, PointHash> dist{{Point::zero(u.dim), 0}};
    std::deque<Point> queue{Point::zero(u.dim)};
    while (!queue.empty()) {
        const Point x = queue.front();
        queue.pop_front();
        const auto dx = dist.at(x);
        for (const auto &v : f.vectors) {
            const Point y = x + v;
            if (inf_norm(y) > box) continue;
            if (dist.emplace(y, dx + 1).second) {
                if (y == u) return dx + 1;
                queue.push_back(y);
            }
        }
    }
    return std::nullopt;
}

PathOracle::PathOracle(std::vector<const PointSet *> levels) : levels_(std::move(levels)) {
    const int top = static_cast<int>(levels_.size()) - 1;
    children_.resize(levels_.size());
    for (int n = 0; n < top; ++n) {
        for (const auto &x : levels_[static_cast<std::size_t>(n)]->points()) {
            children_[static_cast<std::size_t>(n)][brute_owner(x, *levels_[static_cast<std::size_t>(n + 1)])].push_back(x);
        }
    }
    const Point origin = Point::zero(levels_.front()->dim());
    leaves_.resize(levels_.size());
    for (int m = 0; m <= top; ++m) {
        if (!levels_[static_cast<std::size_t>(m)]->contains(origin)) continue;
        std::vector<std::vector<Point>> paths{{origin}};
        for (int n = m - 1; n >= 0; --n) {
            std::vector<std::vector<Point>> next;
            for (const auto &path : paths) {
                auto it = children_[static_cast<std::size_t>(n)].find(path.back());
                if (it == children_[static_cast<std::size_t>(n)].end()) continue;
                for (const auto &c : it->second) {
                    auto extended = path;
                    extended.push_back(c);
                    next.push_back(std::move(extended));
                }
            }
            paths = std::move(next);
        }
        for (auto &path : paths) leaves_[static_cast<std::size_t>(m)][path.back()].push_back(std::move(path));
    }
}

std::optional<PathOracle::Found> PathOracle::find(const Point &p) const {
    for (std::size_t m = 0; m < leaves_.size(); ++m) {
        auto it = leaves_[m].find(p);
        if (it != leaves_[m].end()) return Found{static_cast<int>(m), it->second};
    }
    return std::nullopt;
}

namespace {

std::string pair_string(const Point &a, const Point &b) { return a.to_string() + "-" + b.to_string(); }

OracleResult check_neighbors(const Level &level) {
    OracleResult r;
    r.name = "neighbor_graph level " + std::to_string(level.n);
    const auto &set = level.returns.base;
    const std::set<Point> excluded(level.graph.excluded.begin(), level.graph.excluded.end());
    std::vector<Point> eligible;
    for (const auto &p : set.interior_points()) {
        if (!excluded.count(p)) eligible.push_back(p);
    }
    const auto confirmed = half_grid_neighbor_pairs(set, eligible, level.radii.safe_covering);
    std::set<std::pair<Point, Point>> edges(level.graph.edges.begin(), level.graph.edges.end());
    r.compared = edges.size();
    for (const auto &e : confirmed) {
        if (!edges.count(e)) {
            r.pass = false;
            r.detail = "pipeline misses edge " + pair_string(e.first, e.second);
            return r;
        }
    }
    const std::set<std::pair<Point, Point>> grid(confirmed.begin(), confirmed.end());
    for (const auto &e : edges) {
        if (grid.count(e)) continue;
        if (!cells_share_grid_point(set, e.first, e.second, 8)) {
            r.pass = false;
            r.detail = "edge " + pair_string(e.first, e.second) + " has no verified common cell point";
            return r;
        }
    }
    return r;
}

OracleResult check_f_distance(const Level &level, const OracleOptions &options) {
    OracleResult r;
    r.name = "f_distance level " + std::to_string(level.n);
    const auto interior = level.returns.base.interior_points();
    if (interior.size() < 2) {
        r.detail = "skipped: fewer than 2 interior points";
        return r;
    }
    std::int64_t fmax = 0;
    for (const auto &v : level.first_returns.vectors) fmax = std::max(fmax, inf_norm(v));
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(level.n));
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    for (int s = 0; s < options.f_distance_samples; ++s) {
        const Point a = interior[pick(rng)];
        std::vector<Point> near;
        for (const auto &b : interior) {
            if (inf_norm(b - a) <= 4 * fmax) near.push_back(b);
        }
        const Point b = near[std::uniform_int_distribution<std::size_t>(0, near.size() - 1)(rng)];
        const Point u = b - a;
        auto expected = plain_bfs_distance(u, level.first_returns);
        std::optional<std::int64_t> got;
        try {
            got = f_distance(u, level.first_returns);
        } catch (const NotGenerated &) {
        }
        ++r.compared;
        if (got != expected) {
            r.pass = false;
            r.detail = "f_distance" + u.to_string() + ": pipeline " + (got ? std::to_string(*got) : "none") +
                       ", oracle " + (expected ? std::to_string(*expected) : "none");
            return r;
        }
    }
    return r;
}

OracleResult check_partition(const Level &lower, const Level &upper) {
    OracleResult r;
    r.name = "partition level " + std::to_string(lower.n);
    const auto &part = *lower.partition;
    for (std::size_t i = 0; i < part.owners.size(); ++i) {
        for (const auto &x : part.patches[i]) {
            ++r.compared;
            const Point expected = brute_owner(x, upper.returns.base);
            if (expected != part.owners[i]) {
                r.pass = false;
                r.detail = "point " + x.to_string() + ": pipeline owner " + part.owners[i].to_string() +
                           ", oracle owner " + expected.to_string();
                return r;
            }
        }
    }
    return r;
}

OracleResult check_addresses(const CombinatorialData &data, const OracleOptions &options) {
    OracleResult r;
    r.name = "address";
    const int d = data.levels.front().returns.base.dim();
    std::vector<const PointSet *> sets;
    for (std::size_t i = 0; i < data.levels.size(); ++i) {
        if (data.levels[i].n != static_cast<int>(i)) {
            r.detail = "skipped: levels are not consecutive from 0";
            return r;
        }
        sets.push_back(&data.levels[i].returns.base);
    }
    const std::int64_t radius = options.address_radius >= 0 ? options.address_radius : (d == 1 ? 64 : (d == 2 ? 16 : 4));
    const PathOracle oracle(sets);
    for_box(Point::zero(d), radius, [&](const Point &p) {
        if (!r.pass || !sets.front()->contains(p)) return;
        ++r.compared;
        auto expected = oracle.find(p);
        if (expected && expected->paths.size() != 1) {
            r.pass = false;
            r.detail = "oracle finds " + std::to_string(expected->paths.size()) + " paths to " + p.to_string();
            return;
        }
        std::optional<Address> got;
        try {
            got = address(data, p, 0);
        } catch (const WindowTooSmall &) {
        }
        const bool same = (!got && !expected) ||
                          (got && expected && got->m0 == expected->m0 && got->path == expected->paths.front());
        if (!same) {
            r.pass = false;
            r.detail = "address of " + p.to_string() + ": pipeline " +
                       (got ? "m0=" + std::to_string(got->m0) : std::string("unreachable")) + ", oracle " +
                       (expected ? "m0=" + std::to_string(expected->m0) : std::string("unreachable"));
        }
    });
    return r;
}

} // namespace

std::vector<OracleResult> oracle_check(const RunReport &report, const OracleOptions &options) {
    const auto &g = report.config.generator;
    const bool lattice = g.kind == GeneratorKind::LatticeModel;
    const bool sub1d = (g.kind == GeneratorKind::Substitution1d || g.kind == GeneratorKind::BlockSubstitution) && g.dim == 1;
    if (!lattice && !sub1d) {
        throw ConfigError("oracle-check supports lattice_model and 1-dimensional substitutions only");
    }
    const auto &window = report.data.levels.front().returns.base.window();
    if (sub1d && window.volume() > 10000) {
        throw ConfigError("oracle-check needs a window of at most 10^4 points, got " + std::to_string(window.volume()) +
                          " (set schedule.iterations)");
    }
    std::vector<OracleResult> out;
    const auto &levels = report.data.levels;
    for (const auto &level : levels) out.push_back(check_neighbors(level));
    for (const auto &level : levels) out.push_back(check_f_distance(level, options));
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) out.push_back(check_partition(levels[i], levels[i + 1]));
    if (lattice) {
        out.push_back(check_addresses(report.data, options));
    } else {
        out.push_back({"address", true, 0, "skipped: the base point sits on the window boundary"});
    }
    return out;
}

} // namespace rotfactor
