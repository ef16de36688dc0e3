#include "rotfactor/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rotfactor/errors.hpp"

namespace rotfactor {

const std::vector<Point> *Partition::patch_of(const Point &owner) const {
    auto it = index.find(owner);
    return it == index.end() ? nullptr : &patches[it->second];
}

bool Partition::is_complete(const Point &owner) const {
    auto it = index.find(owner);
    return it != index.end() && complete[it->second];
}

std::optional<Point> Partition::owner_of(const Point &p) const {
    auto it = assignment.find(p);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
}

std::size_t Partition::complete_count() const {
    return static_cast<std::size_t>(std::count(complete.begin(), complete.end(), true));
}

namespace {

std::optional<Point> nearest_owner(const Point &x, const LatticeMask &owners, std::span<const Point> offsets,
                                   TieBreak tie) {
    if (owners.contains(x)) return x;
    std::optional<Point> best;
    std::int64_t best_norm = -1;
    for (const auto &off : offsets) {
        const auto n2 = off.norm2();
        if (best && n2 > best_norm) break;
        const Point y = x + off;
        if (!owners.contains(y)) continue;
        if (!best) {
            best = y;
            best_norm = n2;
            if (tie == TieBreak::LexSmallest) break;
        } else {
            best = y; // offsets with equal norm come in increasing order
        }
    }
    return best;
}

Partition assemble(const PointSet &rn, const PointSet &owners, double margin, double owner_reach,
                   std::vector<Point> assigned, std::vector<Point> owner_for) {
    Partition part;
    part.margin = margin;
    part.owner_reach = owner_reach;
    std::map<Point, std::vector<Point>> grouped;
    for (std::size_t i = 0; i < assigned.size(); ++i) {
        grouped[owner_for[i]].push_back(assigned[i]);
        part.assignment.emplace(assigned[i], owner_for[i]);
    }
    const Window &w = rn.window();
    (void)owners;
    for (auto &[owner, pts] : grouped) {
        part.index.emplace(owner, part.owners.size());
        part.owners.push_back(owner);
        part.complete.push_back(static_cast<double>(w.boundary_distance(owner)) >= margin + owner_reach);
        part.patches.push_back(std::move(pts));
    }
    return part;
}

std::vector<Point> assignable(const PointSet &rn, double margin) {
    std::vector<Point> out;
    for (const auto &p : rn.points()) {
        if (static_cast<double>(rn.window().boundary_distance(p)) >= margin) out.push_back(p);
    }
    return out;
}

void check_owner_subset(const PointSet &rn, const PointSet &owners) {
    if (!(rn.window() == owners.window())) throw InvariantViolation("consecutive return sets use different windows");
    for (const auto &m : owners.points()) {
        if (!rn.contains(m)) throw InvariantViolation("owner " + m.to_string() + " is not a point of the lower level");
    }
}

[[noreturn]] void no_owner(const Point &x, double reach) {
    throw WindowTooSmall("window too small: point " + x.to_string() + " has no owner within the covering bound " +
                         std::to_string(reach));
}

} // namespace

Partition voronoi_partition(const PointSet &rn, const PointSet &owners, double margin, double owner_reach,
                            TieBreak tie) {
    check_owner_subset(rn, owners);
    const auto pts = assignable(rn, margin);
    const auto offsets = ball_offsets(rn.dim(), owner_reach);
    const LatticeMask &mask = owners.mask();
    std::vector<Point> owner_for(pts.size(), Point::zero(rn.dim()));
    std::vector<std::uint8_t> found(pts.size(), 0);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pts.size()); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (auto o = nearest_owner(pts[idx], mask, offsets, tie)) {
            owner_for[idx] = *o;
            found[idx] = 1;
        }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!found[i]) no_owner(pts[i], owner_reach);
    }
    return assemble(rn, owners, margin, owner_reach, pts, std::move(owner_for));
}

Partition voronoi_partition_serial(const PointSet &rn, const PointSet &owners, double margin, double owner_reach,
                                   TieBreak tie) {
    check_owner_subset(rn, owners);
    const auto pts = assignable(rn, margin);
    const auto all = owners.points();
    std::vector<Point> owner_for;
    for (const auto &x : pts) {
        std::optional<Point> best;
        std::int64_t best_d = 0;
        for (const auto &m : all) {
            const auto d2 = distance2(x, m);
            const bool better = !best || d2 < best_d ||
                                (d2 == best_d && (tie == TieBreak::LexSmallest ? m < *best : m > *best));
            if (better) {
                best = m;
                best_d = d2;
            }
        }
        if (!best || static_cast<double>(best_d) > owner_reach * owner_reach) no_owner(x, owner_reach);
        owner_for.push_back(*best);
    }
    return assemble(rn, owners, margin, owner_reach, pts, std::move(owner_for));
}

const Level &CombinatorialData::level(int n) const {
    for (const auto &l : levels) {
        if (l.n == n) return l;
    }
    throw std::out_of_range("level " + std::to_string(n) + " was not computed");
}

Level make_level(ReturnSet returns) {
    Level level;
    level.n = returns.level;
    auto [cov_x4, eroded] = covering_radius_x4(returns.base);
    (void)eroded;
    const double safe =
        std::sqrt(static_cast<double>(cov_x4)) / 2.0 + std::sqrt(static_cast<double>(returns.base.dim())) / 4.0;
    returns.base.set_interior_margin(2.0 * safe);
    level.radii = packing_covering_radii(returns.base);
    level.graph = voronoi_neighbors(returns.base, level.radii);
    level.first_returns = first_return_vectors(level.graph);
    if (level.first_returns.empty()) {
        throw WindowTooSmall("window too small: level " + std::to_string(level.n) + " has no interior neighbor pair");
    }
    level.returns = std::move(returns);
    return level;
}

namespace {

std::vector<Point> shape_of(std::span<const Point> patch, const Point &owner) {
    std::vector<Point> out;
    out.reserve(patch.size());
    for (const auto &p : patch) out.push_back(p - owner);
    return out;
}

} // namespace

std::int64_t k_constant(const Partition &partition, const FirstReturnSet &f) {
    std::map<std::vector<Point>, std::int64_t> cache;
    std::int64_t k = 0;
    for (std::size_t i = 0; i < partition.owners.size(); ++i) {
        if (!partition.complete[i]) continue;
        auto shape = shape_of(partition.patches[i], partition.owners[i]);
        auto it = cache.find(shape);
        if (it == cache.end()) it = cache.emplace(shape, f_diameter(shape, f)).first;
        k = std::max(k, it->second);
    }
    return k;
}

void attach_partition(Level &lower, const Level &upper, const HierarchyOptions &options) {
    const double reach = upper.radii.safe_covering;
    lower.partition = voronoi_partition(lower.returns.base, upper.returns.base, options.margin_factor * reach, reach,
                                        options.tie);
    lower.k = k_constant(*lower.partition, lower.first_returns);
}

CombinatorialData build_combinatorial_data(std::vector<ReturnSet> returns, const HierarchyOptions &options) {
    if (returns.empty()) throw std::invalid_argument("no return sets");
    CombinatorialData data;
    data.options = options;
    for (auto &rs : returns) {
        if (!rs.reliable) data.diagnostics.push_back("level " + std::to_string(rs.level) + ": " + rs.note);
        data.levels.push_back(make_level(std::move(rs)));
    }
    for (std::size_t i = 0; i + 1 < data.levels.size(); ++i) {
        if (data.levels[i + 1].n <= data.levels[i].n) throw InvariantViolation("level indices must increase");
        attach_partition(data.levels[i], data.levels[i + 1], options);
        const auto &part = *data.levels[i].partition;
        const auto clipped = part.owners.size() - part.complete_count();
        if (clipped) {
            data.diagnostics.push_back("level " + std::to_string(data.levels[i].n) + ": " + std::to_string(clipped) +
                                       " clipped patches excluded");
        }
        if (part.complete_count() == 0) {
            throw WindowTooSmall("window too small: level " + std::to_string(data.levels[i].n) +
                                 " has no complete patch");
        }
    }
    return data;
}

bool differences_cover(std::span<const Point> patch, const FirstReturnSet &f) {
    std::set<Point> diffs;
    for (const auto &a : patch) {
        for (const auto &b : patch) diffs.insert(a - b);
    }
    return std::all_of(f.vectors.begin(), f.vectors.end(), [&](const Point &v) { return diffs.count(v) > 0; });
}

namespace {

bool check_iii(const Level &lower, WellDistributedReport &report) {
    const auto &part = *lower.partition;
    std::map<std::vector<Point>, bool> cache;
    for (std::size_t i = 0; i < part.owners.size(); ++i) {
        if (!part.complete[i]) {
            ++report.clipped;
            continue;
        }
        ++report.patches_checked;
        auto shape = shape_of(part.patches[i], part.owners[i]);
        auto it = cache.find(shape);
        if (it == cache.end()) it = cache.emplace(shape, differences_cover(shape, lower.first_returns)).first;
        if (!it->second) report.iii_violations.push_back(part.owners[i]);
    }
    report.iii = report.iii_violations.empty();
    return report.iii;
}

// Owners drawn from `owner_set` must carry translates of one patch.
bool check_iv(const Level &lower, const PointSet &owner_set, WellDistributedReport &report) {
    const auto &part = *lower.partition;
    std::optional<std::vector<Point>> model;
    for (const auto &m : owner_set.points()) {
        if (!part.is_complete(m)) continue;
        auto shape = shape_of(*part.patch_of(m), m);
        if (!model) {
            model = std::move(shape);
        } else if (shape != *model) {
            report.iv_violations.push_back(m);
        }
    }
    report.iv = report.iv_violations.empty();
    return *report.iv;
}

} // namespace

std::vector<WellDistributedReport> check_well_distributed(const CombinatorialData &data) {
    std::vector<WellDistributedReport> out;
    for (std::size_t i = 0; i + 1 < data.levels.size(); ++i) {
        const auto &lower = data.levels[i];
        WellDistributedReport report;
        report.n = lower.n;
        check_iii(lower, report);
        if (data.options.strict_well_distributed) {
            check_iv(lower, data.levels[i + 1].returns.base, report);
        } else if (i + 2 < data.levels.size()) {
            check_iv(lower, data.levels[i + 2].returns.base, report);
        }
        out.push_back(std::move(report));
    }
    return out;
}

bool all_well_distributed(std::span<const WellDistributedReport> reports) {
    return std::all_of(reports.begin(), reports.end(), [](const WellDistributedReport &r) { return r.passes(); });
}

CombinatorialData thin_to_well_distributed(const CombinatorialData &data) {
    CombinatorialData out;
    out.options = data.options;
    out.diagnostics = data.diagnostics;
    out.levels.push_back(data.levels.front());
    out.levels.back().partition.reset();
    out.levels.back().k.reset();
    std::vector<int> dropped;
    for (std::size_t j = 1; j < data.levels.size(); ++j) {
        Level last = out.levels.back();
        const Level &cand = data.levels[j];
        bool ok = true;
        try {
            attach_partition(last, cand, data.options);
        } catch (const WindowTooSmall &) {
            ok = false;
        }
        if (ok) {
            WellDistributedReport r;
            ok = last.partition->complete_count() > 0 && check_iii(last, r);
        }
        if (ok && out.levels.size() >= 2) {
            WellDistributedReport r;
            ok = check_iv(out.levels[out.levels.size() - 2], cand.returns.base, r);
        }
        if (!ok) {
            dropped.push_back(cand.n);
            continue;
        }
        out.levels.back() = std::move(last);
        out.levels.push_back(cand);
        out.levels.back().partition.reset();
        out.levels.back().k.reset();
    }
    if (!dropped.empty()) {
        std::string list;
        for (auto n : dropped) list += (list.empty() ? "" : ",") + std::to_string(n);
        out.diagnostics.push_back("thinning dropped levels " + list);
    }
    if (out.levels.size() < 3) {
        out.diagnostics.push_back("thinning kept fewer than 3 levels; well-distributed data not found in this window");
    }
    return out;
}

LinearRecurrenceReport linear_recurrence_report(std::span<const std::int64_t> k) {
    LinearRecurrenceReport r;
    r.k.assign(k.begin(), k.end());
    if (r.k.empty()) return r;
    r.bound = *std::max_element(r.k.begin(), r.k.end());
    const std::size_t start = r.k.size() / 2;
    r.flagged = r.k.size() >= 2 &&
                std::all_of(r.k.begin() + static_cast<std::ptrdiff_t>(start), r.k.end(),
                            [&](std::int64_t v) { return v == r.k[start]; });
    return r;
}

LinearRecurrenceReport linear_recurrence_report(const CombinatorialData &data) {
    std::vector<std::int64_t> k;
    for (const auto &l : data.levels) {
        if (l.k) k.push_back(*l.k);
    }
    return linear_recurrence_report(k);
}

namespace {

std::size_t position_of(const CombinatorialData &data, int n) {
    for (std::size_t i = 0; i < data.levels.size(); ++i) {
        if (data.levels[i].n == n) return i;
    }
    throw std::out_of_range("level " + std::to_string(n) + " was not computed");
}

const std::vector<Point> &complete_patch(const Level &level, const Point &q) {
    const auto &part = *level.partition;
    const auto *patch = part.patch_of(q);
    if (!patch || !part.is_complete(q)) {
        throw WindowTooSmall("window too small: patch of " + q.to_string() + " at level " + std::to_string(level.n) +
                             " is clipped by the window");
    }
    return *patch;
}

} // namespace

std::vector<Point> composite_patch(const CombinatorialData &data, int n, int m, const Point &p) {
    const auto lo = position_of(data, n);
    const auto hi = position_of(data, m);
    if (lo > hi) throw std::invalid_argument("composite patch needs n <= m");
    if (!data.levels[hi].returns.base.contains(p)) {
        throw std::invalid_argument("point " + p.to_string() + " is not in R_" + std::to_string(m));
    }
    std::vector<Point> cur{p};
    for (std::size_t pos = hi; pos-- > lo;) {
        std::vector<Point> next;
        for (const auto &q : cur) {
            const auto &patch = complete_patch(data.levels[pos], q);
            next.insert(next.end(), patch.begin(), patch.end());
        }
        std::sort(next.begin(), next.end());
        cur = std::move(next);
    }
    return cur;
}

Address address(const CombinatorialData &data, const Point &p, int n0) {
    const auto lo = position_of(data, n0);
    if (!data.levels[lo].returns.base.contains(p)) {
        throw std::invalid_argument("point " + p.to_string() + " is not in R_" + std::to_string(n0));
    }
    const Point origin = Point::zero(p.dim);
    std::optional<std::size_t> found;
    for (std::size_t hi = lo; hi < data.levels.size(); ++hi) {
        auto patch = composite_patch(data, n0, data.levels[hi].n, origin);
        if (std::binary_search(patch.begin(), patch.end(), p)) {
            found = hi;
            break;
        }
    }
    if (!found) {
        throw WindowTooSmall("point " + p.to_string() + " is not reached within the computed levels; raise max_level");
    }
    Address out;
    out.m0 = data.levels[*found].n;
    out.path.push_back(origin);
    for (std::size_t pos = *found; pos-- > lo;) {
        const auto &level = data.levels[pos];
        const auto &patch = complete_patch(level, out.path.back());
        std::optional<Point> next;
        for (const auto &q : patch) {
            auto below = composite_patch(data, n0, level.n, q);
            if (std::binary_search(below.begin(), below.end(), p)) {
                if (next) throw InvariantViolation("address path is not unique at level " + std::to_string(level.n));
                next = q;
            }
        }
        if (!next) throw InvariantViolation("address path breaks at level " + std::to_string(level.n));
        out.path.push_back(*next);
    }
    if (out.path.back() != p) throw InvariantViolation("address path does not end at " + p.to_string());
    if (out.m0 > n0) {
        auto prev = composite_patch(data, n0, data.levels[*found - 1].n, origin);
        if (std::binary_search(prev.begin(), prev.end(), p)) throw InvariantViolation("address level is not minimal");
    }
    return out;
}

} // namespace rotfactor
