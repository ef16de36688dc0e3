#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rotfactor/delone.hpp"
#include "rotfactor/generators.hpp"

namespace rotfactor {

// How a point equidistant from several owners is assigned. LexLargest exists
// only to exercise the oracle checks with a deliberately wrong choice.
enum class TieBreak { LexSmallest, LexLargest };

// Voronoi patches of R_n over the owners R_{n+1}.
struct Partition {
    double margin = 0.0;                 // R_n points at least this far from the boundary are assigned
    double owner_reach = 0.0;            // safe covering bound of the owner set
    std::vector<Point> owners;           // sorted; every owner with a nonempty patch
    std::vector<std::vector<Point>> patches; // parallel to owners, each sorted
    std::vector<bool> complete;          // patch not clipped by the assignment margin

    const std::vector<Point> *patch_of(const Point &owner) const;
    bool is_complete(const Point &owner) const;
    std::optional<Point> owner_of(const Point &p) const;
    std::size_t complete_count() const;

    std::unordered_map<Point, std::size_t, PointHash> index;
    std::unordered_map<Point, Point, PointHash> assignment;
};

// Assigns every R_n point with boundary distance >= margin to its nearest
// point of `owners` (searched within `owner_reach`). Throws WindowTooSmall when
// such a point has no owner within reach.
Partition voronoi_partition(const PointSet &rn, const PointSet &owners, double margin, double owner_reach,
                            TieBreak tie = TieBreak::LexSmallest);
Partition voronoi_partition_serial(const PointSet &rn, const PointSet &owners, double margin, double owner_reach,
                                   TieBreak tie = TieBreak::LexSmallest);

struct Level {
    int n = 0;
    ReturnSet returns;
    DeloneRadii radii;
    NeighborGraph graph;
    FirstReturnSet first_returns;
    // Patches of this level over the next one; absent on the top level.
    std::optional<Partition> partition;
    std::optional<std::int64_t> k;
};

struct HierarchyOptions {
    double margin_factor = 2.0; // partition margin in units of the next level's covering bound
    TieBreak tie = TieBreak::LexSmallest;
    bool strict_well_distributed = false; // (iv) over all owners in R_{n+1}
};

struct CombinatorialData {
    std::vector<Level> levels;
    HierarchyOptions options;
    std::vector<std::string> diagnostics;

    const Level &level(int n) const;
    int top() const { return levels.back().n; }
};

// Radii, neighbor graph and F_n per level, partitions and k(n) between
// consecutive entries. The return sets must be nested.
CombinatorialData build_combinatorial_data(std::vector<ReturnSet> returns, const HierarchyOptions &options = {});

// Level geometry alone (radii, graph, F_n).
Level make_level(ReturnSet returns);
void attach_partition(Level &lower, const Level &upper, const HierarchyOptions &options);

// max F_n-diameter over complete patches; 0 with no complete patch.
std::int64_t k_constant(const Partition &partition, const FirstReturnSet &f);

struct WellDistributedReport {
    int n = 0;                       // level pair (n, next)
    bool iii = true;
    std::optional<bool> iv;          // absent when the level two above is not computed
    std::vector<Point> iii_violations;
    std::vector<Point> iv_violations;
    std::size_t patches_checked = 0;
    std::size_t clipped = 0;

    bool passes() const { return iii && iv.value_or(true); }
};

// (iii): F_n is contained in P - P for every complete patch.
bool differences_cover(std::span<const Point> patch, const FirstReturnSet &f);

std::vector<WellDistributedReport> check_well_distributed(const CombinatorialData &data);
bool all_well_distributed(std::span<const WellDistributedReport> reports);

// Greedy subsequence of levels passing (iii) pairwise and (iv) on triples.
CombinatorialData thin_to_well_distributed(const CombinatorialData &data);

struct LinearRecurrenceReport {
    std::vector<std::int64_t> k;
    std::int64_t bound = 0; // L-hat
    bool flagged = false;
};

LinearRecurrenceReport linear_recurrence_report(const CombinatorialData &data);
LinearRecurrenceReport linear_recurrence_report(std::span<const std::int64_t> k);

// P^m_n(p) for p in R_m; throws WindowTooSmall when the recursion meets a
// clipped patch.
std::vector<Point> composite_patch(const CombinatorialData &data, int n, int m, const Point &p);

struct Address {
    int m0 = 0;
    std::vector<Point> path;
};

// Throws WindowTooSmall when p is not reached within the computed levels.
Address address(const CombinatorialData &data, const Point &p, int n0);

} // namespace rotfactor
