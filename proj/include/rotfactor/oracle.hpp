#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rotfactor/hierarchy.hpp"

namespace rotfactor {

struct RunReport;

struct OracleResult {
    std::string name;
    bool pass = true;
    std::size_t compared = 0;
    std::string detail; // first differing item, or a skip reason
};

struct OracleOptions {
    int f_distance_samples = 200;
    std::uint64_t seed = 20261018;
    std::int64_t address_radius = -1; // |p|_inf bound; -1 picks 64 / 16 / 4 by dimension
};

// Nearest sites to z / scale, exactly: every site at the minimal distance.
// Found by growing a box until it holds a site, then scanning the box that
// the first hit certifies.
std::vector<Point> nearest_sites(const Point &z, std::int64_t scale, const PointSet &sites);

// Lexicographically smallest nearest owner of x.
Point brute_owner(const Point &x, const PointSet &owners);

// Voronoi neighbor pairs among `eligible` points, found by scanning the
// half-integer grid for points equidistant from two nearest sites.
std::vector<std::pair<Point, Point>> half_grid_neighbor_pairs(const PointSet &set, std::span<const Point> eligible,
                                                              double reach);

// Search for a common point of the cells of a and b on the 1/scale grid.
bool cells_share_grid_point(const PointSet &set, const Point &a, const Point &b, std::int64_t scale);

// Word length of u over F by BFS inside the box |x|_inf <= |u|_inf + (d+1) max|F|_inf.
std::optional<std::int64_t> plain_bfs_distance(const Point &u, const FirstReturnSet &f);

// Exhaustive enumeration of address paths on brute-force patches.
struct PathOracle {
    // levels[i]: return set of level i, levels consecutive from 0.
    explicit PathOracle(std::vector<const PointSet *> levels);

    // Smallest m and every path reaching p from 0 at level m; nullopt when
    // no computed level reaches p.
    struct Found {
        int m0 = 0;
        std::vector<std::vector<Point>> paths;
    };
    std::optional<Found> find(const Point &p) const;

private:
    std::vector<const PointSet *> levels_;
    // children_[n][q]: brute patch of owner q at level n (points of R_n).
    std::vector<std::map<Point, std::vector<Point>>> children_;
    std::vector<std::map<Point, std::vector<std::vector<Point>>>> leaves_; // per m
};

// Independent recomputation of the report's neighbor graphs, F-distances,
// partitions and addresses. Needs a lattice model or a d = 1 substitution
// with at most 10^4 window points (ConfigError otherwise).
std::vector<OracleResult> oracle_check(const RunReport &report, const OracleOptions &options = {});

} // namespace rotfactor
