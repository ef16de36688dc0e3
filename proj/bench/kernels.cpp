// Serial reference vs OpenMP kernel, pairwise.
#include <benchmark/benchmark.h>

#include "rotfactor/pipeline.hpp"

using namespace rotfactor;

namespace {

const std::vector<ReturnSet> &lattice_levels(int d) {
    static const auto one = realize({GeneratorKind::LatticeModel, 1, {2}, {}, {}, {}, {}}, 6).levels;
    static const auto two = realize({GeneratorKind::LatticeModel, 2, {2}, {}, {}, {}, {}}, 4).levels;
    return d == 1 ? one : two;
}

const Realization &period_doubling() {
    static const auto r = [] {
        GeneratorSpec g;
        g.kind = GeneratorKind::Substitution1d;
        g.rules = "a:ab, b:aa";
        return realize(g, 8);
    }();
    return r;
}

const CombinatorialData &lattice_data() {
    static const auto data = build_combinatorial_data(lattice_levels(1));
    return data;
}

template <bool Parallel>
void BM_distance_transform(benchmark::State &state) {
    const auto &set = lattice_levels(2)[0].base;
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? half_grid_distance_transform(set) : half_grid_distance_transform_serial(set));
    }
}

template <bool Parallel>
void BM_neighbors(benchmark::State &state) {
    auto set = lattice_levels(2)[0].base;
    set.set_interior_margin(3.0);
    const auto radii = packing_covering_radii(set);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? voronoi_neighbors(set, radii) : voronoi_neighbors_serial(set, radii));
    }
}

template <bool Parallel>
void BM_occurrence_scan(benchmark::State &state) {
    const auto &r = period_doubling();
    const auto &level = r.levels[3];
    std::vector<Point> all;
    const auto &w = level.base.window();
    for (std::int64_t x = w.lo[0]; x <= w.hi[0]; ++x) all.push_back(Point{x});
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? scan_occurrences(*r.config, level.cylinder, all)
                                          : scan_occurrences_serial(*r.config, level.cylinder, all));
    }
}

template <bool Parallel>
void BM_partition(benchmark::State &state) {
    const auto &levels = lattice_levels(2);
    const auto &lower = levels[0].base;
    const auto &upper = levels[1].base;
    const auto reach = packing_covering_radii(upper).safe_covering;
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? voronoi_partition(lower, upper, 2 * reach, reach)
                                          : voronoi_partition_serial(lower, upper, 2 * reach, reach));
    }
}

template <bool Parallel>
void BM_theta_scan(benchmark::State &state) {
    const auto &data = lattice_data();
    ScanSpec spec;
    spec.qmax = 24;
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? theta_scan(data, TorusKind::One, spec)
                                          : theta_scan_serial(data, TorusKind::One, spec));
    }
}

} // namespace

BENCHMARK(BM_distance_transform<false>)->Name("distance_transform/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_distance_transform<true>)->Name("distance_transform/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_neighbors<false>)->Name("voronoi_neighbors/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_neighbors<true>)->Name("voronoi_neighbors/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_occurrence_scan<false>)->Name("occurrence_scan/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_occurrence_scan<true>)->Name("occurrence_scan/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_partition<false>)->Name("voronoi_partition/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_partition<true>)->Name("voronoi_partition/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_scan<false>)->Name("theta_scan/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta_scan<true>)->Name("theta_scan/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
