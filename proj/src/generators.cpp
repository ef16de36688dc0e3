#include "rotfactor/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>

#include "rotfactor/errors.hpp"

namespace rotfactor {

namespace {

std::string strip(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Window block_window(int d, const std::array<std::int64_t, kMaxDim> &shape) {
    Point lo(d);
    Point hi(d);
    for (int i = 0; i < d; ++i) hi[i] = shape[static_cast<std::size_t>(i)] - 1;
    return {lo, hi};
}

std::string shape_string(int d, const std::array<std::int64_t, kMaxDim> &shape) {
    std::string s;
    for (int i = 0; i < d; ++i) s += (i ? "x" : "") + std::to_string(shape[static_cast<std::size_t>(i)]);
    return s;
}

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (std::int64_t{1} << 40) / base) throw WindowTooSmall("expansion exponent too large");
        r *= base;
    }
    return r;
}

// Flat index strides of a window (last axis fastest).
std::array<std::int64_t, kMaxDim> strides_of(const Window &w) {
    std::array<std::int64_t, kMaxDim> s{0, 0, 0};
    std::int64_t acc = 1;
    for (int i = w.dim() - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = acc;
        acc *= w.extent(i);
    }
    return s;
}

struct PatternProbe {
    std::vector<std::int64_t> deltas; // flat offsets of B cells from idx(p)
    std::vector<Symbol> values;       // config[B]
};

PatternProbe make_probe(const Configuration &config, const Window &cylinder) {
    if (!config.support.contains(cylinder)) {
        throw WindowTooSmall("cylinder " + cylinder.to_string() + " does not fit in the configuration support " +
                             config.support.to_string());
    }
    PatternProbe probe;
    const auto strides = strides_of(config.support);
    const auto n = static_cast<std::size_t>(cylinder.volume());
    probe.deltas.reserve(n);
    probe.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point b = cylinder.point_at(i);
        std::int64_t delta = 0;
        for (int a = 0; a < b.dim; ++a) delta += b[a] * strides[static_cast<std::size_t>(a)];
        probe.deltas.push_back(delta);
        probe.values.push_back(config.at(b));
    }
    return probe;
}

bool matches(const Configuration &config, const PatternProbe &probe, const Point &p) {
    const auto base = static_cast<std::int64_t>(config.support.index(p));
    for (std::size_t j = 0; j < probe.deltas.size(); ++j) {
        if (config.cells[static_cast<std::size_t>(base + probe.deltas[j])] != probe.values[j]) return false;
    }
    return true;
}

std::vector<Point> window_points(const Window &w) {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(w.volume()));
    for (std::size_t i = 0; i < static_cast<std::size_t>(w.volume()); ++i) out.push_back(w.point_at(i));
    return out;
}

void assess_reliability(ReturnSet &rs) {
    try {
        auto [cov_x4, eroded] = covering_radius_x4(rs.base);
        (void)eroded;
        const double safe = std::sqrt(static_cast<double>(cov_x4)) / 2.0 +
                            std::sqrt(static_cast<double>(rs.base.dim())) / 4.0;
        PointSet probe = rs.base;
        probe.set_interior_margin(2.0 * safe);
        if (probe.interior_points().size() < 2) {
            rs.reliable = false;
            rs.note = "fewer than 2 points farther than twice the covering radius from the window boundary";
        }
    } catch (const WindowTooSmall &e) {
        rs.reliable = false;
        rs.note = e.what();
    }
}

} // namespace

Substitution Substitution::parse(int dim, std::string_view rules, bool require_constant_shape) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("substitution dimension must be 1, 2 or 3");
    Substitution sub;
    sub.dim_ = dim;
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto &raw : split(rules, ',')) {
        std::string entry = strip(raw);
        if (entry.empty()) continue;
        auto colon = entry.find(':');
        if (colon == std::string::npos) throw ConfigError("rule '" + entry + "' must look like sym:image");
        std::string name = entry.substr(0, colon);
        if (name.size() != 1) throw ConfigError("rule symbol '" + name + "' must be a single character");
        if (std::find(sub.names_.begin(), sub.names_.end(), name) != sub.names_.end()) {
            throw ConfigError("symbol '" + name + "' has two rules");
        }
        sub.names_.push_back(name);
        entries.emplace_back(name, entry.substr(colon + 1));
    }
    if (sub.names_.empty()) throw ConfigError("substitution has no rules");
    if (sub.names_.size() > 256) throw ConfigError("alphabet too large");

    for (const auto &[name, text] : entries) {
        Block block;
        std::vector<std::vector<std::string>> layers;
        for (const auto &layer : split(text, '|')) layers.push_back(split(layer, '/'));
        if (dim < 3 && layers.size() > 1) throw ConfigError("rule for symbol '" + name + "' uses '|' but d < 3");
        if (dim < 2 && layers[0].size() > 1) throw ConfigError("rule for symbol '" + name + "' uses '/' but d = 1");
        const std::size_t rows = layers[0].size();
        const std::size_t cols = layers[0][0].size();
        for (const auto &layer : layers) {
            if (layer.size() != rows) throw ConfigError("rule for symbol '" + name + "' has ragged layers");
            for (const auto &row : layer) {
                if (row.size() != cols) throw ConfigError("rule for symbol '" + name + "' has ragged rows");
            }
        }
        if (cols == 0) throw ConfigError("rule for symbol '" + name + "' has an empty image");
        if (dim == 1) block.shape = {static_cast<std::int64_t>(cols), 1, 1};
        if (dim == 2) block.shape = {static_cast<std::int64_t>(rows), static_cast<std::int64_t>(cols), 1};
        if (dim == 3) {
            block.shape = {static_cast<std::int64_t>(layers.size()), static_cast<std::int64_t>(rows),
                           static_cast<std::int64_t>(cols)};
        }
        for (const auto &layer : layers) {
            for (const auto &row : layer) {
                for (char c : row) {
                    auto it = std::find(sub.names_.begin(), sub.names_.end(), std::string(1, c));
                    if (it == sub.names_.end()) {
                        throw ConfigError("rule for symbol '" + name + "' uses unknown symbol '" + std::string(1, c) + "'");
                    }
                    block.cells.push_back(static_cast<Symbol>(it - sub.names_.begin()));
                }
            }
        }
        sub.images_.push_back(std::move(block));
    }

    if (dim > 1 || require_constant_shape) {
        const auto &first = sub.images_.front().shape;
        for (std::size_t s = 0; s < sub.images_.size(); ++s) {
            if (sub.images_[s].shape != first) {
                throw ConfigError("rule for symbol '" + sub.names_[s] + "' has shape " +
                                  shape_string(dim, sub.images_[s].shape) + ", expected " + shape_string(dim, first));
            }
        }
        for (int i = 0; i < dim; ++i) {
            if (first[static_cast<std::size_t>(i)] < 2 && sub.names_.size() > 0 && require_constant_shape) {
                throw ConfigError("block substitution needs expansion >= 2 along every axis");
            }
        }
    }
    if (!sub.is_primitive()) throw ConfigError("substitution is not primitive");
    return sub;
}

Symbol Substitution::symbol(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ConfigError("unknown symbol '" + std::string(name) + "'");
    return static_cast<Symbol>(it - names_.begin());
}

bool Substitution::constant_shape() const {
    return std::all_of(images_.begin(), images_.end(), [&](const Block &b) { return b.shape == images_.front().shape; });
}

bool Substitution::is_primitive() const {
    const std::size_t n = names_.size();
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a) {
        for (auto s : images_[a].cells) m[a][s] = true;
    }
    auto all_true = [&](const std::vector<std::vector<bool>> &x) {
        for (const auto &row : x) {
            for (bool v : row) {
                if (!v) return false;
            }
        }
        return true;
    };
    auto p = m;
    for (std::size_t k = 1; k <= std::max<std::size_t>(1, n * n); ++k) {
        if (all_true(p)) return true;
        std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (!p[i][j]) continue;
                for (std::size_t l = 0; l < n; ++l) next[i][l] = next[i][l] || m[j][l];
            }
        }
        p = std::move(next);
    }
    return false;
}

Block Substitution::iterate(Symbol seed, int iterations) const {
    Block cur;
    cur.cells = {seed};
    for (int it = 0; it < iterations; ++it) {
        Block next;
        if (dim_ == 1) {
            for (auto s : cur.cells) next.cells.insert(next.cells.end(), images_[s].cells.begin(), images_[s].cells.end());
            next.shape = {next.size(), 1, 1};
        } else {
            const auto q = images_.front().shape;
            for (int i = 0; i < kMaxDim; ++i) next.shape[i] = cur.shape[i] * q[i];
            const Window outer = block_window(dim_, cur.shape);
            const Window inner = block_window(dim_, q);
            const Window whole = block_window(dim_, next.shape);
            next.cells.assign(static_cast<std::size_t>(whole.volume()), 0);
            for (std::size_t i = 0; i < cur.cells.size(); ++i) {
                const Point pos = outer.point_at(i);
                const Block &img = images_[cur.cells[i]];
                for (std::size_t j = 0; j < img.cells.size(); ++j) {
                    Point t = inner.point_at(j);
                    Point target(dim_);
                    for (int a = 0; a < dim_; ++a) target[a] = pos[a] * q[static_cast<std::size_t>(a)] + t[a];
                    next.cells[whole.index(target)] = img.cells[j];
                }
            }
        }
        if (next.size() > (std::int64_t{1} << 26)) throw WindowTooSmall("substitution expansion exceeds 2^26 cells");
        cur = std::move(next);
    }
    return cur;
}

Substitution Substitution::power(int p) const {
    if (p < 1) throw std::invalid_argument("substitution power must be >= 1");
    Substitution out = *this;
    for (std::size_t s = 0; s < names_.size(); ++s) out.images_[s] = iterate(static_cast<Symbol>(s), p);
    return out;
}

FixedPointSeed fixed_point_seed(const Substitution &sub) {
    const auto n = sub.alphabet_size();
    for (int p = 1; p <= static_cast<int>(n); ++p) {
        for (std::size_t s = 0; s < n; ++s) {
            auto cur = static_cast<Symbol>(s);
            for (int i = 0; i < p; ++i) cur = sub.image(cur).cells.front();
            if (cur == s) return {static_cast<Symbol>(s), p};
        }
    }
    throw ConfigError("no symbol is fixed at the origin corner by a power <= |alphabet|; supply an explicit seed");
}

void Configuration::write_grid(std::ostream &os) const {
    const bool wide = std::any_of(alphabet.begin(), alphabet.end(), [](const std::string &s) { return s.size() != 1; });
    const int d = dim();
    const std::int64_t cols = support.extent(d - 1);
    const std::int64_t rows = d >= 2 ? support.extent(d - 2) : 1;
    const std::int64_t layers = d >= 3 ? support.extent(0) : 1;
    std::size_t idx = 0;
    for (std::int64_t l = 0; l < layers; ++l) {
        if (l) os << '\n';
        for (std::int64_t r = 0; r < rows; ++r) {
            for (std::int64_t c = 0; c < cols; ++c) {
                if (wide && c) os << ' ';
                os << alphabet[cells[idx++]];
            }
            os << '\n';
        }
    }
}

std::string Configuration::row_string(std::int64_t row) const {
    const std::int64_t cols = support.extent(dim() - 1);
    std::string out;
    for (std::int64_t c = 0; c < cols; ++c) out += alphabet[cells[static_cast<std::size_t>(row * cols + c)]];
    return out;
}

Configuration expand(const Substitution &sub, Symbol seed, int iterations) {
    if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    Block b = sub.iterate(seed, iterations);
    Configuration config;
    config.support = block_window(sub.dim(), b.shape);
    config.cells = std::move(b.cells);
    config.alphabet = sub.alphabet();
    return config;
}

Configuration product_configuration(std::span<const Configuration> factors) {
    const int d = static_cast<int>(factors.size());
    if (d < 1 || d > kMaxDim) throw ConfigError("product needs 1 to 3 factors");
    Point lo(d);
    Point hi(d);
    std::size_t alphabet = 1;
    for (int i = 0; i < d; ++i) {
        const auto &f = factors[static_cast<std::size_t>(i)];
        if (f.dim() != 1) throw DimensionMismatch("product factors must be 1-dimensional");
        lo[i] = f.support.lo[0];
        hi[i] = f.support.hi[0];
        alphabet *= f.alphabet.size();
    }
    if (alphabet > 65535) throw ConfigError("product alphabet too large");
    Configuration config;
    config.support = Window(lo, hi);
    // Mixed radix names, first factor most significant.
    config.alphabet.assign(1, "");
    for (const auto &f : factors) {
        std::vector<std::string> next;
        for (const auto &prefix : config.alphabet) {
            for (const auto &s : f.alphabet) next.push_back(prefix + s);
        }
        config.alphabet = std::move(next);
    }
    const auto n = static_cast<std::size_t>(config.support.volume());
    config.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = config.support.point_at(i);
        std::size_t id = 0;
        for (int a = 0; a < d; ++a) {
            const auto &f = factors[static_cast<std::size_t>(a)];
            id = id * f.alphabet.size() + f.at(Point{p[a]});
        }
        config.cells[i] = static_cast<Symbol>(id);
    }
    return config;
}

Window placement_window(const Configuration &config, const Window &cylinder) {
    return {config.support.lo - cylinder.lo, config.support.hi - cylinder.hi};
}

std::vector<Point> scan_occurrences(const Configuration &config, const Window &cylinder,
                                    std::span<const Point> candidates) {
    const auto probe = make_probe(config, cylinder);
    const Window place = placement_window(config, cylinder);
    std::vector<std::uint8_t> hit(candidates.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(candidates.size()); ++i) {
        const auto &p = candidates[static_cast<std::size_t>(i)];
        hit[static_cast<std::size_t>(i)] = place.contains(p) && matches(config, probe, p);
    }
    std::vector<Point> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (hit[i]) out.push_back(candidates[i]);
    }
    return out;
}

std::vector<Point> scan_occurrences_serial(const Configuration &config, const Window &cylinder,
                                           std::span<const Point> candidates) {
    const Window place = placement_window(config, cylinder);
    std::vector<Point> out;
    const auto n = static_cast<std::size_t>(cylinder.volume());
    for (const auto &p : candidates) {
        if (!place.contains(p)) continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            const Point b = cylinder.point_at(i);
            ok = config.at(p + b) == config.at(b);
        }
        if (ok) out.push_back(p);
    }
    return out;
}

ReturnSet return_set(const Configuration &config, const Window &cylinder, int level, std::optional<Window> window) {
    const Window place = placement_window(config, cylinder);
    const Window w = window.value_or(place);
    if (w.empty() || !place.contains(w)) {
        throw WindowTooSmall("window too small: placements of " + cylinder.to_string() + " do not cover " +
                             w.to_string());
    }
    auto candidates = window_points(w);
    auto pts = scan_occurrences(config, cylinder, candidates);
    ReturnSet rs{PointSet(w, std::move(pts)), cylinder, level, true, {}};
    return rs;
}

Schedule supertile_schedule(const Substitution &sub, Symbol seed, int max_level) {
    Schedule s;
    const int d = sub.dim();
    if (sub.constant_shape() && (d > 1 || sub.shape()[0] >= 2)) {
        for (int n = 0; n <= max_level; ++n) {
            std::array<std::int64_t, kMaxDim> shape{1, 1, 1};
            for (int i = 0; i < d; ++i) shape[static_cast<std::size_t>(i)] = ipow(sub.shape()[static_cast<std::size_t>(i)], n);
            s.cylinders.push_back(block_window(d, shape));
        }
        return s;
    }
    if (d != 1) throw ConfigError("variable-length substitutions are 1-dimensional");
    std::vector<std::int64_t> len(sub.alphabet_size(), 1);
    for (int n = 0; n <= max_level; ++n) {
        s.cylinders.push_back(block_window(1, {len[seed], 1, 1}));
        std::vector<std::int64_t> next(len.size(), 0);
        for (std::size_t a = 0; a < len.size(); ++a) {
            for (auto t : sub.image(static_cast<Symbol>(a)).cells) next[a] += len[t];
        }
        len = std::move(next);
    }
    return s;
}

Schedule product_schedule(std::span<const Schedule> factors) {
    Schedule s;
    const int d = static_cast<int>(factors.size());
    int levels = std::numeric_limits<int>::max();
    for (const auto &f : factors) levels = std::min(levels, f.max_level());
    for (int n = 0; n <= levels; ++n) {
        Point lo(d);
        Point hi(d);
        for (int i = 0; i < d; ++i) {
            lo[i] = factors[static_cast<std::size_t>(i)].cylinders[static_cast<std::size_t>(n)].lo[0];
            hi[i] = factors[static_cast<std::size_t>(i)].cylinders[static_cast<std::size_t>(n)].hi[0];
        }
        s.cylinders.emplace_back(lo, hi);
    }
    return s;
}

Schedule cube_schedule(int d, int max_level) {
    Schedule s;
    for (int n = 0; n <= max_level; ++n) s.cylinders.push_back(Window::cube(d, std::int64_t{1} << n));
    return s;
}

std::vector<ReturnSet> nested_return_sets(const Configuration &config, const Schedule &schedule, int max_level) {
    if (max_level < 0 || max_level > schedule.max_level()) {
        throw ConfigError("schedule defines levels 0.." + std::to_string(schedule.max_level()) + " but level " +
                          std::to_string(max_level) + " was requested");
    }
    for (int n = 0; n < max_level; ++n) {
        const auto &a = schedule.cylinders[static_cast<std::size_t>(n)];
        const auto &b = schedule.cylinders[static_cast<std::size_t>(n + 1)];
        if (!b.contains(a) || a == b) throw ConfigError("cylinder windows must be strictly increasing");
    }
    const Window common = placement_window(config, schedule.cylinders[static_cast<std::size_t>(max_level)]);
    if (common.empty()) throw WindowTooSmall("configuration is smaller than the deepest cylinder window");

    std::vector<ReturnSet> out;
    std::vector<Point> candidates = window_points(common);
    for (int n = 0; n <= max_level; ++n) {
        const Window &cyl = schedule.cylinders[static_cast<std::size_t>(n)];
        auto pts = scan_occurrences(config, cyl, candidates);
        if (common.contains(Point::zero(config.dim())) && !std::binary_search(pts.begin(), pts.end(), Point::zero(config.dim()))) {
            throw InvariantViolation("base point missing from its own return set at level " + std::to_string(n));
        }
        if (n > 0 && !std::includes(candidates.begin(), candidates.end(), pts.begin(), pts.end())) {
            throw InvariantViolation("return sets are not nested at level " + std::to_string(n));
        }
        candidates = pts;
        ReturnSet rs{PointSet(common, std::move(pts)), cyl, n, true, {}};
        assess_reliability(rs);
        out.push_back(std::move(rs));
    }
    return out;
}

std::vector<ReturnSet> lattice_model_return_sets(std::span<const std::int64_t> expansion, const Window &window,
                                                 int max_level) {
    const int d = window.dim();
    if (static_cast<int>(expansion.size()) != d) throw DimensionMismatch("one expansion factor per axis is required");
    std::vector<ReturnSet> out;
    for (int n = 0; n <= max_level; ++n) {
        std::array<std::int64_t, kMaxDim> step{1, 1, 1};
        for (int i = 0; i < d; ++i) step[static_cast<std::size_t>(i)] = ipow(expansion[static_cast<std::size_t>(i)], n);
        std::vector<Point> pts;
        const auto total = static_cast<std::size_t>(window.volume());
        for (std::size_t i = 0; i < total; ++i) {
            Point p = window.point_at(i);
            bool keep = true;
            for (int a = 0; a < d && keep; ++a) keep = p[a] % step[static_cast<std::size_t>(a)] == 0;
            if (keep) pts.push_back(p);
        }
        ReturnSet rs{PointSet(window, std::move(pts)), block_window(d, step), n, true, {}};
        assess_reliability(rs);
        out.push_back(std::move(rs));
    }
    return out;
}

std::string to_string(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::LatticeModel: return "lattice_model";
    case GeneratorKind::BlockSubstitution: return "block_substitution";
    case GeneratorKind::Substitution1d: return "substitution_1d";
    case GeneratorKind::Product1d: return "product_1d";
    case GeneratorKind::ExplicitPoints: return "explicit_points";
    }
    return "?";
}

GeneratorKind parse_generator_kind(std::string_view text) {
    for (auto k : {GeneratorKind::LatticeModel, GeneratorKind::BlockSubstitution, GeneratorKind::Substitution1d,
                   GeneratorKind::Product1d, GeneratorKind::ExplicitPoints}) {
        if (to_string(k) == text) return k;
    }
    throw ConfigError("unknown generator kind '" + std::string(text) + "'");
}

GeneratorSpec product_action(std::vector<GeneratorSpec> factors) {
    if (factors.empty() || factors.size() > static_cast<std::size_t>(kMaxDim)) {
        throw ConfigError("a product action needs 1 to 3 factors");
    }
    for (const auto &f : factors) {
        if (f.dim != 1) throw DimensionMismatch("product factors must be 1-dimensional actions");
        if (f.kind != GeneratorKind::BlockSubstitution && f.kind != GeneratorKind::Substitution1d &&
            f.kind != GeneratorKind::LatticeModel) {
            throw ConfigError("product factors must be substitutions or lattice models");
        }
    }
    GeneratorSpec spec;
    spec.kind = GeneratorKind::Product1d;
    spec.dim = static_cast<int>(factors.size());
    spec.factors = std::move(factors);
    return spec;
}

namespace {

int window_factor(int d) { return d == 1 ? 32 : (d == 2 ? 12 : 6); }

struct SubstitutionSystem {
    Substitution rule;
    FixedPointSeed seed;
};

SubstitutionSystem load_substitution(const GeneratorSpec &spec) {
    const bool constant = spec.kind == GeneratorKind::BlockSubstitution;
    auto sub = Substitution::parse(spec.dim, spec.rules, constant);
    FixedPointSeed seed;
    if (spec.seed) {
        seed.symbol = sub.symbol(*spec.seed);
        seed.power = 0;
        for (int p = 1; p <= static_cast<int>(sub.alphabet_size()); ++p) {
            auto cur = seed.symbol;
            for (int i = 0; i < p; ++i) cur = sub.image(cur).cells.front();
            if (cur == seed.symbol) {
                seed.power = p;
                break;
            }
        }
        if (seed.power == 0) {
            throw ConfigError("seed '" + *spec.seed + "' is not fixed at the origin corner by any power <= |alphabet|");
        }
    } else {
        seed = fixed_point_seed(sub);
    }
    return {std::move(sub), seed};
}

// Expands until every axis is at least `factor` times the deepest cylinder.
Configuration expand_for(const SubstitutionSystem &sys, const Window &deepest, int factor, int iterations) {
    const auto rho = sys.rule.power(sys.seed.power);
    if (iterations > 0) return expand(rho, sys.seed.symbol, iterations);
    for (int k = 1; k < 64; ++k) {
        auto config = expand(rho, sys.seed.symbol, k);
        bool enough = true;
        for (int i = 0; i < config.dim(); ++i) enough = enough && config.support.extent(i) >= factor * deepest.extent(i);
        if (enough) return config;
    }
    throw WindowTooSmall("could not expand the substitution far enough");
}

Configuration lattice_ruler(const std::vector<std::int64_t> &q, const Window &w, int max_level) {
    Configuration config;
    config.support = w;
    for (int n = 0; n <= max_level; ++n) config.alphabet.push_back(std::to_string(n));
    config.cells.resize(static_cast<std::size_t>(w.volume()));
    for (std::size_t i = 0; i < config.cells.size(); ++i) {
        Point p = w.point_at(i);
        int depth = 0;
        while (depth < max_level) {
            bool divisible = true;
            for (int a = 0; a < w.dim(); ++a) {
                divisible = divisible && p[a] % ipow(q[static_cast<std::size_t>(a)], depth + 1) == 0;
            }
            if (!divisible) break;
            ++depth;
        }
        config.cells[i] = static_cast<Symbol>(depth);
    }
    return config;
}

std::vector<std::int64_t> lattice_expansion(const GeneratorSpec &spec) {
    std::vector<std::int64_t> q = spec.expansion;
    if (q.size() == 1 && spec.dim > 1) q.assign(static_cast<std::size_t>(spec.dim), q[0]);
    if (static_cast<int>(q.size()) != spec.dim) throw ConfigError("lattice model needs one expansion factor per axis");
    for (auto v : q) {
        if (v < 2) throw ConfigError("lattice model expansion factors must be >= 2");
    }
    return q;
}

Window lattice_window(const std::vector<std::int64_t> &q, int d, int max_level, std::int64_t half_width) {
    if (half_width > 0) return Window::cube(d, half_width);
    std::int64_t top = 1;
    for (auto v : q) top = std::max(top, ipow(v, max_level));
    const std::int64_t factor = d == 1 ? 8 : (d == 2 ? 4 : 3);
    return Window::cube(d, factor * top);
}

struct Built {
    Configuration config;
    Schedule schedule;
};

Built build_configuration(const GeneratorSpec &spec, int max_level, const WindowParams &params, int factor_dim) {
    switch (spec.kind) {
    case GeneratorKind::BlockSubstitution:
    case GeneratorKind::Substitution1d: {
        auto sys = load_substitution(spec);
        auto schedule = supertile_schedule(sys.rule, sys.seed.symbol, max_level);
        auto config = expand_for(sys, schedule.cylinders.back(), window_factor(factor_dim), params.iterations);
        return {std::move(config), std::move(schedule)};
    }
    case GeneratorKind::Product1d: {
        std::vector<Configuration> configs;
        std::vector<Schedule> schedules;
        for (const auto &f : spec.factors) {
            auto b = build_configuration(f, max_level, params, spec.dim);
            configs.push_back(std::move(b.config));
            schedules.push_back(std::move(b.schedule));
        }
        return {product_configuration(configs), product_schedule(schedules)};
    }
    case GeneratorKind::ExplicitPoints: {
        if (!spec.points) throw ConfigError("explicit_points generator has no points");
        Configuration config;
        config.support = spec.points->window();
        config.alphabet = {".", "x"};
        config.cells.assign(static_cast<std::size_t>(config.support.volume()), 0);
        for (const auto &p : spec.points->points()) config.cells[config.support.index(p)] = 1;
        return {std::move(config), cube_schedule(spec.dim, max_level)};
    }
    case GeneratorKind::LatticeModel: {
        auto q = lattice_expansion(spec);
        Window w = lattice_window(q, spec.dim, max_level, params.half_width);
        Schedule schedule;
        for (int n = 0; n <= max_level; ++n) {
            std::array<std::int64_t, kMaxDim> step{1, 1, 1};
            for (int i = 0; i < spec.dim; ++i) step[static_cast<std::size_t>(i)] = ipow(q[static_cast<std::size_t>(i)], n);
            schedule.cylinders.push_back(block_window(spec.dim, step));
        }
        return {lattice_ruler(q, w, max_level), std::move(schedule)};
    }
    }
    throw ConfigError("unsupported generator");
}

} // namespace

Configuration generate_configuration(const GeneratorSpec &spec, int max_level, const WindowParams &params) {
    return build_configuration(spec, max_level, params, spec.dim).config;
}

Realization realize(const GeneratorSpec &spec, int max_level, const WindowParams &params) {
    if (spec.dim < 1 || spec.dim > kMaxDim) {
        throw ConfigError("dimension " + std::to_string(spec.dim) + " is not supported: exact geometry is capped at d <= 3");
    }
    if (max_level < 0) throw ConfigError("max level must be >= 0");
    Realization out;
    if (spec.kind == GeneratorKind::LatticeModel) {
        auto q = lattice_expansion(spec);
        Window w = lattice_window(q, spec.dim, max_level, params.half_width);
        out.levels = lattice_model_return_sets(q, w, max_level);
        for (const auto &rs : out.levels) out.schedule.cylinders.push_back(rs.cylinder);
        out.notes.push_back("lattice model: return sets generated in closed form on window " + w.to_string());
        return out;
    }
    if (spec.kind == GeneratorKind::Product1d) {
        if (static_cast<int>(spec.factors.size()) != spec.dim) {
            throw DimensionMismatch("product of " + std::to_string(spec.factors.size()) + " factors declared with d = " +
                                    std::to_string(spec.dim));
        }
    }
    auto built = build_configuration(spec, max_level, params, spec.dim);
    out.levels = nested_return_sets(built.config, built.schedule, max_level);
    out.schedule = std::move(built.schedule);
    out.notes.push_back("configuration support " + built.config.support.to_string() + ", common window " +
                        out.levels.front().base.window().to_string());
    out.config = std::move(built.config);
    return out;
}

} // namespace rotfactor
