#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rotfactor/delone.hpp"
#include "rotfactor/lattice.hpp"

namespace rotfactor {

using Symbol = std::uint16_t;

// Rectangular symbol array; cells are row-major with the last axis fastest.
struct Block {
    std::array<std::int64_t, kMaxDim> shape{1, 1, 1};
    std::vector<Symbol> cells;

    std::int64_t size() const { return static_cast<std::int64_t>(cells.size()); }
};

// Substitution rule on a finite alphabet. Every image is a rectangular block;
// in dimension d > 1 all images share one shape (constant-shape block
// substitution). In dimension 1 images may have different lengths.
class Substitution {
public:
    // Rules text: comma separated "sym:image" entries. Rows of a 2-d image
    // are separated by '/', layers of a 3-d image by '|'. Symbols are single
    // characters. With `require_constant_shape` an image whose shape differs
    // from the first one is rejected naming its symbol.
    static Substitution parse(int dim, std::string_view rules, bool require_constant_shape);

    int dim() const { return dim_; }
    std::size_t alphabet_size() const { return names_.size(); }
    const std::vector<std::string> &alphabet() const { return names_; }
    Symbol symbol(std::string_view name) const;
    const Block &image(Symbol s) const { return images_[s]; }
    bool constant_shape() const;
    // Expansion factor per axis; only meaningful for constant shape.
    std::array<std::int64_t, kMaxDim> shape() const { return images_.front().shape; }

    // Some power of the incidence matrix, up to |A|^2, is strictly positive.
    bool is_primitive() const;
    // The p-fold composition.
    Substitution power(int p) const;

    // Block obtained by applying the rule `iterations` times to `seed`.
    Block iterate(Symbol seed, int iterations) const;

private:
    int dim_ = 1;
    std::vector<std::string> names_;
    std::vector<Block> images_;
};

struct FixedPointSeed {
    Symbol symbol = 0;
    int power = 1; // the seed sits at the origin corner of rho^power(seed)
};

FixedPointSeed fixed_point_seed(const Substitution &sub);

// Finite piece of a configuration x in X. The cell at array index 0 sits
// at support.lo.
struct Configuration {
    Window support;
    std::vector<Symbol> cells;
    std::vector<std::string> alphabet;

    int dim() const { return support.dim(); }
    Symbol at(const Point &p) const { return cells[support.index(p)]; }
    // Plain text grid: one row per line, layers separated by blank lines.
    void write_grid(std::ostream &os) const;
    std::string row_string(std::int64_t row = 0) const;
};

// rho^iterations(seed), origin at the seed's corner cell (point 0).
Configuration expand(const Substitution &sub, Symbol seed, int iterations);

// Tensor product of 1-d configurations; symbol ids are mixed radix.
Configuration product_configuration(std::span<const Configuration> factors);

struct ReturnSet {
    PointSet base;
    Window cylinder; // B_n, relative to the base point
    int level = 0;
    bool reliable = true;
    std::string note;
};

// Positions p with p + B inside the support.
Window placement_window(const Configuration &config, const Window &cylinder);

// Occurrence scan: positions p among `candidates` with config[p + B] == config[B].
std::vector<Point> scan_occurrences(const Configuration &config, const Window &cylinder,
                                    std::span<const Point> candidates);
std::vector<Point> scan_occurrences_serial(const Configuration &config, const Window &cylinder,
                                           std::span<const Point> candidates);

// Return times of the cylinder of config[B] within `window` (defaults to the
// full placement window).
ReturnSet return_set(const Configuration &config, const Window &cylinder, int level,
                     std::optional<Window> window = std::nullopt);

// Cylinder windows B_0 subset B_1 subset ...
struct Schedule {
    std::vector<Window> cylinders;
    int max_level() const { return static_cast<int>(cylinders.size()) - 1; }
};

// B_n = [0, q^n - 1] per axis for constant shape; [0, |rho^n(seed)| - 1] in 1-d.
Schedule supertile_schedule(const Substitution &sub, Symbol seed, int max_level);
Schedule product_schedule(std::span<const Schedule> factors);
// B_n = [-a_n, a_n]^d with a_n = 2^n.
Schedule cube_schedule(int d, int max_level);

// Nested return sets on the common placement window of the largest cylinder.
// Level n+1 is scanned among the points of level n; nestedness and 0 in R_n
// are asserted (InvariantViolation).
std::vector<ReturnSet> nested_return_sets(const Configuration &config, const Schedule &schedule, int max_level);

// R_n = prod_i (q_i^n) Z within the window, exactly.
std::vector<ReturnSet> lattice_model_return_sets(std::span<const std::int64_t> expansion, const Window &window,
                                                 int max_level);

enum class GeneratorKind { LatticeModel, BlockSubstitution, Substitution1d, Product1d, ExplicitPoints };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view text);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::LatticeModel;
    int dim = 1;
    std::vector<std::int64_t> expansion;  // lattice model: q per axis
    std::string rules;                    // substitutions
    std::optional<std::string> seed;      // substitutions: explicit seed symbol
    std::vector<GeneratorSpec> factors;   // product of 1-d systems
    std::optional<PointSet> points;       // explicit point set
};

// Combines 1-d generators into one d-dimensional product generator.
GeneratorSpec product_action(std::vector<GeneratorSpec> factors);

struct WindowParams {
    // Lattice model half width; 0 picks one from the deepest level.
    std::int64_t half_width = 0;
    // Substitution expansion iterations; 0 picks enough for the deepest level.
    int iterations = 0;
};

// A concrete realization: configuration (absent for the lattice model),
// schedule and nested return sets for levels 0..max_level.
struct Realization {
    std::optional<Configuration> config;
    Schedule schedule;
    std::vector<ReturnSet> levels;
    std::vector<std::string> notes;
};

Realization realize(const GeneratorSpec &spec, int max_level, const WindowParams &params = {});

// Builds the configuration alone (what `generate` exports).
Configuration generate_configuration(const GeneratorSpec &spec, int max_level, const WindowParams &params = {});

} // namespace rotfactor
