#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "rotfactor/generators.hpp"
#include "rotfactor/hierarchy.hpp"
#include "rotfactor/rotation.hpp"

namespace rotfactor {

enum class KChoice { One, D, Both };
enum class OutputFormat { Json, Csv };

std::string to_string(KChoice k);
KChoice parse_k_choice(std::string_view text);
std::string to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view text);
std::vector<TorusKind> torus_kinds(KChoice k);

// Validated run configuration with every default materialized.
struct RunConfig {
    GeneratorSpec generator;
    std::string points_file; // explicit_points source, resolved to an absolute path
    int levels = 6;
    WindowParams window;
    double window_margin = 2.0;
    std::vector<ThetaVector> thetas;
    KChoice k = KChoice::One;
    std::optional<ScanSpec> scan;
    bool strict_well_distributed = false;
    bool thin = false;
    OutputFormat format = OutputFormat::Json;
    std::string output_path; // empty: standard output
    bool timestamp = true;
    TieBreak tie = TieBreak::LexSmallest;
};

// INI text with sections [system], [schedule], [analysis], [output].
// Relative paths resolve against `base_dir`. Throws ConfigError naming the
// offending field.
RunConfig parse_config(std::istream &in, const std::filesystem::path &base_dir = {});
RunConfig load_config(const std::filesystem::path &path);

// Per-axis expansion factors behind the p / q^m scan candidates; empty or 1
// where the system has none.
std::vector<std::int64_t> expansion_factors(const GeneratorSpec &g);

// Re-validates after command line overrides.
void validate(const RunConfig &config);

// Every field as (section, [(key, value)]); the INI echo and the JSON
// echo are both built from it, and parse_config on the INI echo reproduces
// the config.
using ConfigSections = std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>;
ConfigSections config_sections(const RunConfig &config);
std::string echo_ini(const RunConfig &config);

} // namespace rotfactor
