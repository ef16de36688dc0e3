// rotfactor: rotation-factor diagnostics for substitution and lattice systems.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "rotfactor/errors.hpp"
#include "rotfactor/report.hpp"

using namespace rotfactor;

namespace {

struct Overrides {
    std::string config;
    std::optional<int> levels;
    std::optional<std::string> theta;
    std::optional<std::string> k;
    std::optional<std::string> format;
    std::optional<std::string> output;
    bool no_timestamp = false;
    std::optional<double> window_margin;
    bool strict = false;
    std::string fault_tie_break;
};

std::vector<ThetaVector> parse_theta_list(const std::string &text) {
    std::vector<ThetaVector> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        auto piece = text.substr(start, end - start);
        if (piece.find_first_not_of(" \t") != std::string::npos) {
            try {
                out.push_back(ThetaVector::parse(piece));
            } catch (const std::exception &e) {
                throw ConfigError("--theta: " + std::string(e.what()));
            }
        }
        start = end + 1;
    }
    return out;
}

RunConfig resolve(const std::string &command, const Overrides &o) {
    RunConfig c = load_config(o.config);
    if (o.levels) c.levels = *o.levels;
    if (o.theta) c.thetas = parse_theta_list(*o.theta);
    if (o.k) c.k = parse_k_choice(*o.k);
    if (o.format) c.format = parse_output_format(*o.format);
    if (o.output) c.output_path = *o.output;
    if (o.no_timestamp) c.timestamp = false;
    if (o.window_margin) c.window_margin = *o.window_margin;
    if (o.strict) c.strict_well_distributed = true;
    if (o.fault_tie_break == "lex_largest") c.tie = TieBreak::LexLargest;
    if (command != "analyze" && command != "scan") {
        c.thetas.clear();
        c.scan.reset();
    }
    validate(c);
    return c;
}

template <class Fn>
void emit(const RunConfig &c, Fn &&write) {
    if (c.output_path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(c.output_path);
    if (!out) throw ConfigError("output.path: cannot write '" + c.output_path + "'");
    write(out);
}

int run(const std::string &command, const Overrides &o) {
    const RunConfig c = resolve(command, o);
    const bool csv = c.format == OutputFormat::Csv;

    if (command == "generate") {
        auto config = generate_configuration(c.generator, c.levels, c.window);
        emit(c, [&](std::ostream &os) {
            if (csv) {
                write_configuration_csv(os, config);
            } else {
                Json doc;
                doc["tool"] = "rotfactor";
                doc["version"] = kToolVersion;
                if (c.timestamp) doc["generated_at"] = utc_timestamp();
                doc["config"] = config_json(c);
                doc["configuration"] = configuration_json(config);
                write_json(os, doc);
            }
        });
        return 0;
    }

    if (command == "oracle-check") {
        auto report = run_pipeline(c, Stage::Hierarchy);
        auto results = oracle_check(report);
        bool pass = true;
        for (const auto &r : results) pass = pass && r.pass;
        emit(c, [&](std::ostream &os) {
            if (csv) {
                write_oracle_table(os, results);
            } else {
                Json doc;
                doc["tool"] = "rotfactor";
                doc["version"] = kToolVersion;
                if (c.timestamp) doc["generated_at"] = utc_timestamp();
                doc["config"] = config_json(c);
                doc["oracle"] = oracle_json(results);
                write_json(os, doc);
            }
        });
        if (!c.output_path.empty() || !csv) write_oracle_table(std::cerr, results);
        return pass ? 0 : static_cast<int>(ExitCode::InvariantFailure);
    }

    const Stage stage = command == "hierarchy" ? Stage::Hierarchy : (command == "scan" ? Stage::Scan : Stage::Analyze);
    auto report = run_pipeline(c, stage);
    for (const auto &w : report.warnings) std::cerr << "warning: " << w << '\n';
    emit(c, [&](std::ostream &os) {
        if (!csv) {
            write_json(os, report_json(report, stage, c.timestamp));
        } else if (stage == Stage::Hierarchy) {
            write_patch_csv(os, report);
        } else if (stage == Stage::Scan) {
            write_scan_csv(os, report);
        } else {
            write_analysis_csv(os, report);
        }
    });
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Rotation-factor diagnostics for substitution and lattice systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Overrides o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"generate", "Expand the generator and export the configuration"},
        {"hierarchy", "Return sets, Voronoi patches, first-return vectors and k(n)"},
        {"analyze", "Theta-length series, verdicts and factor diagnostics"},
        {"scan", "Rank candidate theta vectors by their summed lengths"},
        {"oracle-check", "Cross-check the pipeline against brute-force recomputation"},
    };
    for (const auto &[name, help] : commands) {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--levels", o.levels, "Deepest level n_max")->check(CLI::NonNegativeNumber);
        sub->add_option("--theta", o.theta, "Theta vectors, ';' between vectors and ',' between components");
        sub->add_option("--k", o.k, "Torus dimension")->check(CLI::IsMember({"1", "d", "both"}));
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", o.output, "Output file (default standard output)");
        sub->add_flag("--no-timestamp", o.no_timestamp, "Omit generated_at");
        sub->add_option("--window-margin", o.window_margin, "Partition margin in covering-radius units");
        sub->add_flag("--strict-well-distributed", o.strict, "Check (iv) over every owner of the next level");
        sub->add_option("--fault-tie-break", o.fault_tie_break)->group("")->check(CLI::IsMember({"lex_largest"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const DimensionMismatch &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const WindowTooSmall &e) {
        std::cerr << "insufficient window: " << e.what() << '\n';
        return static_cast<int>(ExitCode::InsufficientWindow);
    } catch (const NotGenerated &e) {
        std::cerr << "insufficient window: " << e.what() << '\n';
        return static_cast<int>(ExitCode::InsufficientWindow);
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::InvariantFailure);
    }
}
