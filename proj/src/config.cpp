#include "rotfactor/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rotfactor/errors.hpp"

namespace rotfactor {

namespace pt = boost::property_tree;

std::string to_string(KChoice k) {
    switch (k) {
    case KChoice::One: return "1";
    case KChoice::D: return "d";
    case KChoice::Both: return "both";
    }
    return "?";
}

KChoice parse_k_choice(std::string_view text) {
    if (text == "1") return KChoice::One;
    if (text == "d") return KChoice::D;
    if (text == "both") return KChoice::Both;
    throw ConfigError("k must be 1, d or both, got '" + std::string(text) + "'");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

OutputFormat parse_output_format(std::string_view text) {
    if (text == "json") return OutputFormat::Json;
    if (text == "csv") return OutputFormat::Csv;
    throw ConfigError("format must be json or csv, got '" + std::string(text) + "'");
}

std::vector<TorusKind> torus_kinds(KChoice k) {
    switch (k) {
    case KChoice::One: return {TorusKind::One};
    case KChoice::D: return {TorusKind::Full};
    case KChoice::Both: return {TorusKind::One, TorusKind::Full};
    }
    return {};
}

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(sep, start);
        auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

const std::map<std::string, std::set<std::string>> kKnownKeys{
    {"system", {"dimension", "kind", "q", "rules", "seed", "factors", "points_file"}},
    {"schedule", {"levels", "half_width", "iterations", "window_margin"}},
    {"analysis",
     {"thetas", "k", "scan_qmax", "scan_powers", "scan_max_denominator", "scan_reals", "scan_cf_depth",
      "strict_well_distributed", "thin"}},
    {"output", {"format", "path", "timestamp"}},
};

class Fields {
public:
    explicit Fields(const pt::ptree &tree) : tree_(tree) {
        for (const auto &[section, body] : tree) {
            auto known = kKnownKeys.find(section);
            if (known == kKnownKeys.end()) throw ConfigError("unknown section [" + section + "]");
            if (!body.data().empty()) throw ConfigError("key '" + section + "' must live inside a section");
            for (const auto &[key, value] : body) {
                if (!known->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
            }
        }
    }

    std::optional<std::string> text(const std::string &path) const {
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    Rational rational(const std::string &path) const {
        auto t = text(path);
        try {
            return Rational::parse(*t);
        } catch (const std::exception &) {
            throw ConfigError(path + ": '" + *t + "' is not a number (use p/q or an integer)");
        }
    }

    std::optional<std::int64_t> integer(const std::string &path) const {
        if (!text(path)) return std::nullopt;
        auto r = rational(path);
        if (!r.is_integer()) throw ConfigError(path + ": expected an integer, got " + r.to_string());
        return r.num();
    }

    std::optional<double> real(const std::string &path) const {
        auto t = text(path);
        if (!t) return std::nullopt;
        try {
            return Scalar::parse(*t).to_double();
        } catch (const std::exception &) {
            throw ConfigError(path + ": '" + *t + "' is not a number");
        }
    }

    std::optional<bool> boolean(const std::string &path) const {
        auto t = text(path);
        if (!t) return std::nullopt;
        std::string v = *t;
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        throw ConfigError(path + ": expected true or false, got '" + *t + "'");
    }

private:
    const pt::ptree &tree_;
};

std::vector<std::int64_t> parse_int_list(const Fields &f, const std::string &path) {
    std::vector<std::int64_t> out;
    for (const auto &piece : split_list(*f.text(path), ',')) {
        Rational r;
        try {
            r = Rational::parse(piece);
        } catch (const std::exception &) {
            throw ConfigError(path + ": '" + piece + "' is not a number");
        }
        if (!r.is_integer()) throw ConfigError(path + ": expected integers, got " + r.to_string());
        out.push_back(r.num());
    }
    return out;
}

std::string join(const std::vector<std::string> &xs, const std::string &sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

std::string format_real(double v) { return float_norm(v).to_string(); }

} // namespace

std::vector<std::int64_t> expansion_factors(const GeneratorSpec &g) {
    std::vector<std::int64_t> out;
    switch (g.kind) {
    case GeneratorKind::LatticeModel: out = g.expansion; break;
    case GeneratorKind::BlockSubstitution: {
        auto sub = Substitution::parse(g.dim, g.rules, true);
        for (int i = 0; i < g.dim; ++i) out.push_back(sub.shape()[static_cast<std::size_t>(i)]);
        break;
    }
    case GeneratorKind::Substitution1d: {
        auto sub = Substitution::parse(1, g.rules, false);
        out.push_back(sub.constant_shape() ? sub.shape()[0] : 1);
        break;
    }
    case GeneratorKind::Product1d:
        for (const auto &factor : g.factors) {
            auto sub = Substitution::parse(1, factor.rules, false);
            out.push_back(sub.constant_shape() ? sub.shape()[0] : 1);
        }
        break;
    default: break;
    }
    return out;
}

void validate(const RunConfig &c) {
    const auto &g = c.generator;
    if (g.dim < 1 || g.dim > kMaxDim) {
        throw ConfigError("system.dimension: d = " + std::to_string(g.dim) +
                          " is outside 1..3; the exact Voronoi geometry is capped at d <= 3");
    }
    switch (g.kind) {
    case GeneratorKind::LatticeModel:
        if (g.expansion.size() != 1 && static_cast<int>(g.expansion.size()) != g.dim) {
            throw ConfigError("system.q: give one expansion factor or one per axis");
        }
        for (auto q : g.expansion) {
            if (q < 2) throw ConfigError("system.q: expansion factors must be >= 2");
        }
        break;
    case GeneratorKind::BlockSubstitution:
    case GeneratorKind::Substitution1d:
        if (g.rules.empty()) throw ConfigError("system.rules: required for " + to_string(g.kind));
        if (g.kind == GeneratorKind::Substitution1d && g.dim != 1) {
            throw ConfigError("system.dimension: substitution_1d requires d = 1");
        }
        try {
            Substitution::parse(g.dim, g.rules, g.kind == GeneratorKind::BlockSubstitution);
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("system.rules: ") + e.what());
        }
        break;
    case GeneratorKind::Product1d:
        if (static_cast<int>(g.factors.size()) != g.dim) {
            throw ConfigError("system.factors: " + std::to_string(g.factors.size()) + " factors but d = " +
                              std::to_string(g.dim));
        }
        for (std::size_t i = 0; i < g.factors.size(); ++i) {
            try {
                Substitution::parse(1, g.factors[i].rules, false);
            } catch (const ConfigError &e) {
                throw ConfigError("system.factors[" + std::to_string(i) + "]: " + e.what());
            }
        }
        break;
    case GeneratorKind::ExplicitPoints:
        if (!g.points) throw ConfigError("system.points_file: required for explicit_points");
        if (g.points->dim() != g.dim) {
            throw ConfigError("system.points_file: point file has d = " + std::to_string(g.points->dim()) +
                              " but system.dimension = " + std::to_string(g.dim));
        }
        break;
    }
    if (c.levels < 0 || c.levels > 30) throw ConfigError("schedule.levels: must be in 0..30");
    if (c.window.half_width < 0) throw ConfigError("schedule.half_width: must be >= 0");
    if (c.window.iterations < 0) throw ConfigError("schedule.iterations: must be >= 0");
    if (!(c.window_margin >= 1.0)) throw ConfigError("schedule.window_margin: must be >= 1");
    for (const auto &t : c.thetas) {
        if (t.dim() != g.dim) {
            throw ConfigError("analysis.thetas: theta " + t.to_string() + " has " + std::to_string(t.dim()) +
                              " components but d = " + std::to_string(g.dim));
        }
    }
    if ((!c.thetas.empty() || c.scan) && c.levels < 3) {
        throw ConfigError("schedule.levels: verdicts need levels >= 3, got " + std::to_string(c.levels));
    }
    if (c.scan && c.scan->qmax < 1) throw ConfigError("analysis.scan_qmax: must be >= 1");
}

RunConfig parse_config(std::istream &in, const std::filesystem::path &base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }
    const Fields f(tree);
    RunConfig c;
    auto &g = c.generator;

    if (!f.text("system.kind")) throw ConfigError("system.kind: required");
    try {
        g.kind = parse_generator_kind(*f.text("system.kind"));
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("system.kind: ") + e.what());
    }
    auto dim = f.integer("system.dimension");
    if (!dim) throw ConfigError("system.dimension: required");
    g.dim = static_cast<int>(*dim);
    if (g.dim < 1 || g.dim > kMaxDim) {
        throw ConfigError("system.dimension: d = " + std::to_string(*dim) +
                          " is outside 1..3; the exact Voronoi geometry is capped at d <= 3");
    }
    if (f.text("system.q")) g.expansion = parse_int_list(f, "system.q");
    if (g.kind == GeneratorKind::LatticeModel && g.expansion.empty()) throw ConfigError("system.q: required");
    if (auto r = f.text("system.rules")) g.rules = *r;
    if (auto s = f.text("system.seed"); s && !s->empty()) g.seed = *s;
    if (auto factors = f.text("system.factors")) {
        for (const auto &rules : split_list(*factors, ';')) {
            GeneratorSpec factor;
            factor.kind = GeneratorKind::Substitution1d;
            factor.dim = 1;
            factor.rules = rules;
            g.factors.push_back(std::move(factor));
        }
    }
    if (g.kind == GeneratorKind::Product1d && g.factors.empty()) throw ConfigError("system.factors: required");
    if (auto file = f.text("system.points_file")) {
        std::filesystem::path p(*file);
        if (p.is_relative()) p = base_dir / p;
        std::ifstream points(p);
        if (!points) throw ConfigError("system.points_file: cannot open '" + p.string() + "'");
        try {
            g.points = PointSet::read(points);
        } catch (const ConfigError &e) {
            throw ConfigError("system.points_file: " + std::string(e.what()));
        }
        c.points_file = std::filesystem::absolute(p).lexically_normal().string();
    }

    if (auto v = f.integer("schedule.levels")) c.levels = static_cast<int>(*v);
    if (auto v = f.integer("schedule.half_width")) c.window.half_width = *v;
    if (auto v = f.integer("schedule.iterations")) c.window.iterations = static_cast<int>(*v);
    if (auto v = f.real("schedule.window_margin")) c.window_margin = *v;

    if (auto thetas = f.text("analysis.thetas")) {
        for (const auto &t : split_list(*thetas, ';')) {
            try {
                c.thetas.push_back(ThetaVector::parse(t));
            } catch (const std::exception &e) {
                throw ConfigError("analysis.thetas: '" + t + "': " + e.what());
            }
        }
    }
    if (auto k = f.text("analysis.k")) {
        try {
            c.k = parse_k_choice(*k);
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("analysis.k: ") + e.what());
        }
    }
    if (f.text("analysis.scan_qmax") || f.text("analysis.scan_reals") || f.text("analysis.scan_powers") ||
        f.text("analysis.scan_max_denominator") || f.text("analysis.scan_cf_depth")) {
        ScanSpec scan;
        if (auto q = f.integer("analysis.scan_qmax")) scan.qmax = *q;
        if (auto v = f.integer("analysis.scan_max_denominator")) scan.max_power_denominator = *v;
        if (auto reals = f.text("analysis.scan_reals")) {
            for (const auto &r : split_list(*reals, ';')) {
                try {
                    scan.reals.push_back(Scalar::parse(r).to_double());
                } catch (const std::exception &) {
                    throw ConfigError("analysis.scan_reals: '" + r + "' is not a number");
                }
            }
        }
        if (auto v = f.integer("analysis.scan_cf_depth")) scan.cf_depth = static_cast<int>(*v);
        c.scan = scan;
    }
    c.strict_well_distributed = f.boolean("analysis.strict_well_distributed").value_or(false);
    c.thin = f.boolean("analysis.thin").value_or(false);

    if (auto v = f.text("output.format")) {
        try {
            c.format = parse_output_format(*v);
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("output.format: ") + e.what());
        }
    }
    if (auto v = f.text("output.path")) c.output_path = *v;
    c.timestamp = f.boolean("output.timestamp").value_or(true);

    validate(c);
    if (c.scan && f.boolean("analysis.scan_powers").value_or(true)) c.scan->expansion = expansion_factors(g);
    return c;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

ConfigSections config_sections(const RunConfig &c) {
    const auto &g = c.generator;
    ConfigSections out;
    std::vector<std::pair<std::string, std::string>> system{{"dimension", std::to_string(g.dim)},
                                                            {"kind", to_string(g.kind)}};
    if (!g.expansion.empty()) {
        std::vector<std::string> qs;
        for (auto q : g.expansion) qs.push_back(std::to_string(q));
        system.emplace_back("q", join(qs, ","));
    }
    if (!g.rules.empty()) system.emplace_back("rules", g.rules);
    if (g.seed) system.emplace_back("seed", *g.seed);
    if (!g.factors.empty()) {
        std::vector<std::string> rules;
        for (const auto &factor : g.factors) rules.push_back(factor.rules);
        system.emplace_back("factors", join(rules, "; "));
    }
    if (!c.points_file.empty()) system.emplace_back("points_file", c.points_file);
    out.emplace_back("system", std::move(system));

    out.emplace_back("schedule", std::vector<std::pair<std::string, std::string>>{
                                     {"levels", std::to_string(c.levels)},
                                     {"half_width", std::to_string(c.window.half_width)},
                                     {"iterations", std::to_string(c.window.iterations)},
                                     {"window_margin", format_real(c.window_margin)}});

    std::vector<std::pair<std::string, std::string>> analysis;
    std::vector<std::string> thetas;
    for (const auto &t : c.thetas) thetas.push_back(t.to_string());
    analysis.emplace_back("thetas", join(thetas, "; "));
    analysis.emplace_back("k", to_string(c.k));
    if (c.scan) {
        analysis.emplace_back("scan_qmax", std::to_string(c.scan->qmax));
        analysis.emplace_back("scan_powers", c.scan->expansion.empty() ? "false" : "true");
        analysis.emplace_back("scan_max_denominator", std::to_string(c.scan->max_power_denominator));
        std::vector<std::string> reals;
        for (double r : c.scan->reals) reals.push_back(format_real(r));
        analysis.emplace_back("scan_reals", join(reals, "; "));
        analysis.emplace_back("scan_cf_depth", std::to_string(c.scan->cf_depth));
    }
    analysis.emplace_back("strict_well_distributed", c.strict_well_distributed ? "true" : "false");
    analysis.emplace_back("thin", c.thin ? "true" : "false");
    out.emplace_back("analysis", std::move(analysis));

    std::vector<std::pair<std::string, std::string>> output{{"format", to_string(c.format)}};
    if (!c.output_path.empty()) output.emplace_back("path", c.output_path);
    output.emplace_back("timestamp", c.timestamp ? "true" : "false");
    out.emplace_back("output", std::move(output));
    return out;
}

std::string echo_ini(const RunConfig &config) {
    std::ostringstream os;
    bool first = true;
    for (const auto &[section, keys] : config_sections(config)) {
        if (!first) os << '\n';
        first = false;
        os << '[' << section << "]\n";
        for (const auto &[k, v] : keys) os << k << " = " << v << '\n';
    }
    return os.str();
}

} // namespace rotfactor
