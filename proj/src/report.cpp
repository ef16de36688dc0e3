#include "rotfactor/report.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace rotfactor {

namespace {

std::string kind_name(TorusKind kind) { return kind == TorusKind::One ? "1" : "d"; }

Json optional_double(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

Json to_json(const Point &p) { return p.to_string(); }

Json to_json(const TorusNorm &n) {
    Json j;
    j["value"] = n.value;
    j["exact"] = n.exact_value() ? Json(n.exact_value()->to_string()) : Json(nullptr);
    j["squared"] = n.squared ? Json(n.squared->to_string()) : Json(nullptr);
    return j;
}

Json to_json(const ExactSum &s) {
    Json j;
    j["value"] = s.value;
    j["exact"] = s.exact ? Json(s.exact->to_string()) : Json(nullptr);
    return j;
}

Json to_json(const Verdict &v) {
    Json j;
    j["class"] = to_string(v.cls);
    j["rate"] = optional_double(v.rate);
    j["tail_bound"] = optional_double(v.tail_bound);
    j["fit_r2"] = optional_double(v.fit_r2);
    j["exact_zero_tail"] = v.exact_zero_tail;
    j["levels"] = {v.first_level, v.last_level};
    j["note"] = v.note;
    return j;
}

Json config_json(const RunConfig &config) {
    Json j = Json::object();
    for (const auto &[section, entries] : config_sections(config)) {
        Json s = Json::object();
        for (const auto &[key, value] : entries) s[key] = value;
        j[section] = s;
    }
    return j;
}

Json hierarchy_json(const RunReport &report) {
    const auto &data = report.data;
    Json h;
    h["window"] = data.levels.front().returns.base.window().to_string();
    h["margin_factor"] = data.options.margin_factor;
    h["tie_break"] = data.options.tie == TieBreak::LexSmallest ? "lex_smallest" : "lex_largest";
    Json levels = Json::array();
    for (const auto &level : data.levels) {
        Json l;
        l["n"] = level.n;
        l["points"] = level.returns.base.size();
        l["interior"] = level.returns.base.interior_points().size();
        l["cylinder"] = level.returns.cylinder.to_string();
        l["reliable"] = level.returns.reliable;
        if (!level.returns.note.empty()) l["note"] = level.returns.note;
        l["radii"] = {{"packing", level.radii.packing},
                      {"covering", level.radii.covering},
                      {"safe_covering", level.radii.safe_covering}};
        l["neighbor_edges"] = level.graph.edges.size();
        Json f = Json::array();
        for (const auto &v : level.first_returns.vectors) f.push_back(to_json(v));
        l["first_returns"] = f;
        l["k"] = level.k ? Json(*level.k) : Json(nullptr);
        if (level.partition) {
            const auto &p = *level.partition;
            l["patches"] = {{"owners", p.owners.size()},
                            {"complete", p.complete_count()},
                            {"clipped", p.owners.size() - p.complete_count()},
                            {"margin", p.margin}};
        } else {
            l["patches"] = nullptr;
        }
        levels.push_back(l);
    }
    h["levels"] = levels;
    Json wd = Json::array();
    for (const auto &r : report.well_distributed) {
        Json w;
        w["n"] = r.n;
        w["iii"] = r.iii;
        w["iv"] = r.iv ? Json(*r.iv) : Json(nullptr);
        w["patches_checked"] = r.patches_checked;
        w["clipped"] = r.clipped;
        Json v3 = Json::array();
        for (const auto &p : r.iii_violations) v3.push_back(to_json(p));
        Json v4 = Json::array();
        for (const auto &p : r.iv_violations) v4.push_back(to_json(p));
        w["iii_violations"] = v3;
        w["iv_violations"] = v4;
        wd.push_back(w);
    }
    h["well_distributed"] = wd;
    h["well_distributed_all"] = all_well_distributed(report.well_distributed);
    h["linear_recurrence"] = {{"k", report.linear_recurrence.k},
                              {"bound", report.linear_recurrence.bound},
                              {"flagged", report.linear_recurrence.flagged}};
    h["diagnostics"] = data.diagnostics;
    return h;
}

Json analysis_json(const ThetaAnalysis &a) {
    Json j;
    j["theta"] = a.theta.to_string();
    j["k"] = kind_name(a.kind);
    const auto &s = a.series;
    j["levels"] = s.levels;
    Json lengths = Json::array();
    Json partial = Json::array();
    Json witnesses = Json::array();
    for (std::size_t i = 0; i < s.lengths.size(); ++i) {
        lengths.push_back(to_json(s.lengths[i]));
        partial.push_back(to_json(s.partial_sums[i]));
        witnesses.push_back(to_json(s.witnesses[i]));
    }
    j["lengths"] = lengths;
    j["partial_sums"] = partial;
    j["witnesses"] = witnesses;
    j["verdict"] = to_json(a.necessary.verdict);
    j["necessary"] = {{"ruled_out", a.necessary.ruled_out},
                      {"conditional", a.necessary.conditional},
                      {"statement", a.necessary.statement}};
    Json bounds = Json::array();
    for (const auto &b : a.sufficient.bounds) bounds.push_back({{"n0", b.n0}, {"bound", to_json(b.bound)}});
    j["sufficient"] = {{"indicated", a.sufficient.indicated},
                       {"conditional", a.sufficient.conditional},
                       {"lr_bound", a.sufficient.lr_bound},
                       {"bounds", bounds},
                       {"statement", a.sufficient.statement}};
    Json eps = Json::array();
    for (const auto &e : a.epsilon_table) {
        eps.push_back({{"n", e.level}, {"epsilon", to_json(e.epsilon)}, {"pairs", e.pairs}, {"subsampled", e.subsampled}});
    }
    j["epsilon_table"] = eps;
    return j;
}

Json scan_json(const ScanResult &scan, std::size_t limit) {
    Json j;
    j["k"] = kind_name(scan.kind);
    j["candidates"] = scan.ranked.size();
    Json ranked = Json::array();
    const std::size_t n = limit == 0 ? scan.ranked.size() : std::min(limit, scan.ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto &e = scan.ranked[i];
        ranked.push_back({{"theta", e.theta.to_string()}, {"score", to_json(e.score)}, {"denominator", e.denominator}});
    }
    j["ranked"] = ranked;
    return j;
}

Json configuration_json(const Configuration &config) {
    Json j;
    j["support"] = config.support.to_string();
    j["alphabet"] = config.alphabet;
    std::ostringstream grid;
    config.write_grid(grid);
    Json rows = Json::array();
    std::istringstream lines(grid.str());
    for (std::string line; std::getline(lines, line);) rows.push_back(line);
    j["grid"] = rows;
    return j;
}

Json oracle_json(const std::vector<OracleResult> &results) {
    Json a = Json::array();
    bool all = true;
    for (const auto &r : results) {
        all = all && r.pass;
        a.push_back({{"check", r.name}, {"pass", r.pass}, {"compared", r.compared}, {"detail", r.detail}});
    }
    return {{"pass", all}, {"checks", a}};
}

Json report_json(const RunReport &report, Stage stage, bool timestamp) {
    Json doc;
    doc["tool"] = "rotfactor";
    doc["version"] = kToolVersion;
    if (timestamp) doc["generated_at"] = utc_timestamp();
    doc["stage"] = stage == Stage::Hierarchy ? "hierarchy" : (stage == Stage::Analyze ? "analyze" : "scan");
    doc["config"] = config_json(report.config);
    doc["hierarchy"] = hierarchy_json(report);
    if (stage != Stage::Hierarchy) {
        Json analyses = Json::array();
        const auto window = report.data.levels.front().returns.base.window().to_string();
        for (const auto &a : report.analyses) {
            auto j = analysis_json(a);
            j["window"] = window;
            analyses.push_back(std::move(j));
        }
        doc["analyses"] = analyses;
        Json scans = Json::array();
        for (const auto &s : report.scans) scans.push_back(scan_json(s, 50));
        doc["scan"] = scans;
    }
    doc["warnings"] = report.warnings;
    return doc;
}

void write_json(std::ostream &os, const Json &doc) { os << doc.dump(2) << '\n'; }

void write_analysis_csv(std::ostream &os, const RunReport &report) {
    for (const auto &a : report.analyses) {
        os << "# theta=" << a.theta.to_string() << " k=" << kind_name(a.kind)
           << " verdict=" << to_string(a.necessary.verdict.cls) << '\n';
        os << "n,l_n,partial_sum\n";
        for (std::size_t i = 0; i < a.series.lengths.size(); ++i) {
            const auto &l = a.series.lengths[i];
            const auto &s = a.series.partial_sums[i];
            os << a.series.levels[i] << ',' << csv_field(l.to_string()) << ',' << csv_field(s.to_string()) << '\n';
        }
    }
}

void write_patch_csv(std::ostream &os, const RunReport &report) {
    os << "level,point,owner\n";
    for (const auto &level : report.data.levels) {
        if (!level.partition) continue;
        const auto &p = *level.partition;
        for (std::size_t i = 0; i < p.owners.size(); ++i) {
            for (const auto &x : p.patches[i]) {
                os << level.n << ',' << csv_field(x.to_string()) << ',' << csv_field(p.owners[i].to_string()) << '\n';
            }
        }
    }
}

void write_scan_csv(std::ostream &os, const RunReport &report) {
    os << "k,rank,theta,score,denominator\n";
    for (const auto &s : report.scans) {
        for (std::size_t i = 0; i < s.ranked.size(); ++i) {
            const auto &e = s.ranked[i];
            os << kind_name(s.kind) << ',' << i + 1 << ',' << csv_field(e.theta.to_string()) << ','
               << csv_field(e.score.to_string()) << ',' << e.denominator << '\n';
        }
    }
}

void write_configuration_csv(std::ostream &os, const Configuration &config) {
    os << "point,symbol\n";
    for (std::int64_t i = 0; i < config.support.volume(); ++i) {
        const Point p = config.support.point_at(static_cast<std::size_t>(i));
        os << csv_field(p.to_string()) << ',' << csv_field(config.alphabet[config.at(p)]) << '\n';
    }
}

void write_oracle_table(std::ostream &os, const std::vector<OracleResult> &results) {
    std::size_t width = 5;
    for (const auto &r : results) width = std::max(width, r.name.size());
    for (const auto &r : results) {
        os << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << (r.pass ? "PASS" : "FAIL") << "  "
           << std::right << std::setw(8) << r.compared;
        if (!r.detail.empty()) os << "  " << r.detail;
        os << '\n';
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

} // namespace rotfactor
