#include "rotfactor/pipeline.hpp"

#include "rotfactor/errors.hpp"

namespace rotfactor {

ThetaAnalysis analyze_theta(const CombinatorialData &data, const std::vector<WellDistributedReport> &wd,
                            const LinearRecurrenceReport &lr, const ThetaVector &theta, TorusKind kind) {
    ThetaAnalysis a;
    a.theta = theta;
    a.kind = kind;
    a.series = length_series(data, theta, kind);
    a.necessary = necessary_condition_check(a.series, all_well_distributed(wd));
    a.sufficient = sufficient_condition_check(a.series, lr);
    for (const auto &level : data.levels) a.epsilon_table.push_back(continuity_modulus(level, theta, kind));
    return a;
}

RunReport run_pipeline(const RunConfig &config, Stage stage) {
    validate(config);
    RunReport report;
    report.config = config;

    auto realization = realize(config.generator, config.levels, config.window);
    for (const auto &note : realization.notes) report.warnings.push_back(note);
    report.configuration = std::move(realization.config);

    HierarchyOptions options;
    options.margin_factor = config.window_margin;
    options.tie = config.tie;
    options.strict_well_distributed = config.strict_well_distributed;
    report.data = build_combinatorial_data(std::move(realization.levels), options);
    if (config.thin) report.data = thin_to_well_distributed(report.data);
    for (const auto &d : report.data.diagnostics) report.warnings.push_back(d);
    report.well_distributed = check_well_distributed(report.data);
    report.linear_recurrence = linear_recurrence_report(report.data);
    if (!report.linear_recurrence.flagged) {
        report.warnings.push_back("k(n) is not constant over the last half; L-hat is the maximum and bounds are conditional");
    }
    if (stage == Stage::Hierarchy) return report;

    const bool verdicts = report.data.levels.size() >= 4;
    if (!verdicts && (!config.thetas.empty() || stage == Stage::Scan || config.scan)) {
        throw WindowTooSmall("only " + std::to_string(report.data.levels.size()) +
                             " levels survive; verdicts need at least 4");
    }
    if (stage == Stage::Analyze) {
        for (const auto &theta : config.thetas) {
            for (auto kind : torus_kinds(config.k)) {
                report.analyses.push_back(
                    analyze_theta(report.data, report.well_distributed, report.linear_recurrence, theta, kind));
            }
        }
    }
    if (stage == Stage::Scan || config.scan) {
        ScanSpec spec;
        if (config.scan) {
            spec = *config.scan;
        } else {
            spec.expansion = expansion_factors(config.generator);
        }
        for (auto kind : torus_kinds(config.k)) report.scans.push_back({kind, theta_scan(report.data, kind, spec)});
    }
    return report;
}

} // namespace rotfactor
