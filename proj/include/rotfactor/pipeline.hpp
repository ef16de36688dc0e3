#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rotfactor/config.hpp"

namespace rotfactor {

struct ThetaAnalysis {
    ThetaVector theta;
    TorusKind kind = TorusKind::One;
    LengthSeries series;
    NecessaryReport necessary;
    SufficientReport sufficient;
    std::vector<ContinuityModulus> epsilon_table;
};

struct ScanResult {
    TorusKind kind = TorusKind::One;
    std::vector<ScanEntry> ranked;
};

struct RunReport {
    RunConfig config;
    std::optional<Configuration> configuration;
    CombinatorialData data;
    std::vector<WellDistributedReport> well_distributed;
    LinearRecurrenceReport linear_recurrence;
    std::vector<ThetaAnalysis> analyses;
    std::vector<ScanResult> scans;
    std::vector<std::string> warnings;
};

enum class Stage { Hierarchy, Analyze, Scan };

// Deterministic end-to-end run. Hierarchy stops after the combinatorial
// data; Analyze adds the per-theta analyses (and the scan when configured);
// Scan runs the theta scan with the configured or default scan spec.
RunReport run_pipeline(const RunConfig &config, Stage stage = Stage::Analyze);

ThetaAnalysis analyze_theta(const CombinatorialData &data, const std::vector<WellDistributedReport> &wd,
                            const LinearRecurrenceReport &lr, const ThetaVector &theta, TorusKind kind);

} // namespace rotfactor
