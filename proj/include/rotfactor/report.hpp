#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "rotfactor/oracle.hpp"
#include "rotfactor/pipeline.hpp"

namespace rotfactor {

using Json = nlohmann::ordered_json;

inline constexpr const char *kToolVersion = "0.1.0";

Json to_json(const Point &p);
Json to_json(const TorusNorm &n);
Json to_json(const ExactSum &s);
Json to_json(const Verdict &v);
Json config_json(const RunConfig &config);
Json hierarchy_json(const RunReport &report);
Json analysis_json(const ThetaAnalysis &analysis);
Json scan_json(const ScanResult &scan, std::size_t limit = 0);
Json configuration_json(const Configuration &config);
Json oracle_json(const std::vector<OracleResult> &results);

// Full document for a stage; `timestamp` adds a generated_at field.
Json report_json(const RunReport &report, Stage stage, bool timestamp);
void write_json(std::ostream &os, const Json &doc);

// CSV projections.
void write_analysis_csv(std::ostream &os, const RunReport &report); // n,l_n,partial_sum blocks per (theta, k)
void write_patch_csv(std::ostream &os, const RunReport &report);    // level,point,owner
void write_scan_csv(std::ostream &os, const RunReport &report);     // k,rank,theta,score,denominator
void write_configuration_csv(std::ostream &os, const Configuration &config); // point,symbol
void write_oracle_table(std::ostream &os, const std::vector<OracleResult> &results);

std::string utc_timestamp();

} // namespace rotfactor
