#include <doctest.h>

#include <sstream>

#include "rotfactor/errors.hpp"
#include "rotfactor/report.hpp"

using namespace rotfactor;

namespace {

RunConfig from_text(const std::string &text) {
    std::istringstream in(text);
    return parse_config(in);
}

const char *kLattice = R"(
[system]
dimension = 1
kind = lattice_model
q = 2

[schedule]
levels = 6

[analysis]
thetas = 1/4
)";

std::string error_of(const std::string &text) {
    try {
        from_text(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

const OracleResult *find_check(const std::vector<OracleResult> &rs, const std::string &prefix) {
    for (const auto &r : rs) {
        if (r.name.rfind(prefix, 0) == 0 && !r.pass) return &r;
    }
    return nullptr;
}

} // namespace

TEST_CASE("minimal lattice config materializes defaults") {
    auto c = from_text(kLattice);
    CHECK(c.generator.kind == GeneratorKind::LatticeModel);
    CHECK(c.generator.expansion == std::vector<std::int64_t>{2});
    CHECK(c.levels == 6);
    REQUIRE(c.thetas.size() == 1);
    CHECK(c.thetas[0].to_string() == ThetaVector::parse("1/4").to_string());
    CHECK(c.k == KChoice::One);
    CHECK(c.window_margin == 2.0);
    CHECK(c.format == OutputFormat::Json);
    CHECK(c.timestamp);
}

TEST_CASE("config rejections name the field") {
    auto d4 = error_of("[system]\ndimension = 4\nkind = lattice_model\nq = 2\n");
    CHECK(d4.find("d <= 3") != std::string::npos);

    auto shape = error_of("[system]\ndimension = 2\nkind = block_substitution\nrules = a:ab/ba, b:b\n");
    CHECK(shape.find("system.rules") != std::string::npos);
    CHECK(shape.find("'b'") != std::string::npos);

    CHECK(error_of("[system]\ndimension = 1\nkind = lattice_model\nq = 2\ncolour = red\n").find("colour") !=
          std::string::npos);
    CHECK(error_of("[extras]\nx = 1\n").find("extras") != std::string::npos);
    CHECK(error_of("[system]\ndimension = 1\nkind = lattice_model\nq = 2\n[schedule]\nlevels = 2\n[analysis]\n"
                   "thetas = 1/3\n")
              .find("levels") != std::string::npos);
    CHECK(error_of("[system]\ndimension = 1\nkind = lattice_model\nq = 2\n[analysis]\nthetas = 1/3, 1/2\n")
              .find("analysis.thetas") != std::string::npos);
}

TEST_CASE("numeric fields accept rational syntax") {
    auto c = from_text(std::string(kLattice) + "\n[output]\nformat = csv\n");
    CHECK(c.format == OutputFormat::Csv);
    auto m = from_text("[system]\ndimension = 1\nkind = lattice_model\nq = 4/2\n[schedule]\nwindow_margin = 5/2\n");
    CHECK(m.generator.expansion == std::vector<std::int64_t>{2});
    CHECK(m.window_margin == 2.5);
}

TEST_CASE("echoed config reproduces itself") {
    const char *text = R"(
[system]
dimension = 2
kind = product_1d
factors = a:ab, b:aa; a:ab, b:a

[schedule]
levels = 4

[analysis]
thetas = 1/4, 1/4; 0.5, 1/3
k = both
scan_qmax = 6
scan_reals = 0.618033988749895
strict_well_distributed = yes

[output]
timestamp = false
)";
    auto c = from_text(text);
    const auto echo = echo_ini(c);
    auto again = from_text(echo);
    CHECK(echo_ini(again) == echo);
    CHECK(again.thetas == c.thetas);
    CHECK(again.k == KChoice::Both);
    CHECK(again.strict_well_distributed);
    REQUIRE(again.scan);
    CHECK(again.scan->qmax == 6);
}

TEST_CASE("lattice pipeline classifies closed-form thetas") {
    auto c = from_text(kLattice);
    c.thetas = {ThetaVector::parse("1/4"), ThetaVector::parse("1/3"), ThetaVector::parse("0")};
    auto report = run_pipeline(c);
    REQUIRE(report.analyses.size() == 3);
    CHECK(report.analyses[0].necessary.verdict.cls == VerdictClass::ConvergentEvidence);
    CHECK(report.analyses[1].necessary.verdict.cls == VerdictClass::DivergentEvidence);
    CHECK(report.analyses[1].necessary.ruled_out);
    const auto &zero = report.analyses[2];
    for (const auto &l : zero.series.lengths) CHECK(l.is_zero());
    CHECK(zero.sufficient.indicated);
    CHECK_FALSE(zero.necessary.ruled_out);
}

TEST_CASE("reports are byte identical without a timestamp") {
    auto c = from_text(kLattice);
    auto a = report_json(run_pipeline(c), Stage::Analyze, false).dump(2);
    auto b = report_json(run_pipeline(c), Stage::Analyze, false).dump(2);
    CHECK(a == b);
    CHECK(a.find("generated_at") == std::string::npos);
    auto doc = Json::parse(a);
    CHECK(doc["analyses"][0]["partial_sums"].back()["exact"] == "3/4");
    CHECK(doc["analyses"][0]["verdict"]["class"] == "ConvergentEvidence");
    CHECK(report_json(run_pipeline(c), Stage::Analyze, true).contains("generated_at"));
}

TEST_CASE("csv projection") {
    auto c = from_text(kLattice);
    auto report = run_pipeline(c);
    std::ostringstream os;
    write_analysis_csv(os, report);
    std::istringstream lines(os.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# theta=1/4", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "n,l_n,partial_sum");
    std::getline(lines, line);
    CHECK(line == "0,1/4,1/4");
    std::getline(lines, line);
    CHECK(line == "1,1/2,3/4");
    std::getline(lines, line);
    CHECK(line == "2,0,3/4");
}

TEST_CASE("oracle check on the lattice model") {
    auto c = from_text(kLattice);
    c.levels = 5;
    c.thetas.clear();
    auto report = run_pipeline(c, Stage::Hierarchy);
    auto results = oracle_check(report);
    for (const auto &r : results) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.pass);
    }

    c.tie = TieBreak::LexLargest;
    auto faulty = oracle_check(run_pipeline(c, Stage::Hierarchy));
    const auto *addr = find_check(faulty, "address");
    REQUIRE(addr != nullptr);
    CHECK(addr->detail.find("address of") != std::string::npos);
}

TEST_CASE("oracle neighbor graph on a 21 x 21 window of Z^2") {
    auto c = from_text("[system]\ndimension = 2\nkind = lattice_model\nq = 2\n[schedule]\nlevels = 1\nhalf_width = 10\n");
    auto report = run_pipeline(c, Stage::Hierarchy);
    CHECK(report.data.levels[0].returns.base.size() == 441);
    auto results = oracle_check(report);
    const auto &n0 = results.front();
    CHECK(n0.name == "neighbor_graph level 0");
    CHECK(n0.pass);
    CHECK(n0.compared > 0);
}

TEST_CASE("oracle precondition") {
    auto c = from_text("[system]\ndimension = 2\nkind = product_1d\nfactors = a:ab, b:aa; a:ab, b:aa\n"
                       "[schedule]\nlevels = 2\n");
    auto report = run_pipeline(c, Stage::Hierarchy);
    CHECK_THROWS_AS(oracle_check(report), ConfigError);
}
