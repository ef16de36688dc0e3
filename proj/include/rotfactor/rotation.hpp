#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotfactor/hierarchy.hpp"
#include "rotfactor/torus.hpp"

namespace rotfactor {

inline constexpr double kSlopeThreshold = 0.05;  // delta
inline constexpr double kDivergenceFloor = 0.01; // epsilon_div
// Minimum R^2 of the log-linear decay fit.
inline constexpr double kMinFitR2 = 0.8;

// A nonnegative real that stays exact while every summand is.
struct ExactSum {
    std::optional<Rational> exact;
    double value = 0.0;

    void add(const TorusNorm &x);
    void add(const ExactSum &x);
    void scale(std::int64_t factor);
    std::string to_string() const;
};

struct ThetaLength {
    TorusNorm value;
    Point witness;
};

// max over v in F of the torus norm of c_map(v). Throws on an empty F.
ThetaLength theta_length(const FirstReturnSet &f, const ThetaVector &theta, TorusKind kind);

struct LengthSeries {
    TorusKind kind = TorusKind::One;
    ThetaVector theta;
    std::vector<int> levels;
    std::vector<TorusNorm> lengths;
    std::vector<Point> witnesses;
    std::vector<ExactSum> partial_sums;
};

LengthSeries length_series(const CombinatorialData &data, const ThetaVector &theta, TorusKind kind);
// Series from raw per-level values (levels 0, 1, ...).
LengthSeries series_from_lengths(std::vector<TorusNorm> lengths);
TorusNorm exact_norm(const Rational &value);
TorusNorm float_norm(double value);

enum class VerdictClass { ConvergentEvidence, DivergentEvidence, Inconclusive };
std::string to_string(VerdictClass v);

struct Verdict {
    VerdictClass cls = VerdictClass::Inconclusive;
    std::optional<double> rate;
    std::optional<double> tail_bound;
    std::optional<double> fit_r2;
    bool exact_zero_tail = false;
    int first_level = 0; // levels the classification looked at
    int last_level = 0;
    std::string note;
};

// Needs at least 4 levels (ConfigError otherwise).
Verdict series_verdict(const LengthSeries &series);

struct NecessaryReport {
    bool ruled_out = false;
    bool conditional = false; // data not well distributed
    Verdict verdict;
    std::string statement;
};

NecessaryReport necessary_condition_check(const LengthSeries &series, bool well_distributed);

struct BoundEntry {
    int n0 = 0;
    ExactSum bound;
};

struct SufficientReport {
    bool indicated = false;
    bool conditional = false; // linear recurrence not evidenced
    Verdict verdict;
    std::int64_t lr_bound = 0;
    std::vector<BoundEntry> bounds; // L * sum_{n >= n0} l_n, plus the tail estimate
    std::string statement;
};

SufficientReport sufficient_condition_check(const LengthSeries &series, const LinearRecurrenceReport &lr);

// h on the orbit of the base point.
TorusPoint factor_map_eval(const ThetaVector &theta, const Point &n, TorusKind kind);

struct ContinuityModulus {
    int level = 0;
    TorusNorm epsilon;
    std::size_t pairs = 0;
    bool subsampled = false;
};

inline constexpr std::size_t kMaxModulusPairs = 100000;

// Max torus distance of c_map(a - b) over interior pairs of R_N.
ContinuityModulus continuity_modulus(const Level &level, const ThetaVector &theta, TorusKind kind);

struct ScanSpec {
    std::int64_t qmax = 8;
    std::vector<std::int64_t> expansion;   // adds p / q_i^m candidates
    std::int64_t max_power_denominator = 64;
    std::vector<double> reals;             // adds continued-fraction convergents
    int cf_depth = 8;
};

struct ScanEntry {
    ThetaVector theta;
    ExactSum score;
    std::int64_t denominator = 1;
};

std::vector<ThetaVector> scan_candidates(int d, const ScanSpec &spec);
std::vector<Rational> convergents(double x, int depth);
std::vector<ScanEntry> theta_scan(const CombinatorialData &data, TorusKind kind, const ScanSpec &spec);
std::vector<ScanEntry> theta_scan_serial(const CombinatorialData &data, TorusKind kind, const ScanSpec &spec);

} // namespace rotfactor
