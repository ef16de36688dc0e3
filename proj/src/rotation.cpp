#include "rotfactor/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rotfactor/errors.hpp"

namespace rotfactor {

void ExactSum::add(const TorusNorm &x) {
    value += x.value;
    if (!exact) return;
    auto v = x.exact_value();
    if (!v) {
        exact.reset();
        return;
    }
    try {
        *exact += *v;
    } catch (const ArithmeticOverflow &) {
        exact.reset();
    }
}

void ExactSum::add(const ExactSum &x) {
    value += x.value;
    if (!exact) return;
    if (!x.exact) {
        exact.reset();
        return;
    }
    try {
        *exact += *x.exact;
    } catch (const ArithmeticOverflow &) {
        exact.reset();
    }
}

void ExactSum::scale(std::int64_t factor) {
    value *= static_cast<double>(factor);
    if (!exact) return;
    try {
        *exact *= Rational(factor);
    } catch (const ArithmeticOverflow &) {
        exact.reset();
    }
}

std::string ExactSum::to_string() const {
    if (exact) return exact->to_string();
    return float_norm(value).to_string();
}

ThetaLength theta_length(const FirstReturnSet &f, const ThetaVector &theta, TorusKind kind) {
    if (f.empty()) throw std::invalid_argument("theta length of an empty first-return set");
    std::optional<ThetaLength> best;
    for (const auto &v : f.vectors) {
        auto norm = torus_distance(c_map(kind, theta, v));
        if (!best || norm_less(best->value, norm)) best = ThetaLength{norm, v};
    }
    return *best;
}

TorusNorm exact_norm(const Rational &value) {
    TorusNorm n;
    n.squared = value * value;
    n.value = value.to_double();
    return n;
}

TorusNorm float_norm(double value) {
    TorusNorm n;
    n.value = value;
    return n;
}

namespace {

void fill_partial_sums(LengthSeries &s) {
    ExactSum running;
    running.exact = Rational(0);
    s.partial_sums.clear();
    for (const auto &l : s.lengths) {
        running.add(l);
        s.partial_sums.push_back(running);
    }
}

} // namespace

LengthSeries length_series(const CombinatorialData &data, const ThetaVector &theta, TorusKind kind) {
    const int d = data.levels.front().returns.base.dim();
    if (theta.dim() != d) {
        throw DimensionMismatch("theta has dimension " + std::to_string(theta.dim()) + " but the action has d = " +
                                std::to_string(d));
    }
    LengthSeries s;
    s.kind = kind;
    s.theta = theta;
    for (const auto &level : data.levels) {
        auto l = theta_length(level.first_returns, theta, kind);
        s.levels.push_back(level.n);
        s.lengths.push_back(l.value);
        s.witnesses.push_back(l.witness);
    }
    fill_partial_sums(s);
    return s;
}

LengthSeries series_from_lengths(std::vector<TorusNorm> lengths) {
    LengthSeries s;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        s.levels.push_back(static_cast<int>(i));
        s.witnesses.push_back(Point{0});
    }
    s.lengths = std::move(lengths);
    fill_partial_sums(s);
    return s;
}

std::string to_string(VerdictClass v) {
    switch (v) {
    case VerdictClass::ConvergentEvidence: return "ConvergentEvidence";
    case VerdictClass::DivergentEvidence: return "DivergentEvidence";
    case VerdictClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Verdict series_verdict(const LengthSeries &series) {
    const std::size_t count = series.lengths.size();
    if (count < 4) throw ConfigError("a verdict needs at least 4 levels, got " + std::to_string(count));
    const std::size_t start = count / 2;
    Verdict v;
    v.first_level = series.levels[start];
    v.last_level = series.levels.back();

    bool zero_tail = true;
    for (std::size_t i = start; i < count; ++i) zero_tail = zero_tail && series.lengths[i].is_zero();
    if (zero_tail) {
        v.cls = VerdictClass::ConvergentEvidence;
        v.exact_zero_tail = true;
        v.tail_bound = 0.0;
        v.note = "lengths vanish on the last half";
        return v;
    }

    std::vector<double> xs;
    std::vector<double> ys;
    double floor_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < count; ++i) {
        const double l = series.lengths[i].value;
        floor_value = std::min(floor_value, series.lengths[i].is_zero() ? 0.0 : l);
        if (!series.lengths[i].is_zero()) {
            xs.push_back(series.levels[i]);
            ys.push_back(std::log(l));
        }
    }
    if (xs.size() >= 2) {
        const double n = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxy = 0;
        double sxx = 0;
        double syy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        const double slope = sxx > 0 ? sxy / sxx : 0.0;
        const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
        v.fit_r2 = r2;
        if (slope <= -kSlopeThreshold && r2 >= kMinFitR2) {
            const double r = std::exp(slope);
            v.cls = VerdictClass::ConvergentEvidence;
            v.rate = r;
            v.tail_bound = series.lengths.back().value * r / (1.0 - r);
            v.note = "geometric decay fitted on the last half";
            return v;
        }
        v.rate = std::exp(slope);
    }
    if (floor_value >= kDivergenceFloor) {
        v.cls = VerdictClass::DivergentEvidence;
        v.note = "lengths stay above the divergence floor on the last half";
        return v;
    }
    v.cls = VerdictClass::Inconclusive;
    v.note = "neither geometric decay nor a positive floor on the last half";
    return v;
}

NecessaryReport necessary_condition_check(const LengthSeries &series, bool well_distributed) {
    NecessaryReport r;
    r.verdict = series_verdict(series);
    r.conditional = !well_distributed;
    r.ruled_out = well_distributed && r.verdict.cls == VerdictClass::DivergentEvidence;
    if (r.ruled_out) {
        r.statement = "extension onto the rotation ruled out at this scale";
    } else if (r.verdict.cls == VerdictClass::DivergentEvidence) {
        r.statement = "not ruled out: lengths diverge but the data is not well distributed";
    } else {
        r.statement = "not ruled out";
    }
    return r;
}

SufficientReport sufficient_condition_check(const LengthSeries &series, const LinearRecurrenceReport &lr) {
    SufficientReport r;
    r.verdict = series_verdict(series);
    r.conditional = !lr.flagged;
    r.lr_bound = lr.bound;
    r.indicated = r.verdict.cls == VerdictClass::ConvergentEvidence;
    for (std::size_t i = 0; i < series.lengths.size(); ++i) {
        ExactSum sum;
        sum.exact = Rational(0);
        for (std::size_t j = i; j < series.lengths.size(); ++j) sum.add(series.lengths[j]);
        if (r.verdict.tail_bound && !r.verdict.exact_zero_tail) {
            sum.add(float_norm(*r.verdict.tail_bound));
            sum.exact.reset();
        }
        sum.scale(lr.bound);
        r.bounds.push_back({series.levels[i], sum});
    }
    if (r.indicated) {
        r.statement = r.conditional ? "extension indicated, conditional on linear recurrence" : "extension indicated";
    } else {
        r.statement = "extension not indicated";
    }
    return r;
}

TorusPoint factor_map_eval(const ThetaVector &theta, const Point &n, TorusKind kind) { return c_map(kind, theta, n); }

ContinuityModulus continuity_modulus(const Level &level, const ThetaVector &theta, TorusKind kind) {
    ContinuityModulus out;
    out.level = level.n;
    out.epsilon = torus_distance(c_map(kind, theta, Point::zero(theta.dim())));
    const auto interior = level.returns.base.interior_points();
    auto consider = [&](const Point &diff) {
        auto norm = torus_distance(c_map(kind, theta, diff));
        if (norm_less(out.epsilon, norm)) out.epsilon = norm;
        ++out.pairs;
    };
    if (interior.size() * interior.size() <= kMaxModulusPairs) {
        for (std::size_t i = 0; i < interior.size(); ++i) {
            for (std::size_t j = i + 1; j < interior.size(); ++j) consider(interior[j] - interior[i]);
        }
        return out;
    }
    out.subsampled = true;
    const auto keep = static_cast<std::size_t>(std::sqrt(static_cast<double>(kMaxModulusPairs)));
    const std::size_t stride = (interior.size() + keep - 1) / keep;
    std::vector<Point> sample;
    for (std::size_t i = 0; i < interior.size(); i += stride) sample.push_back(interior[i]);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.size(); ++j) consider(sample[j] - sample[i]);
    }
    for (const auto &v : level.first_returns.vectors) consider(v);
    return out;
}

std::vector<Rational> convergents(double x, int depth) {
    std::vector<Rational> out;
    double frac = x - std::floor(x);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double rem = frac;
    for (int i = 0; i <= depth; ++i) {
        const auto a = static_cast<std::int64_t>(std::floor(rem));
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > 1000000) break;
        out.emplace_back(p2, q2);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double f = rem - static_cast<double>(a);
        if (f < 1e-12) break;
        rem = 1.0 / f;
    }
    return out;
}

std::vector<ThetaVector> scan_candidates(int d, const ScanSpec &spec) {
    if (spec.qmax < 1) throw ConfigError("scan_qmax must be >= 1");
    std::vector<std::set<Rational>> per_axis(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        auto &values = per_axis[static_cast<std::size_t>(a)];
        for (std::int64_t q = 1; q <= spec.qmax; ++q) {
            for (std::int64_t p = 0; p < q; ++p) values.insert(Rational(p, q));
        }
        if (!spec.expansion.empty()) {
            const auto base = spec.expansion[static_cast<std::size_t>(a) % spec.expansion.size()];
            for (std::int64_t q = base; base > 1 && q <= spec.max_power_denominator; q *= base) {
                for (std::int64_t p = 0; p < q; ++p) values.insert(Rational(p, q));
            }
        }
        for (double x : spec.reals) {
            for (const auto &c : convergents(x, spec.cf_depth)) values.insert(c.frac());
        }
    }
    std::size_t total = 1;
    for (const auto &v : per_axis) total *= v.size();
    if (total > 200000) throw ConfigError("theta scan would try " + std::to_string(total) + " candidates");
    std::vector<ThetaVector> out;
    std::vector<std::vector<Rational>> axes;
    for (const auto &v : per_axis) axes.emplace_back(v.begin(), v.end());
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        std::vector<Scalar> comps;
        for (int a = 0; a < d; ++a) comps.emplace_back(axes[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]]);
        out.emplace_back(std::move(comps));
        int a = d - 1;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == axes[static_cast<std::size_t>(a)].size()) {
            idx[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    if (out.empty()) throw ConfigError("empty theta candidate set");
    return out;
}

namespace {

std::int64_t denominator_of(const ThetaVector &theta) {
    std::int64_t l = 1;
    for (const auto &c : theta.components()) l = std::lcm(l, c.exact().den());
    return l;
}

ScanEntry score_candidate(const CombinatorialData &data, const ThetaVector &theta, TorusKind kind) {
    ScanEntry e;
    e.theta = theta;
    e.denominator = denominator_of(theta);
    e.score.exact = Rational(0);
    for (const auto &level : data.levels) e.score.add(theta_length(level.first_returns, theta, kind).value);
    return e;
}

bool score_less(const ExactSum &a, const ExactSum &b) {
    if (a.exact && b.exact) return *a.exact < *b.exact;
    return a.value < b.value - kFloatTolerance;
}

void rank(std::vector<ScanEntry> &entries) {
    std::stable_sort(entries.begin(), entries.end(), [](const ScanEntry &a, const ScanEntry &b) {
        if (score_less(a.score, b.score)) return true;
        if (score_less(b.score, a.score)) return false;
        if (a.denominator != b.denominator) return a.denominator < b.denominator;
        for (int i = 0; i < a.theta.dim(); ++i) {
            if (a.theta[i].exact() != b.theta[i].exact()) return a.theta[i].exact() < b.theta[i].exact();
        }
        return false;
    });
}

} // namespace

std::vector<ScanEntry> theta_scan(const CombinatorialData &data, TorusKind kind, const ScanSpec &spec) {
    const auto candidates = scan_candidates(data.levels.front().returns.base.dim(), spec);
    std::vector<ScanEntry> entries(candidates.size());
    std::vector<std::string> errors(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(candidates.size()); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            entries[idx] = score_candidate(data, candidates[idx], kind);
        } catch (const std::exception &e) {
            errors[idx] = e.what();
        }
    }
    for (const auto &e : errors) {
        if (!e.empty()) throw InvariantViolation("theta scan failed: " + e);
    }
    rank(entries);
    return entries;
}

std::vector<ScanEntry> theta_scan_serial(const CombinatorialData &data, TorusKind kind, const ScanSpec &spec) {
    const auto candidates = scan_candidates(data.levels.front().returns.base.dim(), spec);
    std::vector<ScanEntry> entries;
    for (const auto &c : candidates) entries.push_back(score_candidate(data, c, kind));
    rank(entries);
    return entries;
}

} // namespace rotfactor
