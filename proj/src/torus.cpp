#include "rotfactor/torus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "rotfactor/errors.hpp"

namespace rotfactor {

double Point::norm() const { return std::sqrt(static_cast<double>(norm2())); }

std::string Point::to_string() const {
    std::string out = "(";
    for (int i = 0; i < dim; ++i) {
        if (i) out += ",";
        out += std::to_string(c[i]);
    }
    return out + ")";
}

double Scalar::to_double() const {
    if (is_exact()) return exact().to_double();
    return std::get<double>(value_);
}

Scalar Scalar::frac() const {
    if (is_exact()) return exact().frac();
    double v = std::get<double>(value_);
    double f = v - std::floor(v);
    if (f >= 1.0) f = 0.0;
    return f;
}

bool Scalar::is_zero() const {
    if (is_exact()) return exact().is_zero();
    return std::abs(std::get<double>(value_)) <= kFloatTolerance;
}

Scalar operator+(const Scalar &a, const Scalar &b) {
    if (a.is_exact() && b.is_exact()) return a.exact() + b.exact();
    return a.to_double() + b.to_double();
}

Scalar operator*(std::int64_t n, const Scalar &s) {
    if (s.is_exact()) return Rational(n) * s.exact();
    return static_cast<double>(n) * std::get<double>(s.value_);
}

std::string Scalar::to_string() const {
    if (is_exact()) return exact().to_string();
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(value_));
    return std::string(buf, res.ptr);
}

Scalar Scalar::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty number");
    bool is_float = text.find_first_of(".eE") != std::string_view::npos;
    if (!is_float) return Rational::parse(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

ThetaVector ThetaVector::parse(std::string_view text) {
    std::vector<Scalar> comps;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        comps.push_back(Scalar::parse(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return ThetaVector(std::move(comps));
}

bool ThetaVector::is_exact() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Scalar &s) { return s.is_exact(); });
}

bool ThetaVector::is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Scalar &s) { return s.is_zero(); });
}

std::string ThetaVector::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (i) out += ",";
        out += comps_[i].to_string();
    }
    return out;
}

TorusPoint::TorusPoint(std::vector<Scalar> comps) : comps_(std::move(comps)) {
    for (auto &c : comps_) c = c.frac();
}

bool TorusPoint::is_exact() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Scalar &s) { return s.is_exact(); });
}

std::string TorusPoint::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (i) out += ",";
        out += comps_[i].to_string();
    }
    return out + ")";
}

std::optional<Rational> TorusNorm::exact_value() const {
    if (!squared || !squared->is_perfect_square()) return std::nullopt;
    return squared->sqrt_exact();
}

std::string TorusNorm::to_string() const {
    if (auto v = exact_value()) return v->to_string();
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

int torus_dim(TorusKind kind, int d) { return kind == TorusKind::One ? 1 : d; }

namespace {

void require_same_dim(const ThetaVector &theta, const Point &p) {
    if (theta.dim() != p.dim) {
        throw DimensionMismatch("theta has dimension " + std::to_string(theta.dim()) + " but point has dimension " +
                                std::to_string(p.dim));
    }
}

} // namespace

TorusPoint c_map_1(const ThetaVector &theta, const Point &p) {
    require_same_dim(theta, p);
    Scalar sum = Rational(0);
    // Reducing every term first keeps rational numerators and float magnitudes small.
    for (int i = 0; i < p.dim; ++i) sum = (sum + (p[i] * theta[i]).frac()).frac();
    return TorusPoint({sum});
}

TorusPoint c_map_d(const ThetaVector &theta, const Point &p) {
    require_same_dim(theta, p);
    std::vector<Scalar> comps;
    comps.reserve(static_cast<std::size_t>(p.dim));
    for (int i = 0; i < p.dim; ++i) comps.push_back(p[i] * theta[i]);
    return TorusPoint(std::move(comps));
}

TorusPoint c_map(TorusKind kind, const ThetaVector &theta, const Point &p) {
    return kind == TorusKind::One ? c_map_1(theta, p) : c_map_d(theta, p);
}

TorusNorm torus_distance(const TorusPoint &t) {
    TorusNorm out;
    if (t.is_exact()) {
        Rational sq(0);
        for (const auto &c : t.components()) {
            const Rational &v = c.exact();
            Rational m = std::min(v, Rational(1) - v);
            sq += m * m;
        }
        out.squared = sq;
        if (auto v = out.exact_value()) {
            out.value = v->to_double();
        } else {
            out.value = std::sqrt(sq.to_double());
        }
        return out;
    }
    double sq = 0.0;
    for (const auto &c : t.components()) {
        double v = c.to_double();
        double m = std::min(v, 1.0 - v);
        sq += m * m;
    }
    out.value = std::sqrt(sq);
    return out;
}

TorusPoint torus_add(const TorusPoint &a, const TorusPoint &b) {
    if (a.k() != b.k()) throw DimensionMismatch("torus points of different dimension");
    std::vector<Scalar> comps;
    for (int i = 0; i < a.k(); ++i) comps.push_back(a[i] + b[i]);
    return TorusPoint(std::move(comps));
}

bool norm_less_equal(const TorusNorm &a, const TorusNorm &b) {
    if (a.squared && b.squared) return *a.squared <= *b.squared;
    return a.value <= b.value + kFloatTolerance;
}

bool norm_less(const TorusNorm &a, const TorusNorm &b) {
    if (a.squared && b.squared) return *a.squared < *b.squared;
    return a.value < b.value - kFloatTolerance;
}

} // namespace rotfactor
