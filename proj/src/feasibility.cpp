#include "rotfactor/feasibility.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "rotfactor/errors.hpp"
#include "rotfactor/rational.hpp"

namespace rotfactor {

namespace {

using Row = LinearInequality;
using Wide = __int128;

std::int64_t narrow(Wide v) {
    if (v < std::numeric_limits<std::int64_t>::min() || v > std::numeric_limits<std::int64_t>::max()) {
        throw ArithmeticOverflow("Fourier-Motzkin row overflow");
    }
    return static_cast<std::int64_t>(v);
}

std::int64_t abs64(std::int64_t v) { return v < 0 ? -v : v; }

// Divides by the gcd of all entries (including the bound), which preserves
// the real solution set exactly.
Row make_primitive(std::array<Wide, kMaxDim> a, Wide b) {
    Wide g = 0;
    auto gcd_wide = [](Wide x, Wide y) {
        if (x < 0) x = -x;
        if (y < 0) y = -y;
        while (y != 0) {
            Wide t = x % y;
            x = y;
            y = t;
        }
        return x;
    };
    for (auto v : a) g = gcd_wide(g, v);
    g = gcd_wide(g, b);
    Row r;
    if (g > 1) {
        for (auto &v : a) v /= g;
        b /= g;
    }
    for (int i = 0; i < kMaxDim; ++i) r.coeffs[i] = narrow(a[i]);
    r.bound = narrow(b);
    return r;
}

// Keeps one row per direction, the tightest bound wins.
class RowSet {
public:
    // Returns false if a constant row is violated (0 <= negative).
    bool add(const Row &r) {
        std::int64_t g = 0;
        for (auto v : r.coeffs) g = std::gcd(g, abs64(v));
        if (g == 0) {
            if (r.bound < 0) infeasible_ = true;
            return !infeasible_;
        }
        std::array<std::int64_t, kMaxDim> dir{};
        for (int i = 0; i < kMaxDim; ++i) dir[i] = r.coeffs[i] / g;
        Rational scaled(r.bound, g);
        auto [it, inserted] = rows_.try_emplace(dir, scaled);
        if (!inserted && scaled < it->second) it->second = scaled;
        return true;
    }

    bool infeasible() const { return infeasible_; }

    std::vector<Row> rows() const {
        std::vector<Row> out;
        out.reserve(rows_.size());
        for (const auto &[dir, bound] : rows_) {
            std::array<Wide, kMaxDim> a{};
            for (int i = 0; i < kMaxDim; ++i) a[i] = static_cast<Wide>(dir[i]) * bound.den();
            out.push_back(make_primitive(a, bound.num()));
        }
        return out;
    }

private:
    std::map<std::array<std::int64_t, kMaxDim>, Rational> rows_;
    bool infeasible_ = false;
};

// Substitutes the equation into every row, eliminating `pivot`.
Row substitute(const Row &row, const LinearEquation &eq, int pivot) {
    const Wide e = eq.coeffs[pivot];
    const Wide s = e > 0 ? 1 : -1;
    const Wide abs_e = e * s;
    const Wide a_p = row.coeffs[pivot];
    std::array<Wide, kMaxDim> a{};
    for (int i = 0; i < kMaxDim; ++i) {
        a[i] = i == pivot ? 0 : abs_e * row.coeffs[i] - a_p * s * eq.coeffs[i];
    }
    Wide b = abs_e * row.bound - a_p * s * eq.value;
    return make_primitive(a, b);
}

LinearEquation substitute(const LinearEquation &target, const LinearEquation &eq, int pivot) {
    Row as_row;
    as_row.coeffs = target.coeffs;
    as_row.bound = target.value;
    Row r = substitute(as_row, eq, pivot);
    LinearEquation out;
    out.coeffs = r.coeffs;
    out.value = r.bound;
    return out;
}

} // namespace

bool is_feasible(std::span<const LinearInequality> inequalities, std::span<const LinearEquation> equations,
                 int num_vars) {
    std::vector<Row> rows(inequalities.begin(), inequalities.end());
    std::vector<LinearEquation> eqs(equations.begin(), equations.end());
    std::vector<bool> eliminated(static_cast<std::size_t>(kMaxDim), false);
    for (int i = num_vars; i < kMaxDim; ++i) eliminated[static_cast<std::size_t>(i)] = true;

    // Equations first: each removes one variable without growing the system.
    while (!eqs.empty()) {
        LinearEquation eq = eqs.back();
        eqs.pop_back();
        int pivot = -1;
        for (int i = 0; i < num_vars; ++i) {
            if (eq.coeffs[i] != 0) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) {
            if (eq.value != 0) return false;
            continue;
        }
        for (auto &r : rows) r = substitute(r, eq, pivot);
        for (auto &other : eqs) other = substitute(other, eq, pivot);
        eliminated[static_cast<std::size_t>(pivot)] = true;
    }

    RowSet current;
    for (const auto &r : rows) {
        if (!current.add(r)) return false;
    }

    for (int var = 0; var < num_vars; ++var) {
        if (eliminated[static_cast<std::size_t>(var)]) continue;
        std::vector<Row> all = current.rows();
        std::vector<Row> pos;
        std::vector<Row> neg;
        RowSet next;
        for (const auto &r : all) {
            if (r.coeffs[var] > 0) {
                pos.push_back(r);
            } else if (r.coeffs[var] < 0) {
                neg.push_back(r);
            } else if (!next.add(r)) {
                return false;
            }
        }
        for (const auto &p : pos) {
            for (const auto &n : neg) {
                const Wide mp = -static_cast<Wide>(n.coeffs[var]);
                const Wide mn = p.coeffs[var];
                std::array<Wide, kMaxDim> a{};
                for (int i = 0; i < kMaxDim; ++i) a[i] = mp * p.coeffs[i] + mn * n.coeffs[i];
                a[var] = 0;
                Wide b = mp * p.bound + mn * n.bound;
                if (!next.add(make_primitive(a, b))) return false;
            }
        }
        current = std::move(next);
        eliminated[static_cast<std::size_t>(var)] = true;
    }
    return !current.infeasible();
}

} // namespace rotfactor
