#pragma once

// Exact solution of the linear conditions on the Aubin-Yau correction
// coefficients, and assembly of I, J from them.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "threefold/functionals.hpp"

namespace threefold {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r)
{
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

/// One 2x2 block M (x, y - shift) = rhs, with x the coefficient of I and y
/// the coefficient of J multiplying the same auxiliary term.
struct LinearBlock {
    std::string term;                  // auxiliary term, e.g. "A1"
    std::array<std::string, 2> names;  // e.g. {"a11", "a12"}
    std::array<std::array<Rational, 2>, 2> matrix;
    std::array<Rational, 2> rhs;
    Rational shift;                    // 1 when J carries the term with coefficient (y - 1)

    Rational determinant() const
    {
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    }
};

/// Rows: (3/4) x - (y - shift) = r0 from ¾I - J, and 4 (y - shift) - x = r1 from 4J - I.
inline std::vector<LinearBlock> build_system()
{
    const Rational q(3, 4), one(1), four(4), zero(0);
    const std::array<std::array<Rational, 2>, 2> m{{{q, -one}, {-one, four}}};
    auto block = [&](std::string term, std::string x, std::string y, Rational r0, Rational r1, Rational shift) {
        return LinearBlock{std::move(term), {std::move(x), std::move(y)}, m, {r0, r1}, shift};
    };
    return {
        block("A1", "a11", "a12", Rational(1, 4), Rational(-4), one),
        block("A2", "a21", "a22", Rational(1, 4), Rational(1, 2), one),
        block("B1", "b11", "b12", Rational(1, 4), Rational(-4), one),
        block("B2", "b21", "b22", Rational(1, 4), Rational(1, 2), one),
        block("C", "c1", "c2", Rational(-1, 2), zero, zero),
        block("D", "d1", "d2", Rational(-1, 2), zero, zero),
        block("E", "e1", "e2", zero, Rational(-1, 2), zero),
        block("F", "f1", "f2", zero, Rational(-1, 2), zero),
    };
}

struct CoefficientSet {
    Rational a11, a12, a21, a22, b11, b12, b21, b22, c1, c2, d1, d2, e1, e2, f1, f2;

    static constexpr std::array<std::pair<const char*, Rational CoefficientSet::*>, 16> fields{{
        {"a11", &CoefficientSet::a11}, {"a12", &CoefficientSet::a12}, {"a21", &CoefficientSet::a21},
        {"a22", &CoefficientSet::a22}, {"b11", &CoefficientSet::b11}, {"b12", &CoefficientSet::b12},
        {"b21", &CoefficientSet::b21}, {"b22", &CoefficientSet::b22}, {"c1", &CoefficientSet::c1},
        {"c2", &CoefficientSet::c2},   {"d1", &CoefficientSet::d1},   {"d2", &CoefficientSet::d2},
        {"e1", &CoefficientSet::e1},   {"e2", &CoefficientSet::e2},   {"f1", &CoefficientSet::f1},
        {"f2", &CoefficientSet::f2},
    }};

    std::vector<std::pair<std::string, Rational>> named() const
    {
        std::vector<std::pair<std::string, Rational>> out;
        for (const auto& [name, member] : fields) out.emplace_back(name, this->*member);
        return out;
    }

    Rational& at(std::string_view name)
    {
        for (const auto& [n, member] : fields) {
            if (name == n) return this->*member;
        }
        throw InvalidArgument("unknown coefficient " + std::string(name));
    }
    const Rational& at(std::string_view name) const { return const_cast<CoefficientSet*>(this)->at(name); }

    bool operator==(const CoefficientSet&) const = default;
};

/// The tabulated values the solution must reproduce.
inline CoefficientSet published_constants()
{
    CoefficientSet c;
    c.a11 = c.b11 = Rational(-3, 2);
    c.a12 = c.b12 = Rational(-3, 8);
    c.a21 = c.b21 = Rational(3, 4);
    c.a22 = c.b22 = Rational(21, 16);
    c.c1 = c.d1 = Rational(-1);
    c.e2 = c.f2 = Rational(-3, 16);
    c.c2 = c.d2 = c.e1 = c.f1 = Rational(-1, 4);
    return c;
}

/// Cramer's rule on every block, exactly.
inline CoefficientSet solve_constants()
{
    CoefficientSet out;
    for (const auto& b : build_system()) {
        const Rational det = b.determinant();
        if (det == Rational(0)) throw Error("singular coefficient block for " + b.term);
        const auto& m = b.matrix;
        const Rational x = (b.rhs[0] * m[1][1] - m[0][1] * b.rhs[1]) / det;
        const Rational y = (m[0][0] * b.rhs[1] - b.rhs[0] * m[1][0]) / det + b.shift;
        out.at(b.names[0]) = x;
        out.at(b.names[1]) = y;
    }
    return out;
}

/// Largest |M (x, y - shift) - rhs| over all rows; zero for an exact solution.
inline Rational system_residual(const CoefficientSet& c)
{
    Rational worst(0);
    for (const auto& b : build_system()) {
        const Rational x = c.at(b.names[0]);
        const Rational y = c.at(b.names[1]) - b.shift;
        for (int r = 0; r < 2; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            Rational res = b.matrix[ur][0] * x + b.matrix[ur][1] * y - b.rhs[ur];
            if (res < Rational(0)) res = -res;
            if (res > worst) worst = res;
        }
    }
    return worst;
}

/// I and J from the bullet functionals and the coefficient-weighted
/// auxiliary terms (J through J bullet, which absorbs -L^M + (1/V)∫φω³ - A - B).
inline std::pair<double, double> assemble_I_J(double I_bullet, double J_bullet, const AuxTerms& t,
                                              const CoefficientSet& c)
{
    const double I = I_bullet + to_double(c.a11) * t.A1 + to_double(c.a21) * t.A2 + to_double(c.b11) * t.B1 +
                     to_double(c.b21) * t.B2 + to_double(c.c1) * t.C + to_double(c.d1) * t.D +
                     to_double(c.e1) * t.E + to_double(c.f1) * t.F;
    const double J = J_bullet + to_double(c.a12 - 1) * t.A1 + to_double(c.a22 - 1) * t.A2 +
                     to_double(c.b12 - 1) * t.B1 + to_double(c.b22 - 1) * t.B2 + to_double(c.c2) * t.C +
                     to_double(c.d2) * t.D + to_double(c.e2) * t.E + to_double(c.f2) * t.F;
    return {I, J};
}

inline std::pair<double, double> assemble_I_J(const HermitianStructure& h, const ScalarField& phi,
                                              const CoefficientSet& c, int s_nodes = kDefaultScaleNodes)
{
    const PotentialData pd(h, phi);
    return assemble_I_J(bullet_I(h, pd), bullet_J(h, pd, s_nodes), aux_terms(h, pd), c);
}

} // namespace threefold
