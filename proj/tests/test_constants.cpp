#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace threefold;

namespace {

GridPtr grid8()
{
    static const GridPtr g = make_grid(8);
    return g;
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)); }

const LinearBlock& block(const std::string& term)
{
    static const auto system = build_system();
    for (const auto& b : system) {
        if (b.term == term) return b;
    }
    throw std::runtime_error("no block " + term);
}

} // namespace

TEST(BuildSystem, EightBlocks)
{
    const auto system = build_system();
    ASSERT_EQ(system.size(), 8u);
    for (const auto& b : system) EXPECT_EQ(b.determinant(), Rational(2)) << b.term;
}

TEST(BuildSystem, FirstBlockAsPrinted)
{
    const auto& b = block("A1");
    EXPECT_EQ(b.matrix[0][0], Rational(3, 4));
    EXPECT_EQ(b.matrix[0][1], Rational(-1));
    EXPECT_EQ(b.matrix[1][0], Rational(-1));
    EXPECT_EQ(b.matrix[1][1], Rational(4));
    EXPECT_EQ(b.rhs[0], Rational(1, 4));
    EXPECT_EQ(b.rhs[1], Rational(-4));
    EXPECT_EQ(b.shift, Rational(1));
    EXPECT_EQ(b.names[0], "a11");
    EXPECT_EQ(b.names[1], "a12");
}

TEST(BuildSystem, CBlockRightHandSide)
{
    const auto& b = block("C");
    EXPECT_EQ(b.rhs[0], Rational(-1, 2));
    EXPECT_EQ(b.rhs[1], Rational(0));
    EXPECT_EQ(b.shift, Rational(0));
}

TEST(SolveConstants, MatchesTable)
{
    const auto c = solve_constants();
    EXPECT_EQ(c, published_constants());
    EXPECT_EQ(c.a11, Rational(-3, 2));
    EXPECT_EQ(c.b11, Rational(-3, 2));
    EXPECT_EQ(c.a12, Rational(-3, 8));
    EXPECT_EQ(c.b12, Rational(-3, 8));
    EXPECT_EQ(c.a22, Rational(21, 16));
    EXPECT_EQ(c.e2, Rational(-3, 16));
    EXPECT_EQ(c.f2, Rational(-3, 16));
    for (auto v : {c.c2, c.d2, c.e1, c.f1}) EXPECT_EQ(v, Rational(-1, 4));
    EXPECT_EQ(system_residual(c), Rational(0));
}

// Each block checked by substitution into the two rows written out by hand.
TEST(SolveConstants, SubstitutionIntoRows)
{
    const auto c = solve_constants();
    const Rational q(3, 4);
    EXPECT_EQ(q * c.a11 - (c.a12 - 1), Rational(1, 4));
    EXPECT_EQ(4 * (c.a12 - 1) - c.a11, Rational(-4));
    EXPECT_EQ(q * c.a21 - (c.a22 - 1), Rational(1, 4));
    EXPECT_EQ(4 * (c.a22 - 1) - c.a21, Rational(1, 2));
    EXPECT_EQ(q * c.c1 - c.c2, Rational(-1, 2));
    EXPECT_EQ(4 * c.c2 - c.c1, Rational(0));
    EXPECT_EQ(q * c.e1 - c.e2, Rational(0));
    EXPECT_EQ(4 * c.e2 - c.e1, Rational(-1, 2));
    EXPECT_EQ(4 * (c.a12 - 1) + 4, c.a11);
}

TEST(SolveConstants, ResidualDetectsPerturbation)
{
    auto c = solve_constants();
    c.d2 += Rational(1, 1000);
    EXPECT_GT(system_residual(c), Rational(0));
}

TEST(CoefficientSet, NamedAccess)
{
    auto c = published_constants();
    EXPECT_EQ(c.named().size(), 16u);
    EXPECT_EQ(c.at("a22"), Rational(21, 16));
    c.at("f1") = Rational(5);
    EXPECT_EQ(c.f1, Rational(5));
    EXPECT_THROW(c.at("g1"), InvalidArgument);
    EXPECT_EQ(to_string(Rational(-3, 16)), "-3/16");
    EXPECT_EQ(to_string(Rational(-1)), "-1");
}

TEST(AssembleIJ, ZeroPotential)
{
    const auto h = generic_hermitian(grid8(), 0.1, 1).structure;
    const auto [I, J] = assemble_I_J(h, ScalarField::zeros(grid8()), solve_constants());
    EXPECT_EQ(I, 0.0);
    EXPECT_EQ(J, 0.0);
}

TEST(AssembleIJ, KahlerMatchesClassicalFunctionals)
{
    const auto h = flat_kahler(grid8()).structure;
    LinearRng rng(5);
    const auto expr = 0.3 * random_real_expression(rng, 1);
    const auto m = oracle::flat_mixed_averages(expr, grid8());
    const auto [I, J] = assemble_I_J(h, sample(expr, grid8()), solve_constants());
    EXPECT_LE(rel(I, oracle::flat_aubin_I(m)), 1e-12);
    EXPECT_LE(rel(J, oracle::flat_aubin_J(m)), 1e-12);
}

TEST(AssembleIJ, MatchesExplicitFormulas)
{
    const auto h = generic_hermitian(grid8(), 0.1, 1).structure;
    const auto c = solve_constants();
    for (std::uint64_t seed : {3u, 4u}) {
        const auto phi = random_potential(h, 1.0, seed);
        const PotentialData pd(h, phi);
        const auto [I, J] = assemble_I_J(h, phi, c);
        EXPECT_LE(rel(I, aubin_I(h, pd)), 1e-10);
        EXPECT_LE(rel(J, aubin_J(h, pd)), 1e-10);
        const auto g = gradient_integrals(h, pd);
        EXPECT_LE(rel(0.75 * I - J, gradient_three_quarter(g)), 1e-9);
        EXPECT_LE(rel(4.0 * J - I, gradient_four(g)), 1e-9);
    }
}

// Any other coefficient choice breaks the agreement once the auxiliary terms are nonzero.
TEST(AssembleIJ, WrongCoefficientIsDetected)
{
    const auto h = generic_hermitian(grid8(), 0.1, 1).structure;
    const auto phi = random_potential(h, 1.0, 3);
    auto c = solve_constants();
    c.e1 = Rational(0);
    const auto [I, J] = assemble_I_J(h, phi, c);
    EXPECT_GT(rel(I, aubin_I(h, phi)), 1e-8);
    (void)J;
}
