#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace threefold;

namespace {

GridPtr grid4()
{
    static const GridPtr g = make_grid(4);
    return g;
}

ScalarField one(const GridPtr& g) { return ScalarField::constant(g, 1.0); }

const std::vector<std::size_t> kProbePoints = {0, 1, 77, 1000, 2049, 4095};

double oracle_gap(const PQForm& computed, const oracle::RealForm& expected, std::size_t x)
{
    return oracle::distance(oracle::expand(computed, x), expected);
}

} // namespace

TEST(Wedge, RepeatedDifferentialVanishes)
{
    const auto dz1 = PQForm::monomial(one(grid4()), {0}, {});
    EXPECT_EQ(wedge(dz1, dz1).max_abs(), 0.0);
    EXPECT_EQ(PQForm::monomial(one(grid4()), {1, 1}, {}).max_abs(), 0.0);
}

TEST(Wedge, DegreeOneFactorsAnticommute)
{
    const auto dz1 = PQForm::monomial(one(grid4()), {0}, {});
    const auto dzb1 = PQForm::monomial(one(grid4()), {}, {0});
    const auto ab = wedge(dz1, dzb1);
    const auto ba = wedge(dzb1, dz1);
    EXPECT_EQ(max_difference(ab, -1.0 * ba), 0.0);
    EXPECT_NE(ab.max_abs(), 0.0);
}

TEST(Wedge, RejectsDegreeOverflow)
{
    LinearRng rng(3);
    const auto a = oracle::random_form(grid4(), 2, 1, rng);
    const auto b = oracle::random_form(grid4(), 2, 0, rng);
    EXPECT_THROW(wedge(a, b), DegreeError);
}

// (f dz1) ^ (g dz2 ^ dzbar3) against the real-coordinate expansion.
TEST(Wedge, MatchesRealCoordinateOracle)
{
    LinearRng rng(17);
    const auto f = sample(random_complex_expression(rng, 1), grid4());
    const auto g = sample(random_complex_expression(rng, 1), grid4());
    const auto a = PQForm::monomial(f, {0}, {});
    const auto b = PQForm::monomial(g, {1}, {2});
    const auto ab = wedge(a, b);
    for (auto x : kProbePoints) {
        EXPECT_LE(oracle_gap(ab, oracle::real_wedge(oracle::expand(a, x), oracle::expand(b, x)), x), 1e-14);
    }
}

TEST(Wedge, RandomFormsMatchOracleForEveryDegreePair)
{
    LinearRng rng(23);
    for (int pa = 0; pa <= 2; ++pa) {
        for (int qa = 0; qa <= 2; ++qa) {
            const int pb = 1, qb = 1;
            if (pa + pb > 3 || qa + qb > 3) continue;
            const auto a = oracle::random_form(grid4(), pa, qa, rng);
            const auto b = oracle::random_form(grid4(), pb, qb, rng);
            const auto ab = wedge(a, b);
            for (auto x : kProbePoints) {
                EXPECT_LE(oracle_gap(ab, oracle::real_wedge(oracle::expand(a, x), oracle::expand(b, x)), x),
                          1e-13)
                    << "degrees (" << pa << "," << qa << ")";
            }
        }
    }
}

TEST(Wedge, GradedCommutativity)
{
    LinearRng rng(29);
    for (auto [p, q, r, s] : std::vector<std::array<int, 4>>{{1, 0, 0, 1}, {1, 1, 1, 0}, {2, 1, 1, 1}, {1, 2, 0, 1}}) {
        const auto a = oracle::random_form(grid4(), p, q, rng);
        const auto b = oracle::random_form(grid4(), r, s, rng);
        const double sign = ((p + q) * (r + s)) % 2 == 0 ? 1.0 : -1.0;
        EXPECT_LE(max_difference(wedge(a, b), sign * wedge(b, a)), 1e-15);
    }
}

TEST(Wedge, Associativity)
{
    LinearRng rng(31);
    const auto a = oracle::random_form(grid4(), 1, 0, rng);
    const auto b = oracle::random_form(grid4(), 0, 1, rng);
    const auto c = oracle::random_form(grid4(), 1, 1, rng);
    EXPECT_LE(max_difference(wedge(wedge(a, b), c), wedge(a, wedge(b, c))), 1e-12);
    const auto d = oracle::random_form(grid4(), 1, 1, rng);
    EXPECT_LE(max_difference(wedge(wedge(c, d), c), wedge(c, wedge(d, c))), 1e-12);
}

TEST(Conj, Involution)
{
    LinearRng rng(37);
    for (int p = 0; p <= 3; ++p) {
        for (int q = 0; q <= 3; ++q) {
            const auto a = oracle::random_form(grid4(), p, q, rng);
            EXPECT_EQ(max_difference(conj(conj(a)), a), 0.0);
            EXPECT_EQ(conj(a).p(), q);
        }
    }
}

TEST(Conj, KahlerMonomialIsReal)
{
    const auto w = cplx(0.0, 1.0) * PQForm::monomial(one(grid4()), {0}, {0});
    EXPECT_EQ(max_difference(conj(w), w), 0.0);
}

TEST(Conj, MatchesRealCoordinateOracle)
{
    LinearRng rng(41);
    const auto f = sample(random_complex_expression(rng, 1), grid4());
    const auto a = PQForm::monomial(f, {0, 1}, {2});
    const auto ca = conj(a);
    for (auto x : kProbePoints) EXPECT_LE(oracle_gap(ca, oracle::real_conj(oracle::expand(a, x)), x), 1e-15);

    for (int p = 0; p <= 3; ++p) {
        for (int q = 0; q <= 3; ++q) {
            const auto b = oracle::random_form(grid4(), p, q, rng);
            for (auto x : kProbePoints) {
                EXPECT_LE(oracle_gap(conj(b), oracle::real_conj(oracle::expand(b, x)), x), 1e-14);
            }
        }
    }
}

TEST(Conj, AntilinearAndMultiplicative)
{
    LinearRng rng(43);
    const auto a = oracle::random_form(grid4(), 1, 1, rng);
    const auto b = oracle::random_form(grid4(), 1, 0, rng);
    const cplx c(0.3, -1.7);
    EXPECT_LE(max_difference(conj(c * a), std::conj(c) * conj(a)), 1e-15);
    EXPECT_LE(max_difference(conj(wedge(a, b)), wedge(conj(a), conj(b))), 1e-14);
}

// A (1,1)-form is real exactly when i^{-1} times its coefficient matrix is Hermitian.
TEST(Conj, RealityMatchesHermitianCoefficients)
{
    LinearRng rng(47);
    const auto a = oracle::random_form(grid4(), 1, 1, rng);
    const auto herm = 0.5 * (a + conj(a));
    for (auto x : kProbePoints) {
        const auto m = hermitian_matrix_at(herm, x);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                EXPECT_LE(std::abs(m[static_cast<std::size_t>(3 * r + c)] - std::conj(m[static_cast<std::size_t>(3 * c + r)])),
                          1e-15);
            }
        }
    }
    const auto m = hermitian_matrix_at(a, 1);
    bool hermitian = true;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            hermitian = hermitian && std::abs(m[static_cast<std::size_t>(3 * r + c)] -
                                              std::conj(m[static_cast<std::size_t>(3 * c + r)])) < 1e-12;
        }
    }
    EXPECT_FALSE(hermitian);
    EXPECT_GT(reality_defect(a), 1e-3);
}

TEST(Linear, Examples)
{
    LinearRng rng(53);
    const auto a = oracle::random_form(grid4(), 2, 1, rng);
    EXPECT_EQ(add(a, scale(-1.0, a)).max_abs(), 0.0);
    EXPECT_LE(max_difference(scale(cplx(0, 1), scale(cplx(0, 1), a)), scale(-1.0, a)), 1e-16);

    const auto f = sample(random_complex_expression(rng, 1), grid4());
    const auto b = oracle::random_form(grid4(), 0, 1, rng);
    const auto c = oracle::random_form(grid4(), 1, 0, rng);
    EXPECT_LE(max_difference(scalar_mul(f, wedge(b, c)), wedge(scalar_mul(f, b), c)), 1e-15);
    for (auto x : kProbePoints) {
        auto expected = oracle::real_wedge(oracle::expand(b, x), oracle::expand(c, x));
        for (auto& [m, v] : expected) v *= f[x];
        EXPECT_LE(oracle_gap(scalar_mul(f, wedge(b, c)), expected, x), 1e-14);
    }
}

TEST(Linear, ShapeMismatch)
{
    LinearRng rng(59);
    const auto a = oracle::random_form(grid4(), 1, 1, rng);
    const auto b = oracle::random_form(grid4(), 1, 0, rng);
    EXPECT_THROW(add(a, b), ShapeError);
    const auto other = make_grid(4);
    const auto c = oracle::random_form(other, 1, 1, rng);
    EXPECT_THROW(add(a, c), ShapeError);
    EXPECT_THROW(scalar_mul(ScalarField::zeros(other), a), ShapeError);
}

TEST(PQForm, ComponentCounts)
{
    for (int p = 0; p <= 3; ++p) {
        for (int q = 0; q <= 3; ++q) {
            const std::size_t binom[] = {1, 3, 3, 1};
            EXPECT_EQ(PQForm::zero(grid4(), p, q).size(), binom[p] * binom[q]);
        }
    }
}

// The top monomial dz1 dz2 dz3 dzbar1 dzbar2 dzbar3 is -8i times the real volume element.
TEST(TopForm, VolumeConversionFactor)
{
    const auto top = oracle::expand_monomial(1.0, 0b111u, 0b111u);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top.begin()->first, 0b111111u);
    EXPECT_LE(std::abs(top.begin()->second - kTopFormToVolume), 1e-15);
}
