#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace threefold;

namespace {

GridPtr grid8()
{
    static const GridPtr g = make_grid(8);
    return g;
}

const double kFlatVolume = 48.0 * std::pow(kTwoPi, 6);

void expect_valid(const HermitianStructure& h)
{
    EXPECT_LE(reality_defect(h.omega), 1e-12);
    EXPECT_TRUE(check_positive(h.omega).positive);
    EXPECT_GT(h.volume, 0.0);
}

TrigPolynomial cos_x1(double amplitude) { return TrigPolynomial::cos(TrigPolynomial::axis_frequency(0), amplitude); }

} // namespace

TEST(LinearRng, DeterministicStream)
{
    LinearRng a(42), b(42), c(43);
    for (int i = 0; i < 5; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
    }
    // x1 = a * seed + c mod 2^64 for the MMIX constants
    LinearRng d(1);
    EXPECT_EQ(d.next(), 6364136223846793005ULL + 1442695040888963407ULL);
    LinearRng e(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const int k = e.integer(-2, 2);
        EXPECT_GE(k, -2);
        EXPECT_LE(k, 2);
    }
}

TEST(FlatKahler, Examples)
{
    const auto m = flat_kahler(grid8());
    EXPECT_LE(std::abs(m.structure.volume - kFlatVolume), 1e-12 * kFlatVolume);
    EXPECT_EQ(m.structure.d_omega.max_abs(), 0.0);
    const auto pos = check_positive(m.structure.omega);
    EXPECT_TRUE(pos.positive);
    EXPECT_NEAR(pos.min_eigenvalue, 1.0, 1e-15);
}

TEST(DdbarClosed, ZeroEpsilonIsFlat)
{
    const auto m = ddbar_closed(grid8(), 0.0, 3);
    EXPECT_EQ(max_difference(m.structure.omega, flat_kahler_form(grid8())), 0.0);
}

class DdbarClosedSeeds : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(DdbarClosedSeeds, PluriclosedButNotKahler)
{
    const auto m = ddbar_closed(grid8(), 0.2, GetParam());
    expect_valid(m.structure);
    EXPECT_LE(m.structure.ddbar_omega.max_abs(), 1e-10);
    EXPECT_GT(m.structure.d_omega.max_abs(), 1e-3);
    EXPECT_GT(m.effective_epsilon, 0.0);
    EXPECT_LE(m.effective_epsilon, 0.2);
}

INSTANTIATE_TEST_SUITE_P(Seeds, DdbarClosedSeeds, ::testing::Values(1u, 2u, 3u));

TEST(DdbarClosed, LargeEpsilonShrinksUntilPositive)
{
    const auto m = ddbar_closed(grid8(), 50.0, 1);
    expect_valid(m.structure);
    EXPECT_LT(m.effective_epsilon, 50.0);
}

TEST(GenericHermitian, Examples)
{
    EXPECT_EQ(max_difference(generic_hermitian(grid8(), 0.0, 1).structure.omega, flat_kahler_form(grid8())), 0.0);
    const auto m = generic_hermitian(grid8(), 0.1, 1);
    expect_valid(m.structure);
    EXPECT_GT(m.structure.ddbar_omega.max_abs(), 1e-4);
    EXPECT_THROW(generic_hermitian(grid8(), -1.0, 1), InvalidArgument);
}

TEST(GenericHermitian, SeedsAreReproducible)
{
    const auto a = generic_hermitian(grid8(), 0.1, 5);
    const auto b = generic_hermitian(grid8(), 0.1, 5);
    const auto c = generic_hermitian(grid8(), 0.1, 6);
    EXPECT_EQ(max_difference(a.structure.omega, b.structure.omega), 0.0);
    EXPECT_GT(max_difference(a.structure.omega, c.structure.omega), 0.0);
}

TEST(ConformalKahler, ZeroFactorIsFlat)
{
    const auto m = conformal_kahler(grid8(), ScalarField::zeros(grid8()));
    EXPECT_LE(max_difference(m.structure.omega, flat_kahler_form(grid8())), 1e-15);
    ASSERT_TRUE(m.known_gauduchon_factor.has_value());
    EXPECT_EQ(m.known_gauduchon_factor->max_abs(), 0.0);
}

TEST(ConformalKahler, FactorOscillation)
{
    const auto m = conformal_kahler(grid8(), cos_x1(0.2));
    expect_valid(m.structure);
    EXPECT_NEAR(extrema(*m.known_gauduchon_factor).oscillation(), 0.4, 1e-14);
}

TEST(ConformalKahler, RejectsComplexFactor)
{
    EXPECT_THROW(conformal_kahler(grid8(), sample(TrigPolynomial::exp_i(TrigPolynomial::axis_frequency(0)), grid8())),
                 PreconditionViolation);
}

TEST(MakeMetric, DispatchesOnFamily)
{
    for (auto f : {MetricFamily::flat_kahler, MetricFamily::ddbar_closed, MetricFamily::generic_hermitian,
                   MetricFamily::conformal_kahler}) {
        EXPECT_EQ(parse_metric_family(to_string(f)), f);
        MetricSpec spec;
        spec.family = f;
        expect_valid(make_metric(grid8(), spec).structure);
    }
    EXPECT_FALSE(parse_metric_family("kahler").has_value());
}

TEST(MakeMetric, BandLimitMustFitGrid)
{
    EXPECT_THROW(generic_hermitian(make_grid(4), 0.1, 1, 2), InvalidArgument);
}

TEST(RandomPotential, AdmissibleForEverySeed)
{
    const auto m = generic_hermitian(grid8(), 0.1, 1);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto phi = random_potential(m.structure, 0.5, seed);
        EXPECT_TRUE(phi.reality_hint());
        EXPECT_TRUE(check_positive(omega_phi(m.structure, phi)).positive);
        EXPECT_LE(phi.max_abs(), 0.5 + 1e-12);
    }
}

TEST(RandomPotential, LargeAmplitudeIsHalved)
{
    const auto m = flat_kahler(grid8());
    const auto phi = random_potential(m.structure, 100.0, 3);
    EXPECT_TRUE(check_positive(omega_phi(m.structure, phi)).positive);
    EXPECT_LT(phi.max_abs(), 100.0);
}

TEST(RandomPotential, TinyAmplitudeLeavesOmega)
{
    const auto m = generic_hermitian(grid8(), 0.1, 2);
    const auto phi = random_potential(m.structure, 1e-12, 4);
    EXPECT_LE(phi.max_abs(), 1e-12);
    EXPECT_LE(max_difference(omega_phi(m.structure, phi), m.structure.omega), 1e-11);
}

TEST(RandomPotential, NormalizedHasZeroSup)
{
    const auto m = ddbar_closed(grid8(), 0.05, 1);
    const auto phi = random_potential(m.structure, 0.3, 8, true);
    EXPECT_LE(std::abs(extrema(phi).max), 1e-14);
    EXPECT_THROW(random_potential(m.structure, 0.0, 1), InvalidArgument);
}

TEST(Gauduchon, FlatIsAlreadyGauduchon)
{
    const auto r = gauduchon_solve(flat_kahler(grid8()).structure);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_LE(r.residual, 1e-15);
    EXPECT_LE(r.u.max_abs(), 1e-15);
    EXPECT_EQ(r.osc_u, 0.0);
}

TEST(Gauduchon, RecoversConformalFactor)
{
    const auto m = conformal_kahler(grid8(), cos_x1(0.2));
    const auto r = gauduchon_solve(m.structure);
    EXPECT_LE(r.residual, kGauduchonTolerance);
    EXPECT_LE(extrema(r.u - *m.known_gauduchon_factor).oscillation(), 1e-6);
    EXPECT_NEAR(r.osc_u, 0.4, 1e-6);
    EXPECT_NEAR(mean(r.v).real(), 1.0, 1e-12);
    EXPECT_GT(extrema(r.v).min, 0.0);
}

TEST(Gauduchon, DdbarClosedConverges)
{
    const auto m = ddbar_closed(grid8(), 0.05, 1);
    const auto r = gauduchon_solve(m.structure);
    EXPECT_LE(r.residual, kGauduchonTolerance);
    EXPECT_NEAR(mean(r.v).real(), 1.0, 1e-12);
    EXPECT_GT(extrema(r.v).min, 0.0);
    EXPECT_GT(r.osc_u, 0.0);
    EXPECT_LT(r.osc_u, 0.1);
    // the composed first-derivative operator sees the same residual up to Nyquist content
    EXPECT_LE(r.composed_residual, 1e-2);
}

TEST(Gauduchon, IterationLimitRaisesSolverError)
{
    const auto m = generic_hermitian(grid8(), 0.1, 1);
    try {
        gauduchon_solve(m.structure, 1e-14, 1);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_GT(e.residual(), 1e-14);
    }
}
