#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace threefold;

namespace {

GridPtr grid8()
{
    static const GridPtr g = make_grid(8);
    return g;
}

const HermitianStructure& flat()
{
    static const HermitianStructure h = flat_kahler(grid8()).structure;
    return h;
}

const HermitianStructure& generic()
{
    static const HermitianStructure h = generic_hermitian(grid8(), 0.1, 1).structure;
    return h;
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)); }

// Linear-in-t paths give integrands of degree at most 3, exact with 4 nodes.
MabuchiOptions linear_options()
{
    MabuchiOptions o;
    o.time_nodes = 4;
    return o;
}

} // namespace

TEST(GaussLegendre, ExactForPolynomials)
{
    for (int order : {1, 2, 4, 8}) {
        const auto rule = gauss_legendre(order);
        ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(order));
        EXPECT_TRUE(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
        for (int d = 0; d <= 2 * order - 1; ++d) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], d);
            EXPECT_NEAR(acc, 1.0 / (d + 1), 1e-15) << "order " << order << " degree " << d;
        }
    }
    EXPECT_THROW(gauss_legendre(0), InvalidArgument);
}

TEST(PotentialPath, CoefficientsAndDerivatives)
{
    const auto a = ScalarField::constant(grid8(), 1.0);
    const auto b = ScalarField::constant(grid8(), 3.0);
    const auto c = ScalarField::constant(grid8(), 2.0);
    const auto path = PotentialPath::quadratic(a, b, c);
    // (1 - t) + 3t + 2 t (1 - t) at t = 0.25 and its derivative 2 + 2 - 4t
    EXPECT_NEAR(path.at(0.25)[0].real(), 0.75 + 0.75 + 0.375, 1e-15);
    EXPECT_NEAR(path.derivative(0.25)[0].real(), 3.0, 1e-15);
    EXPECT_NEAR(PotentialPath::quadratic_radial(b).derivative(0.5)[0].real(), 3.0, 1e-15);
    EXPECT_THROW(PotentialPath({a}, {}), InvalidArgument);
}

TEST(PotentialPath, ConvexQuadraticStaysBetweenEndpoints)
{
    const auto a = ScalarField::constant(grid8(), 1.0);
    const auto b = ScalarField::constant(grid8(), 2.0);
    const auto psi = ScalarField::constant(grid8(), 5.0);
    const auto path = PotentialPath::quadratic_through(a, b, psi);
    EXPECT_NEAR(path.at(0.0)[0].real(), 1.0, 1e-15);
    EXPECT_NEAR(path.at(1.0)[0].real(), 2.0, 1e-15);
    for (double t : {0.1, 0.5, 0.9}) {
        const double v = path.at(t)[0].real();
        EXPECT_GE(v, 1.0);
        EXPECT_LE(v, 5.0);
    }
}

TEST(MabuchiPath, ZeroPathGivesZero)
{
    const auto zero = ScalarField::zeros(grid8());
    EXPECT_EQ(mabuchi_path(generic(), PotentialPath::radial(zero), linear_options()), 0.0);
}

// Flat ω, radial path: the path integral against an independent symbolic evaluation
// of (1/4V) Σ ∫ φ ω_φ^i ^ ω^{3-i}.
TEST(MabuchiPath, KahlerReducesToMixedVolumeFormula)
{
    LinearRng rng(3);
    const auto expr = 0.3 * random_real_expression(rng, 1);
    const auto phi = sample(expr, grid8());
    ASSERT_TRUE(check_positive(omega_phi(flat(), phi)).positive);
    const auto m = oracle::flat_mixed_averages(expr, grid8());
    const double expected = oracle::flat_mabuchi(m);
    EXPECT_LE(rel(mabuchi_path(flat(), PotentialPath::radial(phi), linear_options()), expected), 1e-12);
    EXPECT_LE(rel(mabuchi_closed(flat(), phi), expected), 1e-12);
}

TEST(MabuchiPath, RadialAndQuadraticRadialAgree)
{
    const auto phi = random_potential(generic(), 0.5, 11);
    const double radial = mabuchi_path(generic(), PotentialPath::radial(phi));
    const double quad = mabuchi_path(generic(), PotentialPath::quadratic_radial(phi));
    EXPECT_LE(rel(radial, quad), 1e-8);
}

TEST(MabuchiPath, InadmissibleNodeRaises)
{
    const auto big = sample(TrigPolynomial::cos(TrigPolynomial::axis_frequency(0), 10.0), grid8());
    EXPECT_THROW(mabuchi_path(flat(), PotentialPath::radial(big), linear_options()), PathNotAdmissible);
}

// With the quartic terms subtracted the linear and bent paths between the same
// endpoints disagree; with them added the two values coincide.
TEST(MabuchiPath, QuarticSignControlsPathIndependence)
{
    const auto p1 = random_potential(generic(), 1.0, 21);
    const auto p2 = random_potential(generic(), 1.0, 22);
    const auto psi = random_potential(generic(), 1.0, 23);
    const auto lin = mabuchi_path_terms(generic(), PotentialPath::linear(p1, p2));
    const auto bent = mabuchi_path_terms(generic(), PotentialPath::quadratic_through(p1, p2, psi));
    EXPECT_LE(std::abs(lin.total() - bent.total()), 1e-8 * std::max(lin.scale, bent.scale));

    MabuchiOptions printed;
    printed.quartic_sign = QuarticSign::as_printed;
    const auto lin_p = mabuchi_path_terms(generic(), PotentialPath::linear(p1, p2), printed);
    const auto bent_p = mabuchi_path_terms(generic(), PotentialPath::quadratic_through(p1, p2, psi), printed);
    const double gap_printed = std::abs(lin_p.total() - bent_p.total());
    const double gap_without = std::abs((lin.total() - lin.quartic_terms) - (bent.total() - bent.quartic_terms));
    EXPECT_GT(gap_without, 0.0);
    EXPECT_NEAR(gap_printed, 2.0 * gap_without, 1e-6 * gap_without + 1e-14);
    EXPECT_NEAR(lin_p.volume_term, lin.volume_term, 1e-15);
}

// For the linear path ∂̄φ_t ^ ∂̄φ̇_t = ∂̄φ' ^ ∂̄φ'' at every t.
TEST(MabuchiPath, LinearPathWedgeIsConstant)
{
    const auto p1 = random_potential(generic(), 0.5, 31);
    const auto p2 = random_potential(generic(), 0.5, 32);
    const auto path = PotentialPath::linear(p1, p2);
    const auto expected = wedge(delbar(p1), delbar(p2));
    for (double t : {0.1, 0.5, 0.8}) {
        EXPECT_LE(max_difference(wedge(delbar(path.at(t)), delbar(path.derivative(t))), expected), 1e-14);
    }
}

TEST(MabuchiClosed, Examples)
{
    EXPECT_EQ(mabuchi_closed(generic(), ScalarField::zeros(grid8())), 0.0);
    EXPECT_NEAR(mabuchi_closed(flat(), ScalarField::constant(grid8(), 0.7)), 0.7, 1e-14);
    const auto phi = random_potential(generic(), 0.5, 41);
    EXPECT_LE(rel(mabuchi_closed(generic(), phi), mabuchi_path(generic(), PotentialPath::radial(phi))), 1e-10);
}

TEST(MabuchiTwoPoint, Examples)
{
    const auto p1 = random_potential(generic(), 0.5, 51);
    const auto p2 = random_potential(generic(), 0.5, 52);
    EXPECT_EQ(mabuchi_two_point(generic(), p1, p1, linear_options()), 0.0);
    EXPECT_LE(rel(mabuchi_two_point(generic(), ScalarField::zeros(grid8()), p2, linear_options()),
                  mabuchi_closed(generic(), p2)),
              1e-10);
    const auto fwd = mabuchi_path_terms(generic(), PotentialPath::linear(p1, p2), linear_options());
    const double back = mabuchi_two_point(generic(), p2, p1, linear_options());
    EXPECT_LE(std::abs(fwd.total() + back), 1e-9 * fwd.scale);
}

TEST(AuxTerms, ZeroPotential)
{
    const auto t = aux_terms(generic(), ScalarField::zeros(grid8()));
    for (const auto& [name, v] : t.named()) EXPECT_EQ(v, 0.0) << name;
}

TEST(AuxTerms, VanishOnKahler)
{
    const auto t = aux_terms(flat(), random_potential(flat(), 0.5, 61));
    for (const auto& [name, v] : t.named()) EXPECT_EQ(v, 0.0) << name;
}

TEST(AuxTerms, SplitsAndConjugateSymmetry)
{
    const auto t = aux_terms(generic(), random_potential(generic(), 0.5, 62));
    EXPECT_LE(rel(t.A, t.A1 + t.A2), 1e-10);
    EXPECT_LE(rel(t.B, t.B1 + t.B2), 1e-10);
    // B is the conjugate partner of A, C of D, E of F
    EXPECT_LE(rel(t.A, t.B), 1e-10);
    EXPECT_LE(rel(t.C, t.D), 1e-10);
    EXPECT_LE(rel(t.E, t.F), 1e-10);
    EXPECT_GT(std::abs(t.E), 1e-8);
}

TEST(AubinYau, ZeroPotential)
{
    const auto z = ScalarField::zeros(grid8());
    EXPECT_EQ(aubin_I(generic(), z), 0.0);
    EXPECT_EQ(aubin_J(generic(), z), 0.0);
    EXPECT_EQ(bullet_I(generic(), z), 0.0);
    EXPECT_EQ(bullet_J(generic(), z), 0.0);
}

TEST(AubinYau, KahlerReduction)
{
    LinearRng rng(71);
    const auto expr = 0.3 * random_real_expression(rng, 1);
    const auto phi = sample(expr, grid8());
    const auto m = oracle::flat_mixed_averages(expr, grid8());
    EXPECT_LE(rel(aubin_I(flat(), phi), oracle::flat_aubin_I(m)), 1e-12);
    EXPECT_LE(rel(aubin_J(flat(), phi), oracle::flat_aubin_J(m)), 1e-12);
    EXPECT_LE(rel(bullet_I(flat(), phi), oracle::flat_aubin_I(m)), 1e-12);
    EXPECT_LE(rel(bullet_J(flat(), phi), oracle::flat_aubin_J(m)), 1e-12);
}

TEST(AubinYau, ConstantPotentialOnKahler)
{
    const auto c = ScalarField::constant(grid8(), 0.4);
    EXPECT_NEAR(bullet_I(flat(), c), 0.0, 1e-15);
    EXPECT_NEAR(bullet_J(flat(), c), 0.0, 1e-15);
}

TEST(AubinYau, ThreeQuarterGapIsGradientEnergy)
{
    const auto phi = random_potential(generic(), 0.5, 72);
    const PotentialData pd(generic(), phi);
    const double lhs = 0.75 * aubin_I(generic(), pd) - aubin_J(generic(), pd);
    const auto g = gradient_integrals(generic(), pd);
    EXPECT_LE(rel(lhs, gradient_three_quarter(g)), 1e-9);
    EXPECT_LE(rel(4.0 * aubin_J(generic(), pd) - aubin_I(generic(), pd), gradient_four(g)), 1e-9);
    EXPECT_GT(gradient_three_quarter(g), 0.0);
}

TEST(Err, Examples)
{
    EXPECT_EQ(err(generic(), ScalarField::zeros(grid8())), 0.0);
    for (std::uint64_t seed : {81u, 82u}) {
        const auto phi = random_potential(flat(), 1.0, seed);
        EXPECT_LE(std::abs(err(flat(), phi)), 1e-9 * flat().volume);
    }
    const double e = err(generic(), random_potential(generic(), 1.0, 83));
    EXPECT_GT(std::abs(e), 1e-12 * generic().volume);
}

// ω_flat + ∂σ + conj(∂σ) leaves the volume unchanged: Err and the pairing of φ
// with ∂ω ^ ∂̄ω both vanish to roundoff although ∂ω does not.
TEST(Err, VanishesOnDdbarClosedFamily)
{
    const auto h = ddbar_closed(grid8(), 0.2, 1).structure;
    const auto phi = random_potential(h, 1.0, 83);
    EXPECT_GT(h.d_omega.max_abs(), 1e-2);
    EXPECT_LE(std::abs(err(h, phi)), 1e-12 * h.volume);
    EXPECT_LE(std::abs(integrate_top(phi * wedge(h.d_omega, h.dbar_omega))), 1e-12 * h.volume);
}

TEST(IdentityResiduals, ZeroPotential)
{
    ReportOptions o;
    o.include_path = false;
    for (const auto& [name, r] : identity_residuals(generic(), ScalarField::zeros(grid8()), o)) {
        EXPECT_EQ(r, 0.0) << name;
    }
}

TEST(IdentityResiduals, Kahler)
{
    ReportOptions o;
    o.include_path = false;
    const auto phi = random_potential(flat(), 0.5, 91);
    const auto rep = functional_report(flat(), phi, o);
    EXPECT_LE(rep.find("three_quarter_hessian")->residual, 1e-9);
    EXPECT_LE(rep.find("four_hessian")->residual, 1e-9);
    const auto g = rep.find("three_quarter_gradient");
    EXPECT_LE(g->residual, 1e-9);
    EXPECT_GE(g->rhs, 0.0);
}

TEST(IdentityResiduals, GenericMetricAllIdentities)
{
    const auto phi = random_potential(generic(), 0.5, 92);
    const auto rep = functional_report(generic(), phi);
    EXPECT_EQ(rep.identities.size(), 15u);
    for (const auto& r : rep.identities) EXPECT_LE(r.residual, 1e-8) << r.name;
    EXPECT_LE(rep.imag_residual, 1e-8);
}

TEST(InequalityCheck, ZeroPotentialIsEqualityCase)
{
    const auto r = inequality_check(generic(), ScalarField::zeros(grid8()));
    EXPECT_EQ(r.three_quarter_I_minus_J, 0.0);
    EXPECT_EQ(r.four_J_minus_I, 0.0);
    EXPECT_TRUE(r.passed());
}

TEST(InequalityCheck, StrictForNonconstantKahlerPotential)
{
    const auto phi = sample(TrigPolynomial::cos(TrigPolynomial::axis_frequency(0), 0.1), grid8());
    const auto r = inequality_check(flat(), phi);
    EXPECT_TRUE(r.passed());
    EXPECT_GT(r.three_quarter_gradient, 0.0);
    EXPECT_GT(r.four_gradient, 0.0);
    EXPECT_TRUE(r.chain_quarter_holds);
}

TEST(InequalityCheck, GenericSeeds)
{
    for (std::uint64_t seed = 100; seed < 104; ++seed) {
        EXPECT_TRUE(inequality_check(generic(), random_potential(generic(), 1.0, seed)).passed()) << seed;
    }
}

TEST(VolumeBounds, FlatBoundsCollapse)
{
    const auto phi = random_potential(flat(), 0.5, 111, true);
    const auto r = volume_bounds(flat(), 0.0, {phi});
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_TRUE(r.passed());
    EXPECT_LE(std::abs(r.entries[0].upper_bound - flat().volume), 1e-9 * flat().volume);
    EXPECT_LE(std::abs(*r.entries[0].lower_bound - flat().volume), 1e-9 * flat().volume);
    EXPECT_LE(std::abs(r.entries[0].err), 1e-9 * flat().volume);
}

TEST(VolumeBounds, DdbarClosedUpperBound)
{
    const auto h = ddbar_closed(grid8(), 0.05, 1).structure;
    const auto g = gauduchon_solve(h);
    std::vector<ScalarField> phis;
    for (std::uint64_t seed = 120; seed < 123; ++seed) phis.push_back(random_potential(h, 1.0, seed, true));
    const auto r = volume_bounds(h, g.osc_u, phis);
    EXPECT_TRUE(r.hypothesis_satisfied);
    EXPECT_TRUE(r.passed());
    for (const auto& e : r.entries) EXPECT_GT(e.upper_slack, 0.0);
}

TEST(VolumeBounds, RequiresPluriclosedMetric)
{
    const auto phi = random_potential(generic(), 0.5, 130, true);
    EXPECT_THROW(volume_bounds(generic(), 0.1, {phi}), BoundNotApplicable);
    VolumeBoundOptions o;
    o.allow_unsatisfied_hypothesis = true;
    const auto r = volume_bounds(generic(), 0.1, {phi}, o);
    EXPECT_FALSE(r.hypothesis_satisfied);
    EXPECT_EQ(r.entries.size(), 1u);
}
