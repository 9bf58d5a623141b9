#pragma once

// Mabuchi and Aubin-Yau functionals of Hermitian three-folds, their auxiliary
// correction terms, and the residuals of the identities relating them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "threefold/dolbeault.hpp"
#include "threefold/metrics.hpp"

namespace threefold {

/// Imaginary parts above this fraction of the term scale abort an evaluation.
inline constexpr double kImaginaryTolerance = 1e-8;
inline constexpr int kDefaultTimeNodes = 8;
inline constexpr int kDefaultScaleNodes = 4;

struct QuadratureRule {
    std::vector<double> nodes;   // in (0, 1)
    std::vector<double> weights; // sum to 1
};

/// Gauss-Legendre rule on [0, 1], exact for polynomials of degree 2 * order - 1.
inline QuadratureRule gauss_legendre(int order)
{
    if (order < 1 || order > 64) throw InvalidArgument("quadrature order must be in [1, 64]");
    const auto n = static_cast<unsigned>(order);
    QuadratureRule rule;
    for (int i = 0; i < order; ++i) {
        // Newton iteration from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double p = std::legendre(n, x);
            const double pm = n == 0 ? 0.0 : std::legendre(n - 1, x);
            dp = order * (x * p - pm) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double p = std::legendre(n - 1, x);
        dp = order * (x * std::legendre(n, x) - p) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes.push_back(0.5 * (1.0 + x));
        rule.weights.push_back(0.5 * w);
    }
    std::vector<std::size_t> order_idx(rule.nodes.size());
    for (std::size_t i = 0; i < order_idx.size(); ++i) order_idx[i] = i;
    std::sort(order_idx.begin(), order_idx.end(),
              [&](std::size_t a, std::size_t b) { return rule.nodes[a] < rule.nodes[b]; });
    QuadratureRule sorted;
    for (auto i : order_idx) {
        sorted.nodes.push_back(rule.nodes[i]);
        sorted.weights.push_back(rule.weights[i]);
    }
    return sorted;
}

/// Real potential together with the derivatives every functional needs.
struct PotentialData {
    ScalarField phi;
    PQForm d_phi;      // ∂φ
    PQForm dbar_phi;   // ∂̄φ
    PQForm i_ddbar;    // i∂∂̄φ
    PQForm omega_phi;  // ω + i∂∂̄φ

    PotentialData(const HermitianStructure& h, const ScalarField& potential)
        : phi(potential), d_phi(del(potential)), dbar_phi(delbar(potential)),
          i_ddbar(cplx(0.0, 1.0) * del(dbar_phi)), omega_phi(h.omega + i_ddbar)
    {
        if (!potential.reality_hint()) throw PreconditionViolation("potential must be real");
    }
};

namespace detail {

inline PQForm power(const PQForm& a, int k)
{
    if (k == 0) return PQForm::function(ScalarField::constant(a.grid(), 1.0));
    PQForm out = a;
    for (int i = 1; i < k; ++i) out = wedge(out, a);
    return out;
}

/// Real part of a functional value; aborts when the imaginary part exceeds
/// kImaginaryTolerance * scale.
inline double real_checked(cplx value, double scale, const std::string& what, double* worst = nullptr)
{
    const double rel = std::abs(value.imag()) / scale;
    if (worst) *worst = std::max(*worst, std::abs(value.imag()));
    if (rel > kImaginaryTolerance) {
        throw ImaginaryResidualError(what + " has imaginary part " + std::to_string(value.imag()) +
                                     " against scale " + std::to_string(scale));
    }
    return value.real();
}

inline void require_admissible(const PQForm& omega_phi, const std::string& what)
{
    const auto pos = check_positive(omega_phi);
    if (!pos.positive) {
        throw PathNotAdmissible(what + ": ω_φ not positive, min eigenvalue " +
                                std::to_string(pos.min_eigenvalue));
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Paths

/// φ(t) = Σ_k c_k(t) ψ_k with polynomial c_k (monomial coefficients in t).
class PotentialPath {
public:
    PotentialPath(std::vector<ScalarField> basis, std::vector<std::vector<double>> coefficients)
        : basis_(std::move(basis)), coeffs_(std::move(coefficients))
    {
        if (basis_.empty() || basis_.size() != coeffs_.size()) {
            throw InvalidArgument("path needs one coefficient polynomial per basis field");
        }
        for (const auto& b : basis_) {
            if (!b.reality_hint()) throw PreconditionViolation("path basis fields must be real");
            if (b.grid() != basis_.front().grid()) throw ShapeError("path basis on different grids");
        }
    }

    /// (1 - t) φ1 + t φ2.
    static PotentialPath linear(const ScalarField& phi1, const ScalarField& phi2)
    {
        return PotentialPath({phi1, phi2}, {{1.0, -1.0}, {0.0, 1.0}});
    }

    /// t φ.
    static PotentialPath radial(const ScalarField& phi) { return PotentialPath({phi}, {{0.0, 1.0}}); }

    /// (1 - t) φ1 + t φ2 + t (1 - t) χ.
    static PotentialPath quadratic(const ScalarField& phi1, const ScalarField& phi2, const ScalarField& chi)
    {
        return PotentialPath({phi1, phi2, chi}, {{1.0, -1.0}, {0.0, 1.0}, {0.0, 1.0, -1.0}});
    }

    /// Quadratic path from φ1 to φ2 bent towards ψ. With χ = ψ - (φ1 + φ2)/2
    /// every φ(t) is a convex combination of φ1, φ2 and ψ, so the path is
    /// admissible whenever the three potentials are.
    static PotentialPath quadratic_through(const ScalarField& phi1, const ScalarField& phi2, const ScalarField& psi)
    {
        return quadratic(phi1, phi2, psi - 0.5 * (phi1 + phi2));
    }

    /// t² φ.
    static PotentialPath quadratic_radial(const ScalarField& phi)
    {
        return PotentialPath({phi}, {{0.0, 0.0, 1.0}});
    }

    const std::vector<ScalarField>& basis() const noexcept { return basis_; }
    const std::vector<std::vector<double>>& coefficients() const noexcept { return coeffs_; }

    double coefficient(std::size_t k, double t) const
    {
        double acc = 0.0;
        for (auto it = coeffs_[k].rbegin(); it != coeffs_[k].rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    double coefficient_derivative(std::size_t k, double t) const
    {
        double acc = 0.0;
        const auto& c = coeffs_[k];
        for (std::size_t d = c.size(); d-- > 1;) acc = acc * t + static_cast<double>(d) * c[d];
        return acc;
    }

    ScalarField at(double t) const { return combine(t, false); }
    ScalarField derivative(double t) const { return combine(t, true); }

private:
    ScalarField combine(double t, bool derivative) const
    {
        ScalarField out = ScalarField::zeros(basis_.front().grid());
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const double c = derivative ? coefficient_derivative(k, t) : coefficient(k, t);
            if (c != 0.0) out = out + c * basis_[k];
        }
        return out;
    }

    std::vector<ScalarField> basis_;
    std::vector<std::vector<double>> coeffs_;
};

// ---------------------------------------------------------------------------
// Mabuchi functional

/// Sign in front of the two quartic ∂φ ∧ ∂̄φ ∧ ∂ω ∧ ∂̄φ̇ terms.
///
/// `corrected` adds them; the value is then independent of the path to
/// roundoff. `as_printed` subtracts them, which doubles the path dependence
/// of the first three terms instead of cancelling it. Kept for comparison.
enum class QuarticSign { corrected, as_printed };

struct MabuchiOptions {
    int time_nodes = kDefaultTimeNodes;
    /// Keeps the two quartic terms; off only for negative controls.
    bool include_quartic = true;
    QuarticSign quartic_sign = QuarticSign::corrected;
};

/// Per-term breakdown of a path evaluation, each already divided by V.
struct MabuchiTerms {
    double volume_term = 0.0;
    double coupling_terms = 0.0;
    double quartic_terms = 0.0;
    double imag_residual = 0.0;
    double scale = 1.0;

    double total() const { return volume_term + coupling_terms + quartic_terms; }
};

inline MabuchiTerms mabuchi_path_terms(const HermitianStructure& h, const PotentialPath& path,
                                       const MabuchiOptions& options = {})
{
    const auto rule = gauss_legendre(options.time_nodes);
    const cplx I(0.0, 1.0);

    // ∂, ∂̄ and i∂∂̄ are linear: differentiate the basis once.
    std::vector<PQForm> d_basis, dbar_basis, iddbar_basis;
    for (const auto& b : path.basis()) {
        d_basis.push_back(del(b));
        dbar_basis.push_back(delbar(b));
        iddbar_basis.push_back(I * del(dbar_basis.back()));
    }
    auto mix = [&](const std::vector<PQForm>& forms, auto&& coef) {
        std::optional<PQForm> out;
        for (std::size_t k = 0; k < forms.size(); ++k) {
            const double c = coef(k);
            if (c == 0.0) continue;
            out = out ? *out + c * forms[k] : c * forms[k];
        }
        return out ? *out : PQForm::zero(h.grid(), forms.front().p(), forms.front().q());
    };

    cplx t0 = 0.0, t12 = 0.0, t34 = 0.0;
    double abs_sum = 0.0;
    for (std::size_t node = 0; node < rule.nodes.size(); ++node) {
        const double t = rule.nodes[node];
        const double w = rule.weights[node];
        auto c = [&](std::size_t k) { return path.coefficient(k, t); };
        auto cd = [&](std::size_t k) { return path.coefficient_derivative(k, t); };

        const ScalarField phi = path.at(t);
        const ScalarField phidot = path.derivative(t);
        const PQForm omega_t = h.omega + mix(iddbar_basis, c);
        detail::require_admissible(omega_t, "path node t=" + std::to_string(t));

        const PQForm d_phidot = mix(d_basis, cd);
        const PQForm dbar_phidot = mix(dbar_basis, cd);

        const cplx v0 = integrate_top(phidot * wedge(omega_t, omega_t, omega_t));
        const cplx v1 = -3.0 * I * integrate_top(wedge(h.d_omega, phi * dbar_phidot, omega_t));
        const cplx v2 = 3.0 * I * integrate_top(wedge(h.dbar_omega, phi * d_phidot, omega_t));
        t0 += w * v0;
        t12 += w * (v1 + v2);
        abs_sum += w * (std::abs(v0) + std::abs(v1) + std::abs(v2));
        if (options.include_quartic) {
            const PQForm d_phi = mix(d_basis, c);
            const PQForm dbar_phi = mix(dbar_basis, c);
            const double sign = options.quartic_sign == QuarticSign::corrected ? 1.0 : -1.0;
            const cplx v3 = sign * integrate_top(wedge(d_phi, dbar_phi, h.d_omega, dbar_phidot));
            const cplx v4 = sign * integrate_top(wedge(dbar_phi, d_phi, h.dbar_omega, d_phidot));
            t34 += w * (v3 + v4);
            abs_sum += w * (std::abs(v3) + std::abs(v4));
        }
    }
    MabuchiTerms out;
    out.scale = 1.0 + abs_sum / h.volume;
    const cplx total = (t0 + t12 + t34) / h.volume;
    detail::real_checked(total, out.scale, "Mabuchi path functional", &out.imag_residual);
    out.volume_term = t0.real() / h.volume;
    out.coupling_terms = t12.real() / h.volume;
    out.quartic_terms = t34.real() / h.volume;
    return out;
}

/// L^M along an explicit path: the five-term path integral divided by V.
inline double mabuchi_path(const HermitianStructure& h, const PotentialPath& path,
                           const MabuchiOptions& options = {})
{
    return mabuchi_path_terms(h, path, options).total();
}

/// L^M(φ1, φ2) along the linear path.
inline double mabuchi_two_point(const HermitianStructure& h, const ScalarField& phi1, const ScalarField& phi2,
                                const MabuchiOptions& options = {})
{
    return mabuchi_path(h, PotentialPath::linear(phi1, phi2), options);
}

/// L^M(φ1, φ2) along φ1 -> m -> φ2, two linear segments through `waypoint`.
inline double mabuchi_two_segment(const HermitianStructure& h, const ScalarField& phi1,
                                  const ScalarField& waypoint, const ScalarField& phi2,
                                  const MabuchiOptions& options = {})
{
    return mabuchi_two_point(h, phi1, waypoint, options) + mabuchi_two_point(h, waypoint, phi2, options);
}

/// Waypoint (φ1 + φ2 + ψ)/3 for two-segment paths; admissible with its inputs.
inline ScalarField convex_waypoint(const ScalarField& phi1, const ScalarField& phi2, const ScalarField& psi)
{
    return (1.0 / 3.0) * (phi1 + phi2 + psi);
}

/// Closed form of L^M(0, φ): three finite sums, no path integral.
inline double mabuchi_closed(const HermitianStructure& h, const PotentialData& pd, double* imag = nullptr)
{
    const cplx I(0.0, 1.0);
    const double V = h.volume;
    detail::require_admissible(pd.omega_phi, "mabuchi_closed");
    cplx volume_sum = 0.0;
    double abs_sum = 0.0;
    for (int i = 0; i <= 3; ++i) {
        const PQForm top = wedge(detail::power(pd.omega_phi, i), detail::power(h.omega, 3 - i));
        const cplx v = integrate_top(pd.phi * top) / (4.0 * V);
        volume_sum += v;
        abs_sum += std::abs(v);
    }
    const PQForm i_del_omega_dbar = wedge(I * h.d_omega, pd.dbar_phi);
    const PQForm i_dbar_omega_d = wedge(I * h.dbar_omega, pd.d_phi);
    cplx correction = 0.0;
    for (int i = 0; i <= 1; ++i) {
        const PQForm mixed = i == 0 ? h.omega : pd.omega_phi;
        const double c = (i + 1) / (2.0 * V);
        const cplx a = -c * integrate_top(pd.phi * wedge(mixed, i_del_omega_dbar));
        const cplx b = c * integrate_top(pd.phi * wedge(mixed, i_dbar_omega_d));
        correction += a + b;
        abs_sum += std::abs(a) + std::abs(b);
    }
    return detail::real_checked(volume_sum + correction, 1.0 + abs_sum, "closed Mabuchi functional", imag);
}

inline double mabuchi_closed(const HermitianStructure& h, const ScalarField& phi)
{
    return mabuchi_closed(h, PotentialData(h, phi));
}

// ---------------------------------------------------------------------------
// Aubin-Yau functionals and auxiliary terms

struct AuxTerms {
    double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0, A1 = 0, A2 = 0, B1 = 0, B2 = 0;

    std::vector<std::pair<std::string, double>> named() const
    {
        return {{"A", A}, {"B", B}, {"C", C}, {"D", D}, {"E", E},
                {"F", F}, {"A1", A1}, {"A2", A2}, {"B1", B1}, {"B2", B2}};
    }
};

/// The ten correction integrals, each evaluated from its own wedge product.
inline AuxTerms aux_terms(const HermitianStructure& h, const PotentialData& pd, double* imag = nullptr)
{
    const cplx I(0.0, 1.0);
    const double V = h.volume;
    const PQForm& w = h.omega;
    const PQForm& wp = pd.omega_phi;
    const PQForm minus_i_del = -I * h.d_omega;
    const PQForm i_del = I * h.d_omega;
    const PQForm i_dbar = I * h.dbar_omega;
    const PQForm minus_i_dbar = -I * h.dbar_omega;

    // ∫ φ α ∧ β ∧ γ / V
    auto term = [&](const PQForm& a, const PQForm& b, const PQForm& c) {
        return integrate_top(pd.phi * wedge(a, b, c)) / V;
    };
    auto real = [&](cplx v, const char* name) {
        return detail::real_checked(v, 1.0 + std::abs(v), std::string("aux term ") + name, imag);
    };

    AuxTerms t;
    t.A = real(0.5 * term(w, minus_i_del, pd.dbar_phi) + 1.0 * term(wp, minus_i_del, pd.dbar_phi), "A");
    t.B = real(0.5 * term(w, i_dbar, pd.d_phi) + 1.0 * term(wp, i_dbar, pd.d_phi), "B");
    t.C = real(0.75 * term(wp, i_del, pd.dbar_phi), "C");
    t.D = real(0.75 * term(wp, minus_i_dbar, pd.d_phi), "D");
    t.E = real(9.0 * term(w, i_del, pd.dbar_phi), "E");
    t.F = real(9.0 * term(w, minus_i_dbar, pd.d_phi), "F");
    t.A1 = real(0.5 * term(w, minus_i_del, pd.dbar_phi), "A1");
    t.A2 = real(term(wp, minus_i_del, pd.dbar_phi), "A2");
    t.B1 = real(0.5 * term(w, i_dbar, pd.d_phi), "B1");
    t.B2 = real(term(wp, i_dbar, pd.d_phi), "B2");
    return t;
}

inline AuxTerms aux_terms(const HermitianStructure& h, const ScalarField& phi)
{
    return aux_terms(h, PotentialData(h, phi));
}

/// ∫ω³ - ∫ω_φ³.
inline double err(const HermitianStructure& h, const PotentialData& pd)
{
    const cplx vphi = integrate_top(wedge(pd.omega_phi, pd.omega_phi, pd.omega_phi));
    return detail::real_checked(h.volume - vphi, 1.0 + std::abs(vphi), "Err");
}

inline double err(const HermitianStructure& h, const ScalarField& phi) { return err(h, PotentialData(h, phi)); }

/// (1/V) ∫ φ (ω³ - ω_φ³).
inline double bullet_I(const HermitianStructure& h, const PotentialData& pd)
{
    const PQForm diff = wedge(h.omega, h.omega, h.omega) - wedge(pd.omega_phi, pd.omega_phi, pd.omega_phi);
    const cplx v = integrate_top(pd.phi * diff) / h.volume;
    return detail::real_checked(v, 1.0 + std::abs(v), "I bullet");
}

inline double bullet_I(const HermitianStructure& h, const ScalarField& phi)
{
    return bullet_I(h, PotentialData(h, phi));
}

/// ∫_0^1 (1/V) ∫ φ (ω³ - ω_{sφ}³) ds by Gauss-Legendre in s (integrand cubic in s).
inline double bullet_J(const HermitianStructure& h, const PotentialData& pd, int s_nodes = kDefaultScaleNodes)
{
    const auto rule = gauss_legendre(s_nodes);
    const PQForm w3 = wedge(h.omega, h.omega, h.omega);
    cplx acc = 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const PQForm ws = h.omega + rule.nodes[i] * pd.i_ddbar;
        const cplx v = integrate_top(pd.phi * (w3 - wedge(ws, ws, ws))) / h.volume;
        acc += rule.weights[i] * v;
        abs_sum += rule.weights[i] * std::abs(v);
    }
    return detail::real_checked(acc, 1.0 + abs_sum, "J bullet");
}

inline double bullet_J(const HermitianStructure& h, const ScalarField& phi, int s_nodes = kDefaultScaleNodes)
{
    return bullet_J(h, PotentialData(h, phi), s_nodes);
}

namespace detail {

/// The four correction integrals shared by the explicit I and J formulas:
/// -(3/2V)∫φω_φ∧i∂ω∧∂̄φ - (3/2V)∫φω∧i∂ω∧∂̄φ + (3/2V)∫φω_φ∧i∂̄ω∧∂φ + (3/2V)∫φω∧i∂̄ω∧∂φ.
inline std::pair<cplx, double> explicit_correction(const HermitianStructure& h, const PotentialData& pd)
{
    const cplx I(0.0, 1.0);
    const double c = 1.5 / h.volume;
    const PQForm del_part = wedge(I * h.d_omega, pd.dbar_phi);
    const PQForm dbar_part = wedge(I * h.dbar_omega, pd.d_phi);
    const cplx v[4] = {
        -c * integrate_top(pd.phi * wedge(pd.omega_phi, del_part)),
        -c * integrate_top(pd.phi * wedge(h.omega, del_part)),
        c * integrate_top(pd.phi * wedge(pd.omega_phi, dbar_part)),
        c * integrate_top(pd.phi * wedge(h.omega, dbar_part)),
    };
    double abs_sum = 0.0;
    for (const auto& x : v) abs_sum += std::abs(x);
    return {v[0] + v[1] + v[2] + v[3], abs_sum};
}

} // namespace detail

/// Explicit I^AY: I bullet plus the four first-order correction integrals.
inline double aubin_I(const HermitianStructure& h, const PotentialData& pd)
{
    const cplx base = integrate_top(pd.phi * (wedge(h.omega, h.omega, h.omega) -
                                              wedge(pd.omega_phi, pd.omega_phi, pd.omega_phi))) / h.volume;
    const auto [corr, abs_sum] = detail::explicit_correction(h, pd);
    return detail::real_checked(base + corr, 1.0 + std::abs(base) + abs_sum, "I^AY");
}

inline double aubin_I(const HermitianStructure& h, const ScalarField& phi) { return aubin_I(h, PotentialData(h, phi)); }

/// Explicit J^AY: -L^M(φ) + (1/V)∫φω³ plus the same correction integrals.
/// `mabuchi` may be supplied to avoid recomputing L^M(φ).
inline double aubin_J(const HermitianStructure& h, const PotentialData& pd, std::optional<double> mabuchi = {})
{
    const double L = mabuchi ? *mabuchi : mabuchi_closed(h, pd);
    const cplx base = integrate_top(pd.phi * wedge(h.omega, h.omega, h.omega)) / h.volume;
    const auto [corr, abs_sum] = detail::explicit_correction(h, pd);
    return -L + detail::real_checked(base + corr, 1.0 + std::abs(L) + std::abs(base) + abs_sum, "J^AY");
}

inline double aubin_J(const HermitianStructure& h, const ScalarField& phi) { return aubin_J(h, PotentialData(h, phi)); }

/// Gradient integrals (1/V) ∫ i∂φ ∧ ∂̄φ ∧ ω_φ^i ∧ ω^{2-i}, i = 0, 1, 2.
inline std::array<double, 3> gradient_integrals(const HermitianStructure& h, const PotentialData& pd)
{
    const cplx I(0.0, 1.0);
    const PQForm grad = wedge(I * pd.d_phi, pd.dbar_phi);
    std::array<double, 3> out{};
    for (int i = 0; i <= 2; ++i) {
        const PQForm mix = wedge(detail::power(pd.omega_phi, i), detail::power(h.omega, 2 - i));
        const cplx v = integrate_top(wedge(grad, mix)) / h.volume;
        out[static_cast<std::size_t>(i)] = detail::real_checked(v, 1.0 + std::abs(v), "gradient integral");
    }
    return out;
}

/// Σ_{i=1}^{2} (i/4) G_i: the nonnegative value of ¾I - J.
inline double gradient_three_quarter(const std::array<double, 3>& g) { return 0.25 * g[1] + 0.5 * g[2]; }

/// Σ_{i=0}^{2} (2-i) G_i: the nonnegative value of 4J - I.
inline double gradient_four(const std::array<double, 3>& g) { return 2.0 * g[0] + g[1]; }

// ---------------------------------------------------------------------------
// Identity residuals

struct IdentityResidual {
    std::string name;     // e.g. "three_quarter_via_A"
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; // |lhs - rhs| / (1 + |lhs| + |rhs|)
};

inline IdentityResidual make_residual(std::string name, double lhs, double rhs)
{
    return {std::move(name), lhs, rhs, std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs))};
}

/// Every value a full evaluation at one potential produces.
struct FunctionalReport {
    double L_M = 0.0;        // radial path integral
    double L_M_closed = 0.0; // closed form
    double I_AY = 0.0, J_AY = 0.0;
    double I_bullet = 0.0, J_bullet = 0.0;
    AuxTerms aux;
    std::array<double, 3> gradient{};
    double err = 0.0;
    double imag_residual = 0.0;
    std::vector<IdentityResidual> identities;

    const IdentityResidual* find(const std::string& name) const
    {
        for (const auto& r : identities) {
            if (r.name == name) return &r;
        }
        return nullptr;
    }
};

struct ReportOptions {
    int time_nodes = kDefaultTimeNodes;
    int s_nodes = kDefaultScaleNodes;
    /// Shift used by the constant-shift identities.
    double shift = 1.0;
    /// Evaluate the radial path integral and the shift laws (path quadrature dominates the cost).
    bool include_path = true;
};

/// Evaluates every functional at φ and the residual of each identity, both
/// sides computed independently.
inline FunctionalReport functional_report(const HermitianStructure& h, const ScalarField& phi,
                                          const ReportOptions& options = {})
{
    const PotentialData pd(h, phi);
    detail::require_admissible(pd.omega_phi, "functional_report");
    FunctionalReport r;

    r.L_M_closed = mabuchi_closed(h, pd, &r.imag_residual);
    r.aux = aux_terms(h, pd, &r.imag_residual);
    r.I_bullet = bullet_I(h, pd);
    r.J_bullet = bullet_J(h, pd, options.s_nodes);
    r.I_AY = aubin_I(h, pd);
    r.J_AY = aubin_J(h, pd, r.L_M_closed);
    r.gradient = gradient_integrals(h, pd);
    r.err = err(h, pd);

    const double g3 = gradient_three_quarter(r.gradient);
    const double g4 = gradient_four(r.gradient);
    const double lhs3 = 0.75 * r.I_bullet - r.J_bullet;
    const double lhs4 = 4.0 * r.J_bullet - r.I_bullet;
    const auto& a = r.aux;

    // (1/V)∫ φ (-i∂∂̄φ) ∧ Σ c_j ω^{2-j} ∧ ω_φ^j
    auto hessian_side = [&](std::array<double, 3> c) {
        PQForm mix = PQForm::zero(h.grid(), 2, 2);
        for (int j = 0; j <= 2; ++j) {
            if (c[static_cast<std::size_t>(j)] == 0.0) continue;
            mix = mix + c[static_cast<std::size_t>(j)] *
                            wedge(detail::power(h.omega, 2 - j), detail::power(pd.omega_phi, j));
        }
        const cplx v = integrate_top(pd.phi * wedge(-1.0 * pd.i_ddbar, mix)) / h.volume;
        return detail::real_checked(v, 1.0 + std::abs(v), "Hessian integral", &r.imag_residual);
    };

    r.identities.push_back(make_residual("three_quarter_hessian", lhs3, hessian_side({0.0, 0.25, 0.5})));
    r.identities.push_back(make_residual("four_hessian", lhs4, hessian_side({2.0, 1.0, 0.0})));
    r.identities.push_back(make_residual("three_quarter_via_A", lhs3, g3 - 0.5 * a.A + a.C));
    r.identities.push_back(make_residual("three_quarter_via_B", lhs3, g3 - 0.5 * a.B + a.D));
    r.identities.push_back(make_residual("three_quarter_symmetric", lhs3, g3 - 0.25 * (a.A + a.B) + 0.5 * (a.C + a.D)));
    r.identities.push_back(make_residual("four_via_A", lhs4, g4 + a.E + 8.0 * a.A1 - a.A2));
    r.identities.push_back(make_residual("four_via_B", lhs4, g4 + a.F + 8.0 * a.B1 - a.B2));
    r.identities.push_back(
        make_residual("four_symmetric", lhs4, g4 + 0.5 * (a.E + a.F) + 4.0 * (a.A1 + a.B1) - 0.5 * (a.A2 + a.B2)));
    r.identities.push_back(make_residual("three_quarter_gradient", 0.75 * r.I_AY - r.J_AY, g3));
    r.identities.push_back(make_residual("four_gradient", 4.0 * r.J_AY - r.I_AY, g4));
    r.identities.push_back(make_residual("A=A1+A2", a.A, a.A1 + a.A2));
    r.identities.push_back(make_residual("B=B1+B2", a.B, a.B1 + a.B2));

    if (options.include_path) {
        MabuchiOptions mo;
        mo.time_nodes = options.time_nodes;
        const auto radial = mabuchi_path_terms(h, PotentialPath::radial(phi), mo);
        r.L_M = radial.total();
        r.imag_residual = std::max(r.imag_residual, radial.imag_residual);
        r.identities.push_back(make_residual("closed_form", r.L_M, r.L_M_closed));

        const double C = options.shift;
        const double factor = 1.0 - r.err / h.volume;
        const ScalarField shifted = phi + C;
        r.identities.push_back(make_residual("constant_shift", mabuchi_two_point(h, phi, shifted, mo), C * factor));
        r.identities.push_back(make_residual(
            "shift_composition", mabuchi_two_point(h, ScalarField::zeros(h.grid()), shifted, mo), r.L_M + C * factor));
    }
    return r;
}

/// Residual map keyed by identity name.
inline std::map<std::string, double> identity_residuals(const HermitianStructure& h, const ScalarField& phi,
                                                        const ReportOptions& options = {})
{
    std::map<std::string, double> out;
    for (const auto& r : functional_report(h, phi, options).identities) out[r.name] = r.residual;
    return out;
}

// ---------------------------------------------------------------------------
// Inequalities

inline constexpr double kInequalitySlack = 1e-9;

struct InequalityReport {
    double three_quarter_I_minus_J = 0.0;  // from I^AY, J^AY
    double three_quarter_gradient = 0.0;   // gradient-integral route
    double four_J_minus_I = 0.0;
    double four_gradient = 0.0;
    double scale = 1.0;
    double agreement_three_quarter = 0.0;  // relative
    double agreement_four = 0.0;
    bool three_quarter_holds = false;
    bool four_holds = false;
    bool routes_agree = false;
    /// Derived chain ¼I ≤ J ≤ ¾I; reported only.
    bool chain_quarter_holds = false;
    double I = 0.0;
    double J = 0.0;

    bool passed() const { return three_quarter_holds && four_holds && routes_agree; }
};

inline InequalityReport inequality_check(const HermitianStructure& h, const ScalarField& phi,
                                         double agreement_tolerance = kInequalitySlack)
{
    const PotentialData pd(h, phi);
    detail::require_admissible(pd.omega_phi, "inequality_check");
    InequalityReport r;
    r.I = aubin_I(h, pd);
    r.J = aubin_J(h, pd);
    const auto g = gradient_integrals(h, pd);
    r.three_quarter_I_minus_J = 0.75 * r.I - r.J;
    r.four_J_minus_I = 4.0 * r.J - r.I;
    r.three_quarter_gradient = gradient_three_quarter(g);
    r.four_gradient = gradient_four(g);
    r.scale = 1.0 + std::abs(r.I) + std::abs(r.J);
    r.agreement_three_quarter = std::abs(r.three_quarter_I_minus_J - r.three_quarter_gradient) /
                                (1.0 + std::abs(r.three_quarter_I_minus_J) + std::abs(r.three_quarter_gradient));
    r.agreement_four = std::abs(r.four_J_minus_I - r.four_gradient) /
                       (1.0 + std::abs(r.four_J_minus_I) + std::abs(r.four_gradient));
    r.three_quarter_holds = r.three_quarter_I_minus_J >= -kInequalitySlack * r.scale &&
                            r.three_quarter_gradient >= -kInequalitySlack * r.scale;
    r.four_holds = r.four_J_minus_I >= -kInequalitySlack * r.scale && r.four_gradient >= -kInequalitySlack * r.scale;
    r.routes_agree = r.agreement_three_quarter <= agreement_tolerance && r.agreement_four <= agreement_tolerance;
    r.chain_quarter_holds = 0.25 * r.I <= r.J + kInequalitySlack * r.scale &&
                            r.J <= 0.75 * r.I + kInequalitySlack * r.scale;
    return r;
}

// ---------------------------------------------------------------------------
// Volume bounds

inline constexpr double kDdbarClosedTolerance = 1e-10;

struct VolumeBoundEntry {
    double volume_phi = 0.0;  // ∫ω_φ³
    double err = 0.0;
    double upper_bound = 0.0; // (3e^{2 osc} - 2) V
    double upper_slack = 0.0; // upper_bound - volume_phi
    bool upper_holds = false;
    std::optional<double> lower_bound;  // (3e^{-2 osc} - 2) V when osc ≤ ½ln(3/2)
    std::optional<double> lower_slack;
    bool lower_holds = true;
};

struct VolumeBoundReport {
    double osc_u = 0.0;
    double volume = 0.0;
    double ddbar_norm = 0.0;
    bool hypothesis_satisfied = false;
    bool lower_applicable = false;
    std::vector<VolumeBoundEntry> entries;

    bool passed() const
    {
        return std::all_of(entries.begin(), entries.end(),
                           [](const VolumeBoundEntry& e) { return e.upper_holds && e.lower_holds; });
    }
};

inline double lower_bound_oscillation_limit() { return 0.5 * std::log(1.5); }

struct VolumeBoundOptions {
    /// Evaluate even when ∂∂̄ω ≠ 0; the report then records the failed hypothesis.
    bool allow_unsatisfied_hypothesis = false;
    /// Relative slack on both bounds, in units of V.
    double slack = 1e-10;
};

/// Checks ∫ω_φ³ ≤ (3e^{2 osc u} - 2)∫ω³ and, for small osc u, ∫ω_φ³ ≥ (3e^{-2 osc u} - 2)∫ω³.
inline VolumeBoundReport volume_bounds(const HermitianStructure& h, double osc_u, const std::vector<ScalarField>& phis,
                                       const VolumeBoundOptions& options = {})
{
    VolumeBoundReport r;
    r.osc_u = osc_u;
    r.volume = h.volume;
    r.ddbar_norm = h.ddbar_omega.max_abs();
    r.hypothesis_satisfied = r.ddbar_norm <= kDdbarClosedTolerance;
    if (!r.hypothesis_satisfied && !options.allow_unsatisfied_hypothesis) {
        throw BoundNotApplicable("volume bounds need ∂∂̄ω = 0, got sup norm " + std::to_string(r.ddbar_norm));
    }
    r.lower_applicable = osc_u <= lower_bound_oscillation_limit();
    const double V = h.volume;
    for (const auto& phi : phis) {
        const PotentialData pd(h, phi);
        detail::require_admissible(pd.omega_phi, "volume_bounds");
        VolumeBoundEntry e;
        const cplx vphi = integrate_top(wedge(pd.omega_phi, pd.omega_phi, pd.omega_phi));
        e.volume_phi = detail::real_checked(vphi, 1.0 + std::abs(vphi), "volume of ω_φ");
        e.err = V - e.volume_phi;
        e.upper_bound = (3.0 * std::exp(2.0 * osc_u) - 2.0) * V;
        e.upper_slack = e.upper_bound - e.volume_phi;
        e.upper_holds = e.upper_slack >= -options.slack * V;
        if (r.lower_applicable) {
            e.lower_bound = (3.0 * std::exp(-2.0 * osc_u) - 2.0) * V;
            e.lower_slack = e.volume_phi - *e.lower_bound;
            e.lower_holds = *e.lower_slack >= -options.slack * V;
        }
        r.entries.push_back(e);
    }
    return r;
}

} // namespace threefold
