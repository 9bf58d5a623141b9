#pragma once

// Test families of Hermitian structures, random Kähler potentials, and the
// Gauduchon conformal factor.

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threefold/dolbeault.hpp"
#include "threefold/rng.hpp"

namespace threefold {

enum class MetricFamily { flat_kahler, ddbar_closed, generic_hermitian, conformal_kahler };

inline std::string_view to_string(MetricFamily f)
{
    switch (f) {
    case MetricFamily::flat_kahler: return "flat_kahler";
    case MetricFamily::ddbar_closed: return "ddbar_closed";
    case MetricFamily::generic_hermitian: return "generic_hermitian";
    case MetricFamily::conformal_kahler: return "conformal_kahler";
    }
    return "unknown";
}

inline std::optional<MetricFamily> parse_metric_family(std::string_view s)
{
    for (auto f : {MetricFamily::flat_kahler, MetricFamily::ddbar_closed, MetricFamily::generic_hermitian,
                   MetricFamily::conformal_kahler}) {
        if (to_string(f) == s) return f;
    }
    return std::nullopt;
}

/// Default per-axis frequency cap of random data. Four-fold products, the
/// widest integrands evaluated, stay below the n = 8 grid's aliasing limit.
inline constexpr int kDefaultBandLimit = 1;

struct MetricSpec {
    MetricFamily family = MetricFamily::generic_hermitian;
    double epsilon = 0.1;
    std::uint64_t seed = 1;
    int bandlimit = kDefaultBandLimit;
    /// Amplitude of u0 = amplitude * cos(x1) for the conformal_kahler family.
    double conformal_amplitude = 0.2;
};

/// A factory product: the structure plus the perturbation size actually used.
struct Metric {
    HermitianStructure structure;
    double effective_epsilon = 0.0;
    /// Known Gauduchon factor (conformal_kahler only).
    std::optional<ScalarField> known_gauduchon_factor;
};

namespace detail {

inline std::array<int, kRealAxes> random_frequency(LinearRng& rng, int bandlimit)
{
    std::array<int, kRealAxes> k{};
    do {
        for (auto& v : k) v = rng.integer(-bandlimit, bandlimit);
    } while (k == std::array<int, kRealAxes>{});
    return k;
}

inline void require_bandlimit(const GridPtr& grid, int bandlimit)
{
    if (bandlimit < 1 || bandlimit > grid->band_limit()) {
        throw InvalidArgument("bandlimit " + std::to_string(bandlimit) + " outside [1, " +
                              std::to_string(grid->band_limit()) + "]");
    }
}

} // namespace detail

inline constexpr int kRandomModes = 6;

/// Zero-mean real trigonometric polynomial with sup norm at most 1.
inline TrigPolynomial random_real_expression(LinearRng& rng, int bandlimit, int modes = kRandomModes)
{
    std::vector<TrigTerm> terms;
    double total = 0.0;
    for (int m = 0; m < modes; ++m) {
        const auto k = detail::random_frequency(rng, bandlimit);
        const cplx c(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        auto nk = k;
        for (auto& v : nk) v = -v;
        terms.push_back({c, k});
        terms.push_back({std::conj(c), nk});
        total += 2.0 * std::abs(c);
    }
    for (auto& t : terms) t.coeff /= total;
    return TrigPolynomial(std::move(terms));
}

/// Complex trigonometric polynomial with sup norm at most 1.
inline TrigPolynomial random_complex_expression(LinearRng& rng, int bandlimit, int modes = kRandomModes)
{
    std::vector<TrigTerm> terms;
    double total = 0.0;
    for (int m = 0; m < modes; ++m) {
        const cplx c(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        terms.push_back({c, detail::random_frequency(rng, bandlimit)});
        total += std::abs(c);
    }
    for (auto& t : terms) t.coeff /= total;
    return TrigPolynomial(std::move(terms));
}

inline constexpr int kMaxHalvings = 40;

namespace detail {

/// Halves the perturbation until base + eps * perturbation is positive.
inline Metric shrink_until_positive(const PQForm& base, const PQForm& perturbation, double epsilon)
{
    double eps = epsilon;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
        const PQForm omega = base + eps * perturbation;
        if (check_positive(omega).positive) return Metric{make_hermitian(omega), eps, std::nullopt};
        eps *= 0.5;
    }
    return Metric{make_hermitian(base), 0.0, std::nullopt};
}

} // namespace detail

/// ω = i Σ dz_j ^ dzb_j.
inline Metric flat_kahler(const GridPtr& grid)
{
    return Metric{make_hermitian(flat_kahler_form(grid)), 0.0, ScalarField::zeros(grid)};
}

/// ω = ω_flat + ε (∂σ + conj(∂σ)) for a random (0,1)-form σ, so ∂∂̄ω = 0
/// identically while ∂ω = ε ∂∂̄σ̄ is generically nonzero.
inline Metric ddbar_closed(const GridPtr& grid, double epsilon, std::uint64_t seed,
                           int bandlimit = kDefaultBandLimit)
{
    if (epsilon < 0.0) throw InvalidArgument("epsilon must be non-negative");
    detail::require_bandlimit(grid, bandlimit);
    if (epsilon == 0.0) return flat_kahler(grid);
    LinearRng rng(seed);
    std::vector<ScalarField> sigma;
    for (int j = 0; j < kComplexDim; ++j) sigma.push_back(sample(random_complex_expression(rng, bandlimit), grid));
    const PQForm s(0, 1, grid, std::move(sigma));
    const PQForm ds = del(s);
    return detail::shrink_until_positive(flat_kahler_form(grid), ds + conj(ds), epsilon);
}

/// ω = ω_flat + ε i h_{jk} dz_j ^ dzb_k with h a random band-limited Hermitian matrix field.
inline Metric generic_hermitian(const GridPtr& grid, double epsilon, std::uint64_t seed,
                                int bandlimit = kDefaultBandLimit)
{
    if (epsilon < 0.0) throw InvalidArgument("epsilon must be non-negative");
    detail::require_bandlimit(grid, bandlimit);
    if (epsilon == 0.0) return flat_kahler(grid);
    LinearRng rng(seed);
    std::vector<ScalarField> h(9, ScalarField::zeros(grid));
    for (int j = 0; j < kComplexDim; ++j) {
        for (int k = j; k < kComplexDim; ++k) {
            const auto idx = static_cast<std::size_t>(3 * j + k);
            if (j == k) {
                h[idx] = sample(random_real_expression(rng, bandlimit), grid);
            } else {
                h[idx] = sample(random_complex_expression(rng, bandlimit), grid);
                h[static_cast<std::size_t>(3 * k + j)] = h[idx].conjugate();
            }
        }
    }
    for (auto& c : h) c = cplx(0.0, 1.0) * c;
    const PQForm perturbation(1, 1, grid, std::move(h));
    return detail::shrink_until_positive(flat_kahler_form(grid), perturbation, epsilon);
}

/// ω = exp(-u0) ω_flat; the Gauduchon factor is u0 up to a constant.
inline Metric conformal_kahler(const GridPtr& grid, const ScalarField& u0)
{
    if (!u0.reality_hint()) throw PreconditionViolation("conformal factor must be real");
    const auto factor = u0.map([](cplx u) { return std::exp(-u.real()); }, true);
    return Metric{make_hermitian(factor * flat_kahler_form(grid)), 0.0, u0};
}

inline Metric conformal_kahler(const GridPtr& grid, const TrigPolynomial& u0)
{
    return conformal_kahler(grid, sample(u0, grid));
}

inline Metric make_metric(const GridPtr& grid, const MetricSpec& spec)
{
    switch (spec.family) {
    case MetricFamily::flat_kahler: return flat_kahler(grid);
    case MetricFamily::ddbar_closed: return ddbar_closed(grid, spec.epsilon, spec.seed, spec.bandlimit);
    case MetricFamily::generic_hermitian:
        return generic_hermitian(grid, spec.epsilon, spec.seed, spec.bandlimit);
    case MetricFamily::conformal_kahler:
        return conformal_kahler(grid, TrigPolynomial::cos(TrigPolynomial::axis_frequency(0),
                                                          spec.conformal_amplitude));
    }
    throw InvalidArgument("unknown metric family");
}

/// Random real potential with sup |φ| ≤ amplitude, halved until ω_φ > 0.
/// With `normalized` the grid maximum is subtracted so that sup φ = 0.
inline ScalarField random_potential(const HermitianStructure& h, double amplitude, std::uint64_t seed,
                                    bool normalized = false, int bandlimit = kDefaultBandLimit)
{
    if (!(amplitude > 0.0)) throw InvalidArgument("potential amplitude must be positive");
    const auto& grid = h.grid();
    detail::require_bandlimit(grid, bandlimit);
    LinearRng rng(seed);
    const ScalarField shape = sample(random_real_expression(rng, bandlimit), grid);
    double amp = amplitude;
    ScalarField phi = amp * shape;
    for (int attempt = 0; attempt < kMaxHalvings && !check_positive(omega_phi(h, phi)).positive; ++attempt) {
        amp *= 0.5;
        phi = amp * shape;
    }
    if (normalized) phi = phi - extrema(phi).max;
    return phi;
}

inline constexpr double kGauduchonTolerance = 1e-8;
inline constexpr int kGauduchonMaxIterations = 500;

struct GauduchonResult {
    ScalarField u;  // real, ω_G = e^u ω
    ScalarField v;  // e^{2u}, mean one
    double osc_u = 0.0;
    double residual = 0.0;
    /// Same residual through del(delbar(.)); differs by the Nyquist content of v ω².
    double composed_residual = 0.0;
    int iterations = 0;
};

/// Real density of i∂∂̄(v ω²), i.e. its (3,3) coefficient times the volume factor.
inline ScalarField gauduchon_operator(const PQForm& omega_sq, const ScalarField& v)
{
    const PQForm top = cplx(0.0, 1.0) * del(delbar(v * omega_sq));
    return (kTopFormToVolume * top[0]).real_part();
}

namespace detail {

/// gauduchon_operator with the pure second derivatives ∂_j∂̄_j taken with the
/// full symbol -(k_x² + k_y²)/4, Nyquist included. Composing two first
/// derivatives drops the Nyquist modes and leaves a spurious kernel; this
/// discretization has only the continuum kernel, and agrees with
/// gauduchon_operator whenever v ω² has no Nyquist content.
inline ScalarField gauduchon_operator_full(const PQForm& omega_sq, const ScalarField& v)
{
    const auto& grid = omega_sq.grid();
    const auto size = grid->size();
    const int n = grid->n();
    std::vector<cplx> acc(size, 0.0);
    std::vector<cplx> spec(size);
    for (std::size_t c = 0; c < omega_sq.size(); ++c) {
        const auto [I, J] = omega_sq.indices_of(c);
        const unsigned bj = 7u & ~I;
        const unsigned bk = 7u & ~J;
        const int j = std::countr_zero(bj);
        const int k = std::countr_zero(bk);
        const double sign = merge_sign(bj, I) * merge_sign(bk, J);
        const ScalarField g = v * omega_sq[c];
        grid->forward(g.values().data(), spec.data());
        const auto xj = static_cast<std::size_t>(2 * j), yj = xj + 1;
        const auto xk = static_cast<std::size_t>(2 * k), yk = xk + 1;
        std::array<int, kRealAxes> idx{};
        for (std::size_t flat = 0; flat < size; ++flat) {
            cplx symbol;
            if (j == k) {
                const double kx = grid->wavenumber(idx[xj]);
                const double ky = grid->wavenumber(idx[yj]);
                symbol = -0.25 * (kx * kx + ky * ky);
            } else {
                const cplx dj = 0.5 * cplx(grid->derivative_wavenumber(idx[yj]), grid->derivative_wavenumber(idx[xj]));
                const cplx dk = 0.5 * cplx(-grid->derivative_wavenumber(idx[yk]), grid->derivative_wavenumber(idx[xk]));
                symbol = dj * dk;
            }
            acc[flat] += sign * symbol * spec[flat];
            for (int a = kRealAxes - 1; a >= 0; --a) {
                if (++idx[static_cast<std::size_t>(a)] < n) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
    }
    std::vector<cplx> out(size);
    grid->backward(acc.data(), out.data());
    const cplx factor = kTopFormToVolume * cplx(0.0, 1.0) / static_cast<double>(size);
    for (auto& x : out) x = (factor * x).real();
    return ScalarField(grid, std::move(out), true);
}

} // namespace detail

/// Finds v > 0 with mean 1 and ∂∂̄(v ω²) = 0, and returns u = ln(v) / 2.
///
/// Minimal-residual iteration on the mean-zero correction, preconditioned by
/// the inverse of the flat operator v -> i∂∂̄v ^ ω_flat², whose density is
/// 4Δv. Each step renormalizes to mean one. The residual is the sup of the
/// (3,3) coefficient of ∂∂̄(v ω²), full-symbol discretization, relative to
/// the sup of the coefficients of ω².
inline GauduchonResult gauduchon_solve(const HermitianStructure& h, double tolerance = kGauduchonTolerance,
                                       int max_iterations = kGauduchonMaxIterations)
{
    const auto& grid = h.grid();
    const PQForm omega_sq = wedge(h.omega, h.omega);
    const double scale = omega_sq.max_abs();

    auto precondition = [&](const ScalarField& r) {
        const int n = grid->n();
        std::vector<cplx> spec(grid->size());
        grid->forward(r.values().data(), spec.data());
        std::array<int, kRealAxes> idx{};
        for (auto& x : spec) {
            double k2 = 0.0;
            for (int i : idx) {
                const double k = grid->wavenumber(i);
                k2 += k * k;
            }
            x *= k2 == 0.0 ? 0.0 : -1.0 / (4.0 * k2);
            for (int a = kRealAxes - 1; a >= 0; --a) {
                if (++idx[static_cast<std::size_t>(a)] < n) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
        std::vector<cplx> out(grid->size());
        grid->backward(spec.data(), out.data());
        const double norm = 1.0 / static_cast<double>(grid->size());
        for (auto& x : out) x = x.real() * norm;
        return ScalarField(grid, std::move(out), true);
    };
    // density = -8i * coefficient, so |coefficient| = |density| / 8
    auto residual_of = [&](const ScalarField& density) {
        return density.max_abs() / std::abs(kTopFormToVolume) / scale;
    };
    auto inner = [](const ScalarField& a, const ScalarField& b) {
        std::vector<double> prod(a.size());
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a[i].real() * b[i].real();
        return detail::pairwise_sum(prod.data(), prod.size());
    };

    ScalarField v = ScalarField::constant(grid, 1.0);
    ScalarField density = detail::gauduchon_operator_full(omega_sq, v);
    double residual = residual_of(density);
    int it = 0;
    while (residual > tolerance) {
        if (it >= max_iterations) {
            throw SolverError("Gauduchon iteration did not converge, residual " + std::to_string(residual),
                              residual);
        }
        ++it;
        const ScalarField r = precondition(density);
        const ScalarField ar = precondition(detail::gauduchon_operator_full(omega_sq, r));
        const double denom = inner(ar, ar);
        const double tau = denom > 0.0 ? inner(ar, r) / denom : 1.0;
        v = v - tau * r;
        v = (1.0 / mean(v).real()) * v;
        if (extrema(v).min <= 0.0) throw IndefinitenessError("Gauduchon density became non-positive");
        density = detail::gauduchon_operator_full(omega_sq, v);
        residual = residual_of(density);
    }
    GauduchonResult out;
    out.u = v.map([](cplx x) { return 0.5 * std::log(x.real()); }, true);
    out.v = v;
    out.osc_u = extrema(out.u).oscillation();
    out.residual = residual;
    out.composed_residual = residual_of(gauduchon_operator(omega_sq, v));
    out.iterations = it;
    return out;
}

} // namespace threefold
