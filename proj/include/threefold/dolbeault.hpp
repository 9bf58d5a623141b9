#pragma once

// Dolbeault operators, integration of top-degree forms, and positivity of
// real (1,1)-forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "threefold/forms.hpp"

namespace threefold {

/// Pointwise eigenvalue below which a (1,1)-form does not count as positive.
inline constexpr double kPositivityFloor = 1e-8;

/// dz1^dz2^dz3^dzb1^dzb2^dzb3 = kTopFormToVolume * dx1^dy1^dx2^dy2^dx3^dy3.
/// Each dz^dzb = -2i dx^dy and restoring the interleaved order costs a sign.
inline constexpr cplx kTopFormToVolume{0.0, -8.0};

/// Volume of the real 6-torus [0, 2π)^6.
inline double torus_volume() { return std::pow(kTwoPi, 6); }

namespace detail {

template <bool Holomorphic>
PQForm dolbeault(const PQForm& a)
{
    const int p = a.p() + (Holomorphic ? 1 : 0);
    const int q = a.q() + (Holomorphic ? 0 : 1);
    const auto& grid = a.grid();
    if (p > 3 || q > 3) return PQForm::zero(grid, p, q);

    const auto ncomp = PQForm::component_count(p, q);
    const auto npts = grid->size();
    std::vector<std::vector<cplx>> acc(ncomp, std::vector<cplx>(npts, 0.0));
    const auto& qs = multi_indices(q);

    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [I, J] = a.indices_of(i);
        const Spectrum spec(a[i]);
        for (int j = 0; j < kComplexDim; ++j) {
            const unsigned bit = 1u << j;
            unsigned I2 = I, J2 = J;
            double sign = 1.0;
            if constexpr (Holomorphic) {
                if (I & bit) continue;
                sign = merge_sign(bit, I);
                I2 |= bit;
            } else {
                if (J & bit) continue;
                // dzb^j ^ dz^I = (-1)^p dz^I ^ dzb^j
                sign = ((a.p() % 2 == 0) ? 1.0 : -1.0) * merge_sign(bit, J);
                J2 |= bit;
            }
            const auto out = static_cast<std::size_t>(position_of(I2, p)) * qs.size() +
                             static_cast<std::size_t>(position_of(J2, q));
            const auto d = Holomorphic ? spec.dz(j) : spec.dzbar(j);
            auto& dst = acc[out];
            const auto src = d.values();
            for (std::size_t x = 0; x < npts; ++x) dst[x] += sign * src[x];
        }
    }
    std::vector<ScalarField> coeffs;
    coeffs.reserve(ncomp);
    for (auto& v : acc) coeffs.emplace_back(grid, std::move(v));
    return PQForm(p, q, grid, std::move(coeffs));
}

} // namespace detail

/// ∂ on forms. A (3,q) input yields the (empty) zero (4,q)-form.
inline PQForm del(const PQForm& a) { return detail::dolbeault<true>(a); }

/// ∂̄ on forms. A (p,3) input yields the (empty) zero (p,4)-form.
inline PQForm delbar(const PQForm& a) { return detail::dolbeault<false>(a); }

inline PQForm del(const ScalarField& f) { return del(PQForm::function(f)); }
inline PQForm delbar(const ScalarField& f) { return delbar(PQForm::function(f)); }

/// ∫_X a for a (3,3)-form a.
inline cplx integrate_top(const PQForm& a)
{
    if (a.p() != 3 || a.q() != 3) {
        throw DegreeError("integrate_top needs a (3,3)-form, got (" + std::to_string(a.p()) + "," +
                          std::to_string(a.q()) + ")");
    }
    return kTopFormToVolume * mean(a[0]) * torus_volume();
}

/// Eigenvalues of a 3x3 Hermitian matrix (row-major), ascending.
/// Closed-form trigonometric solution of the characteristic cubic.
inline std::array<double, 3> hermitian_eigenvalues(const std::array<cplx, 9>& m)
{
    const double a00 = m[0].real(), a11 = m[4].real(), a22 = m[8].real();
    const cplx a01 = m[1], a02 = m[2], a12 = m[5];
    const double off = std::norm(a01) + std::norm(a02) + std::norm(a12);
    const double q = (a00 + a11 + a22) / 3.0;
    if (off == 0.0) {
        std::array<double, 3> e{a00, a11, a22};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
    const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off;
    const double p = std::sqrt(p2 / 6.0);
    // det(A - qI) for Hermitian A; the imaginary parts cancel.
    const double det = b00 * b11 * b22 + 2.0 * (a01 * a12 * std::conj(a02)).real() -
                       b00 * std::norm(a12) - b11 * std::norm(a02) - b22 * std::norm(a01);
    const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double largest = q + 2.0 * p * std::cos(phi);
    const double smallest = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double middle = 3.0 * q - largest - smallest;
    return {smallest, middle, largest};
}

/// The matrix h with omega = i h_{jk} dz_j ^ dzb_k at one grid point.
inline std::array<cplx, 9> hermitian_matrix_at(const PQForm& omega, std::size_t point)
{
    std::array<cplx, 9> h{};
    for (std::size_t c = 0; c < 9; ++c) h[c] = cplx(0.0, -1.0) * omega[c][point];
    return h;
}

/// Largest coefficient difference between a form and its conjugate.
inline double reality_defect(const PQForm& a) { return max_difference(conj(a), a); }

struct PositivityReport {
    bool positive;
    double min_eigenvalue;
};

/// Pointwise eigen-decomposition of a real (1,1)-form's coefficient matrix.
inline PositivityReport check_positive(const PQForm& omega, double floor = kPositivityFloor)
{
    if (omega.p() != 1 || omega.q() != 1) throw DegreeError("positivity needs a (1,1)-form");
    const double defect = reality_defect(omega);
    if (defect > kRealityTolerance) {
        throw NotRealError("(1,1)-form is not real, conjugation defect " + std::to_string(defect));
    }
    double lo = std::numeric_limits<double>::infinity();
    const auto npts = omega.grid()->size();
    for (std::size_t x = 0; x < npts; ++x) {
        lo = std::min(lo, hermitian_eigenvalues(hermitian_matrix_at(omega, x))[0]);
    }
    return {lo > floor, lo};
}

/// A positive real (1,1)-form with its derivatives and volume cached.
struct HermitianStructure {
    PQForm omega;
    PQForm d_omega;     // ∂ω, (2,1)
    PQForm dbar_omega;  // ∂̄ω, (1,2)
    PQForm ddbar_omega; // ∂∂̄ω, (2,2)
    double volume = 0.0;
    double volume_imag = 0.0;

    const GridPtr& grid() const { return omega.grid(); }
};

inline HermitianStructure make_hermitian(const PQForm& omega, double floor = kPositivityFloor)
{
    const auto pos = check_positive(omega, floor);
    if (!pos.positive) {
        throw NotPositiveError("(1,1)-form is not positive, min eigenvalue " +
                               std::to_string(pos.min_eigenvalue));
    }
    HermitianStructure h;
    h.omega = omega;
    h.d_omega = del(omega);
    h.dbar_omega = delbar(omega);
    h.ddbar_omega = del(h.dbar_omega);
    const cplx v = integrate_top(wedge(omega, omega, omega));
    h.volume = v.real();
    h.volume_imag = v.imag();
    if (!(h.volume > 0.0) || std::abs(v.imag()) > 1e-10 * std::abs(v.real())) {
        throw NotPositiveError("volume is not a positive real number");
    }
    return h;
}

/// i ∂∂̄φ as a (1,1)-form.
inline PQForm i_ddbar(const ScalarField& phi) { return cplx(0.0, 1.0) * del(delbar(phi)); }

/// ω_φ = ω + i ∂∂̄φ.
inline PQForm omega_phi(const HermitianStructure& h, const ScalarField& phi)
{
    return h.omega + i_ddbar(phi);
}

} // namespace threefold
