#pragma once

// (p,q)-forms on the 3-torus with dense coefficient storage.
//
// A form is sum_{I,J} f_{I,J} dz^I ^ dzbar^J over strictly increasing
// multi-indices I, J of {0,1,2}, always written with the dz factors first.
// Multi-indices are stored as bitmasks; the components of a (p,q)-form are
// ordered lexicographically by (I, J).

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "threefold/grid.hpp"

namespace threefold {

namespace detail {

/// Bitmasks of the increasing multi-indices of size p, in lexicographic order.
/// Sizes above 3 have no elements, so forms of degree above 3 are empty.
inline const std::vector<unsigned>& multi_indices(int p)
{
    static const std::array<std::vector<unsigned>, 5> table = {
        std::vector<unsigned>{0u},
        std::vector<unsigned>{0b001u, 0b010u, 0b100u},
        std::vector<unsigned>{0b011u, 0b101u, 0b110u},
        std::vector<unsigned>{0b111u},
        std::vector<unsigned>{},
    };
    if (p < 0) throw DegreeError("negative form degree " + std::to_string(p));
    return table[static_cast<std::size_t>(std::min(p, 4))];
}

inline int position_of(unsigned mask, int p)
{
    const auto& list = multi_indices(p);
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i] == mask) return static_cast<int>(i);
    }
    return -1;
}

/// Sign of the permutation sorting the concatenation of ascending A then ascending B.
inline int merge_sign(unsigned a, unsigned b)
{
    int inversions = 0;
    for (int i = 0; i < kComplexDim; ++i) {
        if (!(a & (1u << i))) continue;
        // elements of b smaller than i must jump over i
        inversions += std::popcount(b & ((1u << i) - 1u));
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

} // namespace detail

class PQForm {
public:
    PQForm() = default;

    /// Coefficients in canonical component order; see component_index().
    PQForm(int p, int q, GridPtr grid, std::vector<ScalarField> coeffs)
        : p_(p), q_(q), grid_(std::move(grid)), coeffs_(std::move(coeffs))
    {
        if (p < 0 || q < 0) throw DegreeError("negative form degree");
        if (coeffs_.size() != component_count(p, q)) {
            throw ShapeError("a (" + std::to_string(p) + "," + std::to_string(q) + ")-form needs " +
                             std::to_string(component_count(p, q)) + " components, got " +
                             std::to_string(coeffs_.size()));
        }
        for (const auto& c : coeffs_) {
            if (c.grid() != grid_) throw ShapeError("form components live on different grids");
        }
    }

    static std::size_t component_count(int p, int q)
    {
        return detail::multi_indices(p).size() * detail::multi_indices(q).size();
    }

    static PQForm zero(const GridPtr& grid, int p, int q)
    {
        std::vector<ScalarField> c(component_count(p, q), ScalarField::zeros(grid));
        return PQForm(p, q, grid, std::move(c));
    }

    /// A function viewed as a (0,0)-form.
    static PQForm function(const ScalarField& f) { return PQForm(0, 0, f.grid(), {f}); }

    /// f dz^I ^ dzbar^J for explicit index lists (any order, sign applied).
    static PQForm monomial(const ScalarField& f, std::vector<int> holo, std::vector<int> anti)
    {
        const auto& grid = f.grid();
        unsigned I = 0, J = 0;
        int sign = 1;
        for (int j : holo) {
            if (I & (1u << j)) return zero(grid, static_cast<int>(holo.size()), static_cast<int>(anti.size()));
            sign *= detail::merge_sign(I, 1u << j);
            I |= 1u << j;
        }
        for (int j : anti) {
            if (J & (1u << j)) return zero(grid, static_cast<int>(holo.size()), static_cast<int>(anti.size()));
            sign *= detail::merge_sign(J, 1u << j);
            J |= 1u << j;
        }
        auto out = zero(grid, static_cast<int>(holo.size()), static_cast<int>(anti.size()));
        out.coeffs_[out.component_index(I, J)] = static_cast<double>(sign) * f;
        return out;
    }

    int p() const noexcept { return p_; }
    int q() const noexcept { return q_; }
    int degree() const noexcept { return p_ + q_; }
    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    std::size_t component_index(unsigned I, unsigned J) const
    {
        const int pi = detail::position_of(I, p_);
        const int pj = detail::position_of(J, q_);
        if (pi < 0 || pj < 0) throw InvalidArgument("multi-index does not match form degree");
        return static_cast<std::size_t>(pi) * detail::multi_indices(q_).size() +
               static_cast<std::size_t>(pj);
    }

    /// Coefficient of dz^I ^ dzbar^J, with I and J as bitmasks.
    const ScalarField& component(unsigned I, unsigned J) const { return coeffs_[component_index(I, J)]; }
    const ScalarField& operator[](std::size_t i) const { return coeffs_[i]; }
    const std::vector<ScalarField>& components() const noexcept { return coeffs_; }

    /// Bitmasks (I, J) of component i.
    std::pair<unsigned, unsigned> indices_of(std::size_t i) const
    {
        const auto& qs = detail::multi_indices(q_);
        return {detail::multi_indices(p_)[i / qs.size()], qs[i % qs.size()]};
    }

    /// Largest |coefficient| over all components and points.
    double max_abs() const
    {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, c.max_abs());
        return m;
    }

private:
    int p_ = 0;
    int q_ = 0;
    GridPtr grid_;
    std::vector<ScalarField> coeffs_;
};

namespace detail {

inline void require_same_shape(const PQForm& a, const PQForm& b)
{
    if (a.grid() != b.grid()) throw ShapeError("forms live on different grids");
    if (a.p() != b.p() || a.q() != b.q()) {
        throw ShapeError("form types differ: (" + std::to_string(a.p()) + "," + std::to_string(a.q()) +
                         ") vs (" + std::to_string(b.p()) + "," + std::to_string(b.q()) + ")");
    }
}

struct WedgeEntry {
    std::size_t a;
    std::size_t b;
    std::size_t out;
    double sign;
};

inline std::vector<WedgeEntry> wedge_table(int pa, int qa, int pb, int qb)
{
    const auto& Ia = multi_indices(pa);
    const auto& Ja = multi_indices(qa);
    const auto& Ib = multi_indices(pb);
    const auto& Jb = multi_indices(qb);
    const auto& Jo = multi_indices(qa + qb);
    std::vector<WedgeEntry> table;
    for (std::size_t ia = 0; ia < Ia.size(); ++ia) {
        for (std::size_t ja = 0; ja < Ja.size(); ++ja) {
            for (std::size_t ib = 0; ib < Ib.size(); ++ib) {
                if (Ia[ia] & Ib[ib]) continue;
                for (std::size_t jb = 0; jb < Jb.size(); ++jb) {
                    if (Ja[ja] & Jb[jb]) continue;
                    // dz^Ia dzb^Ja dz^Ib dzb^Jb -> dz^(Ia Ib) dzb^(Ja Jb)
                    int sign = ((qa * pb) % 2 == 0) ? 1 : -1;
                    sign *= merge_sign(Ia[ia], Ib[ib]) * merge_sign(Ja[ja], Jb[jb]);
                    const auto pi = static_cast<std::size_t>(position_of(Ia[ia] | Ib[ib], pa + pb));
                    const auto pj = static_cast<std::size_t>(position_of(Ja[ja] | Jb[jb], qa + qb));
                    table.push_back({ia * Ja.size() + ja, ib * Jb.size() + jb, pi * Jo.size() + pj,
                                     static_cast<double>(sign)});
                }
            }
        }
    }
    return table;
}

} // namespace detail

/// Exterior product. Graded commutative: a^b = (-1)^{deg a deg b} b^a.
inline PQForm wedge(const PQForm& a, const PQForm& b)
{
    if (a.grid() != b.grid()) throw ShapeError("forms live on different grids");
    const int p = a.p() + b.p();
    const int q = a.q() + b.q();
    if (p > 3 || q > 3) {
        throw DegreeError("wedge of (" + std::to_string(a.p()) + "," + std::to_string(a.q()) + ") and (" +
                          std::to_string(b.p()) + "," + std::to_string(b.q()) + ") overflows degree 3");
    }
    const auto table = detail::wedge_table(a.p(), a.q(), b.p(), b.q());
    const auto ncomp = PQForm::component_count(p, q);
    const auto npts = a.grid()->size();

    std::vector<const cplx*> pa(a.size()), pb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] = a[i].values().data();
    for (std::size_t i = 0; i < b.size(); ++i) pb[i] = b[i].values().data();

    std::vector<std::vector<cplx>> out(ncomp, std::vector<cplx>(npts, 0.0));
    constexpr std::size_t kChunk = 512;
    for (std::size_t start = 0; start < npts; start += kChunk) {
        const std::size_t stop = std::min(npts, start + kChunk);
        for (const auto& e : table) {
            const cplx* x = pa[e.a];
            const cplx* y = pb[e.b];
            cplx* o = out[e.out].data();
            if (e.sign > 0) {
                for (std::size_t i = start; i < stop; ++i) o[i] += x[i] * y[i];
            } else {
                for (std::size_t i = start; i < stop; ++i) o[i] -= x[i] * y[i];
            }
        }
    }
    std::vector<ScalarField> coeffs;
    coeffs.reserve(ncomp);
    for (auto& v : out) coeffs.emplace_back(a.grid(), std::move(v));
    return PQForm(p, q, a.grid(), std::move(coeffs));
}

template <typename... Rest>
PQForm wedge(const PQForm& a, const PQForm& b, const PQForm& c, const Rest&... rest)
{
    return wedge(wedge(a, b), c, rest...);
}

/// Complex conjugate: conj(f dz^I ^ dzbar^J) = (-1)^{pq} conj(f) dz^J ^ dzbar^I.
inline PQForm conj(const PQForm& a)
{
    const int p = a.q();
    const int q = a.p();
    const double sign = ((a.p() * a.q()) % 2 == 0) ? 1.0 : -1.0;
    std::vector<ScalarField> coeffs(PQForm::component_count(p, q));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [I, J] = a.indices_of(i);
        const auto& qs = detail::multi_indices(q);
        const auto pos = static_cast<std::size_t>(detail::position_of(J, p)) * qs.size() +
                         static_cast<std::size_t>(detail::position_of(I, q));
        coeffs[pos] = sign * a[i].conjugate();
    }
    return PQForm(p, q, a.grid(), std::move(coeffs));
}

inline PQForm add(const PQForm& a, const PQForm& b)
{
    detail::require_same_shape(a, b);
    std::vector<ScalarField> coeffs;
    coeffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) coeffs.push_back(a[i] + b[i]);
    return PQForm(a.p(), a.q(), a.grid(), std::move(coeffs));
}

inline PQForm scale(cplx c, const PQForm& a)
{
    std::vector<ScalarField> coeffs;
    coeffs.reserve(a.size());
    for (const auto& f : a.components()) coeffs.push_back(c * f);
    return PQForm(a.p(), a.q(), a.grid(), std::move(coeffs));
}

inline PQForm subtract(const PQForm& a, const PQForm& b)
{
    detail::require_same_shape(a, b);
    std::vector<ScalarField> coeffs;
    coeffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) coeffs.push_back(a[i] - b[i]);
    return PQForm(a.p(), a.q(), a.grid(), std::move(coeffs));
}

/// Multiplication by a function.
inline PQForm scalar_mul(const ScalarField& f, const PQForm& a)
{
    if (f.grid() != a.grid()) throw ShapeError("function and form live on different grids");
    std::vector<ScalarField> coeffs;
    coeffs.reserve(a.size());
    for (const auto& c : a.components()) coeffs.push_back(f * c);
    return PQForm(a.p(), a.q(), a.grid(), std::move(coeffs));
}

inline PQForm operator+(const PQForm& a, const PQForm& b) { return add(a, b); }
inline PQForm operator-(const PQForm& a, const PQForm& b) { return subtract(a, b); }
inline PQForm operator*(cplx c, const PQForm& a) { return scale(c, a); }
inline PQForm operator*(double c, const PQForm& a) { return scale(c, a); }
inline PQForm operator*(const ScalarField& f, const PQForm& a) { return scalar_mul(f, a); }

/// Largest pointwise coefficient difference between two forms of one type.
inline double max_difference(const PQForm& a, const PQForm& b) { return subtract(a, b).max_abs(); }

/// i * sum_j dz_j ^ dzbar_j.
inline PQForm flat_kahler_form(const GridPtr& grid)
{
    auto out = std::vector<ScalarField>(9, ScalarField::zeros(grid));
    for (int j = 0; j < kComplexDim; ++j) {
        out[static_cast<std::size_t>(j * 3 + j)] = ScalarField::constant(grid, cplx(0.0, 1.0));
    }
    return PQForm(1, 1, grid, std::move(out));
}

} // namespace threefold
