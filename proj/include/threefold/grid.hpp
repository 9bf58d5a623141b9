#pragma once

// Periodic grid on the flat complex 3-torus C^3 / (2πZ + 2πiZ)^3 and spectral
// calculus for complex scalar fields sampled on it.
//
// Real axes are ordered (x1, y1, x2, y2, x3, y3) with z_j = x_j + i y_j; the
// flat index of a point is row-major with y3 fastest. Complex directions are
// numbered 0, 1, 2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "threefold/errors.hpp"

namespace threefold {

using cplx = std::complex<double>;

inline constexpr int kRealAxes = 6;
inline constexpr int kComplexDim = 3;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Absolute tolerance on |Im| for fields flagged as real.
inline constexpr double kRealityTolerance = 1e-10;

namespace detail {

// FFTW planning is not thread-safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

// Deterministic pairwise summation; base blocks are summed left to right.
template <typename T>
T pairwise_sum(const T* data, std::size_t count)
{
    constexpr std::size_t kBlock = 128;
    if (count <= kBlock) {
        T acc{};
        for (std::size_t i = 0; i < count; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

} // namespace detail

class TorusGrid {
public:
    explicit TorusGrid(int n) : n_(n)
    {
        if (n % 2 != 0 || n < 4 || n > 64) {
            throw InvalidArgument("grid size must be an even integer in [4, 64], got " +
                                  std::to_string(n));
        }
        size_ = 1;
        for (int a = 0; a < kRealAxes; ++a) size_ *= static_cast<std::size_t>(n);

        wavenumber_.resize(static_cast<std::size_t>(n));
        derivative_wavenumber_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int k = (i <= n / 2) ? i : i - n;
            wavenumber_[static_cast<std::size_t>(i)] = k;
            derivative_wavenumber_[static_cast<std::size_t>(i)] = (k == n / 2) ? 0 : k;
        }

        std::array<int, kRealAxes> dims;
        dims.fill(n);
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* in = fftw_alloc_complex(size_);
        auto* out = fftw_alloc_complex(size_);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft(kRealAxes, dims.data(), in, out, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft(kRealAxes, dims.data(), in, out, FFTW_BACKWARD, flags);
        fftw_free(in);
        fftw_free(out);
    }

    TorusGrid(const TorusGrid&) = delete;
    TorusGrid& operator=(const TorusGrid&) = delete;

    ~TorusGrid()
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }

    /// Largest |k| per axis a sampled expression may carry.
    int band_limit() const noexcept { return n_ / 2 - 1; }

    /// Signed frequency of FFT bin i, in {-n/2+1, ..., n/2}.
    int wavenumber(int i) const { return wavenumber_[static_cast<std::size_t>(i)]; }

    /// Frequency used for differentiation; the Nyquist bin maps to 0.
    int derivative_wavenumber(int i) const
    {
        return derivative_wavenumber_[static_cast<std::size_t>(i)];
    }

    double coordinate(int i) const { return kTwoPi * i / n_; }

    std::array<int, kRealAxes> unravel(std::size_t flat) const
    {
        std::array<int, kRealAxes> idx{};
        for (int a = kRealAxes - 1; a >= 0; --a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
            flat /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    /// Unnormalized forward DFT (exp(-ikx) convention).
    void forward(const cplx* in, cplx* out) const
    {
        fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    /// Unnormalized backward DFT; forward followed by backward scales by size().
    void backward(const cplx* in, cplx* out) const
    {
        fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

private:
    int n_;
    std::size_t size_;
    std::vector<int> wavenumber_;
    std::vector<int> derivative_wavenumber_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

using GridPtr = std::shared_ptr<const TorusGrid>;

inline GridPtr make_grid(int n) { return std::make_shared<const TorusGrid>(n); }

/// Complex-valued samples on a TorusGrid. Immutable once constructed.
class ScalarField {
public:
    ScalarField() = default;

    ScalarField(GridPtr grid, std::vector<cplx> values, bool reality_hint = false)
        : grid_(std::move(grid)), values_(std::move(values)), reality_hint_(reality_hint)
    {
        if (!grid_) throw InvalidArgument("scalar field requires a grid");
        if (values_.size() != grid_->size()) {
            throw ShapeError("scalar field has " + std::to_string(values_.size()) +
                             " samples, grid expects " + std::to_string(grid_->size()));
        }
        if (reality_hint_) {
            for (const auto& v : values_) {
                if (std::abs(v.imag()) > kRealityTolerance) {
                    throw NotRealError("field flagged real has imaginary part " +
                                       std::to_string(v.imag()));
                }
            }
        }
    }

    static ScalarField constant(GridPtr grid, cplx c)
    {
        const auto size = grid->size();
        return ScalarField(std::move(grid), std::vector<cplx>(size, c), c.imag() == 0.0);
    }

    static ScalarField zeros(GridPtr grid) { return constant(std::move(grid), 0.0); }

    /// Pointwise evaluation of f(coords) with coords the 6 real coordinates.
    template <typename F>
    static ScalarField from_function(GridPtr grid, F&& f, bool reality_hint = false)
    {
        const int n = grid->n();
        std::vector<cplx> values(grid->size());
        std::array<double, kRealAxes> x{};
        for (std::size_t flat = 0; flat < values.size(); ++flat) {
            const auto idx = grid->unravel(flat);
            for (int a = 0; a < kRealAxes; ++a) {
                x[static_cast<std::size_t>(a)] = kTwoPi * idx[static_cast<std::size_t>(a)] / n;
            }
            values[flat] = cplx(f(x));
        }
        return ScalarField(std::move(grid), std::move(values), reality_hint);
    }

    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const cplx> values() const noexcept { return values_; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }
    bool reality_hint() const noexcept { return reality_hint_; }

    /// max |Im f| over the grid.
    double max_imag() const
    {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Drops the imaginary part and flags the result as real.
    ScalarField real_part() const
    {
        std::vector<cplx> out(values_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i].real();
        return ScalarField(grid_, std::move(out), true);
    }

    ScalarField conjugate() const
    {
        std::vector<cplx> out(values_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(values_[i]);
        return ScalarField(grid_, std::move(out), reality_hint_);
    }

    template <typename F>
    ScalarField map(F&& f, bool reality_hint = false) const
    {
        std::vector<cplx> out(values_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = cplx(f(values_[i]));
        return ScalarField(grid_, std::move(out), reality_hint);
    }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b)
    {
        return combine(a, b, [](cplx x, cplx y) { return x + y; }, a.reality_hint_ && b.reality_hint_);
    }
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b)
    {
        return combine(a, b, [](cplx x, cplx y) { return x - y; }, a.reality_hint_ && b.reality_hint_);
    }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b)
    {
        return combine(a, b, [](cplx x, cplx y) { return x * y; }, a.reality_hint_ && b.reality_hint_);
    }
    friend ScalarField operator*(cplx c, const ScalarField& a)
    {
        return a.map([c](cplx x) { return c * x; }, a.reality_hint_ && c.imag() == 0.0);
    }
    friend ScalarField operator*(double c, const ScalarField& a) { return cplx(c) * a; }
    friend ScalarField operator+(const ScalarField& a, double c)
    {
        return a.map([c](cplx x) { return x + c; }, a.reality_hint_);
    }
    friend ScalarField operator-(const ScalarField& a, double c) { return a + (-c); }
    ScalarField operator-() const { return -1.0 * *this; }

private:
    template <typename Op>
    static ScalarField combine(const ScalarField& a, const ScalarField& b, Op op, bool real)
    {
        if (a.grid_ != b.grid_) throw ShapeError("scalar fields live on different grids");
        std::vector<cplx> out(a.values_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a.values_[i], b.values_[i]);
        return ScalarField(a.grid_, std::move(out), real);
    }

    GridPtr grid_;
    std::vector<cplx> values_;
    bool reality_hint_ = false;
};

/// One term c * exp(i <k, x>) of a trigonometric polynomial.
struct TrigTerm {
    cplx coeff;
    std::array<int, kRealAxes> k;
};

/// Finite sum of Fourier modes in the six real coordinates.
class TrigPolynomial {
public:
    TrigPolynomial() = default;
    explicit TrigPolynomial(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}

    static TrigPolynomial constant(cplx c) { return TrigPolynomial({{c, {}}}); }

    static TrigPolynomial exp_i(std::array<int, kRealAxes> k, cplx amplitude = 1.0)
    {
        return TrigPolynomial({{amplitude, k}});
    }

    /// amplitude * cos(<k, x>)
    static TrigPolynomial cos(std::array<int, kRealAxes> k, double amplitude = 1.0)
    {
        return TrigPolynomial({{0.5 * amplitude, k}, {0.5 * amplitude, negate(k)}});
    }

    /// amplitude * sin(<k, x>)
    static TrigPolynomial sin(std::array<int, kRealAxes> k, double amplitude = 1.0)
    {
        const cplx c(0.0, -0.5 * amplitude);
        return TrigPolynomial({{c, k}, {-c, negate(k)}});
    }

    /// Unit frequency vector along real axis `axis` (0..5), scaled by `m`.
    static std::array<int, kRealAxes> axis_frequency(int axis, int m = 1)
    {
        std::array<int, kRealAxes> k{};
        k[static_cast<std::size_t>(axis)] = m;
        return k;
    }

    const std::vector<TrigTerm>& terms() const noexcept { return terms_; }

    int max_frequency() const
    {
        int m = 0;
        for (const auto& t : terms_) {
            for (int k : t.k) m = std::max(m, std::abs(k));
        }
        return m;
    }

    /// True when the coefficients are conjugate-symmetric (c_{-k} = conj(c_k)).
    bool is_real(double tol = 1e-14) const
    {
        std::vector<TrigTerm> merged;
        for (const auto& t : terms_) {
            auto it = std::find_if(merged.begin(), merged.end(),
                                   [&](const TrigTerm& m) { return m.k == t.k; });
            if (it == merged.end()) merged.push_back(t);
            else it->coeff += t.coeff;
        }
        for (const auto& t : merged) {
            const auto nk = negate(t.k);
            cplx partner = 0.0;
            for (const auto& m : merged) {
                if (m.k == nk) partner += m.coeff;
            }
            if (std::abs(partner - std::conj(t.coeff)) > tol) return false;
        }
        return true;
    }

    cplx evaluate(const std::array<double, kRealAxes>& x) const
    {
        cplx acc = 0.0;
        for (const auto& t : terms_) {
            double phase = 0.0;
            for (int a = 0; a < kRealAxes; ++a) {
                phase += t.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
            }
            acc += t.coeff * std::polar(1.0, phase);
        }
        return acc;
    }

    friend TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b)
    {
        a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
        return a;
    }

    friend TrigPolynomial operator*(cplx c, TrigPolynomial a)
    {
        for (auto& t : a.terms_) t.coeff *= c;
        return a;
    }

    friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b)
    {
        std::vector<TrigTerm> out;
        out.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& s : a.terms_) {
            for (const auto& t : b.terms_) {
                TrigTerm p{s.coeff * t.coeff, {}};
                for (std::size_t i = 0; i < p.k.size(); ++i) p.k[i] = s.k[i] + t.k[i];
                out.push_back(p);
            }
        }
        return TrigPolynomial(std::move(out));
    }

private:
    static std::array<int, kRealAxes> negate(std::array<int, kRealAxes> k)
    {
        for (auto& v : k) v = -v;
        return k;
    }

    std::vector<TrigTerm> terms_;
};

/// Pointwise evaluation of a band-limited trigonometric polynomial.
inline ScalarField sample(const TrigPolynomial& expr, const GridPtr& grid)
{
    if (expr.max_frequency() > grid->band_limit()) {
        throw AliasingError("expression frequency " + std::to_string(expr.max_frequency()) +
                            " exceeds grid band limit " + std::to_string(grid->band_limit()));
    }
    const int n = grid->n();
    const auto un = static_cast<std::size_t>(n);
    std::vector<cplx> values(grid->size(), 0.0);
    // Separable evaluation: exp(i<k,x>) is a product of per-axis phase tables.
    std::vector<cplx> partial(grid->size());
    for (const auto& term : expr.terms()) {
        std::array<std::vector<cplx>, kRealAxes> phase;
        for (int a = 0; a < kRealAxes; ++a) {
            auto& tab = phase[static_cast<std::size_t>(a)];
            tab.resize(un);
            for (int i = 0; i < n; ++i) {
                const long m = (static_cast<long>(term.k[static_cast<std::size_t>(a)]) * i) % n;
                tab[static_cast<std::size_t>(i)] = std::polar(1.0, kTwoPi * static_cast<double>(m) / n);
            }
        }
        std::size_t flat = 0;
        for (std::size_t i0 = 0; i0 < un; ++i0) {
            const cplx p0 = term.coeff * phase[0][i0];
            for (std::size_t i1 = 0; i1 < un; ++i1) {
                const cplx p1 = p0 * phase[1][i1];
                for (std::size_t i2 = 0; i2 < un; ++i2) {
                    const cplx p2 = p1 * phase[2][i2];
                    for (std::size_t i3 = 0; i3 < un; ++i3) {
                        const cplx p3 = p2 * phase[3][i3];
                        for (std::size_t i4 = 0; i4 < un; ++i4) {
                            const cplx p4 = p3 * phase[4][i4];
                            for (std::size_t i5 = 0; i5 < un; ++i5) {
                                values[flat++] += p4 * phase[5][i5];
                            }
                        }
                    }
                }
            }
        }
    }
    const bool real = expr.is_real();
    if (real) {
        for (auto& v : values) v = v.real();
    }
    return ScalarField(grid, std::move(values), real);
}

/// Fourier transform of a field, reused for several derivatives.
class Spectrum {
public:
    explicit Spectrum(const ScalarField& f) : grid_(f.grid()), coeffs_(f.size())
    {
        grid_->forward(f.values().data(), coeffs_.data());
    }

    /// d/dz_j = (d/dx_j - i d/dy_j) / 2.
    ScalarField dz(int j) const { return apply(j, false); }

    /// d/dzbar_j = (d/dx_j + i d/dy_j) / 2.
    ScalarField dzbar(int j) const { return apply(j, true); }

    /// Derivative along one real axis (0..5).
    ScalarField d_real(int axis) const
    {
        return transform([&](const std::array<int, kRealAxes>& k) {
            return cplx(0.0, k[static_cast<std::size_t>(axis)]);
        });
    }

    /// Applies an arbitrary Fourier multiplier m(k) with k the derivative wavenumbers.
    template <typename Symbol>
    ScalarField transform(Symbol&& symbol) const
    {
        const auto size = grid_->size();
        const int n = grid_->n();
        std::vector<cplx> buf(size);
        std::array<int, kRealAxes> idx{};
        std::array<int, kRealAxes> k{};
        for (auto& v : k) v = grid_->derivative_wavenumber(0);
        for (std::size_t flat = 0; flat < size; ++flat) {
            buf[flat] = coeffs_[flat] * symbol(k);
            // odometer over the row-major index, last axis fastest
            for (int a = kRealAxes - 1; a >= 0; --a) {
                const auto ua = static_cast<std::size_t>(a);
                if (++idx[ua] < n) {
                    k[ua] = grid_->derivative_wavenumber(idx[ua]);
                    break;
                }
                idx[ua] = 0;
                k[ua] = grid_->derivative_wavenumber(0);
            }
        }
        std::vector<cplx> out(size);
        grid_->backward(buf.data(), out.data());
        const double scale = 1.0 / static_cast<double>(size);
        for (auto& v : out) v *= scale;
        return ScalarField(grid_, std::move(out));
    }

    std::span<const cplx> coefficients() const noexcept { return coeffs_; }

private:
    ScalarField apply(int j, bool bar) const
    {
        if (j < 0 || j >= kComplexDim) throw InvalidArgument("complex direction must be 0, 1 or 2");
        const auto ax = static_cast<std::size_t>(2 * j);
        const auto ay = ax + 1;
        const double sign = bar ? -1.0 : 1.0;
        return transform([&](const std::array<int, kRealAxes>& k) {
            return 0.5 * cplx(sign * k[ay], k[ax]);
        });
    }

    GridPtr grid_;
    std::vector<cplx> coeffs_;
};

inline ScalarField partial_z(const ScalarField& f, int j) { return Spectrum(f).dz(j); }
inline ScalarField partial_zbar(const ScalarField& f, int j) { return Spectrum(f).dzbar(j); }

/// Grid average; equals the continuum mean for band-limited data.
inline cplx mean(const ScalarField& f)
{
    const auto vals = f.values();
    return detail::pairwise_sum(vals.data(), vals.size()) / static_cast<double>(vals.size());
}

struct Extrema {
    double min;
    double max;
    double oscillation() const noexcept { return max - min; }
};

/// Grid min/max of a real field. A lower bound for the continuum sup - inf.
inline Extrema extrema(const ScalarField& f)
{
    if (!f.reality_hint()) throw PreconditionViolation("extrema requires a field flagged real");
    Extrema e{f[0].real(), f[0].real()};
    for (const auto& v : f.values()) {
        e.min = std::min(e.min, v.real());
        e.max = std::max(e.max, v.real());
    }
    return e;
}

} // namespace threefold
