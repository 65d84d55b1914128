#pragma once

#include <cassert>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lindstedt/errors.hpp"
#include "lindstedt/model.hpp"
#include "lindstedt/mode.hpp"

namespace lindstedt {

// Truncated double series: sum_k eps^k sum_nu e^{i nu.psi} coeff(k,nu),
// with vector values of fixed dimension. Sparse over (k, nu); a missing
// entry is zero, and the missing Taylor-order-0 slot of a displacement
// series is zero by convention.
template <class R>
struct SeriesT {
    using C = std::complex<R>;
    using Vec = std::vector<C>;

    int r = 0;     // number of angle variables in nu
    int dim = 0;   // value dimension
    int kmax = 0;  // highest retained Taylor order
    // Support bound |nu|_1 <= bound_slope*k + bound_offset; slope < 0 disables the check.
    int bound_slope = -1;
    int bound_offset = 0;

    std::map<std::pair<int, Mode>, Vec> coeff;

    SeriesT() = default;
    SeriesT(int r_, int dim_, int kmax_) : r(r_), dim(dim_), kmax(kmax_) {}

    void set_bound(int slope, int offset) {
        bound_slope = slope;
        bound_offset = offset;
    }

    const Vec* find(int k, const Mode& nu) const {
        auto it = coeff.find({k, nu});
        return it == coeff.end() ? nullptr : &it->second;
    }

    Vec get(int k, const Mode& nu) const {
        const Vec* v = find(k, nu);
        return v ? *v : Vec(dim, C(0));
    }

    void add_to(int k, const Mode& nu, const Vec& v) {
        assert(static_cast<int>(v.size()) == dim);
        if (k > kmax) return;
        if (bound_slope >= 0 && norm1(nu) > bound_slope * k + bound_offset)
            throw ValidationError("series support bound violated at order " + std::to_string(k) +
                                  " mode " + mode_str(nu));
        auto& slot = coeff[{k, nu}];
        if (slot.empty()) slot.assign(dim, C(0));
        bool nonzero = false;
        for (int j = 0; j < dim; ++j) {
            slot[j] += v[j];
            if (slot[j] != C(0)) nonzero = true;
        }
        if (!nonzero) coeff.erase({k, nu});
    }

    void set(int k, const Mode& nu, const Vec& v) {
        coeff.erase({k, nu});
        add_to(k, nu, v);
    }

    R max_abs(int k = -1) const {
        R best = 0;
        for (const auto& [key, v] : coeff) {
            if (k >= 0 && key.first != k) continue;
            for (const auto& c : v) best = std::max(best, std::abs(c));
        }
        return best;
    }
};

using FourierTaylorSeries = SeriesT<double>;

template <class R>
SeriesT<R> ft_add(const SeriesT<R>& a, const SeriesT<R>& b) {
    if (a.r != b.r || a.dim != b.dim)
        throw ValidationError("series addition: dimension mismatch");
    SeriesT<R> out(a.r, a.dim, std::min(a.kmax, b.kmax));
    if (a.bound_slope >= 0 && b.bound_slope >= 0)
        out.set_bound(std::max(a.bound_slope, b.bound_slope), std::max(a.bound_offset, b.bound_offset));
    for (const auto& [key, v] : a.coeff)
        if (key.first <= out.kmax) out.add_to(key.first, key.second, v);
    for (const auto& [key, v] : b.coeff)
        if (key.first <= out.kmax) out.add_to(key.first, key.second, v);
    return out;
}

template <class R>
SeriesT<R> ft_scale(const SeriesT<R>& a, const std::complex<R>& c) {
    SeriesT<R> out = a;
    for (auto& [key, v] : out.coeff)
        for (auto& x : v) x *= c;
    return out;
}

// Cauchy product over Taylor orders and mode sums; `rule` combines one
// coefficient of `a` with one of `b` into a dim_out vector. Truncation is
// min(kmax) unless a tighter cap is passed.
template <class R, class Rule>
SeriesT<R> ft_convolve(const SeriesT<R>& a, const SeriesT<R>& b, Rule&& rule, int dim_out,
                       int kcap = -1) {
    if (a.r != b.r) throw ValidationError("series convolution: angle dimension mismatch");
    int kmax = (kcap >= 0) ? kcap : std::min(a.kmax, b.kmax);
    SeriesT<R> out(a.r, dim_out, kmax);
    if (a.bound_slope >= 0 && b.bound_slope >= 0)
        out.set_bound(std::max(a.bound_slope, b.bound_slope), a.bound_offset + b.bound_offset);
    for (const auto& [ka, va] : a.coeff) {
        if (ka.first > kmax) continue;
        for (const auto& [kb, vb] : b.coeff) {
            int k = ka.first + kb.first;
            if (k > kmax) continue;
            out.add_to(k, mode_add(ka.second, kb.second), rule(va, vb));
        }
    }
    return out;
}

template <class R>
SeriesT<R> ft_scalar_convolve(const SeriesT<R>& a, const SeriesT<R>& b, int kcap = -1) {
    using Vec = typename SeriesT<R>::Vec;
    return ft_convolve(
        a, b, [](const Vec& x, const Vec& y) { return Vec{x[0] * y[0]}; }, 1, kcap);
}

// exp of a scalar series with no constant term, truncated at kcap.
template <class R>
SeriesT<R> ft_exp(const SeriesT<R>& u, int kcap) {
    using C = std::complex<R>;
    SeriesT<R> out(u.r, 1, kcap);
    Mode zero(u.r, 0);
    out.add_to(0, zero, {C(1)});
    SeriesT<R> pw(u.r, 1, kcap);
    pw.add_to(0, zero, {C(1)});
    R fact = 1;
    for (int p = 1; p <= kcap; ++p) {
        pw = ft_scalar_convolve(pw, u, kcap);
        if (pw.coeff.empty()) break;
        fact *= static_cast<R>(p);
        for (const auto& [key, v] : pw.coeff) out.add_to(key.first, key.second, {v[0] / fact});
    }
    return out;
}

// Full truncated evaluation at a torus phase and perturbation strength.
template <class R>
typename SeriesT<R>::Vec ft_eval(const SeriesT<R>& series, const std::vector<R>& psi,
                                 const std::complex<R>& eps) {
    using C = std::complex<R>;
    typename SeriesT<R>::Vec out(series.dim, C(0));
    std::vector<C> eps_pow(series.kmax + 1, C(1));
    for (int k = 1; k <= series.kmax; ++k) eps_pow[k] = eps_pow[k - 1] * eps;
    for (const auto& [key, v] : series.coeff) {
        R phase = 0;
        for (size_t i = 0; i < psi.size(); ++i) phase += static_cast<R>(key.second[i]) * psi[i];
        C w = eps_pow[key.first] * C(std::cos(phase), std::sin(phase));
        for (int j = 0; j < series.dim; ++j) out[j] += w * v[j];
    }
    return out;
}

// Directional derivative along the rotation flow: coefficient times i(omega.nu).
template <class R>
SeriesT<R> ft_derivative_along_flow(const Frequency& freq, const SeriesT<R>& series) {
    using C = std::complex<R>;
    SeriesT<R> out(series.r, series.dim, series.kmax);
    out.set_bound(series.bound_slope, series.bound_offset);
    std::vector<R> w(freq.omega.begin(), freq.omega.end());
    for (const auto& [key, v] : series.coeff) {
        C f = C(0, mode_dot(w, key.second));
        if (f == C(0)) continue;
        auto vv = v;
        for (auto& x : vv) x *= f;
        out.add_to(key.first, key.second, vv);
    }
    return out;
}

// Max deviation from coefficient conjugate symmetry; 0 for a real-valued function.
template <class R>
R reality_defect(const SeriesT<R>& series) {
    R worst = 0;
    for (const auto& [key, v] : series.coeff) {
        auto partner = series.get(key.first, mode_neg(key.second));
        for (int j = 0; j < series.dim; ++j)
            worst = std::max(worst, std::abs(v[j] - std::conj(partner[j])));
    }
    return worst;
}

// Both gradient compositions [d_alpha f](psi+a, beta0+b) and
// [d_beta f](psi+a, beta0+b) through Taylor order K-1, assembled per support
// term from exponential series of the scalar displacements. Convolution
// powers of the displacements are memoized per distinct mode.
template <class R>
std::pair<SeriesT<R>, SeriesT<R>> compose_force(const Model& model, const SeriesT<R>& h, int K) {
    using C = std::complex<R>;
    using Vec = typename SeriesT<R>::Vec;
    const int r = model.r(), s = model.s();
    if (h.dim != r + s) throw ValidationError("compose_force: displacement dimension mismatch");
    if (K - 1 > h.kmax) throw ValidationError("compose_force: requested order exceeds input truncation");
    const int kcap = K - 1;

    SeriesT<R> fa(r, r, kcap), fb(r, s, kcap);
    fa.set_bound(model.pert.Nf, model.pert.Nf);
    fb.set_bound(model.pert.Nf, model.pert.Nf);

    // scalar displacement series i nu0.a and i mu.b
    auto directional = [&](const Mode& m, int lo, int len) {
        SeriesT<R> u(r, 1, kcap);
        for (const auto& [key, v] : h.coeff) {
            if (key.first > kcap) continue;
            C acc(0);
            for (int j = 0; j < len; ++j) acc += static_cast<R>(m[j]) * v[lo + j];
            if (acc == C(0)) continue;
            u.add_to(key.first, key.second, {C(0, 1) * acc});
        }
        return u;
    };

    std::map<Mode, SeriesT<R>> exp_alpha, exp_beta;
    for (const auto& [key, c] : model.pert.terms) {
        const Mode& nu0 = key.first;
        const Mode& mu = key.second;
        if (!exp_alpha.count(nu0)) exp_alpha.emplace(nu0, ft_exp(directional(nu0, 0, r), kcap));
        if (!exp_beta.count(mu)) exp_beta.emplace(mu, ft_exp(directional(mu, r, s), kcap));
        SeriesT<R> e = ft_scalar_convolve(exp_alpha.at(nu0), exp_beta.at(mu), kcap);

        R phase = 0;
        for (int j = 0; j < s; ++j) phase += static_cast<R>(mu[j]) * static_cast<R>(model.eq.beta0[j]);
        C ph = C(static_cast<R>(c.real()), static_cast<R>(c.imag())) * C(std::cos(phase), std::sin(phase));

        for (const auto& [ek, ev] : e.coeff) {
            C w = ph * ev[0];
            Mode nu = mode_add(ek.second, nu0);
            Vec va(r, C(0)), vb(s, C(0));
            for (int j = 0; j < r; ++j) va[j] = w * C(0, static_cast<R>(nu0[j]));
            for (int j = 0; j < s; ++j) vb[j] = w * C(0, static_cast<R>(mu[j]));
            fa.add_to(ek.first, nu, va);
            fb.add_to(ek.first, nu, vb);
        }
    }
    return {std::move(fa), std::move(fb)};
}

// Stable text dump: one record per (order, mode, component), map-ordered.
std::string dump_series(const FourierTaylorSeries& series);

}  // namespace lindstedt
