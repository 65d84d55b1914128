#pragma once

#include <map>
#include <vector>

#include "lindstedt/model.hpp"
#include "lindstedt/series.hpp"

namespace lindstedt {

// Order-by-order solution of the conjugation equations by direct series
// arithmetic. The zero-mode beta coefficients (counterterms) are fixed one
// order behind the front: processing order k pins b0 at order k-1, so the
// top-order counterterm is left zero and flagged.
template <class R>
struct OracleSolutionT {
    SeriesT<R> h;  // dim r+s, Taylor orders 1..K; zero-mode beta rows carry the counterterms
    std::map<int, std::vector<std::complex<R>>> counterterm;  // k -> b0^(k), k <= K-1
    int order = 0;
    bool top_counterterm_undetermined = true;
};

using FormalSolution = OracleSolutionT<double>;

template <class R>
OracleSolutionT<R> solve_to_order(const Model& model, int K, double tol_rel = 1e-10) {
    using C = std::complex<R>;
    using Vec = typename SeriesT<R>::Vec;
    if (K < 1) throw ValidationError("solve_to_order: K must be >= 1");
    const int r = model.r(), s = model.s(), d = r + s;

    OracleSolutionT<R> sol;
    sol.order = K;
    sol.h = SeriesT<R>(r, d, K);
    sol.h.set_bound(model.pert.Nf, 0);
    const Mode zero(r, 0);

    std::vector<R> omega(model.freq.omega.begin(), model.freq.omega.end());

    for (int k = 1; k <= K; ++k) {
        auto [fa, fb] = compose_force(model, sol.h, k);

        if (k >= 2) {
            // Fix the counterterm of order k-1 so the zero-mode beta row closes.
            Vec g0 = fb.get(k - 1, zero);
            Vec b0(s, C(0));
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    b0[i] -= static_cast<R>(model.hess_inv(i, j)) * g0[j];
            sol.counterterm[k - 1] = b0;
            Vec hb(d, C(0));
            for (int j = 0; j < s; ++j) hb[r + j] = b0[j];
            sol.h.add_to(k - 1, zero, hb);
            // Linear coupling of the new counterterm into the order-(k-1) force.
            for (const auto& nu0 : model.pert.nu_support) {
                auto terms = model.phased_terms_prec<R>(nu0);
                Vec va(r, C(0)), vb(s, C(0));
                bool any = false;
                for (const auto& [mu, ph] : terms) {
                    C g(0);
                    for (int j = 0; j < s; ++j) g += C(0, static_cast<R>(mu[j])) * b0[j];
                    if (g == C(0)) continue;
                    any = true;
                    for (int j = 0; j < r; ++j) va[j] += ph * g * C(0, static_cast<R>(nu0[j]));
                    for (int j = 0; j < s; ++j) vb[j] += ph * g * C(0, static_cast<R>(mu[j]));
                }
                if (!any) continue;
                fa.add_to(k - 1, nu0, va);
                fb.add_to(k - 1, nu0, vb);
            }
        }

        R scale = std::max({fa.max_abs(k - 1), fb.max_abs(k - 1), static_cast<R>(1e-300)});
        Vec a0 = fa.get(k - 1, zero);
        for (const auto& c : a0)
            if (std::abs(c) > static_cast<R>(tol_rel) * scale)
                throw ZeroAlphaAverageViolated("alpha-average of the force is nonzero at order " +
                                               std::to_string(k - 1));

        // Divide every nonzero mode by the squared divisor.
        auto solve_block = [&](const SeriesT<R>& f, int lo, int len) {
            for (const auto& [key, v] : f.coeff) {
                if (key.first != k - 1 || is_zero(key.second)) continue;
                R x = mode_dot(omega, key.second);
                Vec hv(d, C(0));
                for (int j = 0; j < len; ++j) hv[lo + j] = v[j] / (x * x);
                sol.h.add_to(k, key.second, hv);
            }
        };
        solve_block(fa, 0, r);
        solve_block(fb, r, s);
    }
    sol.top_counterterm_undetermined = true;
    return sol;
}

// Max-norm defect of the order-k conjugation equation, relative to the
// coefficient scale at that order. The zero-mode rows are checked with the
// fixed counterterms in place.
template <class R>
R residual_norm(const Model& model, const OracleSolutionT<R>& sol, int k) {
    using Vec = typename SeriesT<R>::Vec;
    if (k < 1 || k > sol.order) throw ValidationError("residual_norm: order out of range");
    const int r = model.r(), s = model.s();
    auto [fa, fb] = compose_force(model, sol.h, k);
    std::vector<R> omega(model.freq.omega.begin(), model.freq.omega.end());

    R worst = 0;
    R scale = std::max({fa.max_abs(k - 1), fb.max_abs(k - 1), sol.h.max_abs(k), static_cast<R>(1e-300)});
    std::map<Mode, int> modes;
    for (const auto& [key, v] : sol.h.coeff)
        if (key.first == k) modes[key.second] = 1;
    for (const auto& [key, v] : fa.coeff)
        if (key.first == k - 1) modes[key.second] = 1;
    for (const auto& [key, v] : fb.coeff)
        if (key.first == k - 1) modes[key.second] = 1;

    for (const auto& [nu, tag] : modes) {
        (void)tag;
        R x = mode_dot(omega, nu);
        R x2 = is_zero(nu) ? 0 : x * x;
        Vec hv = sol.h.get(k, nu);
        Vec va = fa.get(k - 1, nu), vb = fb.get(k - 1, nu);
        for (int j = 0; j < r; ++j) worst = std::max(worst, std::abs(x2 * hv[j] - va[j]));
        for (int j = 0; j < s; ++j) worst = std::max(worst, std::abs(x2 * hv[r + j] - vb[j]));
    }
    return worst / scale;
}

}  // namespace lindstedt
