#include "lindstedt/renormalized.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace lindstedt {

int converged_level(ResumEngine<Cplx>& eng, int K, double tol, int k_max) {
    const ResumData& D = eng.data();
    // distinct line arguments over the catalog through order K, coarsest first
    std::set<double> args;
    std::function<void(const TreeNode&)> scan = [&](const TreeNode& t) {
        for (const auto& g : t.groups) {
            if (!g.sub) continue;
            args.insert(std::abs(D.model.omega_dot(g.sub->momentum)));
            scan(*g.sub);
        }
    };
    for (int k = 1; k <= std::min(K, D.trees.order_max); ++k)
        for (const auto& t : D.trees.trees[k]) {
            if (!is_zero(t->momentum)) args.insert(std::abs(D.model.omega_dot(t->momentum)));
            scan(*t);
        }
    int level = 1;
    for (double a : args) {
        auto res = M_limit(eng, Cplx(a, 0.0), tol, k_max);
        if (!res.converged)
            throw NoConvergence("dressing recursion did not reach tolerance at x = " +
                                std::to_string(a));
        level = std::max(level, res.iterations);
    }
    return level;
}

RenormalizedSolution renormalized_expand(const ResumData& D, int K, Cplx eps, double tol,
                                         int k_max) {
    if (K > D.trees.order_max)
        throw ValidationError("renormalized_expand: order beyond the prebuilt catalog");
    RenormalizedSolution sol;
    sol.eps = eps;
    sol.order = K;
    sol.h = FourierTaylorSeries(D.model.r(), D.model.d, K);
    sol.h.set_bound(D.model.pert.Nf, 0);

    ResumEngine<Cplx> eng(D, eps);
    sol.level = converged_level(eng, K, tol, k_max);
    const int r = D.model.r(), s = D.model.s();
    const Mode zero(r, 0);

    for (int k = 1; k <= K; ++k) {
        for (const auto& t : D.trees.trees[k]) {
            if (is_zero(t->momentum)) continue;
            if (!D.tree_is_renormalized(*t)) continue;
            auto out = eng.renorm_tree_output(*t, sol.level);
            auto full = eng.dressed(sol.level, Cplx(D.model.omega_dot(t->momentum), 0.0)) * out;
            sol.h.add_to(k, t->momentum, full);
        }
        if (k + 1 <= D.trees.order_max) {
            auto b0 = eng.leaf_factor(k, sol.level);
            std::vector<Cplx> hv(D.model.d, Cplx(0));
            for (int j = 0; j < s; ++j) hv[r + j] = b0[j];
            sol.h.add_to(k, zero, hv);
            if (k == K) sol.top_counterterm_undetermined = false;
        }
    }

    std::vector<double> ks, mags;
    for (int k = 1; k <= K; ++k) {
        double m = sol.h.max_abs(k);
        if (m > 0) {
            ks.push_back(k);
            mags.push_back(std::log(m));
        }
    }
    if (ks.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < ks.size(); ++i) {
            sx += ks[i];
            sy += mags[i];
            sxx += ks[i] * ks[i];
            sxy += ks[i] * mags[i];
        }
        double n = static_cast<double>(ks.size());
        sol.coeff_growth_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return sol;
}

double residual_on_torus(const Model& model, const FourierTaylorSeries& h, Cplx eps, int m) {
    const int r = model.r(), s = model.s();
    auto d1 = ft_derivative_along_flow(model.freq, h);
    auto d2 = ft_derivative_along_flow(model.freq, d1);
    const int n = 1 << m;
    const double step = 2.0 * M_PI / n;

    double worst = 0.0;
    std::vector<double> psi(r, 0.0);
    std::vector<int> idx(r, 0);
    bool done = false;
    while (!done) {
        for (int j = 0; j < r; ++j) psi[j] = idx[j] * step;
        auto hv = ft_eval(h, psi, eps);
        auto acc = ft_eval(d2, psi, eps);
        // grad f at the displaced (complex) point
        for (const auto& [key, c] : model.pert.terms) {
            Cplx phase(0, 0);
            for (int j = 0; j < r; ++j)
                phase += Cplx(0, key.first[j]) * (Cplx(psi[j], 0) + hv[j]);
            for (int j = 0; j < s; ++j)
                phase += Cplx(0, key.second[j]) * (Cplx(model.eq.beta0[j], 0) + hv[r + j]);
            Cplx w = c * std::exp(phase) * eps;
            for (int j = 0; j < r; ++j) acc[j] += w * Cplx(0, key.first[j]);
            for (int j = 0; j < s; ++j) acc[r + j] += w * Cplx(0, key.second[j]);
        }
        for (const auto& v : acc) worst = std::max(worst, std::abs(v));
        // advance the grid index
        done = true;
        for (int j = 0; j < r; ++j) {
            if (++idx[j] < n) {
                done = false;
                break;
            }
            idx[j] = 0;
        }
    }
    return worst;
}

TorusPoint torus_embedding(const Model& model, const FourierTaylorSeries& h,
                           const std::vector<double>& psi, Cplx eps) {
    const int r = model.r(), s = model.s();
    auto hv = ft_eval(h, psi, eps);
    auto av = ft_eval(ft_derivative_along_flow(model.freq, h), psi, eps);
    TorusPoint p;
    p.alpha.resize(r);
    p.beta.resize(s);
    p.action_alpha.resize(r);
    p.action_beta.resize(s);
    for (int j = 0; j < r; ++j) {
        p.alpha[j] = Cplx(psi[j], 0) + hv[j];
        p.action_alpha[j] = av[j];
    }
    for (int j = 0; j < s; ++j) {
        p.beta[j] = Cplx(model.eq.beta0[j], 0) + hv[r + j];
        p.action_beta[j] = av[r + j];
    }
    return p;
}

std::map<std::pair<int, Mode>, std::vector<EpsJet>> renormalized_jet_expand(const ResumData& D,
                                                                            int K) {
    if (K > D.trees.order_max)
        throw ValidationError("renormalized_jet_expand: order beyond the prebuilt catalog");
    ResumEngine<EpsJet> eng(D, EpsJet::variable());
    // heights above the jet degree cannot contribute to retained orders
    const int level = 5;
    const int r = D.model.r(), s = D.model.s();
    const Mode zero(r, 0);

    std::map<std::pair<int, Mode>, std::vector<EpsJet>> out;
    for (int k = 1; k <= K; ++k) {
        for (const auto& t : D.trees.trees[k]) {
            if (is_zero(t->momentum)) continue;
            if (!D.tree_is_renormalized(*t)) continue;
            auto o = eng.renorm_tree_output(*t, level);
            auto full = eng.dressed(level, Cplx(D.model.omega_dot(t->momentum), 0.0)) * o;
            auto& slot = out[{k, t->momentum}];
            if (slot.empty()) slot.assign(D.model.d, EpsJet(0.0));
            for (int j = 0; j < D.model.d; ++j) slot[j] += full[j];
        }
        if (k + 1 <= D.trees.order_max) {
            auto b0 = eng.leaf_factor(k, level);
            auto& slot = out[{k, zero}];
            if (slot.empty()) slot.assign(D.model.d, EpsJet(0.0));
            for (int j = 0; j < s; ++j) slot[r + j] += b0[j];
        }
    }
    return out;
}

}  // namespace lindstedt
