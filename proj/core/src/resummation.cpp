#include "lindstedt/resummation.hpp"

#include <cmath>

namespace lindstedt {

ResumData build_resum_data(const Model& model, const ResumSettings& settings) {
    ResumData d{model, settings, {}, {}, {}, {}};
    d.seq = build_scale_sequence(model.freq, settings.n_min);
    d.trees = enumerate_topological_trees(model, settings.order_cap);
    d.skeletons = build_catalog(model, d.seq, d.trees, settings.vmax, /*renormalized_only=*/true);
    for (int k = 1; k <= d.trees.order_max; ++k)
        for (const auto& t : d.trees.trees[k]) {
            ScaledTree st = assign_scales(model, d.seq, flatten(*t));
            d.senergy_free[t->enc] = !has_self_energy_graph(st);
        }
    return d;
}

MLimitResult M_limit(ResumEngine<Cplx>& eng, Cplx x, double tol, int k_max) {
    MLimitResult res;
    const int d = eng.data().model.d;
    MatC prev(d, d);
    double floor = 10.0 * tol;
    for (int k = 1; k <= k_max; ++k) {
        MatC cur = eng.M_level(k, x);
        MatC diff = cur;
        diff -= prev;
        double delta = inf_norm(diff);
        if (!res.deltas.empty() && res.deltas.back() > floor && delta > floor)
            res.ratios.push_back(delta / res.deltas.back());
        res.deltas.push_back(delta);
        res.M = cur;
        res.iterations = k;
        prev = cur;
        if (delta <= tol) {
            res.converged = true;
            return res;
        }
    }
    if (!res.ratios.empty() && res.ratios.back() >= 1.0)
        throw NoConvergence("dressing recursion diverges at x = " + std::to_string(x.real()) +
                            "+" + std::to_string(x.imag()) + "i");
    return res;  // slow but contracting: caller decides
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {
double block_inf_norm(const MatC& m, int r0, int r1, int c0, int c1) {
    double best = 0;
    for (int i = r0; i < r1; ++i) {
        double s = 0;
        for (int j = c0; j < c1; ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}
}  // namespace

BlockBoundReport verify_block_bounds(const ResumData& D, int level, double eps0, int n_hi,
                                     int points) {
    BlockBoundReport rep;
    const int r = D.model.r(), d = D.model.d;

    // x decade inside the deepest certified windows, where the admissible
    // skeleton set is stable
    double x_lo = D.seq.gamma_at(D.seq.n_min) * 1.05 / D.seq.normalization;
    double x_hi = D.seq.gamma_at(n_hi) * 0.95 / D.seq.normalization;
    std::vector<double> xs, aa, ab, ba, bbdev;
    ResumEngine<Cplx> eng(D, Cplx(eps0, 0.0));
    MatC m0 = eng.M_level(level, Cplx(0.0, 0.0));
    for (int i = 0; i < points; ++i) {
        double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (points - 1));
        MatC m = eng.M_level(level, Cplx(x, 0.0));
        xs.push_back(x);
        aa.push_back(block_inf_norm(m, 0, r, 0, r));
        ab.push_back(block_inf_norm(m, 0, r, r, d));
        ba.push_back(block_inf_norm(m, r, d, 0, r));
        MatC dev = m;
        dev -= m0;
        bbdev.push_back(block_inf_norm(dev, r, d, r, d));
    }
    rep.xs = xs;
    rep.slope_aa = loglog_slope(xs, aa);
    rep.slope_ab = loglog_slope(xs, ab);
    rep.slope_ba = loglog_slope(xs, ba);
    rep.slope_bb_dev = loglog_slope(xs, bbdev);

    // eps decade of || M_bb(0; eps) - eps * Hess ||
    std::vector<double> es, dev_bb;
    for (int i = 0; i < points; ++i) {
        double e = eps0 * 0.1 * std::pow(10.0, static_cast<double>(i) / (points - 1));
        ResumEngine<Cplx> en(D, Cplx(e, 0.0));
        MatC m = en.M_level(level, Cplx(0.0, 0.0));
        MatC dev(d, d);
        for (int i2 = 0; i2 < d; ++i2)
            for (int j2 = 0; j2 < d; ++j2) dev(i2, j2) = m(i2, j2);
        for (int i2 = 0; i2 < D.model.s(); ++i2)
            for (int j2 = 0; j2 < D.model.s(); ++j2)
                dev(r + i2, r + j2) -= e * D.model.eq.hessian(i2, j2);
        es.push_back(e);
        dev_bb.push_back(block_inf_norm(dev, r, d, r, d));
    }
    rep.eps_slope_bb = loglog_slope(es, dev_bb);

    rep.ok = rep.slope_aa >= 1.95 && rep.slope_ab >= 0.95 && rep.slope_ba >= 0.95 &&
             rep.slope_bb_dev >= 1.95 && rep.eps_slope_bb >= 1.95;
    return rep;
}

}  // namespace lindstedt
