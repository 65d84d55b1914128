#include "lindstedt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lindstedt {

namespace {

// Certified window midpoints plus samples near the normal-block singularity
// x^2 = eps * lambda for each hessian eigenvalue.
std::vector<double> x_samples(const ResumData& D, Cplx eps) {
    std::vector<double> xs;
    const auto& seq = D.seq;
    for (int n = seq.n_min + 1; n <= 0; ++n) {
        double X = std::sqrt(seq.gamma_at(n - 1) * seq.gamma_at(n));
        xs.push_back(X / seq.normalization);
    }
    xs.push_back(2.0 * seq.gamma_at(0) / seq.normalization);
    auto eig = symmetric_eigenvalues(D.model.eq.hessian);
    double x_min = seq.gamma_at(seq.n_min) / seq.normalization;
    double x_max = 4.0 * seq.gamma_at(0) / seq.normalization;
    for (double lam : eig) {
        double target = std::abs(eps.real() * lam);
        if (target <= 0.0) continue;
        double x0 = std::sqrt(target);
        for (double f : {0.9, 1.0, 1.1}) {
            double x = x0 * f;
            if (x >= x_min && x <= x_max) xs.push_back(x);
        }
    }
    return xs;
}

}  // namespace

ProbeSample probe_point(const ResumData& D, Cplx eps, double phi, double tol, int k_max) {
    ProbeSample ps;
    ps.phi = phi;
    ps.eps = eps;
    double coef = 2.0 / (M_PI - phi);
    double coef_floor = std::max(2.0, coef);
    ps.worst_margin = std::numeric_limits<double>::infinity();
    ps.norm_ok = true;
    ps.norm_ok_floor = true;
    try {
        ResumEngine<Cplx> eng(D, eps);
        for (double x : x_samples(D, eps)) {
            auto res = M_limit(eng, Cplx(x, 0.0), tol, k_max);
            if (!res.converged) {
                ps.reason = "no convergence at x = " + std::to_string(x);
                ps.norm_ok = ps.norm_ok_floor = false;
                return ps;
            }
            MatC g = eng.dressed(res.iterations, Cplx(x, 0.0));
            double norm = inf_norm(g);
            double bound = coef / (x * x);
            ps.worst_margin = std::min(ps.worst_margin, bound / norm);
            if (norm > bound) ps.norm_ok = false;
            if (norm > coef_floor / (x * x)) ps.norm_ok_floor = false;
        }
        ps.converged = true;
        if (!ps.norm_ok) ps.reason = "norm bound exceeded";
    } catch (const NoConvergence& e) {
        ps.reason = e.what();
        ps.norm_ok = ps.norm_ok_floor = false;
    } catch (const NearSingularInversion& e) {
        ps.reason = e.what();
        ps.norm_ok = ps.norm_ok_floor = false;
    }
    return ps;
}

DomainProbeReport probe_domain(const ResumData& D, const DomainSpec& spec, int n_theta,
                               int n_cusp) {
    DomainProbeReport rep;
    rep.eps0 = spec.eps0;
    // positive-branch models place the excluded cusp on the negative axis
    double sign = D.model.eq.branch == Branch::HyperbolicPositiveEps ? 1.0 : -1.0;

    rep.boundary_all_pass = true;
    for (double phi : spec.phi_grid) {
        double radius = (M_PI - phi) * spec.eps0;
        for (int i = 0; i < n_theta; ++i) {
            double theta = -0.9 * phi + 1.8 * phi * static_cast<double>(i) / (n_theta - 1);
            Cplx eps = sign * std::polar(radius, theta);
            auto ps = probe_point(D, eps, phi);
            rep.boundary_all_pass = rep.boundary_all_pass && ps.converged && ps.norm_ok;
            rep.boundary.push_back(ps);
        }
    }

    rep.excluded_all_fail = true;
    for (double phi : spec.phi_grid) {
        double radius = (M_PI - phi) * spec.eps0;
        Cplx eps = -sign * Cplx(radius, 0.0);
        auto ps = probe_point(D, eps, phi);
        rep.excluded_all_fail = rep.excluded_all_fail && !(ps.converged && ps.norm_ok);
        rep.excluded.push_back(ps);
    }

    // measured exclusion boundary near the origin: smallest |Im eps| whose
    // point is certified by some sector (phi chosen so the radius reaches it)
    auto heart_pass = [&](Cplx eps) {
        double t = std::abs(eps);
        if (!(t < M_PI * spec.eps0)) return false;
        double phi_pt = M_PI - t / spec.eps0;  // widest radius-compatible sector
        double theta = std::abs(std::arg(sign * eps));
        if (theta > phi_pt) return false;
        auto ps = probe_point(D, sign * eps, phi_pt);
        return ps.converged && ps.norm_ok;
    };
    for (int i = 0; i < n_cusp; ++i) {
        double t = spec.eps0 * std::pow(10.0, -1.7 + 1.0 * static_cast<double>(i) / (n_cusp - 1));
        double lo = 0.0, hi = 4.0 * t;  // boundary expected near t^2/eps0 << t
        while (!heart_pass(Cplx(-t, hi)) && hi < 64.0 * t) hi *= 2.0;
        if (!heart_pass(Cplx(-t, hi))) continue;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            if (heart_pass(Cplx(-t, mid)))
                hi = mid;
            else
                lo = mid;
        }
        rep.cusp.push_back({t, hi});
    }
    std::vector<double> ts, ss;
    for (const auto& c : rep.cusp) {
        ts.push_back(c.re);
        ss.push_back(c.im_boundary);
    }
    rep.cusp_slope = loglog_slope(ts, ss);
    return rep;
}

}  // namespace lindstedt
