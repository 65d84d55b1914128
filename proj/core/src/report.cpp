#include "lindstedt/report.hpp"

#include <cstdio>
#include <functional>

namespace lindstedt {

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt17(const Cplx& v) { return fmt17(v.real()) + " " + fmt17(v.imag()); }

std::string report_model(const Model& model) {
    std::string out = "[model]\n";
    out += "r: " + std::to_string(model.r()) + "\n";
    out += "s: " + std::to_string(model.s()) + "\n";
    out += "tau: " + fmt17(model.freq.tau) + "\n";
    out += "C0: " + fmt17(model.freq.C0) + "\n";
    out += "Nf: " + std::to_string(model.pert.Nf) + "\n";
    out += "branch: " + std::string(model.eq.branch == Branch::HyperbolicPositiveEps
                                        ? "hyperbolic-positive-eps"
                                        : "hyperbolic-negative-eps") + "\n";
    out += "gradient_norm: " + fmt17(model.eq.gradient_norm) + "\n";
    out += "diophantine_margin(Nmax=" + std::to_string(model.margin_nmax) +
           "): " + fmt17(model.margin_checked) + "\n";
    for (int i = 0; i < model.s(); ++i) {
        out += "hessian_row_" + std::to_string(i) + ":";
        for (int j = 0; j < model.s(); ++j) out += " " + fmt17(model.eq.hessian(i, j));
        out += "\n";
    }
    return out;
}

std::string report_expand(const Model& model, const FormalSolution& sol) {
    (void)model;
    std::string out = "[coefficients]\n";
    out += dump_series(sol.h);
    out += "[counterterms]\n";
    for (const auto& [k, b] : sol.counterterm) {
        out += "k=" + std::to_string(k);
        for (const auto& c : b) out += " " + fmt17(c);
        out += "\n";
    }
    out += "k=" + std::to_string(sol.order) + " undetermined\n";
    return out;
}

std::string report_scale_sequence(const ScaleSequence& seq, const ScaleCertificate& cert) {
    std::string out = "[scale-sequence]\n";
    out += "n_min: " + std::to_string(seq.n_min) + "\n";
    for (int n = seq.n_min; n <= 0; ++n)
        out += "gamma(" + std::to_string(n) + "): " + fmt17(seq.gamma_at(n)) + "\n";
    out += "checked_modes: " + std::to_string(cert.checked_modes) + "\n";
    out += "worst_margin: " + fmt17(cert.worst_margin) + "\n";
    out += "separation: " + std::string(cert.ok ? "PASS" : "FAIL") + "\n";
    return out;
}

std::string report_cancellations(const CancellationReport& rep) {
    std::string out = "[zero-momentum-cancellation] order=" + std::to_string(rep.order) + "\n";
    out += "trees: " + std::to_string(rep.tree_count) + "\n";
    out += "max_summand: " + fmt17(rep.max_summand) + "\n";
    out += "global_sum: " + fmt17(rep.global_sum_abs) + "\n";
    out += "worst_family_rel: " + fmt17(rep.worst_family_rel) + "\n";
    for (const auto& f : rep.families)
        out += "family members=" + std::to_string(f.members) + " sum=" + fmt17(f.sum_abs) +
               " max=" + fmt17(f.max_summand) + " key=" + f.key + "\n";
    return out;
}

std::string report_localized(const LocalizedCancellationReport& rep) {
    std::string out = "[self-energy-families]\n";
    out += "families: " + std::to_string(rep.families.size()) + "\n";
    out += "worst_type1_rel: " + fmt17(rep.worst_type1_rel) + "\n";
    out += "worst_const_mixed_rel: " + fmt17(rep.worst_const_mixed_rel) + "\n";
    out += "worst_type4_slope_rel: " + fmt17(rep.worst_type4_slope_rel) + "\n";
    out += "worst_b_relation_rel: " + fmt17(rep.worst_b_relation_rel) + "\n";
    for (const auto& f : rep.families)
        out += "family order=" + std::to_string(f.order) + " members=" + std::to_string(f.members) +
               " c_aa=" + fmt17(f.const_aa) + " c_ab=" + fmt17(f.const_ab) +
               " c_ba=" + fmt17(f.const_ba) + " s_aa=" + fmt17(f.slope_aa) +
               " s_bb=" + fmt17(f.slope_bb) + " b_rel=" + fmt17(f.b_mismatch) + "\n";
    out += std::string("verdict: ") + (rep.ok ? "PASS" : "FAIL") + "\n";
    return out;
}

std::string report_mlimit(const MLimitResult& res, Cplx x, Cplx eps) {
    std::string out = "[dressing-fixed-point] x=" + fmt17(x) + " eps=" + fmt17(eps) + "\n";
    out += "iterations: " + std::to_string(res.iterations) + "\n";
    out += std::string("converged: ") + (res.converged ? "yes" : "no") + "\n";
    for (size_t i = 0; i < res.deltas.size(); ++i)
        out += "delta_" + std::to_string(i + 1) + ": " + fmt17(res.deltas[i]) + "\n";
    for (size_t i = 0; i < res.ratios.size(); ++i)
        out += "ratio_" + std::to_string(i + 1) + ": " + fmt17(res.ratios[i]) + "\n";
    return out;
}

std::string report_block_bounds(const BlockBoundReport& rep) {
    std::string out = "[block-bounds]\n";
    out += "slope_aa: " + fmt17(rep.slope_aa) + "\n";
    out += "slope_ab: " + fmt17(rep.slope_ab) + "\n";
    out += "slope_ba: " + fmt17(rep.slope_ba) + "\n";
    out += "slope_bb_dev: " + fmt17(rep.slope_bb_dev) + "\n";
    out += "eps_slope_bb: " + fmt17(rep.eps_slope_bb) + "\n";
    out += std::string("verdict: ") + (rep.ok ? "PASS" : "FAIL") + "\n";
    return out;
}

std::string report_domain(const DomainProbeReport& rep) {
    std::string out = "[domain-probe] eps0=" + fmt17(rep.eps0) + "\n";
    out += "phi,re_eps,im_eps,pass,norm_margin\n";
    for (const auto& s : rep.boundary)
        out += fmt17(s.phi) + "," + fmt17(s.eps.real()) + "," + fmt17(s.eps.imag()) + "," +
               (s.converged && s.norm_ok ? "1" : "0") + "," + fmt17(s.worst_margin) + "\n";
    out += "[excluded-side]\n";
    out += "phi,re_eps,im_eps,pass,norm_margin\n";
    for (const auto& s : rep.excluded)
        out += fmt17(s.phi) + "," + fmt17(s.eps.real()) + "," + fmt17(s.eps.imag()) + "," +
               (s.converged && s.norm_ok ? "1" : "0") + "," + fmt17(s.worst_margin) + "\n";
    out += "[cusp]\n";
    out += "re,im_boundary\n";
    for (const auto& c : rep.cusp) out += fmt17(c.re) + "," + fmt17(c.im_boundary) + "\n";
    out += "cusp_slope: " + fmt17(rep.cusp_slope) + "\n";
    out += "boundary_all_pass: " + std::string(rep.boundary_all_pass ? "yes" : "no") + "\n";
    out += "excluded_all_fail: " + std::string(rep.excluded_all_fail ? "yes" : "no") + "\n";
    return out;
}

std::string dump_tree(const Model& model, const TreeNode& tree) {
    std::string out;
    std::function<void(const TreeNode&, int)> walk = [&](const TreeNode& n, int depth) {
        out += std::string(2 * depth, ' ') + "node mode=" + mode_str(n.mode) +
               " momentum=" + mode_str(n.momentum) +
               " divisor=" + fmt17(model.omega_dot(n.momentum)) + " comb=" + fmt17(n.comb) + "\n";
        for (const auto& g : n.groups) {
            for (int i = 0; i < g.mult; ++i) {
                if (g.sub)
                    walk(*g.sub, depth + 1);
                else
                    out += std::string(2 * (depth + 1), ' ') + "leaf kappa=" +
                           std::to_string(g.leaf_order) + "\n";
            }
        }
    };
    walk(tree, 0);
    return out;
}

}  // namespace lindstedt
