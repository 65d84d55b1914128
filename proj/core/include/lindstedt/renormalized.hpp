#pragma once

#include "lindstedt/oracle.hpp"
#include "lindstedt/resummation.hpp"

namespace lindstedt {

// Truncated conjugation built from self-energy-free trees with dressed
// propagators at a fixed perturbation strength. Coefficients depend on eps
// through the dressing; the explicit eps^k powers stay outside, so the
// series evaluates like the formal one.
struct RenormalizedSolution {
    FourierTaylorSeries h;  // (k, nu) -> C^{r+s}; zero-mode beta rows carry renormalized counterterms
    Cplx eps;
    int order = 0;
    int level = 0;  // propagator level used (dressing fixed point reached)
    bool top_counterterm_undetermined = true;
    double coeff_growth_rate = 0.0;  // fitted slope of log max|coeff_k| vs k
};

// Level at which the dressing recursion has converged for every propagator
// argument a tree sum of order <= K can request.
int converged_level(ResumEngine<Cplx>& eng, int K, double tol = 1e-12, int k_max = 12);

RenormalizedSolution renormalized_expand(const ResumData& D, int K, Cplx eps, double tol = 1e-12,
                                         int k_max = 12);

// Equations-of-motion defect of a truncated displacement series, sampled on
// a uniform 2^m-per-angle grid:  max_psi | (w.d_psi)^2 h + eps grad f(psi + h_a, b0 + h_b) |.
double residual_on_torus(const Model& model, const FourierTaylorSeries& h, Cplx eps, int m = 6);

struct TorusPoint {
    std::vector<Cplx> alpha, beta;    // angles
    std::vector<Cplx> action_alpha;   // flow derivative of the alpha displacement
    std::vector<Cplx> action_beta;
};
TorusPoint torus_embedding(const Model& model, const FourierTaylorSeries& h,
                           const std::vector<double>& psi, Cplx eps);

// Exact re-expansion in eps of the renormalized sums: every propagator and
// counterterm is evaluated over truncated polynomials, so coefficient j of
// the result is the exact Taylor coefficient of the dressed expansion.
// Returns coeffs[k][(nu)] -> vector of d jets (orders 0..4 in eps).
std::map<std::pair<int, Mode>, std::vector<EpsJet>> renormalized_jet_expand(const ResumData& D,
                                                                            int K);

}  // namespace lindstedt
