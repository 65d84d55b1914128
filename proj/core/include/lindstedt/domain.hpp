#pragma once

#include <string>
#include <vector>

#include "lindstedt/resummation.hpp"

namespace lindstedt {

// Sector family in the complex perturbation plane: half-opening phi with
// radius (pi - phi) * eps0. The union over phi is the heart-shaped region;
// its boundary near the origin closes with a quadratic cusp along one real
// half-axis.
struct DomainSpec {
    double eps0 = 0.01;
    std::vector<double> phi_grid = {M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 4.0};
};

struct ProbeSample {
    double phi = 0.0;
    Cplx eps;
    bool converged = false;
    bool norm_ok = false;        // literal sector bound 2/((pi-phi) x^2)
    bool norm_ok_floor = false;  // with the absolute real-axis constant floored at 2
    double worst_margin = 0.0;   // min over x of bound / ||G||
    std::string reason;
};

struct CuspPoint {
    double re = 0.0;           // |Re eps| probed on the excluded side
    double im_boundary = 0.0;  // smallest passing |Im eps|
};

struct DomainProbeReport {
    std::vector<ProbeSample> boundary;   // per (phi, theta) boundary samples
    std::vector<ProbeSample> excluded;   // real-eps probes on the excluded side
    std::vector<CuspPoint> cusp;
    double cusp_slope = 0.0;
    bool boundary_all_pass = false;      // literal bound, all phis
    bool excluded_all_fail = false;
    double eps0 = 0.0;
};

// Propagator-norm test for one strength: runs the dressing fixed point at
// every certified scale-window sample (plus near-singular adaptive samples)
// and compares ||G|| with bound_coefficient / x^2.
ProbeSample probe_point(const ResumData& D, Cplx eps, double phi, double tol = 1e-12,
                        int k_max = 14);

DomainProbeReport probe_domain(const ResumData& D, const DomainSpec& spec, int n_theta = 5,
                               int n_cusp = 6);

}  // namespace lindstedt
