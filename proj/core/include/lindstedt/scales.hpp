#pragma once

#include <vector>

#include "lindstedt/model.hpp"

namespace lindstedt {

// Dyadic ladder gamma_n in [2^{n-1}, 2^n] for n_min <= n <= 0, kept away
// from the accumulation points |omega0 . nu| of every relevant mode ball:
// for all n <= 0, p >= n and 0 < |nu|_1 <= 2^{-(n+3)/tau},
// | |omega0.nu| - gamma_p | >= 2^{n+1}, with no exact hits.
struct ScaleSequence {
    int n_min = 0;
    double tau = 0.0;
    double normalization = 0.0;  // 2^tau / C0; multiplies raw divisors into omega0 units
    std::vector<double> gamma;   // gamma[n - n_min]

    double gamma_at(int n) const { return gamma.at(static_cast<size_t>(n - n_min)); }

    // Scale of a normalized magnitude X: 1 when X >= gamma_0, otherwise the
    // unique n with gamma_{n-1} <= X < gamma_n. Values below gamma_{n_min}
    // cannot be classified.
    int scale_of_normalized(double X) const;
    int scale_of_raw(double x_abs) const { return scale_of_normalized(normalization * x_abs); }
};

struct ScaleCertificate {
    int n_min = 0;
    double worst_margin = 0.0;  // min over all (n, p, nu) of ||omega0.nu| - gamma_p| - 2^{n+1}
    int checked_modes = 0;
    bool ok = false;
};

// Mode ball radius used at level n.
double scale_ball_radius(double tau, int n);

ScaleSequence build_scale_sequence(const Frequency& freq, int n_min, int grid_points = 1024);

// Exhaustive re-verification of the separation property of a sequence.
ScaleCertificate verify_scale_separation(const Frequency& freq, const ScaleSequence& seq);

}  // namespace lindstedt
