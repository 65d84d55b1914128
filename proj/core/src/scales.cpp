#include "lindstedt/scales.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace lindstedt {

double scale_ball_radius(double tau, int n) { return std::pow(2.0, -(n + 3) / tau); }

int ScaleSequence::scale_of_normalized(double X) const {
    if (X >= gamma_at(0)) return 1;
    for (int n = 0; n > n_min; --n)
        if (X >= gamma_at(n - 1) && X < gamma_at(n)) return n;
    throw ScaleOutOfRange("divisor below the deepest certified scale; enlarge n_min");
}

namespace {

// All values |omega0 . nu| for 0 < |nu|_1 <= radius, sorted.
std::vector<double> magnitudes_in_ball(const Frequency& freq, int radius) {
    std::vector<double> vals;
    if (radius < 1) return vals;
    Mode nu(freq.r(), 0);
    std::function<void(int, int)> walk = [&](int pos, int used) {
        if (pos == freq.r()) {
            if (used > 0) vals.push_back(std::abs(mode_dot(freq.omega0, nu)));
            return;
        }
        for (int c = -(radius - used); c <= radius - used; ++c) {
            nu[pos] = c;
            walk(pos + 1, used + std::abs(c));
        }
        nu[pos] = 0;
    };
    walk(0, 0);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

double min_distance(const std::vector<double>& sorted_vals, double c) {
    if (sorted_vals.empty()) return std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(sorted_vals.begin(), sorted_vals.end(), c);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted_vals.end()) best = std::min(best, std::abs(*it - c));
    if (it != sorted_vals.begin()) best = std::min(best, std::abs(*(it - 1) - c));
    return best;
}

}  // namespace

ScaleSequence build_scale_sequence(const Frequency& freq, int n_min, int grid_points) {
    if (n_min > 0) throw ValidationError("scale sequence: n_min must be <= 0");
    ScaleSequence seq;
    seq.n_min = n_min;
    seq.tau = freq.tau;
    seq.normalization = std::pow(2.0, freq.tau) / freq.C0;
    seq.gamma.assign(static_cast<size_t>(-n_min) + 1, 0.0);

    // per-level sorted magnitude tables (shared suffixes of the deepest ball)
    std::vector<std::vector<double>> level_vals(static_cast<size_t>(-n_min) + 1);
    for (int m = n_min; m <= 0; ++m) {
        int radius = static_cast<int>(std::floor(scale_ball_radius(freq.tau, m)));
        level_vals[m - n_min] = magnitudes_in_ball(freq, radius);
    }

    for (int n = 0; n >= n_min; --n) {
        double lo = std::pow(2.0, n - 1), hi = std::pow(2.0, n);
        bool unconstrained = true;
        for (int m = n_min; m <= n; ++m)
            if (!level_vals[m - n_min].empty()) unconstrained = false;
        if (unconstrained) {
            seq.gamma[n - n_min] = 0.75 * hi;  // midpoint convention
            continue;
        }
        double best_score = -std::numeric_limits<double>::infinity();
        double best_c = 0.0;
        for (int i = 0; i <= grid_points; ++i) {
            double c = lo + (hi - lo) * static_cast<double>(i) / grid_points;
            double score = std::numeric_limits<double>::infinity();
            for (int m = n_min; m <= n; ++m) {
                const auto& vals = level_vals[m - n_min];
                if (vals.empty()) continue;
                score = std::min(score, min_distance(vals, c) - std::pow(2.0, m + 1));
            }
            // exact-hit guard against the full checked ball
            if (min_distance(level_vals[0], c) == 0.0) score = -std::numeric_limits<double>::infinity();
            if (score > best_score) {
                best_score = score;
                best_c = c;
            }
        }
        if (!(best_score >= 0.0))
            throw SeparationUnachievable("no admissible gamma at level " + std::to_string(n) +
                                         " (best margin " + std::to_string(best_score) + ")");
        seq.gamma[n - n_min] = best_c;
    }

    auto cert = verify_scale_separation(freq, seq);
    if (!cert.ok)
        throw SeparationUnachievable("constructed sequence failed exhaustive separation check");
    return seq;
}

ScaleCertificate verify_scale_separation(const Frequency& freq, const ScaleSequence& seq) {
    ScaleCertificate cert;
    cert.n_min = seq.n_min;
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (int n = seq.n_min; n <= 0; ++n) {
        int radius = static_cast<int>(std::floor(scale_ball_radius(freq.tau, n)));
        auto vals = magnitudes_in_ball(freq, radius);
        if (vals.empty()) continue;
        cert.checked_modes += static_cast<int>(vals.size());
        for (int p = n; p <= 0; ++p) {
            double need = std::pow(2.0, n + 1);
            double margin = min_distance(vals, seq.gamma_at(p)) - need;
            cert.worst_margin = std::min(cert.worst_margin, margin);
        }
        // no exact hits at any level
        for (int p = seq.n_min; p <= 0; ++p)
            if (min_distance(vals, seq.gamma_at(p)) == 0.0) cert.worst_margin = -1.0;
    }
    if (cert.checked_modes == 0) cert.worst_margin = std::numeric_limits<double>::infinity();
    cert.ok = cert.worst_margin >= 0.0;
    return cert;
}

}  // namespace lindstedt
