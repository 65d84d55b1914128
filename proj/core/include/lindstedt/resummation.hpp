#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <vector>

#include "lindstedt/self_energy.hpp"

namespace lindstedt {

struct ResumSettings {
    int n_min = -10;        // scale-ladder depth
    int order_cap = 5;      // tree catalog depth (expansion orders, leaf factors)
    int vmax = 3;           // skeleton catalog truncation (total order)
    double cond_limit = 1e12;  // dressed-propagator inversion conditioning guard
};

// Immutable per-model workspace shared by every evaluation.
struct ResumData {
    Model model;
    ResumSettings settings;
    ScaleSequence seq;
    TreeCatalog trees;
    SkeletonCatalog skeletons;
    std::map<std::string, bool> senergy_free;  // per tree encoding: no self-energy graph inside

    bool tree_is_renormalized(const TreeNode& t) const {
        auto it = senergy_free.find(t.enc);
        if (it == senergy_free.end())
            throw ValidationError("tree outside the prebuilt catalog");
        return it->second;
    }
};

ResumData build_resum_data(const Model& model, const ResumSettings& settings = {});

// Recursive dressed evaluation bound to one perturbation strength. The
// scalar is either a complex number or a truncated polynomial in eps.
template <class S>
class ResumEngine {
  public:
    ResumEngine(const ResumData& data, S eps) : D(data), eps_(std::move(eps)) {}

    const ResumData& data() const { return D; }
    const S& eps() const { return eps_; }

    Mat<S> M_level(int k, Cplx x) {
        const int d = D.model.d;
        if (k <= 0) return Mat<S>(d, d);
        Key key{k, bits(x.real()), bits(x.imag())};
        auto it = m_cache_.find(key);
        if (it != m_cache_.end()) return it->second;

        int n_x = kScaleAll;
        if (std::abs(x) > 0.0) n_x = D.seq.scale_of_raw(std::abs(x));
        Mat<S> sum(d, d);
        for (const auto& sk : D.skeletons.entries) {
            if (!skeleton_admissible(sk, D.seq.tau, n_x)) continue;
            auto prop = [&](Cplx arg) { return dressed(k - 1, arg); };
            auto leafer = [&](int kappa) { return leaf_factor(kappa, k - 1); };
            Mat<S> val = skeleton_value<S>(D.model, sk, x, prop, leafer);
            val.scale(scalar_pow(eps_, sk.order));
            sum += val;
        }
        m_cache_.emplace(key, sum);
        return sum;
    }

    // [x^2 - M^[k](x)]^{-1}; level 0 is the bare diagonal.
    Mat<S> dressed(int k, Cplx x) {
        const int d = D.model.d;
        if (k <= 0) {
            if (std::abs(x) == 0.0)
                throw SingularPropagator("bare propagator at zero argument");
            Mat<S> g(d, d);
            for (int i = 0; i < d; ++i) g(i, i) = S(Cplx(1.0) / (x * x));
            return g;
        }
        Mat<S> a = Mat<S>::identity(d);
        a.scale(S(x * x));
        a -= M_level(k, x);
        Mat<S> inv = a.inverse();
        double cond = inf_norm(a) * inf_norm(inv);
        if (!(cond < D.settings.cond_limit))
            throw NearSingularInversion("dressed propagator nearly singular at x = " +
                                        std::to_string(x.real()) + "+" + std::to_string(x.imag()) +
                                        "i");
        return inv;
    }

    // Renormalized counterterm of the given order, built from order kappa+1
    // self-energy-free trees with level-`level` propagators throughout.
    std::vector<S> leaf_factor(int kappa, int level) {
        auto key = std::make_pair(kappa, level);
        auto it = leaf_cache_.find(key);
        if (it != leaf_cache_.end()) return it->second;
        const int r = D.model.r(), s = D.model.s();
        if (kappa + 1 > D.trees.order_max)
            throw ValidationError("leaf factor beyond the prebuilt tree catalog");
        const Mode zero(r, 0);
        std::vector<S> sum(s, S(0.0));
        for (const auto& t : enumerate_trees(D.trees, kappa + 1, zero)) {
            if (is_counterterm_pattern(*t, kappa)) continue;
            if (!D.tree_is_renormalized(*t)) continue;
            auto out = renorm_tree_output(*t, level);
            for (int j = 0; j < s; ++j) sum[j] += out[r + j];
        }
        std::vector<S> b0(s, S(0.0));
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) b0[i] -= S(D.model.hess_inv(i, j)) * sum[j];
        leaf_cache_.emplace(key, b0);
        return b0;
    }

    // Reduced full-dimension output of one tree with dressed lines.
    std::vector<S> renorm_tree_output(const TreeNode& t, int level) {
        auto prop = [&](const Mode& nu) {
            if (is_zero(nu)) throw ZeroDivisorLine("zero-momentum line in renormalized tree");
            return dressed(level, Cplx(D.model.omega_dot(nu), 0.0));
        };
        auto leafer = [&](int kappa) { return leaf_factor(kappa, level); };
        return tree_output<S>(D.model, t, prop, leafer);
    }

  private:
    struct Key {
        int k;
        std::uint64_t re, im;
        bool operator<(const Key& o) const {
            if (k != o.k) return k < o.k;
            if (re != o.re) return re < o.re;
            return im < o.im;
        }
    };
    static std::uint64_t bits(double v) {
        std::uint64_t u;
        std::memcpy(&u, &v, sizeof u);
        return u;
    }

    const ResumData& D;
    S eps_;
    std::map<Key, Mat<S>> m_cache_;
    std::map<std::pair<int, int>, std::vector<S>> leaf_cache_;
};

// ---------------------------------------------------------------------------
// Fixed point of the dressing recursion at one (x, eps).

struct MLimitResult {
    MatC M;
    int iterations = 0;
    std::vector<double> deltas;  // ||M^[k] - M^[k-1]||
    std::vector<double> ratios;  // successive delta ratios above the noise floor
    bool converged = false;
};

MLimitResult M_limit(ResumEngine<Cplx>& eng, Cplx x, double tol = 1e-12, int k_max = 12);

// ---------------------------------------------------------------------------
// Block structure checks: vanishing orders at small x and the linear-in-eps
// leading normal block.

struct BlockBoundReport {
    double slope_aa = 0, slope_ab = 0, slope_ba = 0, slope_bb_dev = 0;  // log-log x slopes
    double eps_slope_bb = 0;  // || M_bb(0;eps) - eps Hess || vs eps
    std::vector<double> xs;
    bool ok = false;
};

BlockBoundReport verify_block_bounds(const ResumData& D, int level, double eps0, int n_hi = -7,
                                     int points = 9);

// Least-squares slope of log(y) vs log(x); pairs with y == 0 are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lindstedt
