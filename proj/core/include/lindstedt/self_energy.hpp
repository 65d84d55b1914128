#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lindstedt/scaled_tree.hpp"
#include "lindstedt/trees.hpp"

namespace lindstedt {

// Internal tree of a self-energy graph, rooted at the node the exiting line
// leaves, with exactly one node marked as the attachment of the entering
// line. Children are grouped by identical marked structure; a marked copy
// splits off its multiplicity group, which keeps the symmetry factors exact.
struct MarkedNode;
using MarkedCPtr = std::shared_ptr<const MarkedNode>;

struct MarkedChild {
    MarkedCPtr sub;
    int leaf_order = 0;
    int mult = 1;
};

struct MarkedNode {
    Mode mode;
    bool marked = false;
    std::vector<MarkedChild> groups;
    // derived:
    int order = 0;
    int node_count = 0;
    Mode msum;            // internal momentum sum of this subtree
    bool contains_mark = false;
    double comb = 1.0;
    std::string enc;
};

MarkedCPtr make_marked_node(Mode mode, bool marked, std::vector<MarkedChild> children);

// One insertible graph: the marked internal tree plus its admissibility data.
struct SelfEnergySkeleton {
    MarkedCPtr root;
    int order = 0;          // nodes + leaf orders; the value carries eps^order
    int node_count = 0;
    int mass = 0;           // sum |nu_v|_1 over the mode-carrying core
    int n_internal_min = 0; // min internal line scale; kNoInternalLines when none
    // A mark-containing zero-momentum sub-dressing becomes a nested graph
    // once the entering-scale window reaches this mass; +inf (kNoNested) if none.
    int nested_mass_threshold = 0;
    std::string family_key;  // canonical unmarked unrooted form
};

inline constexpr int kNoInternalLines = 1 << 20;
inline constexpr int kNoNested = 1 << 20;

struct SkeletonCatalog {
    std::vector<SelfEnergySkeleton> entries;
    int order_max = 0;
};

// All renormalized skeletons of total order <= order_max: zero total mode,
// nonzero internal momenta, no nested self-energy subgraph at the fixed
// internal scales, deduplicated topologically. With renormalized_only off,
// nested graphs are kept (complete reattachment families for the
// cancellation checks).
SkeletonCatalog build_catalog(const Model& model, const ScaleSequence& seq,
                              const TreeCatalog& trees, int order_max,
                              bool renormalized_only = true);

// Is the skeleton's sum admissible when the external momentum sits at scale
// n_x? (n_x == kScaleAll means x = 0: every window is open.)
inline constexpr int kScaleAll = -(1 << 20);
bool skeleton_admissible(const SelfEnergySkeleton& sk, double tau, int n_x);

// Value of one skeleton as a d x d block matrix: columns are responses to
// unit vectors injected on the entering attachment. Internal lines are
// dressed by prop(arg) with arg = omega.msum + x on the entering path and
// omega.msum off it. The eps^order prefactor is NOT included.
template <class S, class Prop, class LeafSrc>
std::vector<S> marked_output(const Model& model, const MarkedNode& node, const Cplx& x,
                             const std::vector<S>* inject, Prop&& prop, LeafSrc&& leaf) {
    const int r = model.r(), s = model.s(), d = r + s;
    struct GV {
        std::vector<S> u;
        int mult;
    };
    std::vector<GV> gs;
    double local = 1.0;
    for (const auto& g : node.groups) {
        std::vector<S> u;
        if (g.sub) {
            auto out = marked_output<S>(model, *g.sub, x, g.sub->contains_mark ? inject : nullptr,
                                        prop, leaf);
            Cplx arg = Cplx(mode_dot(model.freq.omega, g.sub->msum), 0.0) +
                       (g.sub->contains_mark ? x : Cplx(0.0));
            u = prop(arg) * out;
        } else {
            u.assign(d, S(0.0));
            auto b = leaf(g.leaf_order);
            for (int j = 0; j < s; ++j) u[r + j] = b[j];
        }
        gs.push_back({std::move(u), g.mult});
        local *= inv_factorial(g.mult);
    }

    std::vector<S> out(d, S(0.0));
    for (const auto& [mu, c] : scalar_traits<S>::phased(model, node.mode)) {
        S p = c;
        for (const auto& g : gs) {
            S acc(0.0);
            for (int j = 0; j < r; ++j)
                if (node.mode[j] != 0) acc += S(static_cast<double>(node.mode[j])) * g.u[j];
            for (int j = 0; j < s; ++j)
                if (mu[j] != 0) acc += S(static_cast<double>(mu[j])) * g.u[r + j];
            p = p * scalar_pow(times_i(acc), g.mult);
        }
        if (node.marked && inject) {
            S acc(0.0);
            for (int j = 0; j < r; ++j)
                if (node.mode[j] != 0) acc += S(static_cast<double>(node.mode[j])) * (*inject)[j];
            for (int j = 0; j < s; ++j)
                if (mu[j] != 0) acc += S(static_cast<double>(mu[j])) * (*inject)[r + j];
            p = p * times_i(acc);
        }
        for (int j = 0; j < r; ++j)
            if (node.mode[j] != 0) out[j] += times_i(p * S(static_cast<double>(node.mode[j])));
        for (int j = 0; j < s; ++j)
            if (mu[j] != 0) out[r + j] += times_i(p * S(static_cast<double>(mu[j])));
    }
    for (auto& v : out) v = v * S(local);
    return out;
}

template <class S, class Prop, class LeafSrc>
Mat<S> skeleton_value(const Model& model, const SelfEnergySkeleton& sk, const Cplx& x, Prop&& prop,
                      LeafSrc&& leaf) {
    const int d = model.d;
    Mat<S> val(d, d);
    for (int j = 0; j < d; ++j) {
        std::vector<S> e(d, S(0.0));
        e[j] = S(1.0);
        auto out = marked_output<S>(model, *sk.root, x, &e, prop, leaf);
        for (int i = 0; i < d; ++i) val(i, j) = out[i];
    }
    return val;
}

// Affine part at x=0 of a matrix-valued function: value and Richardson
// extrapolated central derivative (steps h and h/2).
std::pair<MatC, MatC> localize(const std::function<MatC(double)>& fn, double h);

// ---------------------------------------------------------------------------
// Shift-family cancellations

struct FamilyCheck {
    std::string key;
    int members = 0;
    int order = 0;
    // family-summed constant and slope blocks, with the largest member
    // magnitude per block for relative comparisons
    double const_aa = 0, const_ab = 0, const_ba = 0, const_bb = 0;
    double slope_aa = 0, slope_bb = 0;
    double b_mismatch = 0;  // |slope_ab + slope_ba^T|
    double scale_const = 0, scale_slope = 0;
};

struct LocalizedCancellationReport {
    std::vector<FamilyCheck> families;
    double worst_type1_rel = 0;       // constants and slopes of the aa block
    double worst_const_mixed_rel = 0; // constants of ab / ba blocks
    double worst_type4_slope_rel = 0; // slopes of the bb block
    double worst_b_relation_rel = 0;  // slope_ab vs -slope_ba^T
    bool ok = false;
};

// Sums localized skeleton values over every reattachment family of total
// order <= order_max (bare internal propagators, unit eps prefactor) and
// checks the four cancellation patterns.
LocalizedCancellationReport verify_localized_cancellations(
    const Model& model, const ScaleSequence& seq, const SkeletonCatalog& catalog, int order_max,
    const std::function<std::vector<Cplx>(int)>& leaf, double tol_rel = 1e-10);

}  // namespace lindstedt
