#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lindstedt/linalg.hpp"
#include "lindstedt/model.hpp"
#include "lindstedt/mode.hpp"

namespace lindstedt {

// Rooted topological tree in multiset form: children of a node are grouped
// by identical subtree structure with a multiplicity, and each node carries
// the matching symmetry factor 1/prod(mult!). Endpoints are either nodes or
// leaves; a leaf carries an order label and stands for a counterterm factor
// rather than a subtree. Line type labels are not stored: values are
// propagated as full (r+s)-dimensional vectors, which sums the type
// assignments of every line exactly.
struct TreeNode;
using TreeCPtr = std::shared_ptr<const TreeNode>;

struct TreeChild {
    TreeCPtr sub;        // null for a leaf
    int leaf_order = 0;  // kappa, used when sub == null
    int mult = 1;
};

struct TreeNode {
    Mode mode;
    std::vector<TreeChild> groups;  // sorted by child encoding
    // derived, filled by make_tree_node:
    int order = 0;       // nodes plus leaf orders in this subtree
    int node_count = 0;  // nodes only
    Mode momentum;       // sum of node modes in this subtree (root-line momentum)
    double comb = 1.0;   // symmetry factor of this subtree, all nodes included
    std::string enc;     // canonical encoding; equal iff topologically equal
};

std::string tree_child_enc(const TreeChild& c);
TreeCPtr make_tree_node(Mode mode, std::vector<TreeChild> children);

// Expanded (one vertex per node/leaf instance) view used by the multiscale
// machinery and re-rooting. v[0] is the root; parent(root) = -1.
struct FlatVert {
    Mode mode;          // empty for leaves
    bool is_leaf = false;
    int kappa = 0;
    int parent = -1;
};
struct FlatTree {
    std::vector<FlatVert> v;
    int order = 0;
};
FlatTree flatten(const TreeNode& root);

// Rebuild the canonical rooted tree of a flat tree rooted at vertex
// `new_root` (must be a node). Arrows reorient automatically.
TreeCPtr reroot(const FlatTree& ft, int new_root);

// Canonical key of the underlying unrooted labeled tree: minimum rooted
// encoding over all node choices. Trees related by root shifts share it.
std::string free_tree_key(const TreeNode& root);

// Same tree with every node mode negated (value conjugation partner).
TreeCPtr negate_modes(const TreeNode& root);

// ---------------------------------------------------------------------------
// Enumeration

struct TreeCatalog {
    // trees[k]: every distinct topological tree of order k whose internal
    // (non-root) lines all carry nonzero momentum. Total momentum may be zero.
    std::vector<std::vector<TreeCPtr>> trees;
    int order_max = 0;
};

TreeCatalog enumerate_topological_trees(const Model& model, int K);

// Trees of order k with total momentum nu, in deterministic catalog order.
std::vector<TreeCPtr> enumerate_trees(const TreeCatalog& cat, int k, const Mode& nu);

// ---------------------------------------------------------------------------
// Evaluation

inline double inv_factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return 1.0 / f;
}

template <class S>
S times_i(const S& x) {
    return x * S(Cplx(0.0, 1.0));
}
template <>
inline std::complex<long double> times_i(const std::complex<long double>& x) {
    return x * std::complex<long double>(0.0L, 1.0L);
}
template <class C, int N>
Jet<C, N> times_i(const Jet<C, N>& x) {
    Jet<C, N> r = x;
    for (auto& c : r.a) c *= C(0.0, 1.0);
    return r;
}

template <class S>
struct scalar_traits {
    static std::vector<std::pair<Mode, S>> phased(const Model& m, const Mode& nu) {
        std::vector<std::pair<Mode, S>> out;
        if (const auto* t = m.phased_terms(nu))
            for (const auto& pt : *t) out.emplace_back(pt.mu, S(pt.c));
        return out;
    }
};
template <>
struct scalar_traits<std::complex<long double>> {
    static std::vector<std::pair<Mode, std::complex<long double>>> phased(const Model& m, const Mode& nu) {
        return m.phased_terms_prec<long double>(nu);
    }
};

// Reduced value of a subtree: the full (r+s)-vector output of the root node
// factor with all lines below it dressed by `prop`, symmetry factors
// included, and no propagator on the subtree's own root line.
//   prop(momentum) -> Mat<S> applied to each internal line,
//   leaf(kappa)    -> beta-block vector of length s.
template <class S, class Prop, class LeafSrc>
std::vector<S> tree_output(const Model& model, const TreeNode& node, Prop&& prop, LeafSrc&& leaf) {
    const int r = model.r(), s = model.s(), d = r + s;
    struct GV {
        std::vector<S> u;
        int mult;
    };
    std::vector<GV> gs;
    gs.reserve(node.groups.size());
    double local = 1.0;
    for (const auto& g : node.groups) {
        std::vector<S> u;
        if (g.sub) {
            auto out = tree_output<S>(model, *g.sub, prop, leaf);
            u = prop(g.sub->momentum) * out;
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
        for (int j = 0; j < r; ++j)
            if (node.mode[j] != 0) out[j] += times_i(p * S(static_cast<double>(node.mode[j])));
        for (int j = 0; j < s; ++j)
            if (mu[j] != 0) out[r + j] += times_i(p * S(static_cast<double>(mu[j])));
    }
    for (auto& x : out) x = x * S(local);
    return out;
}

// Diagonal small-divisor propagator; rejects zero momentum.
template <class S>
Mat<S> bare_propagator(const Model& model, const Mode& momentum) {
    if (is_zero(momentum))
        throw ZeroDivisorLine("line with zero momentum requires a true propagator");
    double x = model.omega_dot(momentum);
    Mat<S> g(model.d, model.d);
    for (int i = 0; i < model.d; ++i) g(i, i) = S(1.0 / (x * x));
    return g;
}

enum class Gamma { Alpha, Beta };

template <class S>
std::vector<S> gamma_block(const Model& model, const std::vector<S>& full, Gamma gamma) {
    if (gamma == Gamma::Alpha)
        return std::vector<S>(full.begin(), full.begin() + model.r());
    return std::vector<S>(full.begin() + model.r(), full.end());
}

// Value of one tree with bare propagators. `value` includes the symmetry
// factor (reported separately as `comb`); the root-line propagator is
// included unless the total momentum vanishes, in which case the reduced
// value is returned.
template <class R>
struct TreeValueT {
    std::vector<std::complex<R>> value;
    double comb = 1.0;
};

template <class R, class LeafSrc>
TreeValueT<R> tree_value(const Model& model, const TreeNode& tree, LeafSrc&& leaf, Gamma gamma) {
    using S = std::complex<R>;
    auto prop = [&](const Mode& nu) { return bare_propagator<S>(model, nu); };
    auto out = tree_output<S>(model, tree, prop, leaf);
    if (!is_zero(tree.momentum)) out = bare_propagator<S>(model, tree.momentum) * out;
    return {gamma_block(model, out, gamma), tree.comb};
}

// Coefficient reconstruction: sum of tree values over all trees of order k
// with the requested momentum. At zero momentum the reduced values are
// summed (the root line carries no divisor there).
template <class R, class LeafSrc>
std::vector<std::complex<R>> sum_tree_values(const Model& model, const TreeCatalog& cat, int k,
                                             const Mode& nu, Gamma gamma, LeafSrc&& leaf) {
    using S = std::complex<R>;
    std::vector<S> acc(gamma == Gamma::Alpha ? model.r() : model.s(), S(0));
    for (const auto& t : enumerate_trees(cat, k, nu)) {
        auto tv = tree_value<R>(model, *t, leaf, gamma);
        for (size_t j = 0; j < acc.size(); ++j) acc[j] += tv.value[j];
    }
    return acc;
}

// The single excluded tree in the counterterm sum: a zero-mode node whose
// only child is a leaf of the top label.
bool is_counterterm_pattern(const TreeNode& tree, int kappa);

// Counterterm factors b0^(kappa) for kappa = 1..kmax from reduced tree sums
// of one order higher, recursively.
template <class R>
std::map<int, std::vector<std::complex<R>>> tree_leaf_factors(const Model& model,
                                                              const TreeCatalog& cat, int kmax) {
    using S = std::complex<R>;
    const int s = model.s();
    const Mode zero(model.r(), 0);
    std::map<int, std::vector<S>> table;
    auto leaf = [&](int kappa) -> std::vector<S> {
        auto it = table.find(kappa);
        if (it == table.end()) throw ValidationError("leaf factor requested above computed order");
        return it->second;
    };
    for (int kappa = 1; kappa <= kmax; ++kappa) {
        std::vector<S> sum(s, S(0));
        for (const auto& t : enumerate_trees(cat, kappa + 1, zero)) {
            if (is_counterterm_pattern(*t, kappa)) continue;
            auto prop = [&](const Mode& nu) { return bare_propagator<S>(model, nu); };
            auto out = tree_output<S>(model, *t, prop, leaf);
            for (int j = 0; j < s; ++j) sum[j] += out[model.r() + j];
        }
        std::vector<S> b0(s, S(0));
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) b0[i] -= static_cast<R>(model.hess_inv(i, j)) * sum[j];
        table[kappa] = b0;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Zero-momentum cancellation

struct FamilyReport {
    std::string key;       // canonical unrooted form
    int members = 0;       // distinct rooted trees in the family
    double sum_abs = 0.0;  // |sum of reduced alpha values|
    double max_summand = 0.0;
};
struct CancellationReport {
    int order = 0;
    int tree_count = 0;
    double global_sum_abs = 0.0;
    double max_summand = 0.0;
    double worst_family_rel = 0.0;  // max family sum_abs / max_summand
    std::vector<FamilyReport> families;
};

// Groups order-k zero-momentum trees into root-shift families and sums the
// reduced alpha values; both the per-family and global sums must vanish.
CancellationReport verify_zero_momentum_cancellation(
    const Model& model, const TreeCatalog& cat, int k,
    const std::function<std::vector<Cplx>(int)>& leaf);

}  // namespace lindstedt
