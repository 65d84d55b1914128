#include "lindstedt/trees.hpp"

#include <algorithm>
#include <cmath>

namespace lindstedt {

std::string tree_child_enc(const TreeChild& c) {
    if (c.sub) return c.sub->enc;
    return "L" + std::to_string(c.leaf_order);
}

TreeCPtr make_tree_node(Mode mode, std::vector<TreeChild> children) {
    // merge identical children, sort by encoding
    std::sort(children.begin(), children.end(), [](const TreeChild& a, const TreeChild& b) {
        return tree_child_enc(a) < tree_child_enc(b);
    });
    std::vector<TreeChild> groups;
    for (auto& c : children) {
        if (!groups.empty() && tree_child_enc(groups.back()) == tree_child_enc(c))
            groups.back().mult += c.mult;
        else
            groups.push_back(c);
    }
    auto node = std::make_shared<TreeNode>();
    node->mode = std::move(mode);
    node->groups = std::move(groups);
    node->order = 1;
    node->node_count = 1;
    node->momentum = node->mode;
    node->comb = 1.0;
    std::string enc = "(" + mode_str(node->mode) + "|";
    for (const auto& g : node->groups) {
        if (g.sub) {
            node->order += g.mult * g.sub->order;
            node->node_count += g.mult * g.sub->node_count;
            for (int i = 0; i < g.mult; ++i) node->momentum = mode_add(node->momentum, g.sub->momentum);
            node->comb *= std::pow(g.sub->comb, g.mult);
        } else {
            node->order += g.mult * g.leaf_order;
        }
        node->comb *= inv_factorial(g.mult);
        enc += tree_child_enc(g) + "x" + std::to_string(g.mult) + ";";
    }
    enc += ")";
    node->enc = std::move(enc);
    return node;
}

static void flatten_into(const TreeNode& node, int parent, FlatTree& ft) {
    int me = static_cast<int>(ft.v.size());
    ft.v.push_back({node.mode, false, 0, parent});
    for (const auto& g : node.groups) {
        for (int i = 0; i < g.mult; ++i) {
            if (g.sub)
                flatten_into(*g.sub, me, ft);
            else
                ft.v.push_back({Mode{}, true, g.leaf_order, me});
        }
    }
}

FlatTree flatten(const TreeNode& root) {
    FlatTree ft;
    ft.order = root.order;
    flatten_into(root, -1, ft);
    return ft;
}

static TreeCPtr build_from_adjacency(const FlatTree& ft,
                                     const std::vector<std::vector<int>>& adj, int v, int parent) {
    std::vector<TreeChild> children;
    for (int u : adj[v]) {
        if (u == parent) continue;
        if (ft.v[u].is_leaf)
            children.push_back({nullptr, ft.v[u].kappa, 1});
        else
            children.push_back({build_from_adjacency(ft, adj, u, v), 0, 1});
    }
    return make_tree_node(ft.v[v].mode, std::move(children));
}

TreeCPtr reroot(const FlatTree& ft, int new_root) {
    std::vector<std::vector<int>> adj(ft.v.size());
    for (size_t i = 1; i < ft.v.size(); ++i) {
        adj[i].push_back(ft.v[i].parent);
        adj[ft.v[i].parent].push_back(static_cast<int>(i));
    }
    return build_from_adjacency(ft, adj, new_root, -1);
}

std::string free_tree_key(const TreeNode& root) {
    FlatTree ft = flatten(root);
    std::string best;
    for (size_t i = 0; i < ft.v.size(); ++i) {
        if (ft.v[i].is_leaf) continue;
        std::string enc = reroot(ft, static_cast<int>(i))->enc;
        if (best.empty() || enc < best) best = enc;
    }
    return best;
}

TreeCPtr negate_modes(const TreeNode& root) {
    std::vector<TreeChild> children;
    for (const auto& g : root.groups) {
        TreeChild c = g;
        if (g.sub) c.sub = negate_modes(*g.sub);
        children.push_back(c);
    }
    return make_tree_node(mode_neg(root.mode), std::move(children));
}

// ---------------------------------------------------------------------------

namespace {

struct Item {
    TreeCPtr sub;  // null for leaf
    int order;
};

// Multisets over `items` with a given total order; the chosen multiplicities
// are appended to `chosen` and reported through `emit`.
void choose_multisets(const std::vector<Item>& items, size_t idx, int remaining,
                      std::vector<TreeChild>& chosen,
                      const std::function<void(const std::vector<TreeChild>&)>& emit) {
    if (remaining == 0) {
        emit(chosen);
        return;
    }
    if (idx >= items.size()) return;
    const Item& it = items[idx];
    int max_mult = remaining / it.order;
    for (int m = max_mult; m >= 0; --m) {
        if (m > 0) {
            TreeChild c;
            c.sub = it.sub;
            c.leaf_order = it.sub ? 0 : it.order;
            c.mult = m;
            chosen.push_back(c);
        }
        choose_multisets(items, idx + 1, remaining - m * it.order, chosen, emit);
        if (m > 0) chosen.pop_back();
    }
}

bool mode_has_nonzero_mu(const Model& model, const Mode& nu) {
    const auto* terms = model.phased_terms(nu);
    if (!terms) return false;
    for (const auto& t : *terms)
        if (!is_zero(t.mu)) return true;
    return false;
}

// A node can never contribute if its mode is zero and all its couplings have
// zero normal mode: every factor it could emit vanishes identically.
bool mode_usable(const Model& model, const Mode& nu) {
    if (!model.phased_terms(nu)) return false;
    return !is_zero(nu) || mode_has_nonzero_mu(model, nu);
}

}  // namespace

TreeCatalog enumerate_topological_trees(const Model& model, int K) {
    TreeCatalog cat;
    cat.order_max = K;
    cat.trees.assign(K + 1, {});

    std::vector<Mode> roots;
    for (const auto& nu : model.pert.nu_support)
        if (mode_usable(model, nu)) roots.push_back(nu);

    for (int k = 1; k <= K; ++k) {
        // candidate children: previously built subtrees with nonzero momentum,
        // and leaves of every lower order
        std::vector<Item> subtree_items, leaf_items;
        for (int j = 1; j < k; ++j) {
            for (const auto& t : cat.trees[j])
                if (!is_zero(t->momentum)) subtree_items.push_back({t, j});
            leaf_items.push_back({nullptr, j});
        }
        for (const auto& nu0 : roots) {
            std::vector<Item> items = subtree_items;
            // leaf factors couple through the normal-mode slot only
            if (mode_has_nonzero_mu(model, nu0))
                items.insert(items.end(), leaf_items.begin(), leaf_items.end());
            std::vector<TreeChild> chosen;
            choose_multisets(items, 0, k - 1, chosen, [&](const std::vector<TreeChild>& children) {
                cat.trees[k].push_back(make_tree_node(nu0, children));
            });
        }
    }
    return cat;
}

std::vector<TreeCPtr> enumerate_trees(const TreeCatalog& cat, int k, const Mode& nu) {
    std::vector<TreeCPtr> out;
    if (k < 1 || k > cat.order_max) return out;
    for (const auto& t : cat.trees[k])
        if (t->momentum == nu) out.push_back(t);
    return out;
}

bool is_counterterm_pattern(const TreeNode& tree, int kappa) {
    return is_zero(tree.mode) && tree.groups.size() == 1 && !tree.groups[0].sub &&
           tree.groups[0].mult == 1 && tree.groups[0].leaf_order == kappa;
}

CancellationReport verify_zero_momentum_cancellation(
    const Model& model, const TreeCatalog& cat, int k,
    const std::function<std::vector<Cplx>(int)>& leaf) {
    CancellationReport rep;
    rep.order = k;
    const Mode zero(model.r(), 0);
    const int r = model.r();

    std::map<std::string, std::pair<std::vector<Cplx>, FamilyReport>> families;
    std::vector<Cplx> global(r, Cplx(0));

    for (const auto& t : enumerate_trees(cat, k, zero)) {
        auto prop = [&](const Mode& nu) { return bare_propagator<Cplx>(model, nu); };
        auto out = tree_output<Cplx>(model, *t, prop, leaf);
        std::vector<Cplx> val(out.begin(), out.begin() + r);
        double mag = 0;
        for (const auto& c : val) mag = std::max(mag, std::abs(c));

        std::string key = free_tree_key(*t);
        auto& slot = families[key];
        if (slot.first.empty()) {
            slot.first.assign(r, Cplx(0));
            slot.second.key = key;
        }
        for (int j = 0; j < r; ++j) {
            slot.first[j] += val[j];
            global[j] += val[j];
        }
        slot.second.members += 1;
        slot.second.max_summand = std::max(slot.second.max_summand, mag);
        rep.max_summand = std::max(rep.max_summand, mag);
        rep.tree_count += 1;
    }

    for (auto& [key, slot] : families) {
        (void)key;
        double s = 0;
        for (const auto& c : slot.first) s = std::max(s, std::abs(c));
        slot.second.sum_abs = s;
        if (slot.second.max_summand > 0)
            rep.worst_family_rel = std::max(rep.worst_family_rel, s / slot.second.max_summand);
        rep.families.push_back(slot.second);
    }
    for (const auto& c : global) rep.global_sum_abs = std::max(rep.global_sum_abs, std::abs(c));
    return rep;
}

}  // namespace lindstedt
