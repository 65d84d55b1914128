#include "lindstedt/self_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lindstedt {

namespace {
std::string marked_child_enc(const MarkedChild& c) {
    if (c.sub) return c.sub->enc;
    return "L" + std::to_string(c.leaf_order);
}
}  // namespace

MarkedCPtr make_marked_node(Mode mode, bool marked, std::vector<MarkedChild> children) {
    std::sort(children.begin(), children.end(), [](const MarkedChild& a, const MarkedChild& b) {
        return marked_child_enc(a) < marked_child_enc(b);
    });
    std::vector<MarkedChild> groups;
    for (auto& c : children) {
        if (!groups.empty() && marked_child_enc(groups.back()) == marked_child_enc(c))
            groups.back().mult += c.mult;
        else
            groups.push_back(c);
    }
    auto node = std::make_shared<MarkedNode>();
    node->mode = std::move(mode);
    node->marked = marked;
    node->groups = std::move(groups);
    node->order = 1;
    node->node_count = 1;
    node->msum = node->mode;
    node->contains_mark = marked;
    node->comb = 1.0;
    std::string enc = std::string(marked ? "(M" : "(.") + mode_str(node->mode) + "|";
    for (const auto& g : node->groups) {
        if (g.sub) {
            node->order += g.mult * g.sub->order;
            node->node_count += g.mult * g.sub->node_count;
            for (int i = 0; i < g.mult; ++i) node->msum = mode_add(node->msum, g.sub->msum);
            node->comb *= std::pow(g.sub->comb, g.mult);
            node->contains_mark = node->contains_mark || g.sub->contains_mark;
        } else {
            node->order += g.mult * g.leaf_order;
        }
        node->comb *= inv_factorial(g.mult);
        enc += marked_child_enc(g) + "x" + std::to_string(g.mult) + ";";
    }
    enc += ")";
    node->enc = std::move(enc);
    return node;
}

namespace {

MarkedCPtr to_marked(const TreeNode& t) {
    std::vector<MarkedChild> children;
    for (const auto& g : t.groups) {
        MarkedChild c;
        c.leaf_order = g.leaf_order;
        c.mult = g.mult;
        if (g.sub) c.sub = to_marked(*g.sub);
        children.push_back(c);
    }
    return make_marked_node(t.mode, false, std::move(children));
}

TreeCPtr strip_marks(const MarkedNode& m) {
    std::vector<TreeChild> children;
    for (const auto& g : m.groups) {
        TreeChild c;
        c.leaf_order = g.leaf_order;
        c.mult = g.mult;
        if (g.sub) c.sub = strip_marks(*g.sub);
        children.push_back(c);
    }
    return make_tree_node(m.mode, std::move(children));
}

// All ways to mark exactly one node; a marked copy splits off its group.
std::vector<MarkedCPtr> mark_variants(const TreeNode& t) {
    std::vector<MarkedCPtr> out;
    // mark this node
    {
        std::vector<MarkedChild> children;
        for (const auto& g : t.groups) {
            MarkedChild c;
            c.leaf_order = g.leaf_order;
            c.mult = g.mult;
            if (g.sub) c.sub = to_marked(*g.sub);
            children.push_back(c);
        }
        out.push_back(make_marked_node(t.mode, true, std::move(children)));
    }
    // mark inside one subtree group
    for (size_t gi = 0; gi < t.groups.size(); ++gi) {
        if (!t.groups[gi].sub) continue;
        for (const auto& sub_marked : mark_variants(*t.groups[gi].sub)) {
            std::vector<MarkedChild> children;
            for (size_t gj = 0; gj < t.groups.size(); ++gj) {
                const auto& g = t.groups[gj];
                if (gj == gi) {
                    children.push_back({sub_marked, 0, 1});
                    if (g.mult > 1) children.push_back({to_marked(*g.sub), 0, g.mult - 1});
                } else {
                    MarkedChild c;
                    c.leaf_order = g.leaf_order;
                    c.mult = g.mult;
                    if (g.sub) c.sub = to_marked(*g.sub);
                    children.push_back(c);
                }
            }
            out.push_back(make_marked_node(t.mode, false, std::move(children)));
        }
    }
    return out;
}

void flatten_marked_into(const MarkedNode& node, int parent, FlatTree& ft, int& marked_vertex) {
    int me = static_cast<int>(ft.v.size());
    ft.v.push_back({node.mode, false, 0, parent});
    if (node.marked) marked_vertex = me;
    for (const auto& g : node.groups) {
        for (int i = 0; i < g.mult; ++i) {
            if (g.sub)
                flatten_marked_into(*g.sub, me, ft, marked_vertex);
            else
                ft.v.push_back({Mode{}, true, g.leaf_order, me});
        }
    }
}

}  // namespace

SkeletonCatalog build_catalog(const Model& model, const ScaleSequence& seq,
                              const TreeCatalog& trees, int order_max, bool renormalized_only) {
    SkeletonCatalog cat;
    cat.order_max = std::min(order_max, trees.order_max);
    const Mode zero(model.r(), 0);

    for (int k = 1; k <= cat.order_max; ++k) {
        for (const auto& t : enumerate_trees(trees, k, zero)) {
            for (const auto& mv : mark_variants(*t)) {
                FlatTree ft;
                ft.order = mv->order;
                int marked_vertex = -1;
                flatten_marked_into(*mv, -1, ft, marked_vertex);
                ScaledTree st = assign_scales(model, seq, ft);

                bool reject = false;
                int nested_threshold = kNoNested;
                int mass = -1;
                for (const auto& cl : st.clusters) {
                    bool contains_mark =
                        std::find(cl.nodes.begin(), cl.nodes.end(), marked_vertex) != cl.nodes.end();
                    if (static_cast<int>(cl.nodes.size()) == mv->node_count) mass = cl.t0_mass;
                    if (cl.self_energy && !contains_mark) {
                        reject = true;  // nested graph at fixed internal scales
                        break;
                    }
                    bool exit_present = cl.exit_line >= 0 && st.lines[cl.exit_line].present;
                    if (contains_mark && cl.enter_line == -1 && exit_present &&
                        is_zero(cl.total_mode) &&
                        static_cast<int>(cl.nodes.size()) < mv->node_count)
                        nested_threshold = std::min(nested_threshold, cl.t0_mass);
                }
                if (renormalized_only && reject) continue;
                if (mass < 0) {
                    // whole graph never formed a cluster entry: single nonzero-mode
                    // node cannot happen at zero total mode, so this is a leafed
                    // single zero-mode node missed only if modes vanish everywhere
                    mass = 0;
                    for (const auto& fv : ft.v)
                        if (!fv.is_leaf) mass += norm1(fv.mode);
                }

                SelfEnergySkeleton sk;
                sk.root = mv;
                sk.order = mv->order;
                sk.node_count = mv->node_count;
                sk.mass = mass;
                bool any_internal = false;
                int minsc = kNoInternalLines;
                for (const auto& ln : st.lines) {
                    if (ln.leaf_line || !ln.present || ln.parent < 0) continue;
                    any_internal = true;
                    minsc = std::min(minsc, ln.scale);
                }
                sk.n_internal_min = any_internal ? minsc : kNoInternalLines;
                sk.nested_mass_threshold = nested_threshold;
                sk.family_key = free_tree_key(*strip_marks(*mv));
                cat.entries.push_back(std::move(sk));
            }
        }
    }
    return cat;
}

bool skeleton_admissible(const SelfEnergySkeleton& sk, double tau, int n_x) {
    double window = (n_x == kScaleAll) ? std::numeric_limits<double>::infinity()
                                       : scale_ball_radius(tau, n_x);
    if (!(static_cast<double>(sk.mass) <= window)) return false;
    if (sk.nested_mass_threshold != kNoNested &&
        !(window < static_cast<double>(sk.nested_mass_threshold)))
        return false;
    if (sk.n_internal_min != kNoInternalLines && n_x != kScaleAll && sk.n_internal_min < n_x + 3)
        return false;
    return true;
}

std::pair<MatC, MatC> localize(const std::function<MatC(double)>& fn, double h) {
    MatC v0 = fn(0.0);
    auto central = [&](double step) {
        MatC d = fn(step);
        d -= fn(-step);
        d.scale(Cplx(1.0 / (2.0 * step)));
        return d;
    };
    MatC d1 = central(h);
    MatC d2 = central(h / 2.0);
    d2.scale(Cplx(4.0));
    d2 -= d1;
    d2.scale(Cplx(1.0 / 3.0));
    return {v0, d2};
}

namespace {

double block_norm(const MatC& m, int r0, int r1, int c0, int c1) {
    double best = 0;
    for (int i = r0; i < r1; ++i) {
        double s = 0;
        for (int j = c0; j < c1; ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

LocalizedCancellationReport verify_localized_cancellations(
    const Model& model, const ScaleSequence& seq, const SkeletonCatalog& catalog, int order_max,
    const std::function<std::vector<Cplx>(int)>& leaf, double tol_rel) {
    (void)seq;
    LocalizedCancellationReport rep;
    const int r = model.r(), d = model.d;

    std::map<std::string, std::vector<const SelfEnergySkeleton*>> families;
    for (const auto& sk : catalog.entries)
        if (sk.order <= order_max) families[sk.family_key].push_back(&sk);

    for (const auto& [key, members] : families) {
        FamilyCheck fc;
        fc.key = key;
        fc.members = static_cast<int>(members.size());
        fc.order = members.front()->order;

        MatC sum0(d, d), sum1(d, d);
        double min_arg = std::numeric_limits<double>::infinity();
        for (const auto* sk : members) {
            std::function<void(const MarkedNode&)> scan = [&](const MarkedNode& n) {
                for (const auto& g : n.groups) {
                    if (!g.sub) continue;
                    min_arg = std::min(min_arg, std::abs(mode_dot(model.freq.omega, g.sub->msum)));
                    scan(*g.sub);
                }
            };
            scan(*sk->root);
        }
        double h = std::isfinite(min_arg) ? 1e-4 * min_arg : 1e-4;

        for (const auto* sk : members) {
            auto fn = [&](double x) {
                auto prop = [&](Cplx arg) {
                    MatC g(d, d);
                    for (int i = 0; i < d; ++i) g(i, i) = Cplx(1.0) / (arg * arg);
                    return g;
                };
                return skeleton_value<Cplx>(model, *sk, Cplx(x, 0.0), prop, leaf);
            };
            auto [v0, v1] = localize(fn, h);
            fc.scale_const = std::max(fc.scale_const, inf_norm(v0));
            fc.scale_slope = std::max(fc.scale_slope, inf_norm(v1));
            sum0 += v0;
            sum1 += v1;
        }

        fc.const_aa = block_norm(sum0, 0, r, 0, r);
        fc.const_ab = block_norm(sum0, 0, r, r, d);
        fc.const_ba = block_norm(sum0, r, d, 0, r);
        fc.const_bb = block_norm(sum0, r, d, r, d);
        fc.slope_aa = block_norm(sum1, 0, r, 0, r);
        fc.slope_bb = block_norm(sum1, r, d, r, d);
        MatC bsum(d, d);
        for (int i = 0; i < r; ++i)
            for (int j = r; j < d; ++j) bsum(i, j) = sum1(i, j) + sum1(j, i);
        fc.b_mismatch = block_norm(bsum, 0, r, r, d);

        double sc = std::max(fc.scale_const, 1e-300);
        double ss = std::max(fc.scale_slope, 1e-300);
        rep.worst_type1_rel = std::max({rep.worst_type1_rel, fc.const_aa / sc, fc.slope_aa / ss});
        rep.worst_const_mixed_rel =
            std::max({rep.worst_const_mixed_rel, fc.const_ab / sc, fc.const_ba / sc});
        rep.worst_type4_slope_rel = std::max(rep.worst_type4_slope_rel, fc.slope_bb / ss);
        rep.worst_b_relation_rel = std::max(rep.worst_b_relation_rel, fc.b_mismatch / ss);
        rep.families.push_back(fc);
    }

    rep.ok = rep.worst_type1_rel <= tol_rel && rep.worst_const_mixed_rel <= tol_rel &&
             rep.worst_type4_slope_rel <= tol_rel && rep.worst_b_relation_rel <= tol_rel;
    return rep;
}

}  // namespace lindstedt
