#include "lindstedt/scaled_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace lindstedt {

namespace {

int find_root(const FlatTree& ft) {
    for (size_t i = 0; i < ft.v.size(); ++i)
        if (ft.v[i].parent < 0) return static_cast<int>(i);
    throw ValidationError("flat tree has no root");
}

std::vector<std::vector<int>> children_lists(const FlatTree& ft) {
    std::vector<std::vector<int>> ch(ft.v.size());
    for (size_t i = 0; i < ft.v.size(); ++i)
        if (ft.v[i].parent >= 0) ch[ft.v[i].parent].push_back(static_cast<int>(i));
    return ch;
}

}  // namespace

ScaledTree assign_scales(const Model& model, const ScaleSequence& seq, FlatTree ft) {
    ScaledTree st;
    st.ft = std::move(ft);
    const int n = static_cast<int>(st.ft.v.size());
    const int root = find_root(st.ft);
    auto ch = children_lists(st.ft);

    // subtree node-mode sums
    std::vector<Mode> momentum(n, Mode(model.r(), 0));
    std::function<void(int)> sum_modes = [&](int v) {
        if (!st.ft.v[v].is_leaf) momentum[v] = st.ft.v[v].mode;
        for (int c : ch[v]) {
            sum_modes(c);
            momentum[v] = mode_add(momentum[v], momentum[c]);
        }
    };
    sum_modes(root);

    st.lines.assign(n, {});
    st.self_energy_exit.assign(n, false);
    for (int v = 0; v < n; ++v) {
        ScaledLine& ln = st.lines[v];
        ln.child = v;
        ln.parent = st.ft.v[v].parent;
        ln.momentum = momentum[v];
        ln.leaf_line = st.ft.v[v].is_leaf;
        if (ln.leaf_line) continue;
        if (is_zero(ln.momentum)) {
            if (v != root)
                throw ZeroDivisorLine("internal line with zero momentum in scaled tree");
            ln.present = false;  // reduced-value tree: no root propagator
            continue;
        }
        ln.scale = seq.scale_of_raw(std::abs(model.omega_dot(ln.momentum)));
        st.min_scale = std::min(st.min_scale, ln.scale);
    }

    // clusters from the internal-line scale structure
    std::vector<int> internal;  // child ids of node-node lines
    for (int v = 0; v < n; ++v)
        if (v != root && !st.ft.v[v].is_leaf) internal.push_back(v);

    std::set<int> scales;
    for (int v : internal) scales.insert(st.lines[v].scale);

    std::set<std::vector<int>> seen;
    for (int n0 : scales) {
        // components of the node graph over lines with scale >= n0
        std::map<int, int> comp;  // node vertex -> component id
        std::function<int(int)> find = [&](int x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (int v = 0; v < n; ++v)
            if (!st.ft.v[v].is_leaf) comp[v] = v;
        for (int v : internal)
            if (st.lines[v].scale >= n0) comp[find(v)] = find(st.ft.v[v].parent);

        std::map<int, Cluster> by_comp;
        for (int v : internal) {
            if (st.lines[v].scale < n0) continue;
            by_comp[find(v)].lines.push_back(v);
        }
        for (auto& [cid, cl] : by_comp) {
            (void)cid;
            std::set<int> nodes;
            int minsc = kScaleTop;
            for (int lv : cl.lines) {
                nodes.insert(lv);
                nodes.insert(st.ft.v[lv].parent);
                minsc = std::min(minsc, st.lines[lv].scale);
            }
            if (minsc != n0) continue;  // this component belongs to a deeper threshold
            cl.scale = n0;
            cl.nodes.assign(nodes.begin(), nodes.end());
            if (!seen.insert(cl.nodes).second) continue;
            st.clusters.push_back(std::move(cl));
        }
    }

    // degenerate single-node clusters: zero-mode nodes with one entering node-line
    for (int v = 0; v < n; ++v) {
        if (st.ft.v[v].is_leaf || !is_zero(st.ft.v[v].mode)) continue;
        Cluster cl;
        cl.scale = kScaleTop;
        cl.nodes = {v};
        if (!seen.insert(cl.nodes).second) continue;
        st.clusters.push_back(std::move(cl));
    }

    // external lines, leaves, masses, self-energy conditions
    for (auto& cl : st.clusters) {
        std::set<int> in(cl.nodes.begin(), cl.nodes.end());
        cl.total_mode = Mode(model.r(), 0);
        for (int v : cl.nodes) cl.total_mode = mode_add(cl.total_mode, st.ft.v[v].mode);
        for (int v = 0; v < n; ++v) {
            if (st.ft.v[v].is_leaf) {
                if (st.ft.v[v].parent >= 0 && in.count(st.ft.v[v].parent)) cl.leaves.push_back(v);
                continue;
            }
            bool child_in = in.count(v) > 0;
            bool parent_in = st.ft.v[v].parent >= 0 && in.count(st.ft.v[v].parent) > 0;
            if (child_in && !parent_in) cl.exit_line = v;
            if (!child_in && parent_in) {
                if (cl.enter_line < 0)
                    cl.enter_line = v;
                else
                    cl.enter_line = -2;  // more than one entering line
            }
        }
        bool exit_present = cl.exit_line >= 0 && st.lines[cl.exit_line].present;
        bool one_enter = cl.enter_line >= 0;
        cl.t0_nodes = cl.nodes;
        cl.t0_mass = 0;
        for (int v : cl.t0_nodes) cl.t0_mass += norm1(st.ft.v[v].mode);
        if (one_enter && exit_present && is_zero(cl.total_mode)) {
            int n_enter = st.lines[cl.enter_line].scale;
            double window = scale_ball_radius(seq.tau, n_enter);
            // t0: remove zero-momentum proper scale-subclusters (recomputed below
            // once all clusters exist); provisional mass used here is refined after.
            cl.self_energy = (static_cast<double>(cl.t0_mass) <= window) || cl.t0_mass == 0;
        }
    }

    // refine t0 by removing zero-momentum proper subclusters, then re-test
    for (auto& cl : st.clusters) {
        if (cl.nodes.size() <= 1) continue;
        std::set<int> keep(cl.nodes.begin(), cl.nodes.end());
        for (const auto& sub : st.clusters) {
            if (&sub == &cl || sub.nodes.size() >= cl.nodes.size()) continue;
            if (sub.nodes.size() == 1) continue;  // degenerate entries are not removal candidates
            if (!is_zero(sub.total_mode)) continue;
            bool inside = std::all_of(sub.nodes.begin(), sub.nodes.end(),
                                      [&](int v) { return keep.count(v) > 0; });
            if (!inside) continue;
            for (int v : sub.nodes) keep.erase(v);
        }
        cl.t0_nodes.assign(keep.begin(), keep.end());
        cl.t0_mass = 0;
        for (int v : cl.t0_nodes) cl.t0_mass += norm1(st.ft.v[v].mode);
        if (cl.self_energy) {
            int n_enter = st.lines[cl.enter_line].scale;
            double window = scale_ball_radius(seq.tau, n_enter);
            cl.self_energy = (static_cast<double>(cl.t0_mass) <= window);
        }
    }

    for (const auto& cl : st.clusters)
        if (cl.self_energy) st.self_energy_exit[cl.exit_line] = true;

    // heights among self-energy graphs by strict containment
    std::function<int(size_t)> height = [&](size_t i) -> int {
        int h = 0;
        std::set<int> outer(st.clusters[i].nodes.begin(), st.clusters[i].nodes.end());
        for (size_t j = 0; j < st.clusters.size(); ++j) {
            if (j == i || !st.clusters[j].self_energy) continue;
            if (st.clusters[j].nodes.size() >= st.clusters[i].nodes.size()) continue;
            bool inside = std::all_of(st.clusters[j].nodes.begin(), st.clusters[j].nodes.end(),
                                      [&](int v) { return outer.count(v) > 0; });
            if (inside) h = std::max(h, height(j) + 1);
        }
        return h;
    };
    for (size_t i = 0; i < st.clusters.size(); ++i)
        if (st.clusters[i].self_energy) st.clusters[i].height = height(i);

    return st;
}

bool has_self_energy_graph(const ScaledTree& st) {
    for (const auto& cl : st.clusters)
        if (cl.self_energy) return true;
    return false;
}

BryunoReport bryuno_check(const ScaledTree& st, double tau) {
    BryunoReport rep;
    for (size_t v = 0; v < st.ft.v.size(); ++v)
        if (!st.ft.v[v].is_leaf) rep.mass += norm1(st.ft.v[v].mode);
    int lo = 0;
    for (const auto& ln : st.lines)
        if (!ln.leaf_line && ln.present) lo = std::min(lo, ln.scale);
    for (int n = lo; n <= 0; ++n) {
        BryunoLevel lv;
        lv.n = n;
        for (const auto& ln : st.lines) {
            if (ln.leaf_line || !ln.present || ln.scale != n) continue;
            if (st.self_energy_exit[ln.child])
                lv.self_energy_lines += 1;
            else
                lv.normal_lines += 1;
        }
        lv.bound = std::max(0.0, 2.0 * rep.mass * std::pow(2.0, (n + 3) / tau) - 1.0);
        lv.ok = static_cast<double>(lv.normal_lines) <= lv.bound;
        rep.ok = rep.ok && lv.ok;
        rep.levels.push_back(lv);
    }
    return rep;
}

std::vector<FlatTree> shift_family(const ScaledTree& st, int cluster_index) {
    const Cluster& cl = st.clusters.at(cluster_index);
    if (!cl.self_energy) throw ValidationError("shift_family: cluster is not a self-energy graph");
    std::vector<FlatTree> family;
    const int w_top = cl.exit_line;
    const int p_out = st.ft.v[w_top].parent;
    const int c_in = cl.enter_line;

    // undirected internal adjacency over the cluster's node lines
    std::set<int> in(cl.nodes.begin(), cl.nodes.end());
    std::map<int, std::vector<int>> adj;
    for (int v : cl.lines) {
        adj[v].push_back(st.ft.v[v].parent);
        adj[st.ft.v[v].parent].push_back(v);
    }

    for (int exit_t : cl.t0_nodes) {
        for (int enter_t : cl.t0_nodes) {
            FlatTree ft = st.ft;
            // orient the cluster's internal edges toward the new top
            std::function<void(int, int)> orient = [&](int v, int parent) {
                ft.v[v].parent = parent;
                for (int u : adj[v])
                    if (u != parent && in.count(u)) orient(u, v);
            };
            orient(exit_t, p_out);
            ft.v[c_in].parent = enter_t;
            family.push_back(std::move(ft));
        }
    }
    return family;
}

}  // namespace lindstedt
