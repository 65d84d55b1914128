#pragma once

#include <vector>

#include "lindstedt/model.hpp"
#include "lindstedt/scales.hpp"
#include "lindstedt/trees.hpp"

namespace lindstedt {

// Sentinel scale for structures with no internal line (degenerate clusters).
inline constexpr int kScaleTop = 2;

struct ScaledLine {
    int child = -1;   // vertex the line exits; line = (child -> parent)
    int parent = -1;  // -1 for the root line
    Mode momentum;
    int scale = kScaleTop;
    bool leaf_line = false;
    bool present = true;  // root line is absent when total momentum vanishes
};

struct Cluster {
    int scale = kScaleTop;       // min internal line scale; kScaleTop for single-node clusters
    std::vector<int> nodes;      // node vertex ids
    std::vector<int> leaves;     // leaf vertex ids attached inside
    std::vector<int> lines;      // internal lines, as child-vertex ids
    Mode total_mode;
    bool self_energy = false;
    int enter_line = -1;         // child-vertex id of the single entering node-line
    int exit_line = -1;          // child-vertex id of the exiting line (== cluster top vertex)
    int height = -1;             // nesting depth among self-energy graphs
    std::vector<int> t0_nodes;   // after removing zero-momentum proper subclusters
    int t0_mass = 0;             // sum |nu_v|_1 over t0_nodes
};

struct ScaledTree {
    FlatTree ft;
    std::vector<ScaledLine> lines;  // indexed by child vertex id
    std::vector<Cluster> clusters;
    std::vector<bool> self_energy_exit;  // per vertex id: its exiting line closes a self-energy graph
    int min_scale = kScaleTop;
};

// Labels every line with its scale, computes the cluster forest and detects
// self-energy graphs (one entering node-line, one exiting line, zero total
// mode, mode mass within the window of the entering scale). A zero-mode
// node with exactly one entering node-line is a degenerate self-energy
// graph regardless of scales: its mode mass is zero.
ScaledTree assign_scales(const Model& model, const ScaleSequence& seq, FlatTree ft);

bool has_self_energy_graph(const ScaledTree& st);

struct BryunoLevel {
    int n = 0;
    int normal_lines = 0;     // N*_n
    int self_energy_lines = 0;
    double bound = 0.0;       // max(0, 2 M 2^{(n+3)/tau} - 1)
    bool ok = true;
};
struct BryunoReport {
    int mass = 0;  // sum over nodes of |nu_v|_1
    std::vector<BryunoLevel> levels;
    bool ok = true;
};

// Scale-counting bound on small-divisor lines, per scale.
BryunoReport bryuno_check(const ScaledTree& st, double tau);

// All reattachments of the external lines of a self-energy graph to the
// nodes of its mode-carrying core. Vertex ids and payloads are preserved;
// only parent pointers change, so lines correspond across the family by
// child vertex id.
std::vector<FlatTree> shift_family(const ScaledTree& st, int cluster_index);

}  // namespace lindstedt
