#pragma once

#include <string>

#include "lindstedt/domain.hpp"
#include "lindstedt/oracle.hpp"
#include "lindstedt/renormalized.hpp"
#include "lindstedt/scaled_tree.hpp"
#include "lindstedt/self_energy.hpp"

namespace lindstedt {

// All reports are stable text: section headers, key: value lines, 17
// significant digits, map-ordered rows. Identical inputs give identical bytes.

std::string fmt17(double v);
std::string fmt17(const Cplx& v);

std::string report_model(const Model& model);
std::string report_expand(const Model& model, const FormalSolution& sol);
std::string report_scale_sequence(const ScaleSequence& seq, const ScaleCertificate& cert);
std::string report_cancellations(const CancellationReport& rep);
std::string report_localized(const LocalizedCancellationReport& rep);
std::string report_mlimit(const MLimitResult& res, Cplx x, Cplx eps);
std::string report_block_bounds(const BlockBoundReport& rep);
std::string report_domain(const DomainProbeReport& rep);

// Indented per-vertex listing of a tree with momenta and (optional) scales.
std::string dump_tree(const Model& model, const TreeNode& tree);

}  // namespace lindstedt
