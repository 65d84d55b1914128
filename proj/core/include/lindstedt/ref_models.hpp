#pragma once

#include <string>

#include "lindstedt/model.hpp"

namespace lindstedt {

// Built-in reference model: two fast angles with the golden-mean pair
// (1, (sqrt(5)-1)/2), one normal angle, perturbation
//   f = cos(beta) + cos(alpha_1) + cos(alpha_1 + alpha_2 + beta),
// expanded at the hyperbolic equilibrium beta0 = 0.
Model make_ref1(const ModelOptions& opts = {});

// Same model expanded at beta0 = pi (the opposite-sign branch).
Model make_ref1_beta_pi(const ModelOptions& opts = {});

// Resolve a model reference: a built-in name ("ref1", "ref1-pi") or a path
// to a config file.
Model resolve_model(const std::string& name_or_path, const ModelOptions& opts = {});

}  // namespace lindstedt
