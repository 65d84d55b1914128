#include "lindstedt/ref_models.hpp"

#include <cmath>

namespace lindstedt {

namespace {
Model build_ref1(double beta0, const ModelOptions& opts) {
    const double sigma = 0.61803398874989484820;  // (sqrt(5)-1)/2
    auto freq = make_frequency({1.0, sigma}, 0.38, 1.0);
    std::vector<std::tuple<Mode, Mode, Cplx>> terms = {
        {{0, 0}, {1}, Cplx(0.5, 0.0)},   // cos(beta)
        {{1, 0}, {0}, Cplx(0.5, 0.0)},   // cos(alpha_1)
        {{1, 1}, {1}, Cplx(0.5, 0.0)},   // cos(alpha_1 + alpha_2 + beta)
    };
    auto pert = make_perturbation(2, 1, terms, /*symmetrize=*/true);
    return make_model(freq, pert, {beta0}, opts);
}
}  // namespace

Model make_ref1(const ModelOptions& opts) { return build_ref1(0.0, opts); }

Model make_ref1_beta_pi(const ModelOptions& opts) { return build_ref1(M_PI, opts); }

Model resolve_model(const std::string& name_or_path, const ModelOptions& opts) {
    if (name_or_path == "ref1") return make_ref1(opts);
    if (name_or_path == "ref1-pi") return make_ref1_beta_pi(opts);
    return load_model_file(name_or_path, opts);
}

}  // namespace lindstedt
