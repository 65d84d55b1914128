#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindstedt/errors.hpp"
#include "lindstedt/linalg.hpp"
#include "lindstedt/mode.hpp"

namespace lindstedt {

// Which side of eps = 0 carries the hyperbolic torus.
enum class Branch { HyperbolicPositiveEps, HyperbolicNegativeEps };

struct Frequency {
    std::vector<double> omega;   // rotation vector, length r
    double C0 = 0.0;             // Diophantine constant
    double tau = 0.0;            // Diophantine exponent, >= r-1
    std::vector<double> omega0;  // 2^tau / C0 * omega, the normalized vector used by the scale ladder

    int r() const { return static_cast<int>(omega.size()); }
};

Frequency make_frequency(std::vector<double> omega, double C0, double tau);

// Exhaustive scan of min |omega.nu| |nu|^tau / C0 over 0 < |nu|_1 <= Nmax.
// A value > 1 certifies the Diophantine condition on the scanned ball.
double diophantine_margin(const Frequency& freq, int Nmax);

struct Perturbation {
    int r = 0;  // angle dimension
    int s = 0;  // normal dimension
    int Nf = 0; // max |nu|_1 over the support
    // (nu, mu) -> coefficient of e^{i(nu.alpha + mu.beta)}
    std::map<std::pair<Mode, Mode>, Cplx> terms;
    std::vector<Mode> nu_support;  // distinct nu, sorted, zero mode included when present
};

// Builds the trig polynomial; with symmetrize set, missing conjugate
// partners are inserted. Verifies the reality constraint either way.
Perturbation make_perturbation(int r, int s,
                               const std::vector<std::tuple<Mode, Mode, Cplx>>& terms,
                               bool symmetrize);

struct Equilibrium {
    std::vector<double> beta0;
    MatR hessian;          // d^2_beta f_0(beta0), real symmetric
    double gradient_norm = 0.0;
    Branch branch = Branch::HyperbolicPositiveEps;
};

// Evaluates grad/hessian of the zero-mode part exactly from the
// coefficients and classifies the branch by eigenvalue signs.
// tol <= 0 selects the scale-relative default.
Equilibrium check_equilibrium(const Perturbation& pert, const std::vector<double>& beta0,
                              double tol = -1.0);

// Dense mixed-derivative tensor of e^{i nu.alpha} f_nu(beta) at beta0:
// p alpha slots then q beta slots, row-major.
struct DerivTensor {
    std::vector<int> dims;
    std::vector<Cplx> a;
    Cplx& at(const std::vector<int>& idx);
};
DerivTensor derivative_tensor(const Perturbation& pert, const Mode& nu, int p, int q,
                              const std::vector<double>& beta0);

// mu-term with the equilibrium phase folded in: c * e^{i mu.beta0}.
struct PhasedTerm {
    Mode mu;
    Cplx c;
};

struct Model {
    Frequency freq;
    Perturbation pert;
    Equilibrium eq;
    int d = 0;  // r + s
    MatR hess_inv;
    double margin_checked = 0.0;  // diophantine_margin at load time
    int margin_nmax = 0;
    std::map<Mode, std::vector<PhasedTerm>> phased;  // per nu, at beta0

    int r() const { return pert.r; }
    int s() const { return pert.s; }

    double omega_dot(const Mode& nu) const { return mode_dot(freq.omega, nu); }
    double omega0_abs(const Mode& nu) const { return std::abs(mode_dot(freq.omega0, nu)); }

    // nullptr when nu is outside the support.
    const std::vector<PhasedTerm>* phased_terms(const Mode& nu) const;

    // Recomputed at the requested floating precision (the stored table is double).
    template <class R>
    std::vector<std::pair<Mode, std::complex<R>>> phased_terms_prec(const Mode& nu) const {
        std::vector<std::pair<Mode, std::complex<R>>> out;
        for (const auto& [key, c] : pert.terms) {
            if (key.first != nu) continue;
            R phase = 0;
            for (size_t i = 0; i < key.second.size(); ++i)
                phase += static_cast<R>(key.second[i]) * static_cast<R>(eq.beta0[i]);
            std::complex<R> e(std::cos(phase), std::sin(phase));
            out.emplace_back(key.second, std::complex<R>(static_cast<R>(c.real()), static_cast<R>(c.imag())) * e);
        }
        return out;
    }
};

struct ModelOptions {
    double gradient_tol = -1.0;  // <=0: scale-relative default
    int diophantine_nmax = 64;
};

Model make_model(Frequency freq, Perturbation pert, std::vector<double> beta0,
                 const ModelOptions& opts = {});

// Structured-document loader (JSON): fields r, s, omega, tau, C0, beta0,
// terms = [{nu, mu, re, im}], and an optional symmetrize flag.
Model load_model(const std::string& json_text, const ModelOptions& opts = {});
Model load_model_file(const std::string& path, const ModelOptions& opts = {});

}  // namespace lindstedt
