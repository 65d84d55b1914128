#include "lindstedt/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace lindstedt {

Frequency make_frequency(std::vector<double> omega, double C0, double tau) {
    Frequency f;
    f.omega = std::move(omega);
    f.C0 = C0;
    f.tau = tau;
    if (f.omega.empty()) throw ValidationError("frequency: empty rotation vector");
    if (!(C0 > 0.0)) throw ValidationError("frequency: C0 must be positive");
    if (tau < static_cast<double>(f.r() - 1))
        throw ValidationError("frequency: tau below r-1");
    double scale = std::pow(2.0, tau) / C0;
    f.omega0.resize(f.omega.size());
    for (size_t i = 0; i < f.omega.size(); ++i) f.omega0[i] = scale * f.omega[i];
    return f;
}

namespace {
void walk_ball(int r, int radius, Mode& nu, int pos, int used, const std::function<void(const Mode&)>& fn) {
    if (pos == r) {
        if (used > 0) fn(nu);
        return;
    }
    for (int c = -(radius - used); c <= radius - used; ++c) {
        nu[pos] = c;
        walk_ball(r, radius, nu, pos + 1, used + std::abs(c), fn);
    }
    nu[pos] = 0;
}
}  // namespace

double diophantine_margin(const Frequency& freq, int Nmax) {
    if (Nmax < 1) throw ValidationError("diophantine_margin: Nmax must be >= 1");
    double best = -1.0;
    Mode nu(freq.r(), 0);
    walk_ball(freq.r(), Nmax, nu, 0, 0, [&](const Mode& m) {
        double v = std::abs(mode_dot(freq.omega, m)) * std::pow(static_cast<double>(norm1(m)), freq.tau) / freq.C0;
        if (best < 0.0 || v < best) best = v;
    });
    return best;
}

Perturbation make_perturbation(int r, int s, const std::vector<std::tuple<Mode, Mode, Cplx>>& terms,
                               bool symmetrize) {
    if (r < 1 || s < 1) throw ValidationError("perturbation: need r >= 1 and s >= 1");
    Perturbation p;
    p.r = r;
    p.s = s;
    for (const auto& [nu, mu, c] : terms) {
        if (static_cast<int>(nu.size()) != r || static_cast<int>(mu.size()) != s)
            throw ValidationError("perturbation: mode length mismatch");
        p.terms[{nu, mu}] += c;
    }
    if (symmetrize) {
        auto snapshot = p.terms;
        for (const auto& [key, c] : snapshot) {
            auto partner = std::make_pair(mode_neg(key.first), mode_neg(key.second));
            if (!p.terms.count(partner)) p.terms[partner] = std::conj(c);
        }
    }
    // reality and support
    double scale = 0.0;
    for (const auto& [key, c] : p.terms) scale = std::max(scale, std::abs(c));
    for (const auto& [key, c] : p.terms) {
        auto partner = std::make_pair(mode_neg(key.first), mode_neg(key.second));
        auto it = p.terms.find(partner);
        if (it == p.terms.end() || std::abs(it->second - std::conj(c)) > 1e-14 * scale)
            throw ValidationError("perturbation: reality constraint broken at nu=" + mode_str(key.first) +
                                  " mu=" + mode_str(key.second));
    }
    for (const auto& [key, c] : p.terms) {
        (void)c;
        p.Nf = std::max(p.Nf, norm1(key.first));
        if (p.nu_support.empty() || p.nu_support.back() != key.first) p.nu_support.push_back(key.first);
    }
    std::sort(p.nu_support.begin(), p.nu_support.end());
    p.nu_support.erase(std::unique(p.nu_support.begin(), p.nu_support.end()), p.nu_support.end());
    return p;
}

Equilibrium check_equilibrium(const Perturbation& pert, const std::vector<double>& beta0, double tol) {
    const int s = pert.s;
    if (static_cast<int>(beta0.size()) != s) throw ValidationError("equilibrium: beta0 length mismatch");
    Mode zero(pert.r, 0);

    double scale = 0.0;
    std::vector<Cplx> grad(s, Cplx(0));
    MatC hess(s, s);
    for (const auto& [key, c] : pert.terms) {
        if (key.first != zero) continue;
        const Mode& mu = key.second;
        scale = std::max(scale, std::abs(c) * norm1(mu));
        double phase = 0.0;
        for (int j = 0; j < s; ++j) phase += mu[j] * beta0[j];
        Cplx w = c * Cplx(std::cos(phase), std::sin(phase));
        for (int i = 0; i < s; ++i) {
            grad[i] += w * Cplx(0, mu[i]);
            for (int j = 0; j < s; ++j) hess(i, j) += -w * static_cast<double>(mu[i]) * static_cast<double>(mu[j]);
        }
    }
    if (tol <= 0.0) tol = 1e-12 * std::max(scale, 1e-300);

    Equilibrium eq;
    eq.beta0 = beta0;
    for (const auto& g : grad) eq.gradient_norm = std::max(eq.gradient_norm, std::abs(g));
    if (eq.gradient_norm > tol)
        throw NotCritical("beta0 is not a critical point of the averaged perturbation (|grad| = " +
                          std::to_string(eq.gradient_norm) + ")");

    eq.hessian = MatR(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
            if (std::abs(hess(i, j).imag()) > tol)
                throw ValidationError("equilibrium: hessian has a nonreal entry");
            eq.hessian(i, j) = 0.5 * (hess(i, j).real() + hess(j, i).real());
        }

    auto eig = symmetric_eigenvalues(eq.hessian);
    double eig_scale = 0.0;
    for (double e : eig) eig_scale = std::max(eig_scale, std::abs(e));
    bool any_pos = false, any_neg = false;
    for (double e : eig) {
        if (std::abs(e) <= tol * std::max(1.0, eig_scale))
            throw Degenerate("equilibrium hessian has a near-zero eigenvalue");
        (e > 0 ? any_pos : any_neg) = true;
    }
    if (any_pos && any_neg)
        throw Indefinite("equilibrium hessian is indefinite; no hyperbolic branch");
    eq.branch = any_neg ? Branch::HyperbolicPositiveEps : Branch::HyperbolicNegativeEps;
    return eq;
}

Cplx& DerivTensor::at(const std::vector<int>& idx) {
    size_t flat = 0;
    for (size_t i = 0; i < idx.size(); ++i) flat = flat * dims[i] + idx[i];
    return a[flat];
}

DerivTensor derivative_tensor(const Perturbation& pert, const Mode& nu, int p, int q,
                              const std::vector<double>& beta0) {
    DerivTensor t;
    t.dims.assign(p, pert.r);
    for (int i = 0; i < q; ++i) t.dims.push_back(pert.s);
    size_t total = 1;
    for (int d : t.dims) total *= d;
    t.a.assign(total, Cplx(0));

    for (const auto& [key, c] : pert.terms) {
        if (key.first != nu) continue;
        const Mode& mu = key.second;
        double phase = 0.0;
        for (int j = 0; j < pert.s; ++j) phase += mu[j] * beta0[j];
        Cplx w = c * Cplx(std::cos(phase), std::sin(phase));
        // pure tensor power (i nu)^p (i mu)^q
        for (size_t flat = 0; flat < total; ++flat) {
            size_t rest = flat;
            Cplx term = w;
            for (int slot = static_cast<int>(t.dims.size()) - 1; slot >= 0; --slot) {
                int idx = static_cast<int>(rest % t.dims[slot]);
                rest /= t.dims[slot];
                int comp = (slot < p) ? nu[idx] : mu[idx];
                term *= Cplx(0, comp);
            }
            t.a[flat] += term;
        }
    }
    return t;
}

Model make_model(Frequency freq, Perturbation pert, std::vector<double> beta0,
                 const ModelOptions& opts) {
    if (freq.r() != pert.r) throw ValidationError("model: frequency / perturbation dimension mismatch");
    Model m;
    m.freq = std::move(freq);
    m.pert = std::move(pert);
    m.eq = check_equilibrium(m.pert, beta0, opts.gradient_tol);
    m.d = m.pert.r + m.pert.s;
    double min_pivot = 0.0;
    MatC hc(m.pert.s, m.pert.s);
    for (int i = 0; i < m.pert.s; ++i)
        for (int j = 0; j < m.pert.s; ++j) hc(i, j) = m.eq.hessian(i, j);
    MatC hinv;
    try {
        hinv = hc.inverse(&min_pivot);
    } catch (const NearSingularInversion&) {
        throw SingularHessian("equilibrium hessian is singular");
    }
    m.hess_inv = MatR(m.pert.s, m.pert.s);
    for (int i = 0; i < m.pert.s; ++i)
        for (int j = 0; j < m.pert.s; ++j) m.hess_inv(i, j) = hinv(i, j).real();

    for (const auto& [key, c] : m.pert.terms) {
        double phase = 0.0;
        for (int j = 0; j < m.pert.s; ++j) phase += key.second[j] * m.eq.beta0[j];
        m.phased[key.first].push_back({key.second, c * Cplx(std::cos(phase), std::sin(phase))});
    }
    m.margin_nmax = opts.diophantine_nmax;
    m.margin_checked = diophantine_margin(m.freq, opts.diophantine_nmax);
    return m;
}

const std::vector<PhasedTerm>* Model::phased_terms(const Mode& nu) const {
    auto it = phased.find(nu);
    return it == phased.end() ? nullptr : &it->second;
}

namespace {
double parse_decimal(const nlohmann::json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string& s = j.get<std::string>();
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError("malformed decimal for " + what + ": '" + s + "'");
        return v;
    }
    throw ParseError("expected decimal (number or string) for " + what);
}
}  // namespace

Model load_model(const std::string& json_text, const ModelOptions& opts) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("model config: ") + e.what());
    }
    try {
        for (const char* field : {"r", "s", "omega", "tau", "C0", "beta0", "terms"})
            if (!j.contains(field)) throw ParseError(std::string("model config: missing field '") + field + "'");
        int r = j.at("r").get<int>();
        int s = j.at("s").get<int>();
        std::vector<double> omega;
        for (const auto& x : j.at("omega")) omega.push_back(parse_decimal(x, "omega"));
        if (static_cast<int>(omega.size()) != r) throw ParseError("model config: omega length != r");
        double tau = parse_decimal(j.at("tau"), "tau");
        double C0 = parse_decimal(j.at("C0"), "C0");
        std::vector<double> beta0;
        for (const auto& x : j.at("beta0")) beta0.push_back(parse_decimal(x, "beta0"));

        std::vector<std::tuple<Mode, Mode, Cplx>> terms;
        for (const auto& t : j.at("terms")) {
            Mode nu = t.at("nu").get<Mode>();
            Mode mu = t.at("mu").get<Mode>();
            double re = t.contains("re") ? parse_decimal(t.at("re"), "re") : 0.0;
            double im = t.contains("im") ? parse_decimal(t.at("im"), "im") : 0.0;
            terms.emplace_back(nu, mu, Cplx(re, im));
        }
        bool symmetrize = j.value("symmetrize", false);

        ModelOptions o = opts;
        if (j.contains("diophantine_nmax")) o.diophantine_nmax = j.at("diophantine_nmax").get<int>();
        return make_model(make_frequency(omega, C0, tau), make_perturbation(r, s, terms, symmetrize),
                          beta0, o);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model config: ") + e.what());
    }
}

Model load_model_file(const std::string& path, const ModelOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str(), opts);
}

}  // namespace lindstedt
