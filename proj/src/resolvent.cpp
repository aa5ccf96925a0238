#include "dprime/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dprime/errors.hpp"
#include "dprime/quadrature.hpp"
#include "dprime/simd.hpp"
#include "dprime/spectrum.hpp"

namespace dprime {

namespace {

Complex unscale(Complex v, double log_scale) { return v * std::exp(log_scale); }

struct Nodes {
    std::vector<double> x, w;
};

std::vector<double> panel_cuts(const RealizedProblem& p1, const RealizedProblem* p2) {
    std::vector<double> cuts{p1.a(), p1.b()};
    auto add = [&](const RealizedProblem& p) {
        for (const Atom& a : p.atoms()) cuts.push_back(a.x);
        for (double c : p.spec().potential.breakpoints)
            if (c > p.a() && c < p.b()) cuts.push_back(c);
    };
    add(p1);
    if (p2) add(*p2);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

Nodes gauss_nodes(const std::vector<double>& cuts, int sub, int order) {
    const GaussRule& g = gauss_legendre(order);
    Nodes n;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double h = (cuts[k + 1] - cuts[k]) / sub;
        for (int s = 0; s < sub; ++s) {
            const double c = cuts[k] + (s + 0.5) * h;
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                n.x.push_back(c + 0.5 * h * g.x[i]);
                n.w.push_back(0.5 * h * g.w[i]);
            }
        }
    }
    return n;
}

// Plain arrays for the row sums: phi_j and psi_j share one reference scale each.
struct Factors {
    std::vector<Complex> phi, psi;
    double phi_ref = 0.0, psi_ref = 0.0;
    std::vector<Scaled<Complex>> phi_s, psi_s;
};

Factors factors(const GreenKernel& g, const std::vector<double>& xs) {
    Factors f;
    f.phi_ref = f.psi_ref = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        f.phi_s.push_back(g.phi(x));
        f.psi_s.push_back(g.psi(x));
        f.phi_ref = std::max(f.phi_ref, f.phi_s.back().log_scale);
        f.psi_ref = std::max(f.psi_ref, f.psi_s.back().log_scale);
    }
    for (std::size_t j = 0; j < xs.size(); ++j) {
        f.phi.push_back(unscale(f.phi_s[j].value, f.phi_s[j].log_scale - f.phi_ref));
        f.psi.push_back(unscale(f.psi_s[j].value, f.psi_s[j].log_scale - f.psi_ref));
    }
    return f;
}

double hs_once(const GreenKernel& g1, const GreenKernel& g2, const Nodes& n) {
    const Factors f1 = factors(g1, n.x), f2 = factors(g2, n.x);
    const auto d1 = g1.denominator(), d2 = g2.denominator();
    const std::size_t N = n.x.size();
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        // s_j <= x_i: G = phi(s_j) psi(x_i) / d; s_j > x_i: G = psi(s_j) phi(x_i) / d.
        const Complex c1 = unscale(f1.psi_s[i].value / d1.value, f1.psi_s[i].log_scale + f1.phi_ref - d1.log_scale);
        const Complex c2 = unscale(f2.psi_s[i].value / d2.value, f2.psi_s[i].log_scale + f2.phi_ref - d2.log_scale);
        const Complex e1 = unscale(f1.phi_s[i].value / d1.value, f1.phi_s[i].log_scale + f1.psi_ref - d1.log_scale);
        const Complex e2 = unscale(f2.phi_s[i].value / d2.value, f2.phi_s[i].log_scale + f2.psi_ref - d2.log_scale);
        double row = simd::weighted_diff_norm2(n.w.data(), f1.phi.data(), f2.phi.data(), c1, c2, i + 1);
        row += simd::weighted_diff_norm2(n.w.data() + i + 1, f1.psi.data() + i + 1, f2.psi.data() + i + 1, e1, e2,
                                         N - i - 1);
        total += n.w[i] * row;
    }
    if (!std::isfinite(total)) throw PropagationOverflow("kernel factors leave double range in the HS quadrature");
    return std::sqrt(total);
}

}  // namespace

GreenKernel::GreenKernel(const RealizedProblem& p, Complex z)
    : p_(&p), z_(z), phi_(p, z, StateVectorC{0.0, 1.0}, true), psi_(p, z, StateVectorC{0.0, 1.0}, false) {
    const auto at_a = psi_.at(p.a());
    const double scale = std::hypot(std::abs(at_a.value.u), std::abs(at_a.value.u1));
    if (!(std::abs(at_a.value.u) > 1e-13 * scale))
        throw NearSingular("z is at or near an eigenvalue; the Green kernel is undefined");
    denom_ = {at_a.value.u, at_a.log_scale};
}

Scaled<Complex> GreenKernel::phi(double x) const {
    const auto s = phi_.at(x);
    return {s.value.u, s.log_scale};
}

Scaled<Complex> GreenKernel::psi(double x) const {
    const auto s = psi_.at(x);
    return {s.value.u, s.log_scale};
}

Complex GreenKernel::operator()(double x, double t) const {
    const auto f = phi(std::min(x, t)), g = psi(std::max(x, t));
    return unscale(f.value * g.value / denom_.value, f.log_scale + g.log_scale - denom_.log_scale);
}

Complex green(const RealizedProblem& p, Complex z, double x, double t) { return GreenKernel(p, z)(x, t); }

HsResult hs_distance(const RealizedProblem& p1, const RealizedProblem& p2, Complex z, const HsOptions& opt) {
    if (p1.a() != p2.a() || p1.b() != p2.b()) throw DomainError("HS distance needs problems on the same interval");
    const GreenKernel g1(p1, z), g2(p2, z);
    const auto cuts = panel_cuts(p1, &p2);
    HsResult r;
    int sub = std::max(1, opt.initial_subdivisions);
    double prev = NAN;
    for (int d = 0; d <= opt.max_doublings; ++d, sub *= 2) {
        const Nodes n = gauss_nodes(cuts, sub, 8);
        r.value = hs_once(g1, g2, n);
        r.nodes = n.x.size();
        if (d > 0 && std::abs(r.value - prev) < opt.tol) {
            r.converged = true;
            break;
        }
        prev = r.value;
    }
    return r;
}

Complex green_composition(const GreenKernel& g1, const GreenKernel& g2, double x, double t, int subdivisions) {
    auto cuts = panel_cuts(g1.problem(), &g2.problem());
    const double lo = cuts.front(), hi = cuts.back();
    for (double c : {x, t})
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const Nodes n = gauss_nodes(cuts, subdivisions, 8);
    std::vector<Complex> left, right;
    for (double s : n.x) {
        left.push_back(g1(x, s));
        right.push_back(g2(s, t));
    }
    return simd::weighted_dot(n.w.data(), left.data(), right.data(), n.x.size());
}

std::vector<StudyRow> convergence_study(const ProblemSpec& spec, const std::vector<int>& levels, Complex z,
                                        const HsOptions& opt) {
    if (levels.empty()) return {};
    ProblemSpec fine = spec;
    fine.level = *std::max_element(levels.begin(), levels.end());
    const RealizedProblem ref(fine);
    std::vector<StudyRow> rows;
    for (int L : levels) {
        ProblemSpec s = spec;
        s.level = L;
        const RealizedProblem p(s);
        StudyRow row;
        row.level = L;
        row.hs = L == fine.level ? 0.0 : hs_distance(p, ref, z, opt).value;
        if (p.nonnegative_measure()) {
            for (const Eigenpair& e : eigenvalues(p, 5, -INFINITY, INFINITY).eigen) row.lambda.push_back(e.lambda);
        } else {
            row.lambda.assign(5, NAN);
        }
        if (!rows.empty()) row.hs_decreasing = row.hs < rows.back().hs;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace dprime
