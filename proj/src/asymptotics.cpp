#include "dprime/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dprime/errors.hpp"

namespace dprime {

namespace {

constexpr double pi = std::numbers::pi;

AsymptoticFit fit_constant(std::vector<std::pair<double, double>> samples, double model, std::string name) {
    AsymptoticFit f;
    f.model = std::move(name);
    double sum = 0.0;
    for (const auto& [x, v] : samples) {
        sum += v;
        f.max_rel_dev = std::max(f.max_rel_dev, std::abs(v / model - 1.0));
    }
    f.fitted_coefficient = samples.empty() ? NAN : sum / static_cast<double>(samples.size());
    f.samples = std::move(samples);
    return f;
}

}  // namespace

AsymptoticFit weyl_fit(const SpectralData& data, double a, double b, long n_lo, long n_hi) {
    std::vector<std::pair<double, double>> s;
    for (const Eigenpair& e : data.eigen)
        if (e.n >= n_lo && e.n <= n_hi && e.lambda > 0.0)
            s.emplace_back(static_cast<double>(e.n), static_cast<double>(e.n) / std::sqrt(e.lambda));
    if (s.empty()) throw InsufficientData("no positive eigenvalues in the index window");
    return fit_constant(std::move(s), (b - a) / pi, "n/sqrt(lambda_n) -> (b-a)/pi");
}

AsymptoticFit weyl_fit(const SpectralData& data, double a, double b) {
    if (data.eigen.size() < 50) throw InsufficientData("Weyl fit needs at least 50 eigenvalues");
    const long top = data.eigen.back().n;
    const long bottom = data.eigen.front().n;
    return weyl_fit(data, a, b, bottom + (top - bottom + 1) / 2, top);
}

Complex m_function(const RealizedProblem& p, Complex z) {
    const auto r = propagate(p, z, StateVectorC{0.0, 1.0}, false);
    const Complex u = r.state.u, u1 = r.state.u1;
    if (std::abs(u1) <= 1e-13 * std::abs(u)) throw NearSingular("z is at or near a Neumann eigenvalue");
    return -u / u1;
}

double c_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    if (alpha == 0.0) return 1.0;
    const double s = 1.0 + alpha;
    return std::pow(alpha, 1.0 / s) * std::pow(s, (1.0 - alpha) / s) * std::tgamma(alpha / s) / std::tgamma(1.0 / s);
}

double weyl_scale_f(const std::vector<Atom>& atoms, double a, double r) {
    if (!(r > 0.0)) throw DomainError("weyl_scale_f needs r > 0");
    auto F = [&](double t) { return 1.0 / (t * p_tilde(atoms, a, a + t)); };
    // F is nonincreasing and tends to infinity at t = 0.
    double hi = 1.0;
    while (F(hi) > r) hi *= 2.0;
    double lo = hi;
    while (!(F(lo) > r) && lo > 1e-300) lo *= 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double m = 0.5 * (lo + hi);
        if (F(m) > r)
            lo = m;
        else
            hi = m;
    }
    return hi;
}

double weyl_scale_f(const SingularMeasure& m, double a, double r, int level) {
    return weyl_scale_f(realize(m, level), a, r);
}

std::vector<Complex> default_mu_grid() {
    std::vector<Complex> g;
    for (int k = 0; k < 8; ++k) g.push_back(std::polar(1.0, pi / 8 + k * (6.0 * pi / 8) / 7.0));
    return g;
}

AsymptoticFit m_asymptotics_check(const RealizedProblem& p, double alpha, const std::vector<double>& r_grid,
                                  Complex mu) {
    const double C = c_alpha(alpha);
    const Complex mu_factor = std::pow(-mu, -alpha / (1.0 + alpha));
    AsymptoticFit fit;
    fit.model = "m(r mu) / (C_alpha (-mu)^(-alpha/(1+alpha)) / (r f(r)))";
    double sum = 0.0;
    for (double r : r_grid) {
        const double f = weyl_scale_f(p.atoms(), p.a(), r);
        const double g = 1.0 / (r * f);
        Complex m;
        try {
            m = m_function(p, r * mu);
        } catch (const NearSingular&) {
            ++fit.dropped;
            continue;
        }
        const Complex ratio = m / (C * mu_factor * g);
        fit.ratios.push_back(ratio);
        fit.samples.emplace_back(r, std::abs(ratio));
        sum += std::abs(ratio);
        fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs(ratio - 1.0));
    }
    fit.fitted_coefficient = fit.samples.empty() ? NAN : sum / static_cast<double>(fit.samples.size());
    return fit;
}

AsymptoticFit rho_asymptotics_check(const RealizedProblem& p, const std::vector<double>& ts, double alpha,
                                    const EigenOptions& opt) {
    if (ts.empty()) throw InsufficientData("no t samples");
    const double tmax = *std::max_element(ts.begin(), ts.end());
    if (counting_function(p, tmax, opt) < 20)
        throw InsufficientData("fewer than 20 eigenvalues contribute to the spectral function window");
    const auto rho = spectral_function(p, ts, opt);
    const double lead = alpha == 0.0 ? 1.0 : (1.0 + alpha) / pi * std::sin(pi / (1.0 + alpha)) * c_alpha(alpha);
    AsymptoticFit fit;
    fit.model = alpha == 0.0 ? "rho(t) f(t), expected to tend to 0"
                             : "rho(t) f(t) / ((1+alpha)/pi sin(pi/(1+alpha)) C_alpha)";
    double sum = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        // t g(t) with g(t) = 1/(t f(t)), the same scale the m-function check uses.
        const double ratio = rho[i] * weyl_scale_f(p.atoms(), p.a(), t) / lead;
        fit.samples.emplace_back(t, ratio);
        sum += ratio;
        fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs(ratio - 1.0));
    }
    fit.fitted_coefficient = sum / static_cast<double>(ts.size());
    if (alpha == 0.0) {
        fit.trend_to_zero = fit.samples.size() >= 2 && fit.samples.back().second < fit.samples.front().second;
        fit.max_rel_dev = NAN;
    }
    return fit;
}

}  // namespace dprime
