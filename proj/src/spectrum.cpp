#include "dprime/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dprime/errors.hpp"
#include "dprime/quadrature.hpp"

namespace dprime {

namespace {

StateVector left_init(const RealizedProblem& p) {
    return p.left() == Boundary::Dirichlet ? StateVector{0.0, 1.0} : StateVector{1.0, 0.0};
}

// Sign of the right boundary functional, immune to overflow.
int residual_sign(const RealizedProblem& p, double z) {
    const auto r = propagate(p, z, left_init(p));
    const double v = p.right() == Boundary::Dirichlet ? r.state.u : r.state.u1;
    return (v > 0.0) - (v < 0.0);
}

bool converged(double lo, double hi, const EigenOptions& opt) {
    const double scale = std::max(std::abs(lo), std::abs(hi));
    return hi - lo <= std::max(opt.rel_tol * scale, opt.abs_tol);
}

// Accumulates sums of exp-scaled positive terms without overflow.
struct LogSum {
    double mant = 0.0;
    double scale = -std::numeric_limits<double>::infinity();

    void add(double value, double log_scale) {
        if (value <= 0.0) return;
        if (log_scale > scale) {
            mant = mant * std::exp(scale - log_scale) + value;
            scale = log_scale;
        } else {
            mant += value * std::exp(log_scale - scale);
        }
    }
    double value() const { return mant == 0.0 ? 0.0 : mant * std::exp(scale); }
};

// Integral of u^2 over a stretch entered with state (A, B); returned with an
// extra log scale for the exponentially growing case.
std::pair<double, double> stretch_norm2(double A, double B, double L, double q, double lambda) {
    const double w2 = lambda - q;
    if (std::abs(w2) * L * L <= 1.0) {
        const GaussRule& g = gauss_legendre(16);
        double s = 0.0;
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            const double x = 0.5 * L * (g.x[k] + 1.0);
            const StateVector v = stretch_propagator(x, q, lambda) * StateVector{A, B};
            s += g.w[k] * v.u * v.u;
        }
        return {0.5 * L * s, 0.0};
    }
    if (w2 > 0.0) {
        const double w = std::sqrt(w2);
        const double s2 = std::sin(2.0 * w * L) / (4.0 * w);
        const double sn = std::sin(w * L);
        const double cc = 0.5 * L + s2, ss = 0.5 * L - s2, cs = sn * sn / (2.0 * w);
        const double Bw = B / w;
        return {A * A * cc + 2.0 * A * Bw * cs + Bw * Bw * ss, 0.0};
    }
    // u = P e^{ks} + Q e^{-ks}; the e^{2kL} factor is returned as log scale.
    const double k = std::sqrt(-w2);
    const double P = 0.5 * (A + B / k), Q = 0.5 * (A - B / k);
    const double E = std::exp(-2.0 * k * L);
    const double v = P * P * (1.0 - E) / (2.0 * k) + 2.0 * P * Q * L * E + Q * Q * E * (1.0 - E) / (2.0 * k);
    return {v, 2.0 * k * L};
}

double eig_lower_bound(const RealizedProblem& p) { return std::min(0.0, p.min_potential()) - 1.0; }

// Bisection on the oscillation count: smallest z with count(z) >= n.
double bisect_count(const RealizedProblem& p, long n, double lo, double hi, const EigenOptions& opt) {
    for (int it = 0; it < opt.max_iter && !converged(lo, hi, opt); ++it) {
        const double m = 0.5 * (lo + hi);
        if (oscillation_count(p, m) >= n)
            hi = m;
        else
            lo = m;
    }
    return 0.5 * (lo + hi);
}

SpectralData eigen_nonnegative(const RealizedProblem& p, std::size_t n_max, double t_lo, double t_hi,
                               const EigenOptions& opt) {
    SpectralData out;
    double lo = std::max(t_lo, eig_lower_bound(p));
    const long first = oscillation_count(p, std::nextafter(lo, -INFINITY)) + 1;
    for (long n = first; out.eigen.size() < n_max; ++n) {
        double hi = std::max(1.0, std::abs(lo)) + lo;
        while (oscillation_count(p, hi) < n) hi = lo + 2.0 * (hi - lo);
        const double lam = bisect_count(p, n, lo, hi, opt);
        if (lam > t_hi) break;
        out.eigen.push_back({n, lam, norming_constant(p, lam)});
        lo = std::nextafter(lam, -INFINITY);
        while (oscillation_count(p, lo) >= n) lo -= std::max(opt.abs_tol, opt.rel_tol * std::abs(lo));
    }
    return out;
}

// Root of the boundary residual between lo and hi (signs must differ).
double bisect_residual(const RealizedProblem& p, double lo, double hi, const EigenOptions& opt) {
    const int s_lo = residual_sign(p, lo);
    for (int it = 0; it < opt.max_iter && !converged(lo, hi, opt); ++it) {
        const double m = 0.5 * (lo + hi);
        const int s = residual_sign(p, m);
        if (s == 0) return m;
        if (s == s_lo)
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

// Exact eigenvalues 1..count for a signed measure: Galerkin eigenvalues
// bracket each root of the boundary residual, bisection refines it.
std::vector<double> eigen_signed_lowest(const RealizedProblem& p, std::size_t count, const EigenOptions& opt) {
    double h = opt.oracle_h > 0.0 ? opt.oracle_h : default_oracle_mesh(p);
    for (int attempt = 0; attempt <= opt.oracle_refinements; ++attempt, h *= 0.5) {
        const OraclePencil P = assemble_oracle(p, h);
        const auto mu = pencil_eigenvalues(P, count + 1);
        if (mu.size() < count + 1) throw MeshRefinement("oracle mesh too coarse for the requested eigenvalues");
        std::vector<double> cut(count + 1);
        for (std::size_t k = 1; k <= count; ++k) cut[k] = 0.5 * (mu[k - 1] + mu[k]);
        // Below the first Galerkin value there is only lambda_1; walk down until the residual flips.
        double gap = std::max({mu[1] - mu[0], std::abs(mu[0]), 1.0});
        cut[0] = mu[0] - 0.5 * (mu[1] - mu[0]);
        int s_top = residual_sign(p, cut[1]);
        for (int k = 0; k < 60 && residual_sign(p, cut[0]) == s_top; ++k) {
            cut[0] = mu[0] - gap;
            gap *= 2.0;
        }
        bool ok = true;
        for (std::size_t k = 0; k < count && ok; ++k) {
            const int a = residual_sign(p, cut[k]), b = residual_sign(p, cut[k + 1]);
            ok = a != 0 && b != 0 && a != b;
        }
        if (!ok) continue;
        std::vector<double> out;
        for (std::size_t k = 0; k < count; ++k) out.push_back(bisect_residual(p, cut[k], cut[k + 1], opt));
        return out;
    }
    throw MeshRefinement("Galerkin brackets did not separate the eigenvalues; pass a finer oracle mesh");
}

SpectralData eigen_signed(const RealizedProblem& p, std::size_t n_max, double t_lo, double t_hi,
                          const EigenOptions& opt) {
    double h = opt.oracle_h > 0.0 ? opt.oracle_h : default_oracle_mesh(p);
    const OraclePencil P = assemble_oracle(p, h);
    // Galerkin values sit above the exact ones, so the inertia at t_hi is a lower
    // bound on the number needed; add slack and filter afterwards.
    const std::size_t below = std::isfinite(t_lo) ? pencil_inertia(P, t_lo) : 0;
    const std::size_t cap = n_max > P.k_diag.size() ? P.k_diag.size() : below + n_max + 2;
    std::size_t need = std::isfinite(t_hi) ? pencil_inertia(P, t_hi) + 2 : cap;
    need = std::min({need, cap, P.k_diag.size() - 1});
    auto ev = eigen_signed_lowest(p, need, opt);
    // Make sure the window's upper end is actually passed.
    while (std::isfinite(t_hi) && ev.back() <= t_hi && need < cap && need + 1 < P.k_diag.size()) {
        need = std::min({2 * need, cap, P.k_diag.size() - 1});
        ev = eigen_signed_lowest(p, need, opt);
    }
    SpectralData out;
    for (std::size_t k = 0; k < ev.size() && out.eigen.size() < n_max; ++k)
        if (ev[k] >= t_lo && ev[k] <= t_hi)
            out.eigen.push_back({static_cast<long>(k + 1), ev[k], norming_constant(p, ev[k])});
    return out;
}

}  // namespace

double shoot(const RealizedProblem& p, double z) {
    const auto s = propagate(p, z, left_init(p)).unscaled();
    return p.right() == Boundary::Dirichlet ? s.u : s.u1;
}

Complex shoot(const RealizedProblem& p, Complex z) {
    const StateVector i = left_init(p);
    const auto s = propagate(p, z, StateVectorC{i.u, i.u1}).unscaled();
    return p.right() == Boundary::Dirichlet ? s.u : s.u1;
}

long oscillation_count(const RealizedProblem& p, double z) {
    const auto r = propagate(p, z, left_init(p));
    const long zc = *r.zero_count;
    const double u = r.state.u, u1 = r.state.u1;
    if (p.right() == Boundary::Dirichlet) return zc + (u == 0.0 ? 1 : 0);
    if (u == 0.0) return zc + 1;
    return zc + (u * u1 <= 0.0 ? 1 : 0);
}

SpectralData eigenvalues(const RealizedProblem& p, std::size_t n_max, double t_lo, double t_hi,
                         const EigenOptions& opt) {
    if (t_hi < t_lo || n_max == 0) return {};
    if (p.nonnegative_measure()) return eigen_nonnegative(p, n_max, t_lo, t_hi, opt);
    return eigen_signed(p, n_max, t_lo, t_hi, opt);
}

long counting_function(const RealizedProblem& p, double t, const EigenOptions& opt) {
    if (t == 0.0) return 0;
    if (p.nonnegative_measure()) {
        const double below0 = std::nextafter(0.0, -INFINITY);
        if (t > 0.0) return oscillation_count(p, t) - oscillation_count(p, 0.0);
        return oscillation_count(p, below0) - oscillation_count(p, std::nextafter(t, -INFINITY));
    }
    long n = 0;
    const auto data = t > 0.0 ? eigenvalues(p, std::numeric_limits<std::size_t>::max(), 0.0, t, opt)
                              : eigenvalues(p, std::numeric_limits<std::size_t>::max(), t, 0.0, opt);
    for (const Eigenpair& e : data.eigen)
        if ((t > 0.0 && e.lambda > 0.0) || (t < 0.0 && e.lambda < 0.0)) ++n;
    return n;
}

KappaMinus negative_count(const RealizedProblem& p, const EigenOptions& opt) {
    if (p.zero_potential()) return kappa_minus_atoms(p.atoms());
    if (p.nonnegative_measure())
        return {false, static_cast<std::size_t>(oscillation_count(p, std::nextafter(0.0, -INFINITY)))};
    const auto data = eigenvalues(p, std::numeric_limits<std::size_t>::max(), -INFINITY,
                                  std::nextafter(0.0, -INFINITY), opt);
    return {false, data.eigen.size()};
}

double norming_constant(const RealizedProblem& p, double lambda) {
    const StateVector init = left_init(p);
    Solution<double> left(p, lambda, init, true);
    const auto& segs = p.segments();
    // Match the left solution to the right one where the left solution is
    // largest; beyond that point the decaying branch is taken from the right.
    std::size_t match = segs.size();
    double best = -INFINITY;
    for (std::size_t i = 1; i < segs.size(); ++i) {
        const auto s = left.segment_start(i);
        const double m = std::max(std::abs(s.value.u), std::abs(s.value.u1));
        if (m == 0.0) continue;
        const double lg = std::log(m) + s.log_scale;
        if (lg > best) {
            best = lg;
            match = i;
        }
    }
    LogSum total;
    const std::size_t n_left = match;
    for (std::size_t i = 0; i < n_left; ++i) {
        const auto s = left.segment_start(i);
        const auto [v, ls] = stretch_norm2(s.value.u, s.value.u1, segs[i].length, segs[i].q, lambda);
        total.add(v, ls + 2.0 * s.log_scale);
    }
    if (match < segs.size()) {
        const StateVector rinit = p.right() == Boundary::Dirichlet ? StateVector{0.0, 1.0} : StateVector{1.0, 0.0};
        Solution<double> right(p, lambda, rinit, false);
        const auto sl = left.segment_start(match), sr = right.segment_start(match);
        const bool use_u = std::abs(sl.value.u) >= std::abs(sl.value.u1);
        const double num = use_u ? sl.value.u : sl.value.u1;
        const double den = use_u ? sr.value.u : sr.value.u1;
        if (den == 0.0) throw NearSingular("norming constant: matching point degenerate");
        const double log_ratio = std::log(std::abs(num / den)) + sl.log_scale - sr.log_scale;
        for (std::size_t i = match; i < segs.size(); ++i) {
            const auto s = right.segment_start(i);
            const auto [v, ls] = stretch_norm2(s.value.u, s.value.u1, segs[i].length, segs[i].q, lambda);
            total.add(v, ls + 2.0 * (s.log_scale + log_ratio));
        }
    }
    return total.value();
}

std::vector<double> spectral_function(const RealizedProblem& p, const std::vector<double>& ts,
                                      const EigenOptions& opt) {
    if (p.left() != Boundary::Neumann)
        throw UnsupportedHypothesis("spectral function needs a Neumann condition at the left endpoint");
    std::vector<double> out(ts.size(), 0.0);
    if (ts.empty()) return out;
    const double tmin = std::min(0.0, *std::min_element(ts.begin(), ts.end()));
    const double tmax = std::max(0.0, *std::max_element(ts.begin(), ts.end()));
    const auto data = eigenvalues(p, std::numeric_limits<std::size_t>::max(), tmin, tmax, opt);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        double rho = 0.0;
        for (const Eigenpair& e : data.eigen) {
            if (t > 0.0 && e.lambda > 0.0 && e.lambda <= t) rho += 1.0 / e.norming;
            if (t < 0.0 && e.lambda > t && e.lambda <= 0.0) rho -= 1.0 / e.norming;
        }
        out[i] = rho;
    }
    return out;
}

double spectral_function(const RealizedProblem& p, double t, const EigenOptions& opt) {
    return spectral_function(p, std::vector<double>{t}, opt).front();
}

FormValue quadratic_form(const RealizedProblem& p, const std::vector<Knot>& f) {
    FormValue v;
    if (f.empty()) return v;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].x < p.a() || f[i].x > p.b()) throw DomainViolation("knot outside the interval");
        if (i > 0 && !(f[i - 1].x < f[i].x)) throw DomainViolation("knots must be strictly increasing");
    }
    if ((f.front().x > p.a() && f.front().left != 0.0) || (f.back().x < p.b() && f.back().right != 0.0))
        throw DomainViolation("function must vanish outside its knot range");
    if ((p.left() == Boundary::Dirichlet && f.front().x == p.a() && f.front().right != 0.0) ||
        (p.right() == Boundary::Dirichlet && f.back().x == p.b() && f.back().left != 0.0))
        throw DomainViolation("function violates a Dirichlet condition");
    const PiecewisePotential& q = p.spec().potential;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const bool interior = f[i].x > p.a() && f[i].x < p.b();
        const double jump = f[i].right - f[i].left;
        if (interior && jump != 0.0) {
            const auto& atoms = p.atoms();
            auto it = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& a) { return a.x == f[i].x; });
            if (it == atoms.end())
                throw DomainViolation("jump at x = " + std::to_string(f[i].x) + " where no atom sits");
            v.jump_sum += jump * jump / it->beta;
        }
        if (i + 1 == f.size()) break;
        const double x0 = f[i].x, x1 = f[i + 1].x, g0 = f[i].right, g1 = f[i + 1].left;
        const double slope = (g1 - g0) / (x1 - x0);
        v.kinetic += slope * slope * (x1 - x0);
        // q is constant between its breakpoints; integrate the squared line exactly.
        std::vector<double> cuts{x0, x1};
        for (double c : q.breakpoints)
            if (c > x0 && c < x1) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], b = cuts[k + 1];
            const double fa = g0 + slope * (a - x0), fb = g0 + slope * (b - x0);
            v.potential += q.value_at(0.5 * (a + b)) * (b - a) * (fa * fa + fa * fb + fb * fb) / 3.0;
        }
    }
    v.kinetic += v.jump_sum;
    return v;
}

double l2_norm_squared(const std::vector<Knot>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double a = f[i].right, b = f[i + 1].left;
        s += (f[i + 1].x - f[i].x) * (a * a + a * b + b * b) / 3.0;
    }
    return s;
}

}  // namespace dprime
