#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "dprime/errors.hpp"
#include "dprime/spectrum.hpp"

namespace dprime {

namespace {

void add_element(OraclePencil& P, long l, long r, double w, double q) {
    const double ks = 1.0 / w, m2 = w / 3.0, m1 = w / 6.0;
    if (l >= 0) {
        P.k_diag[l] += ks + q * m2;
        P.m_diag[l] += m2;
    }
    if (r >= 0) {
        P.k_diag[r] += ks + q * m2;
        P.m_diag[r] += m2;
    }
    if (l >= 0 && r >= 0) {
        P.k_off[l] += -ks + q * m1;
        P.m_off[l] += m1;
    }
}

// Solves (K - sigma M) x = rhs for the tridiagonal pencil (no pivoting).
std::vector<double> solve_shifted(const OraclePencil& P, double sigma, std::vector<double> rhs) {
    const std::size_t n = P.k_diag.size();
    std::vector<double> d(n), c(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        double a = P.k_diag[i] - sigma * P.m_diag[i];
        if (i > 0) {
            const double b = P.k_off[i - 1] - sigma * P.m_off[i - 1];
            a -= b * c[i - 1];
            rhs[i] -= b * rhs[i - 1];
        }
        if (std::abs(a) < 1e-300) a = 1e-300;
        if (i + 1 < n) c[i] = (P.k_off[i] - sigma * P.m_off[i]) / a;
        rhs[i] /= a;
        d[i] = a;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

std::vector<double> mass_times(const OraclePencil& P, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = P.m_diag[i] * x[i];
        if (i > 0) y[i] += P.m_off[i - 1] * x[i - 1];
        if (i + 1 < n) y[i] += P.m_off[i] * x[i + 1];
    }
    return y;
}

}  // namespace

double default_oracle_mesh(const RealizedProblem& p) {
    double gap = p.b() - p.a();
    double prev = p.a();
    for (const Atom& at : p.atoms()) {
        gap = std::min(gap, at.x - prev);
        prev = at.x;
    }
    gap = std::min(gap, p.b() - prev);
    return std::min((p.b() - p.a()) / 4096.0, gap / 4.0);
}

OraclePencil assemble_oracle(const RealizedProblem& p, double h) {
    if (!(h > 0.0)) throw DomainError("oracle mesh size must be positive");
    double prev = p.a();
    for (const Atom& at : p.atoms()) {
        if (at.x - prev < h)
            throw MeshRefinement("mesh size " + std::to_string(h) + " does not separate the atom at " +
                                 std::to_string(at.x));
        prev = at.x;
    }
    if (p.b() - prev < h) throw MeshRefinement("mesh size does not separate the last atom from b");

    OraclePencil P;
    auto new_unknown = [&](double x) {
        P.k_diag.push_back(0.0);
        P.m_diag.push_back(0.0);
        P.k_off.push_back(0.0);
        P.m_off.push_back(0.0);
        P.position.push_back(x);
        return static_cast<long>(P.k_diag.size()) - 1;
    };
    // Unknown indices are created left to right, so every coupling is between
    // neighbours and the pencil stays tridiagonal.
    struct Elem {
        long l, r;
        double w, q;
    };
    std::vector<Elem> elems;
    std::vector<std::pair<long, double>> penalties;  // (left unknown, beta)
    long left = p.left() == Boundary::Dirichlet ? -1 : new_unknown(p.a());
    const auto& segs = p.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& s = segs[i];
        const long cells = std::max(1L, static_cast<long>(std::ceil(s.length / h - 1e-9)));
        const double w = s.length / static_cast<double>(cells);
        if (i == 0) P.first_cell = w;
        for (long j = 1; j <= cells; ++j) {
            const bool at_b = (i + 1 == segs.size() && j == cells);
            const double x = (j == cells) ? s.x + s.length : s.x + w * static_cast<double>(j);
            const long right = (at_b && p.right() == Boundary::Dirichlet) ? -1 : new_unknown(x);
            elems.push_back({left, right, w, s.q});
            left = right;
        }
        if (s.beta != 0.0 && i + 1 < segs.size()) {
            const long doubled = new_unknown(s.x + s.length);
            penalties.push_back({left, s.beta});
            left = doubled;
        }
    }
    for (const Elem& e : elems) add_element(P, e.l, e.r, e.w, e.q);
    for (auto [l, beta] : penalties) {
        P.k_diag[l] += 1.0 / beta;
        P.k_diag[l + 1] += 1.0 / beta;
        P.k_off[l] -= 1.0 / beta;
    }
    if (!P.k_off.empty()) {
        P.k_off.pop_back();
        P.m_off.pop_back();
    }
    return P;
}

std::size_t pencil_inertia(const OraclePencil& P, double sigma) {
    const double pivmin = DBL_MIN / DBL_EPSILON;
    std::size_t neg = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < P.k_diag.size(); ++i) {
        double a = P.k_diag[i] - sigma * P.m_diag[i];
        if (i > 0) {
            const double b = P.k_off[i - 1] - sigma * P.m_off[i - 1];
            a -= b * b / d;
        }
        if (std::abs(a) < pivmin) a = -pivmin;
        if (a < 0.0) ++neg;
        d = a;
    }
    return neg;
}

std::vector<double> pencil_eigenvalues(const OraclePencil& P, std::size_t count) {
    std::vector<double> out;
    if (count == 0 || P.k_diag.empty()) return out;
    count = std::min(count, P.k_diag.size());
    double lo = -1.0;
    while (pencil_inertia(P, lo) > 0) lo = 2.0 * lo - 1.0;
    double hi = 1.0;
    while (pencil_inertia(P, hi) < count) hi = 2.0 * hi + 1.0;
    double floor_k = lo;
    for (std::size_t k = 1; k <= count; ++k) {
        double l = floor_k, r = hi;
        for (int it = 0; it < 200 && r - l > 1e-13 * std::max(1.0, std::abs(r)); ++it) {
            const double m = 0.5 * (l + r);
            if (pencil_inertia(P, m) >= k)
                r = m;
            else
                l = m;
        }
        out.push_back(0.5 * (l + r));
        floor_k = l;
    }
    return out;
}

OracleResult galerkin_oracle(const RealizedProblem& p, double h, std::size_t count) {
    const OraclePencil P = assemble_oracle(p, h);
    OracleResult res;
    res.unknowns = P.k_diag.size();
    res.inertia_at_zero = pencil_inertia(P, 0.0);
    res.data.method = SpectralMethod::Oracle;
    const auto ev = pencil_eigenvalues(P, count);
    for (std::size_t k = 0; k < ev.size(); ++k) {
        // Inverse iteration for the eigenvector, then normalize at a.
        const double sigma = ev[k] + 1e-9 * std::max(1.0, std::abs(ev[k]));
        std::vector<double> x(P.k_diag.size(), 1.0);
        for (int it = 0; it < 3; ++it) {
            x = solve_shifted(P, sigma, mass_times(P, x));
            double nrm = 0.0;
            for (double v : x) nrm = std::max(nrm, std::abs(v));
            for (double& v : x) v /= nrm;
        }
        const double lead = p.left() == Boundary::Dirichlet ? x.front() / P.first_cell : x.front();
        const auto mx = mass_times(P, x);
        double n2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) n2 += x[i] * mx[i];
        res.data.eigen.push_back({static_cast<long>(k + 1), ev[k], n2 / (lead * lead)});
    }
    return res;
}

}  // namespace dprime
