#include "dprime/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dprime/errors.hpp"

namespace dprime {

void validate(const SingularMeasure& m) {
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
        const Atom& a = m.atoms[i];
        if (!std::isfinite(a.x) || !std::isfinite(a.beta))
            throw InputError("atom " + std::to_string(i) + " is not finite");
        if (a.beta == 0.0)
            throw InputError("atom " + std::to_string(i) + " has zero weight");
        if (i > 0 && !(m.atoms[i - 1].x < a.x))
            throw InputError("atom positions must be strictly increasing");
    }
    for (std::size_t i = 0; i < m.cantor.size(); ++i) {
        const CantorSpec& c = m.cantor[i];
        const std::string tag = "cantor part " + std::to_string(i);
        if (!(c.c < c.d)) throw InputError(tag + ": support must satisfy c < d");
        if (!(c.ratio > 0.0 && c.ratio < 0.5)) throw InputError(tag + ": ratio must lie in (0, 1/2)");
        if (c.level_cap < 1) throw InputError(tag + ": level_cap must be positive");
        if (!std::isfinite(c.mass)) throw InputError(tag + ": mass is not finite");
    }
}

std::vector<double> cantor_points(const CantorSpec& spec, int level) {
    std::vector<double> left{spec.c};
    double width = spec.d - spec.c;
    for (int l = 0; l < level; ++l) {
        const double child = spec.ratio * width;
        std::vector<double> next;
        next.reserve(left.size() * 2);
        for (double c : left) {
            next.push_back(c);
            next.push_back(c + width - child);
        }
        left.swap(next);
        width = child;
    }
    return left;
}

std::vector<Atom> realize(const SingularMeasure& m, int level) {
    if (level < 0) throw RefinementUnavailable("refinement level must be nonnegative");
    std::vector<Atom> all = m.atoms;
    for (const CantorSpec& c : m.cantor) {
        if (level > c.level_cap)
            throw RefinementUnavailable("level " + std::to_string(level) + " exceeds level_cap " +
                                        std::to_string(c.level_cap));
        const double w = std::ldexp(c.mass, -level);
        for (double x : cantor_points(c, level)) all.push_back({x, w});
    }
    std::stable_sort(all.begin(), all.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
    std::vector<Atom> merged;
    for (const Atom& a : all) {
        if (!merged.empty() && merged.back().x == a.x)
            merged.back().beta += a.beta;
        else
            merged.push_back(a);
    }
    std::erase_if(merged, [](const Atom& a) { return a.beta == 0.0; });
    return merged;
}

double total_mass(const std::vector<Atom>& atoms) {
    // Neumaier summation: weights of mixed sign and magnitude 2^-L otherwise drift.
    double s = 0.0, comp = 0.0;
    for (const Atom& a : atoms) {
        const double t = s + a.beta;
        comp += std::abs(s) >= std::abs(a.beta) ? (s - t) + a.beta : (a.beta - t) + s;
        s = t;
    }
    return s + comp;
}

double distribution(const std::vector<Atom>& atoms, double x) {
    double s = 0.0;
    for (const Atom& a : atoms) {
        if (!(a.x < x)) break;
        s += a.beta;
    }
    return s;
}

double distribution(const SingularMeasure& m, double x, int level) {
    return distribution(realize(m, level), x);
}

Decomposition hahn(const SingularMeasure& m, int level) {
    Decomposition d;
    for (const Atom& a : realize(m, level)) {
        if (a.beta > 0.0)
            d.positive.atoms.push_back(a);
        else
            d.negative.atoms.push_back(a);
    }
    return d;
}

KappaMinus kappa_minus_atoms(const std::vector<Atom>& atoms) {
    KappaMinus k;
    for (const Atom& a : atoms)
        if (a.beta < 0.0) ++k.count;
    return k;
}

KappaMinus kappa_minus_measure(const SingularMeasure& m) {
    // A Cantor part is atomless, so negative mass there is never pure point.
    for (const CantorSpec& c : m.cantor)
        if (c.mass < 0.0) return {true, 0};
    SingularMeasure explicit_only{m.atoms, {}};
    return kappa_minus_atoms(realize(explicit_only, 0));
}

double p_tilde(const std::vector<Atom>& atoms, double a, double x) {
    // P is increasing with slope 1 between atoms, so the extreme spans are
    // attained at a, at x, or at one-sided limits at atoms in [a, x).
    double nu = 0.0;
    for (const Atom& at : atoms)
        if (at.x < a) nu += at.beta;
    double lo = a + nu, hi = a + nu, best = 0.0;
    auto visit = [&](double v) {
        best = std::max({best, v - lo, hi - v});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (const Atom& at : atoms) {
        if (at.x < a) continue;
        if (!(at.x < x)) break;
        visit(at.x + nu);
        nu += at.beta;
        visit(at.x + nu);
    }
    visit(x + nu);
    return best;
}

double p_tilde(const SingularMeasure& m, double a, double x, int level) {
    return p_tilde(realize(m, level), a, x);
}

}  // namespace dprime
