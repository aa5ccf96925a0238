#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "dprime/propagate.hpp"

namespace testing_support {

// Random signed atomic measure on (a, b) with at most max_atoms atoms that
// keep at least min_gap from each other and from the endpoints.
inline dprime::SingularMeasure random_atoms(std::mt19937_64& rng, int max_atoms, double a, double b,
                                            bool allow_negative, double min_gap = 0.02) {
    std::uniform_int_distribution<int> count(1, max_atoms);
    std::uniform_real_distribution<double> pos(a + min_gap, b - min_gap);
    std::uniform_real_distribution<double> mag(0.05, 1.5);
    std::bernoulli_distribution neg(0.5);
    const int n = count(rng);
    std::vector<double> xs;
    while (static_cast<int>(xs.size()) < n) {
        const double x = pos(rng);
        bool ok = true;
        for (double y : xs) ok = ok && std::abs(x - y) >= min_gap;
        if (ok) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    dprime::SingularMeasure m;
    for (double x : xs) {
        double beta = mag(rng);
        if (allow_negative && neg(rng)) beta = -beta;
        m.atoms.push_back({x, beta});
    }
    return m;
}

inline dprime::PiecewisePotential random_potential(std::mt19937_64& rng, int max_cells, double a, double b,
                                                   double qmax) {
    std::uniform_int_distribution<int> count(1, max_cells);
    std::uniform_real_distribution<double> val(-qmax, qmax);
    std::uniform_real_distribution<double> pos(a, b);
    const int n = count(rng);
    std::vector<double> cuts;
    for (int i = 1; i < n; ++i) cuts.push_back(pos(rng));
    std::sort(cuts.begin(), cuts.end());
    dprime::PiecewisePotential q;
    q.breakpoints.push_back(a);
    for (double c : cuts) q.breakpoints.push_back(c);
    q.breakpoints.push_back(b);
    for (int i = 0; i < n; ++i) q.values.push_back(val(rng));
    return q;
}

inline dprime::ProblemSpec dirichlet(double a, double b, dprime::SingularMeasure m = {}, int level = 0) {
    dprime::ProblemSpec p;
    p.a = a;
    p.b = b;
    p.measure = std::move(m);
    p.level = level;
    return p;
}

}  // namespace testing_support
