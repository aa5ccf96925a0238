#pragma once

#include <cstddef>
#include <vector>

namespace dprime {

struct Atom {
    double x = 0.0;
    double beta = 0.0;
};

// Middle-removal Cantor generator on [c, d]. Each construction interval keeps
// two children of relative length `ratio`; level L carries 2^L atoms.
struct CantorSpec {
    double c = 0.0;
    double d = 1.0;
    double mass = 1.0;
    double ratio = 1.0 / 3.0;
    int level_cap = 12;
};

struct SingularMeasure {
    std::vector<Atom> atoms;
    std::vector<CantorSpec> cantor;
};

struct Decomposition {
    SingularMeasure positive;
    SingularMeasure negative;
};

struct KappaMinus {
    bool infinite = false;
    std::size_t count = 0;

    bool operator==(const KappaMinus&) const = default;
};

// Throws InputError on malformed data (unsorted atoms, zero weights, bad ratio).
void validate(const SingularMeasure& m);

// Left endpoints of the level-L construction intervals, in increasing order.
std::vector<double> cantor_points(const CantorSpec& spec, int level);

std::vector<Atom> realize(const SingularMeasure& m, int level);

double total_mass(const std::vector<Atom>& atoms);

// nu(x) = sum of weights strictly left of x.
double distribution(const SingularMeasure& m, double x, int level);
double distribution(const std::vector<Atom>& atoms, double x);

Decomposition hahn(const SingularMeasure& m, int level);

KappaMinus kappa_minus_measure(const SingularMeasure& m);
KappaMinus kappa_minus_atoms(const std::vector<Atom>& atoms);

// sup over a <= s <= t <= x of |P(t) - P(s)| with P(x) = x + nu(x).
double p_tilde(const SingularMeasure& m, double a, double x, int level);
double p_tilde(const std::vector<Atom>& atoms, double a, double x);

}  // namespace dprime
