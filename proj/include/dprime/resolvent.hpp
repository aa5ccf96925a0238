#pragma once

#include <vector>

#include "dprime/propagate.hpp"

namespace dprime {

// G(x,t;z) = phi(min) psi(max) / psi(a), phi and psi Dirichlet at a and b.
class GreenKernel {
public:
    GreenKernel(const RealizedProblem& p, Complex z);

    Complex operator()(double x, double t) const;
    const RealizedProblem& problem() const { return *p_; }
    Complex z() const { return z_; }

    // Kernel factors at x with a shared log scale, so that
    // G(x,t) = phi(x) psi(t) * exp(scale) / denom for x <= t.
    Scaled<Complex> phi(double x) const;
    Scaled<Complex> psi(double x) const;
    Scaled<Complex> denominator() const { return denom_; }

private:
    const RealizedProblem* p_;
    Complex z_;
    Solution<Complex> phi_, psi_;
    Scaled<Complex> denom_;
};

Complex green(const RealizedProblem& p, Complex z, double x, double t);

struct HsOptions {
    int initial_subdivisions = 1;  // equal sub-panels per atom-delimited panel
    double tol = 1e-8;             // stop when doubling changes the value less than this
    int max_doublings = 6;
};

struct HsResult {
    double value = 0.0;
    std::size_t nodes = 0;
    bool converged = false;
};

// Hilbert-Schmidt norm of G1 - G2 over (a,b)^2.
HsResult hs_distance(const RealizedProblem& p1, const RealizedProblem& p2, Complex z, const HsOptions& opt = {});

// int_a^b G1(x,s) G2(s,t) ds by Gauss-Legendre panels split at x, t and the atoms.
Complex green_composition(const GreenKernel& g1, const GreenKernel& g2, double x, double t, int subdivisions = 8);

struct StudyRow {
    int level = 0;
    double hs = 0.0;              // distance to the finest level
    std::vector<double> lambda;   // lambda_1..lambda_5; NaN for signed measures
    bool hs_decreasing = true;    // false flags a non-monotone step from the previous row
};

// Cantor levels are taken from spec.level; the finest listed level is the reference.
std::vector<StudyRow> convergence_study(const ProblemSpec& spec, const std::vector<int>& levels, Complex z,
                                        const HsOptions& opt = {});

}  // namespace dprime
