#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dprime/propagate.hpp"
#include "dprime/spectrum.hpp"

namespace dprime {

struct AsymptoticFit {
    std::vector<std::pair<double, double>> samples;  // (abscissa, value or |ratio|)
    std::vector<Complex> ratios;                      // complex ratios for m-function checks
    std::string model;
    double fitted_coefficient = 0.0;
    double max_rel_dev = 0.0;
    std::size_t dropped = 0;       // near-singular evaluations skipped
    bool trend_to_zero = false;    // alpha = 0 spectral-function branch
};

// n / sqrt(lambda_n) over the top half of the indices against (b - a)/pi.
AsymptoticFit weyl_fit(const SpectralData& data, double a, double b);
// Same, over an explicit index window [n_lo, n_hi].
AsymptoticFit weyl_fit(const SpectralData& data, double a, double b, long n_lo, long n_hi);

// m(z) = -psi(a) / psi^[1](a), psi Dirichlet at b (the truncation point).
Complex m_function(const RealizedProblem& p, Complex z);

double c_alpha(double alpha);

// Generalized inverse of F(x) = 1/((x - a) P~(x)); returned as the offset x - a.
double weyl_scale_f(const std::vector<Atom>& atoms, double a, double r);
double weyl_scale_f(const SingularMeasure& m, double a, double r, int level);

// Eight points on the upper unit semicircle with arg in [pi/8, 7pi/8].
std::vector<Complex> default_mu_grid();

// Ratio m(r mu) / (C_alpha (-mu)^{-alpha/(1+alpha)} g(r)) with g(r) = 1/(r f(r)).
AsymptoticFit m_asymptotics_check(const RealizedProblem& p, double alpha, const std::vector<double>& r_grid,
                                  Complex mu);

// Ratio rho(t) / ((1+alpha)/pi sin(pi/(1+alpha)) C_alpha t g(t)), g as above, so
// t g(t) = 1/f(t). For alpha = 0 the ratio is rho(t) f(t) and only its trend
// toward zero is reported.
AsymptoticFit rho_asymptotics_check(const RealizedProblem& p, const std::vector<double>& ts, double alpha,
                                    const EigenOptions& opt = {});

}  // namespace dprime
