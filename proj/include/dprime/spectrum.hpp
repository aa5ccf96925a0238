#pragma once

#include <cstddef>
#include <vector>

#include "dprime/measures.hpp"
#include "dprime/propagate.hpp"

namespace dprime {

enum class SpectralMethod { Shooting, Oracle };

struct Eigenpair {
    long n = 0;             // 1-based index from the bottom of the spectrum
    double lambda = 0.0;
    double norming = 0.0;   // squared L2 norm of the left-normalized solution
};

struct SpectralData {
    std::vector<Eigenpair> eigen;
    SpectralMethod method = SpectralMethod::Shooting;
};

struct EigenOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    int max_iter = 200;
    double oracle_h = 0.0;  // 0 picks a mesh from the interval and atom spacing
    int oracle_refinements = 4;
};

// Right boundary functional of the solution started from the left condition.
double shoot(const RealizedProblem& p, double z);
Complex shoot(const RealizedProblem& p, Complex z);

// Number of eigenvalues <= z; exact for nonnegative measures only.
long oscillation_count(const RealizedProblem& p, double z);

// Eigenvalues in [t_lo, t_hi], at most n_max of them, lowest first.
SpectralData eigenvalues(const RealizedProblem& p, std::size_t n_max, double t_lo, double t_hi,
                         const EigenOptions& opt = {});

// Eigenvalues in (0, t] for t > 0 and in [t, 0) for t < 0.
long counting_function(const RealizedProblem& p, double t, const EigenOptions& opt = {});

KappaMinus negative_count(const RealizedProblem& p, const EigenOptions& opt = {});

double norming_constant(const RealizedProblem& p, double lambda);

// rho(t) for a problem with a Neumann condition at a; one value per t.
std::vector<double> spectral_function(const RealizedProblem& p, const std::vector<double>& ts,
                                      const EigenOptions& opt = {});
double spectral_function(const RealizedProblem& p, double t, const EigenOptions& opt = {});

// Piecewise linear function; `left` and `right` are the one-sided limits at x.
// f vanishes outside [front().x, back().x].
struct Knot {
    double x = 0.0;
    double left = 0.0;
    double right = 0.0;
};

struct FormValue {
    double kinetic = 0.0;    // smooth part plus atom contributions
    double potential = 0.0;
    double jump_sum = 0.0;   // sum of |jump|^2 / beta
    double total() const { return kinetic + potential; }
};

FormValue quadratic_form(const RealizedProblem& p, const std::vector<Knot>& f);
double l2_norm_squared(const std::vector<Knot>& f);

// --- Galerkin oracle: P1 elements with a doubled node at every atom ----------

struct OraclePencil {
    std::vector<double> k_diag, k_off;  // stiffness (tridiagonal)
    std::vector<double> m_diag, m_off;  // consistent mass
    std::vector<double> position;       // node coordinate per unknown
    double first_cell = 0.0;            // width of the cell at a
};

OraclePencil assemble_oracle(const RealizedProblem& p, double h);

// Generalized eigenvalues of the pencil strictly below sigma (Sylvester inertia).
std::size_t pencil_inertia(const OraclePencil& pencil, double sigma);
std::vector<double> pencil_eigenvalues(const OraclePencil& pencil, std::size_t count);

struct OracleResult {
    SpectralData data;
    std::size_t inertia_at_zero = 0;
    std::size_t unknowns = 0;
};

OracleResult galerkin_oracle(const RealizedProblem& p, double h, std::size_t count);

double default_oracle_mesh(const RealizedProblem& p);

}  // namespace dprime
