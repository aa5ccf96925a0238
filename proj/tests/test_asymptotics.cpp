#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dprime/asymptotics.hpp"
#include "dprime/errors.hpp"
#include "helpers.hpp"

using namespace dprime;
using testing_support::dirichlet;

namespace {

constexpr double pi = std::numbers::pi;

ProblemSpec half_line(double R, SingularMeasure m = {}) {
    ProblemSpec s = dirichlet(0, R, std::move(m));
    s.left = Boundary::Neumann;
    return s;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("Weyl fit on free problems") {
    for (double L : {1.0, 2.0}) {
        const auto d = eigenvalues(RealizedProblem(dirichlet(0, L)), 100, -INFINITY, INFINITY);
        const auto fit = weyl_fit(d, 0, L);
        CHECK(fit.max_rel_dev < 1e-10);
        CHECK(fit.fitted_coefficient == doctest::Approx(L / pi).epsilon(1e-10));
        CHECK(fit.samples.size() == 50);
        CHECK(fit.samples.front().first == 51.0);
    }
}

TEST_CASE("Weyl fit needs enough eigenvalues") {
    const auto d = eigenvalues(RealizedProblem(dirichlet(0, 1)), 20, -INFINITY, INFINITY);
    CHECK_THROWS_AS(weyl_fit(d, 0, 1), InsufficientData);
}

TEST_CASE("Weyl constant ignores a few positive atoms") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        RealizedProblem p(dirichlet(0, 1, testing_support::random_atoms(rng, 3, 0, 1, false, 0.05)));
        const auto fit = weyl_fit(eigenvalues(p, 400, -INFINITY, INFINITY), 0, 1);
        CHECK(std::abs(fit.fitted_coefficient * pi - 1.0) < 0.02);
    }
}

TEST_CASE("m-function of the free half-line") {
    RealizedProblem p(half_line(50));
    CHECK(std::abs(m_function(p, -100.0) - 0.1) < 1e-8);
    RealizedProblem p25(half_line(25));
    CHECK(std::abs(m_function(p, -1.0) - m_function(p25, -1.0)) < 1e-10);
    // Closed form tanh(kR)/k with k = sqrt(-z).
    const Complex z(-3.0, 2.0), k = std::sqrt(-z);
    CHECK(std::abs(m_function(RealizedProblem(half_line(2)), z) - std::tanh(2.0 * k) / k) < 1e-14);
}

TEST_CASE("m-function with an atom away from a") {
    SingularMeasure m;
    m.atoms = {{1.0, 1.0}};
    RealizedProblem p(half_line(50, m));
    CHECK(std::abs(m_function(p, -1e4) / 0.01 - 1.0) < 0.05);
}

TEST_CASE("m-function is Herglotz") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(-50, 50), im(0.01, 20);
    for (int trial = 0; trial < 10; ++trial) {
        RealizedProblem p(half_line(5, testing_support::random_atoms(rng, 4, 0, 5, trial % 2 == 0, 0.1)));
        for (int k = 0; k < 40; ++k) {
            const Complex z(re(rng), im(rng));
            CHECK(m_function(p, z).imag() > 0.0);
        }
    }
}

TEST_CASE("truncation stability of the m-function") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> re(-40, 5), im(0.5, 10);
    SingularMeasure m;
    m.atoms = {{0.5, 0.3}, {1.2, -0.2}};
    for (double R : {4.0, 8.0}) {
        RealizedProblem p(half_line(R, m)), p2(half_line(2 * R, m));
        for (int k = 0; k < 20; ++k) {
            const Complex z(re(rng), im(rng));
            const double bound = 10.0 * std::exp(-2.0 * std::sqrt(-z).real() * R);
            // Rounding floor added: the exponential bound drops below one ulp of m.
            const Complex m1 = m_function(p, z);
            CHECK(std::abs(m_function(p2, z) - m1) <= bound + 1e-14 * std::abs(m1));
        }
    }
}

TEST_CASE("C_alpha") {
    CHECK(c_alpha(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c_alpha(0.0) == 1.0);
    // (1/2)^{2/3} (3/2)^{1/3} Gamma(1/3) / Gamma(2/3), evaluated in 30-digit arithmetic.
    CHECK(c_alpha(0.5) == doctest::Approx(1.4266475016935586).epsilon(1e-14));
    CHECK_THROWS_AS(c_alpha(-0.1), DomainError);
    CHECK_THROWS_AS(c_alpha(1.5), DomainError);
    // Continuous on (0,1] with value 1 at the right end.
    double prev = c_alpha(1e-3);
    for (int k = 2; k <= 1000; ++k) {
        const double v = c_alpha(k * 1e-3);
        CHECK(std::abs(v - prev) < 0.05);
        prev = v;
    }
}

TEST_CASE("Weyl scale f") {
    for (double r : {1.0, 10.0, 1e4, 1e8}) CHECK(weyl_scale_f(std::vector<Atom>{}, 0.0, r) == doctest::Approx(1.0 / std::sqrt(r)).epsilon(1e-12));
    // Atom of weight 2 at 1e-6: for 1e-6 << f << 1, P~ = f + 2 and F = 1/(f (f + 2)).
    const std::vector<Atom> atom{{1e-6, 2.0}};
    for (double r : {1e2, 1e3, 1e4}) {
        const double f = weyl_scale_f(atom, 0.0, r);
        CHECK(f == doctest::Approx(-1.0 + std::sqrt(1.0 + 1.0 / r)).epsilon(1e-10));
        CHECK(f == doctest::Approx(1.0 / (2.0 * r)).epsilon(0.01));
    }
    // Scaling: c P~ with P~ = x gives F_c(x) = F(x)/c, hence f_c(r) = f(c r).
    SingularMeasure none;
    CHECK(weyl_scale_f(none, 0.0, 7.0, 0) == doctest::Approx(1.0 / std::sqrt(7.0)));
    CHECK_THROWS_AS(weyl_scale_f(std::vector<Atom>{}, 0.0, 0.0), DomainError);
}

TEST_CASE("m asymptotics, alpha = 1") {
    SingularMeasure m;
    m.atoms = {{1.0, 1.0}};
    RealizedProblem p(half_line(50, m));
    const std::vector<double> rs{1e4, 1e5, 1e6};
    CHECK(m_asymptotics_check(p, 1.0, rs, -1.0).max_rel_dev < 0.05);
    CHECK(m_asymptotics_check(p, 1.0, rs, std::polar(1.0, 3 * pi / 4)).max_rel_dev < 0.05);
    for (Complex mu : default_mu_grid()) {
        CHECK(mu.imag() > 0.0);
        CHECK(m_asymptotics_check(p, 1.0, rs, mu).max_rel_dev < 0.05);
    }
}

TEST_CASE("m asymptotics, alpha = 0") {
    // Atom-dominated window: r in [1e2, 1e4] keeps f(r) well above the atom
    // position 1e-6 while sqrt(r) * 1e-6 stays small.
    SingularMeasure m;
    m.atoms = {{1e-6, 1.0}};
    RealizedProblem p(half_line(50, m));
    const std::vector<double> rs{1e2, 1e3, 1e4};
    CHECK(m_asymptotics_check(p, 0.0, rs, -1.0).max_rel_dev < 0.15);
    for (Complex mu : default_mu_grid()) CHECK(m_asymptotics_check(p, 0.0, rs, mu).max_rel_dev < 0.15);
}

TEST_CASE("spectral function asymptotics") {
    RealizedProblem p(half_line(50));
    const auto fit = rho_asymptotics_check(p, {1e5}, 1.0);
    CHECK(fit.max_rel_dev < 0.05);
    // With f(t) = t^{-1/2} and C_1 = 1 the model is (2/pi) sqrt(t).
    const double t = 1e5;
    CHECK(2.0 / pi * std::sin(pi / 2) * c_alpha(1.0) * t * weyl_scale_f(std::vector<Atom>{}, 0, t) ==
          doctest::Approx(2.0 / pi * std::sqrt(t)).epsilon(1e-12));
    CHECK_THROWS_AS(rho_asymptotics_check(RealizedProblem(half_line(1)), {10.0}, 1.0), InsufficientData);
}

TEST_CASE("spectral function ratio for alpha = 0 decays") {
    SingularMeasure m;
    m.atoms = {{1e-6, 1.0}};
    RealizedProblem p(half_line(20, m));
    const auto fit = rho_asymptotics_check(p, {1e2, 1e3, 1e4}, 0.0);
    CHECK(fit.trend_to_zero);
    for (std::size_t i = 1; i < fit.samples.size(); ++i) CHECK(fit.samples[i].second < fit.samples[i - 1].second);
}

TEST_CASE("negative counting function stabilizes at the negative atom count") {
    SingularMeasure m;
    m.atoms = {{0.2, -0.5}, {0.5, 1.0}, {0.7, -1.0}};
    ProblemSpec s = dirichlet(0, 1, m);
    s.left = Boundary::Neumann;
    RealizedProblem p(s);
    for (double t : {-1e3, -1e4, -1e6}) CHECK(counting_function(p, t) == 2);
}

TEST_CASE("positive counting function follows sqrt(t)/pi") {
    SingularMeasure m;
    m.atoms = {{0.2, 0.5}, {0.5, 1.0}, {0.7, 0.25}};
    RealizedProblem p(dirichlet(0, 1, m));
    CHECK(std::abs(counting_function(p, 1e6) / 1e3 * pi - 1.0) < 0.01);
}

}  // TEST_SUITE
