#include <doctest.h>

#include <cmath>
#include <random>

#include "dprime/errors.hpp"
#include "dprime/measures.hpp"
#include "helpers.hpp"

using namespace dprime;

namespace {

// Left endpoints from binary digit expansions, independent of the iterative split.
std::vector<double> cantor_by_digits(double c, double d, double r, int level) {
    std::vector<double> out;
    for (int code = 0; code < (1 << level); ++code) {
        double x = 0.0;
        for (int j = 0; j < level; ++j) {
            const int digit = (code >> (level - 1 - j)) & 1;
            x += digit * (1.0 - r) * std::pow(r, j);
        }
        out.push_back(c + (d - c) * x);
    }
    return out;
}

// Sup of |P(t) - P(s)| over a uniform grid in [a, x], atoms included in [s, t).
double p_tilde_grid(const std::vector<Atom>& atoms, double a, double x, int n) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = a + (x - a) * i / n;
        for (int j = i; j <= n; ++j) {
            const double t = a + (x - a) * j / n;
            double v = t - s;
            for (const Atom& at : atoms)
                if (at.x >= s && at.x < t) v += at.beta;
            best = std::max(best, std::abs(v));
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("measures") {
    TEST_CASE("realize is the identity on purely atomic input") {
        SingularMeasure m{{{0.5, -1.0}}, {}};
        auto r = realize(m, 3);
        REQUIRE(r.size() == 1);
        CHECK(r[0].x == 0.5);
        CHECK(r[0].beta == -1.0);
    }

    TEST_CASE("cantor level 1 and level 2 realizations") {
        SingularMeasure m{{}, {{0.0, 1.0, 1.0, 1.0 / 3.0, 12}}};
        auto r1 = realize(m, 1);
        REQUIRE(r1.size() == 2);
        CHECK(r1[0].x == doctest::Approx(0.0));
        CHECK(r1[1].x == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(r1[0].beta == 0.5);

        auto r2 = realize(m, 2);
        auto ref = cantor_by_digits(0.0, 1.0, 1.0 / 3.0, 2);
        REQUIRE(r2.size() == 4);
        const double frozen[4] = {0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0};
        for (int i = 0; i < 4; ++i) {
            CHECK(r2[i].x == doctest::Approx(ref[i]).epsilon(1e-14));
            CHECK(r2[i].x == doctest::Approx(frozen[i]).epsilon(1e-14));
            CHECK(r2[i].beta == 0.25);
        }
    }

    TEST_CASE("deep cantor levels agree with the digit expansion") {
        CantorSpec c{-0.5, 2.0, 3.0, 0.27, 12};
        auto pts = cantor_points(c, 9);
        auto ref = cantor_by_digits(c.c, c.d, c.ratio, 9);
        REQUIRE(pts.size() == ref.size());
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }

    TEST_CASE("level beyond the cap is rejected") {
        SingularMeasure m{{}, {{0.0, 1.0, 1.0, 1.0 / 3.0, 4}}};
        CHECK_THROWS_AS(realize(m, 5), RefinementUnavailable);
        CHECK_NOTHROW(realize(m, 4));
    }

    TEST_CASE("coinciding explicit and cantor atoms merge by weight") {
        CantorSpec c{0.0, 1.0, 1.0, 1.0 / 3.0, 12};
        const double x = cantor_points(c, 1)[1];
        SingularMeasure m{{{x, 0.25}}, {c}};
        auto r = realize(m, 1);
        REQUIRE(r.size() == 2);
        CHECK(r[1].beta == 0.75);
        CHECK(total_mass(r) == 1.25);
    }

    TEST_CASE("distribution is left-continuous") {
        SingularMeasure m{{{0.5, 2.0}}, {}};
        CHECK(distribution(m, 0.5, 0) == 0.0);
        CHECK(distribution(m, 0.6, 0) == 2.0);
        SingularMeasure c{{}, {{0.0, 1.0, 1.0, 1.0 / 3.0, 12}}};
        // level-2 atoms below 0.5 are 0 and 2/9
        CHECK(distribution(c, 0.5, 2) == 0.5);
    }

    TEST_CASE("hahn splits by sign") {
        SingularMeasure m{{{0.2, 1.0}, {0.5, -2.0}}, {}};
        auto d = hahn(m, 0);
        REQUIRE(d.positive.atoms.size() == 1);
        REQUIRE(d.negative.atoms.size() == 1);
        CHECK(d.positive.atoms[0].x == 0.2);
        CHECK(d.negative.atoms[0].beta == -2.0);

        SingularMeasure pos{{{0.2, 1.0}, {0.4, 3.0}}, {}};
        CHECK(hahn(pos, 0).negative.atoms.empty());

        SingularMeasure neg{{}, {{0.0, 1.0, -1.0, 1.0 / 3.0, 12}}};
        auto dn = hahn(neg, 3);
        CHECK(dn.positive.atoms.empty());
        CHECK(dn.negative.atoms.size() == 8);
    }

    TEST_CASE("kappa_minus of measures") {
        SingularMeasure m{{{0.2, 1.0}, {0.5, -2.0}, {0.7, -0.3}}, {}};
        CHECK(kappa_minus_measure(m) == KappaMinus{false, 2});
        CHECK(kappa_minus_measure(SingularMeasure{}) == KappaMinus{false, 0});
        SingularMeasure c{{}, {{0.0, 1.0, -1.0, 1.0 / 3.0, 12}}};
        CHECK(kappa_minus_measure(c).infinite);
        SingularMeasure cp{{{0.9, -1.0}}, {{0.0, 0.5, 1.0, 1.0 / 3.0, 12}}};
        CHECK(kappa_minus_measure(cp) == KappaMinus{false, 1});
    }

    TEST_CASE("p_tilde against a brute-force grid") {
        SingularMeasure none;
        CHECK(p_tilde(none, 0.0, 0.3, 0) == doctest::Approx(0.3));

        // A drop of 0.5 across the atom dominates every other span.
        std::vector<Atom> drop{{0.1, -0.5}};
        const double grid_drop = p_tilde_grid(drop, 0.0, 0.3, 600);
        CHECK(grid_drop == doctest::Approx(0.5).epsilon(2e-3));
        CHECK(p_tilde(drop, 0.0, 0.3) == doctest::Approx(0.5).epsilon(1e-14));

        std::vector<Atom> jump{{0.1, 1.0}};
        const double grid_jump = p_tilde_grid(jump, 0.0, 0.2, 400);
        CHECK(grid_jump == doctest::Approx(1.2).epsilon(2e-3));
        CHECK(p_tilde(jump, 0.0, 0.2) == doctest::Approx(1.2).epsilon(1e-14));
    }

    TEST_CASE("p_tilde matches the grid oracle on random measures") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            auto m = testing_support::random_atoms(rng, 5, 0.0, 1.0, true, 0.05);
            // Put atoms on grid nodes so the grid sees the exact breakpoints.
            for (auto& a : m.atoms) a.x = std::round(a.x * 200.0) / 200.0;
            const double exact = p_tilde(m.atoms, 0.0, 1.0);
            const double grid = p_tilde_grid(m.atoms, 0.0, 1.0, 200);
            CHECK(exact >= grid - 1e-12);
            CHECK(exact - grid <= 2.0 / 200.0 + 1e-12);
        }
    }

    TEST_CASE("realized total mass does not depend on the level") {
        SingularMeasure m{{{0.95, -0.25}}, {{0.1, 0.9, 0.7, 0.3, 12}, {-1.0, -0.2, -1.3, 0.45, 12}}};
        const double m0 = total_mass(realize(m, 0));
        for (int L = 1; L <= 12; ++L) CHECK(total_mass(realize(m, L)) == doctest::Approx(m0).epsilon(1e-15));
    }

    TEST_CASE("distribution is nondecreasing exactly for nonnegative measures") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            auto m = testing_support::random_atoms(rng, 6, 0.0, 1.0, true);
            bool nonneg = true;
            for (auto& a : m.atoms) nonneg = nonneg && a.beta >= 0.0;
            bool monotone = true;
            double prev = distribution(m.atoms, 0.0);
            for (int i = 1; i <= 400; ++i) {
                const double v = distribution(m.atoms, i / 400.0);
                monotone = monotone && v >= prev;
                prev = v;
            }
            CHECK(monotone == nonneg);
        }
    }

    TEST_CASE("hahn parts recombine to the realized list") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 1000; ++trial) {
            auto m = testing_support::random_atoms(rng, 6, 0.0, 1.0, true, 0.01);
            auto d = hahn(m, 0);
            std::vector<Atom> merged = d.positive.atoms;
            merged.insert(merged.end(), d.negative.atoms.begin(), d.negative.atoms.end());
            std::sort(merged.begin(), merged.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
            auto r = realize(m, 0);
            REQUIRE(merged.size() == r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                CHECK(merged[i].x == r[i].x);
                CHECK(merged[i].beta == r[i].beta);
            }
        }
    }

    TEST_CASE("p_tilde is monotone and bounds the increment of P") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 50; ++trial) {
            auto m = testing_support::random_atoms(rng, 6, 0.0, 1.0, true);
            double prev = 0.0;
            for (int i = 0; i <= 100; ++i) {
                const double x = i / 100.0;
                const double pt = p_tilde(m.atoms, 0.0, x);
                const double dp = x + distribution(m.atoms, x);
                CHECK(pt >= prev);
                CHECK(pt >= std::abs(dp) - 1e-14);
                prev = pt;
            }
        }
    }

    TEST_CASE("cantor refinements converge weakly") {
        SingularMeasure m{{}, {{0.0, 1.0, 1.0, 1.0 / 3.0, 12}}};
        auto moment = [&](int L, int k) {
            double s = 0.0;
            for (const Atom& a : realize(m, L)) s += a.beta * std::pow(a.x, k);
            return s;
        };
        for (int k = 1; k <= 2; ++k) {
            double prev = INFINITY;
            for (int L = 1; L < 11; ++L) {
                const double diff = std::abs(moment(L + 1, k) - moment(L, k));
                CHECK(diff < prev);
                prev = diff;
            }
            CHECK(prev < 1e-4);
        }
        // the first moment of the classical Cantor measure is 1/2
        CHECK(moment(12, 1) == doctest::Approx(0.5).epsilon(1e-5));
    }
}
