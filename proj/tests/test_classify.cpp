#include <doctest.h>

#include <cmath>

#include "dprime/classify.hpp"
#include "dprime/errors.hpp"
#include "dprime/spectrum.hpp"

using namespace dprime;

namespace {

// Consecutive gaps of length 1/k starting at 0.
GapStructure harmonic_gaps(std::size_t K) {
    GapStructure g;
    double x = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        g.gaps.push_back({x, x + 1.0 / static_cast<double>(k)});
        x += 1.0 / static_cast<double>(k);
    }
    return g;
}

// Unit gaps separated by blocks of length 2^-k (summable).
GapStructure alternating_gaps(std::size_t K) {
    GapStructure g;
    double x = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        g.gaps.push_back({x, x + 1.0});
        x += 1.0 + std::ldexp(1.0, -static_cast<int>(k));
    }
    return g;
}

// Eigenvalues below lambda of the direct sum of Neumann problems on the gaps.
long count_below(const GapStructure& g, std::size_t K, const PiecewisePotential& q, double lambda) {
    long n = 0;
    for (std::size_t k = 0; k < K; ++k) {
        ProblemSpec s;
        s.a = g.gaps[k].lo;
        s.b = g.gaps[k].hi;
        s.left = s.right = Boundary::Neumann;
        s.potential = q;
        n += oscillation_count(RealizedProblem(s), std::nextafter(lambda, -INFINITY));
    }
    return n;
}

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("canonical endpoint configurations") {
    const EndpointDescriptor finite{true, VariationClass::Finite, true};
    const EndpointDescriptor infinite{false, VariationClass::Finite, true};
    const auto l = classify_endpoint(finite, EndpointSide::Left), r = classify_endpoint(finite, EndpointSide::Right);
    CHECK(l.kind == EndpointKind::LimitCircle);
    CHECK(r.kind == EndpointKind::LimitCircle);
    CHECK(deficiency_indices(l, r).n == 2);

    const auto li = classify_endpoint(infinite, EndpointSide::Left), ri = classify_endpoint(infinite, EndpointSide::Right);
    CHECK(li.kind == EndpointKind::LimitPoint);
    CHECK(deficiency_indices(li, ri).n == 0);
    CHECK(deficiency_indices(li, ri).self_adjoint());

    CHECK(deficiency_indices(l, ri).n == 1);
    CHECK(deficiency_indices(ri, l).n == 1);
    CHECK_FALSE(deficiency_indices(l, ri).self_adjoint());
}

TEST_CASE("variation classes at a finite endpoint") {
    CHECK(classify_endpoint({true, VariationClass::UnboundedPInL2, true}, EndpointSide::Left).kind ==
          EndpointKind::LimitCircle);
    CHECK(classify_endpoint({true, VariationClass::PNotInL2, true}, EndpointSide::Left).kind ==
          EndpointKind::LimitPoint);
    CHECK(classify_endpoint({false, VariationClass::PNotInL2, true}, EndpointSide::Right).kind ==
          EndpointKind::LimitPoint);
}

TEST_CASE("potential outside the class is refused") {
    CHECK_THROWS_AS(classify_endpoint({true, VariationClass::Finite, false}, EndpointSide::Left),
                    UnsupportedHypothesis);
}

TEST_CASE("deficiency indices are symmetric and take three values") {
    for (bool f1 : {true, false})
        for (bool f2 : {true, false})
            for (auto v1 : {VariationClass::Finite, VariationClass::UnboundedPInL2, VariationClass::PNotInL2})
                for (auto v2 : {VariationClass::Finite, VariationClass::PNotInL2}) {
                    const auto a = classify_endpoint({f1, v1, true}, EndpointSide::Left);
                    const auto b = classify_endpoint({f2, v2, true}, EndpointSide::Right);
                    const int n = deficiency_indices(a, b).n;
                    CHECK(n == deficiency_indices(b, a).n);
                    CHECK((n == 0 || n == 1 || n == 2));
                    CHECK(classify_endpoint({f1, v1, true}, EndpointSide::Left).kind == a.kind);
                }
}

TEST_CASE("quartile trend heuristic") {
    std::vector<std::pair<double, double>> up, flat, zero;
    for (int i = 0; i <= 100; ++i) {
        up.emplace_back(i, i);
        flat.emplace_back(i, 1.0);
        zero.emplace_back(i, 0.0);
    }
    CHECK(increasing_trend(up, 4.0));
    CHECK_FALSE(increasing_trend(flat, 4.0));
    CHECK_FALSE(increasing_trend(zero, 4.0));
    CHECK_FALSE(increasing_trend({{0, 1}, {1, 2}}, 4.0));
}

TEST_CASE("harmonic gaps with q = x are discrete") {
    const auto gaps = harmonic_gaps(2000);
    const auto q = PiecewisePotential::averaged([](double x) { return x; }, 0, 40, 4000);
    const auto r = evaluate_criteria(gaps, q);
    CHECK(r.molchanov_increasing);
    CHECK(r.gap_means_increasing);
    CHECK(r.verdict == Verdict::Discrete);
    CHECK(r.brinck_sup == 0.0);
    // Linear q: the gap mean is the midpoint, up to the cell width.
    for (std::size_t k = 0; k < 2000; k += 97)
        CHECK(std::abs(r.gap_means[k].second - 0.5 * (gaps.gaps[k].lo + gaps.gaps[k].hi)) < 1e-2);
}

TEST_CASE("bounded potential with semiboundedness asserted is not discrete") {
    CriteriaOptions opt;
    opt.lower_semibounded = true;
    const auto q = PiecewisePotential::constant(0, 40, 1.0);
    CHECK(evaluate_criteria(harmonic_gaps(2000), q, opt).verdict == Verdict::NotDiscrete);
    CHECK(evaluate_criteria(alternating_gaps(30), q, opt).verdict == Verdict::NotDiscrete);
    opt.lower_semibounded = false;
    CHECK(evaluate_criteria(harmonic_gaps(2000), q, opt).verdict == Verdict::Inconclusive);
}

TEST_CASE("shrinking gaps with q = 0 are inconclusive") {
    const auto r = evaluate_criteria(harmonic_gaps(2000), PiecewisePotential::constant(0, 40, 0.0));
    CHECK(r.verdict == Verdict::Inconclusive);
    CHECK(r.necessary_increasing);
    CHECK(r.necessary_seq.back().second == doctest::Approx(2000.0 * 2000.0));
    for (const auto& [k, m] : r.gap_means) CHECK(m == 0.0);
}

TEST_CASE("alternating family follows the Molchanov trend") {
    const auto gaps = alternating_gaps(30);
    const auto lin = PiecewisePotential::averaged([](double x) { return x; }, 0, 32, 3200);
    CHECK(evaluate_criteria(gaps, lin).verdict == Verdict::Discrete);
    CriteriaOptions opt;
    opt.lower_semibounded = true;
    const auto wave = PiecewisePotential::averaged([](double x) { return 1.0 + std::sin(x); }, 0, 32, 3200);
    CHECK(evaluate_criteria(gaps, wave, opt).verdict == Verdict::NotDiscrete);
}

TEST_CASE("Brinck supremum") {
    // q = x - 5 on whole cells; first gap [0,1] has mean negative part 4.5.
    const auto q = PiecewisePotential::averaged([](double x) { return x - 5.0; }, 0, 40, 4000);
    const auto r = evaluate_criteria(alternating_gaps(20), q);
    CHECK(r.brinck_sup == doctest::Approx(4.5).epsilon(1e-9));
}

TEST_CASE("discrete verdict agrees with truncated spectra") {
    const auto gaps = harmonic_gaps(2000);
    const auto q = PiecewisePotential::averaged([](double x) { return x; }, 0, 40, 4000);
    REQUIRE(evaluate_criteria(gaps, q).verdict == Verdict::Discrete);
    // Discrete spectrum: the count below a fixed level stops growing with the truncation.
    const long n500 = count_below(gaps, 500, q, 5.0);
    CHECK(n500 > 0);
    CHECK(count_below(gaps, 1000, q, 5.0) == n500);
    CHECK(count_below(gaps, 2000, q, 5.0) == n500);
}

TEST_CASE("malformed gap data") {
    const auto q = PiecewisePotential::constant(0, 10, 1.0);
    CHECK_THROWS_AS(evaluate_criteria(GapStructure{}, q), InputError);
    CHECK_THROWS_AS(evaluate_criteria(GapStructure{{{0, 1}, {0.5, 2}}}, q), InputError);
    CHECK_THROWS_AS(evaluate_criteria(GapStructure{{{0, 1}, {2, 2}}}, q), InputError);
}

}  // TEST_SUITE
