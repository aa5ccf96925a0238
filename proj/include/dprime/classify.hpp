#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dprime/propagate.hpp"

namespace dprime {

enum class EndpointSide { Left, Right };
enum class EndpointKind { LimitPoint, LimitCircle };

// How |dnu| behaves near the endpoint, and hence whether P is square integrable there.
enum class VariationClass {
    Finite,           // |dnu| finite near the endpoint; P bounded
    UnboundedPInL2,   // |dnu| infinite but P still square integrable
    PNotInL2,
};

struct EndpointDescriptor {
    bool finite = true;
    VariationClass variation = VariationClass::Finite;
    bool q_in_class = true;  // q in L^inf + L^1 with compact support near the endpoint
};

struct EndpointVerdict {
    EndpointSide side = EndpointSide::Left;
    EndpointKind kind = EndpointKind::LimitCircle;
    std::string reason;
};

EndpointVerdict classify_endpoint(const EndpointDescriptor& d, EndpointSide side);

struct DeficiencyIndices {
    int n = 0;  // indices are (n, n)
    bool self_adjoint() const { return n == 0; }
};

DeficiencyIndices deficiency_indices(const EndpointVerdict& left, const EndpointVerdict& right);

struct Gap {
    double lo = 0.0, hi = 0.0;
    double length() const { return hi - lo; }
};

struct GapStructure {
    std::vector<Gap> gaps;
};

enum class Verdict { Discrete, NotDiscrete, Inconclusive };

struct CriteriaOptions {
    std::vector<double> epsilon_grid{0.5, 1.0, 2.0};
    std::size_t k_prefix = 0;    // 0 uses every gap
    double trend_factor = 4.0;   // last-quartile mean must exceed first-quartile mean by this factor
    std::size_t grid_points = 256;
    bool lower_semibounded = false;  // user assertion; cannot be checked from finite data
};

struct MolchanovSeries {
    double epsilon = 0.0;
    std::vector<std::pair<double, double>> values;  // (x, int_x^{x+eps} q)
    bool increasing = false;
};

struct CriteriaReport {
    double brinck_sup = 0.0;
    std::vector<MolchanovSeries> molchanov;
    std::vector<std::pair<std::size_t, double>> gap_means;      // (k, mean of q over gap k)
    std::vector<std::pair<std::size_t, double>> necessary_seq;  // (k, 1/d_k^2 + gap mean)
    bool molchanov_increasing = false;
    bool gap_means_increasing = false;
    bool necessary_increasing = false;
    Verdict verdict = Verdict::Inconclusive;
};

CriteriaReport evaluate_criteria(const GapStructure& gaps, const PiecewisePotential& q, const CriteriaOptions& opt = {});

// Quartile heuristic on (abscissa, value) samples ordered by abscissa.
bool increasing_trend(const std::vector<std::pair<double, double>>& series, double factor);

const char* to_string(EndpointKind k);
const char* to_string(Verdict v);

}  // namespace dprime
