#include "dprime/classify.hpp"

#include <algorithm>
#include <cmath>

#include "dprime/errors.hpp"

namespace dprime {

EndpointVerdict classify_endpoint(const EndpointDescriptor& d, EndpointSide side) {
    if (!d.q_in_class)
        throw UnsupportedHypothesis("q is outside L^inf + L^1_c near the endpoint; no classification is made");
    EndpointVerdict v;
    v.side = side;
    if (!d.finite) {
        v.kind = EndpointKind::LimitPoint;
        v.reason = "constant function is not square integrable near an infinite endpoint";
    } else if (d.variation == VariationClass::PNotInL2) {
        v.kind = EndpointKind::LimitPoint;
        v.reason = "P is not square integrable near the endpoint";
    } else {
        v.kind = EndpointKind::LimitCircle;
        v.reason = d.variation == VariationClass::Finite
                       ? "finite endpoint with finite variation: 1 and P are square integrable"
                       : "finite endpoint with P square integrable";
    }
    return v;
}

DeficiencyIndices deficiency_indices(const EndpointVerdict& left, const EndpointVerdict& right) {
    return {(left.kind == EndpointKind::LimitCircle) + (right.kind == EndpointKind::LimitCircle)};
}

bool increasing_trend(const std::vector<std::pair<double, double>>& s, double factor) {
    if (s.size() < 4) return false;
    const double lo = s.front().first, hi = s.back().first, span = hi - lo;
    if (!(span > 0.0)) return false;
    double first = 0.0, last = 0.0;
    std::size_t nf = 0, nl = 0;
    for (const auto& [x, v] : s) {
        if (x <= lo + 0.25 * span) first += v, ++nf;
        if (x >= hi - 0.25 * span) last += v, ++nl;
    }
    if (nf == 0 || nl == 0) return false;
    first /= static_cast<double>(nf);
    last /= static_cast<double>(nl);
    return last > 0.0 && last > factor * std::max(first, 0.0);
}

namespace {

// Integral over [lo, hi] of the negative part of q.
double negative_part_integral(const PiecewisePotential& q, double lo, double hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.values.size(); ++i) {
        const double a = std::max(lo, q.breakpoints[i]), b = std::min(hi, q.breakpoints[i + 1]);
        if (b > a) s += std::max(-q.values[i], 0.0) * (b - a);
    }
    return s;
}

}  // namespace

CriteriaReport evaluate_criteria(const GapStructure& gs, const PiecewisePotential& q, const CriteriaOptions& opt) {
    if (gs.gaps.empty()) throw InputError("criteria need at least one gap");
    const std::size_t K = opt.k_prefix == 0 ? gs.gaps.size() : std::min(opt.k_prefix, gs.gaps.size());
    for (std::size_t k = 0; k < K; ++k) {
        const Gap& g = gs.gaps[k];
        if (!(g.length() > 0.0)) throw InputError("gap lengths must be positive");
        if (k > 0 && g.lo < gs.gaps[k - 1].hi) throw InputError("gaps must be disjoint and ordered");
    }
    const double qa = q.breakpoints.empty() ? gs.gaps.front().lo : q.breakpoints.front();
    const double qb = q.breakpoints.empty() ? gs.gaps[K - 1].hi : q.breakpoints.back();
    if (!q.breakpoints.empty() && (gs.gaps.front().lo < qa || gs.gaps[K - 1].hi > qb))
        throw InputError("gap prefix extends past the potential window");

    CriteriaReport r;
    std::vector<std::pair<double, double>> means_by_pos, necessary_by_pos;
    for (std::size_t k = 0; k < K; ++k) {
        const Gap& g = gs.gaps[k];
        const double d = g.length();
        const double mean = q.integral(g.lo, g.hi) / d;
        r.brinck_sup = std::max(r.brinck_sup, negative_part_integral(q, g.lo, g.hi) / d);
        r.gap_means.emplace_back(k + 1, mean);
        r.necessary_seq.emplace_back(k + 1, 1.0 / (d * d) + mean);
        means_by_pos.emplace_back(0.5 * (g.lo + g.hi), mean);
        necessary_by_pos.emplace_back(0.5 * (g.lo + g.hi), 1.0 / (d * d) + mean);
    }
    r.gap_means_increasing = increasing_trend(means_by_pos, opt.trend_factor);
    r.necessary_increasing = increasing_trend(necessary_by_pos, opt.trend_factor);

    r.molchanov_increasing = !opt.epsilon_grid.empty();
    for (double eps : opt.epsilon_grid) {
        MolchanovSeries m;
        m.epsilon = eps;
        const double top = qb - eps;
        const std::size_t n = std::max<std::size_t>(opt.grid_points, 4);
        for (std::size_t i = 0; i < n && top > qa; ++i) {
            const double x = qa + (top - qa) * static_cast<double>(i) / static_cast<double>(n - 1);
            m.values.emplace_back(x, q.integral(x, x + eps));
        }
        m.increasing = increasing_trend(m.values, opt.trend_factor);
        r.molchanov_increasing = r.molchanov_increasing && m.increasing;
        r.molchanov.push_back(std::move(m));
    }

    if (r.molchanov_increasing && r.gap_means_increasing)
        r.verdict = Verdict::Discrete;
    else if (!r.molchanov_increasing && opt.lower_semibounded)
        r.verdict = Verdict::NotDiscrete;
    else
        r.verdict = Verdict::Inconclusive;
    return r;
}

const char* to_string(EndpointKind k) { return k == EndpointKind::LimitPoint ? "limit_point" : "limit_circle"; }

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Discrete: return "discrete";
        case Verdict::NotDiscrete: return "not_discrete";
        default: return "inconclusive";
    }
}

}  // namespace dprime
