#include "dprime/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>

#include "dprime/errors.hpp"
#include "dprime/quadrature.hpp"

namespace dprime {

namespace {

constexpr double kSeriesThreshold = 1e-8;  // |omega^2| L^2 below this uses the Taylor form
constexpr double kScaleOut = 20.0;         // exponential growth pulled into the log scale
constexpr double kRenormHigh = 1e100;
constexpr double kRenormLow = 1e-100;

template <class T>
double mag(const T& v) {
    return std::abs(v);
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

template <class T>
Mat2<T> series_stretch(double L, T w2) {
    const T x = w2 * (L * L);
    const T c = T(1) - x / 2.0 + x * x / 24.0;
    const T s = L * (T(1) - x / 6.0 + x * x / 120.0);
    return {c, s, -w2 * s, c};
}

// stretch matrix times exp(-g); g > 0 only when the growth is large.
Scaled<TransferMatrix> stretch_scaled(double L, double q, double z) {
    const double w2 = z - q;
    if (w2 < 0.0) {
        const double k = std::sqrt(-w2);
        const double g = k * L;
        if (g > kScaleOut) {
            const double e = std::exp(-2.0 * g);
            const double ch = 0.5 * (1.0 + e);
            const double sh = -0.5 * std::expm1(-2.0 * g);
            return {{ch, sh / k, k * sh, ch}, g};
        }
    }
    return {stretch_propagator(L, q, z), 0.0};
}

Scaled<TransferMatrixC> stretch_scaled(double L, double q, Complex z) {
    const Complex w2 = z - q;
    const Complex w = std::sqrt(w2);
    const double y = (w * L).imag();
    const double g = std::abs(y);
    if (g > kScaleOut) {
        const double x = (w * L).real();
        const double e = std::exp(-2.0 * g);
        const double ch = 0.5 * (1.0 + e);
        const double sh = (y > 0 ? -0.5 : 0.5) * std::expm1(-2.0 * g);
        const Complex cs{std::cos(x) * ch, -std::sin(x) * sh};
        const Complex sn{std::sin(x) * ch, std::cos(x) * sh};
        return {{cs, sn / w, -w * sn, cs}, g};
    }
    return {stretch_propagator(L, q, z), 0.0};
}

template <class T>
void renormalize(State<T>& s, double& log_scale) {
    const double m = std::max(mag(s.u), mag(s.u1));
    if (!std::isfinite(m))
        throw PropagationOverflow("non-finite state during propagation; rescale the problem or reduce |z|");
    if (m > kRenormHigh || (m < kRenormLow && m > 0.0)) {
        int e = 0;
        std::frexp(m, &e);
        s.u = s.u * std::ldexp(1.0, -e);
        s.u1 = s.u1 * std::ldexp(1.0, -e);
        log_scale += e * std::numbers::ln2;
    }
}

// Sign changes of u on (0, L] for a real stretch with entry s0 and exit s1.
long stretch_zeros(const StateVector& s0, const StateVector& s1, double w2, double L) {
    const int start_sign = s0.u != 0.0 ? sgn(s0.u) : sgn(s0.u1);
    if (w2 > 0.0 && w2 * L * L >= kSeriesThreshold) {
        const double w = std::sqrt(w2);
        const double th0 = std::atan2(s0.u, s0.u1 / w);
        const double e = (th0 + w * L) / std::numbers::pi;
        const double base = std::floor(th0 / std::numbers::pi);
        if (s1.u == 0.0) return static_cast<long>(std::llround(e) - base);
        long k = static_cast<long>(std::floor(e) - base);
        const int expected = (k % 2 == 0) ? start_sign : -start_sign;
        if (sgn(s1.u) != expected) k += (e - std::floor(e) < 0.5) ? -1 : 1;
        return std::max(k, 0L);
    }
    if (s1.u == 0.0) return s0.u != 0.0 ? 1 : 0;
    return (s0.u != 0.0 && sgn(s1.u) != sgn(s0.u)) ? 1 : 0;
}

// Walks the segments from one end to the other. `visit(i, state, log_scale)`
// is called with the right-limit state at the left end of segment i, given
// in the usual orientation.
template <class T, class Visit>
PropagationResult<T> walk(const RealizedProblem& p, T z, State<T> init, bool from_left, Visit&& visit) {
    constexpr bool real = std::is_same_v<T, double>;
    const auto& seg = p.segments();
    const std::size_t n = seg.size();
    State<T> s = from_left ? init : State<T>{init.u, -init.u1};
    double ls = 0.0;
    long zeros = 0;
    renormalize(s, ls);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = from_left ? k : n - 1 - k;
        if (from_left) visit(i, s, ls);
        const auto m = stretch_scaled(seg[i].length, seg[i].q, z);
        State<T> next = m.value * s;
        ls += m.log_scale;
        if constexpr (real) zeros += stretch_zeros(s, next, z - seg[i].q, seg[i].length);
        s = next;
        renormalize(s, ls);
        if (!from_left) visit(i, State<T>{s.u, -s.u1}, ls);
        const double beta = from_left ? seg[i].beta : (i > 0 ? seg[i - 1].beta : 0.0);
        if (beta != 0.0) {
            const T before = s.u;
            s.u = s.u + beta * s.u1;
            if constexpr (real) {
                if (before * s.u < 0.0) ++zeros;
            }
            renormalize(s, ls);
        }
    }
    PropagationResult<T> r;
    r.state = from_left ? s : State<T>{s.u, -s.u1};
    r.log_scale = ls;
    if constexpr (real) {
        if (s.u == 0.0 && zeros > 0) --zeros;  // a zero exactly at the far end is not interior
        r.zero_count = zeros;
    }
    return r;
}

}  // namespace

PiecewisePotential PiecewisePotential::constant(double a, double b, double value) {
    return {{a, b}, {value}};
}

PiecewisePotential PiecewisePotential::averaged(const std::function<double(double)>& f, double a, double b,
                                                int n) {
    const GaussRule& g = gauss_legendre(4);
    PiecewisePotential q;
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) q.breakpoints.push_back(i == n ? b : a + i * h);
    for (int i = 0; i < n; ++i) {
        const double c = a + (i + 0.5) * h;
        double s = 0.0;
        for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(c + 0.5 * h * g.x[k]);
        q.values.push_back(0.5 * s);
    }
    return q;
}

bool PiecewisePotential::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double PiecewisePotential::value_at(double x) const {
    if (values.empty()) return 0.0;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    std::ptrdiff_t i = (it - breakpoints.begin()) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(values.size()) - 1);
    return values[static_cast<std::size_t>(i)];
}

double PiecewisePotential::integral(double lo, double hi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double l = std::max(lo, breakpoints[i]);
        const double h = std::min(hi, breakpoints[i + 1]);
        if (h > l) s += (h - l) * values[i];
    }
    return s;
}

double PiecewisePotential::min_value(double a, double b) const {
    if (values.empty()) return 0.0;
    double m = INFINITY;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (breakpoints[i + 1] > a && breakpoints[i] < b) m = std::min(m, values[i]);
    return std::isfinite(m) ? m : 0.0;
}

RealizedProblem::RealizedProblem(const ProblemSpec& spec) : spec_(spec) {
    if (!(std::isfinite(spec.a) && std::isfinite(spec.b) && spec.a < spec.b))
        throw InputError("interval must be finite with a < b");
    validate(spec.measure);
    const PiecewisePotential& q = spec.potential;
    if (!q.values.empty()) {
        if (q.breakpoints.size() != q.values.size() + 1)
            throw InputError("potential needs one more breakpoint than values");
        if (!std::is_sorted(q.breakpoints.begin(), q.breakpoints.end()))
            throw InputError("potential breakpoints must be sorted");
        if (q.breakpoints.front() > spec.a || q.breakpoints.back() < spec.b)
            throw InputError("potential cells must cover the interval");
        for (double v : q.values)
            if (!std::isfinite(v)) throw InputError("potential values must be finite");
    }
    // Atoms on the boundary lie outside the open interval and carry no interaction.
    for (const Atom& at : realize(spec.measure, spec.level))
        if (at.x > spec.a && at.x < spec.b) atoms_.push_back(at);

    std::vector<double> pts{spec.a, spec.b};
    for (const Atom& at : atoms_) pts.push_back(at.x);
    for (double x : q.breakpoints)
        if (x > spec.a && x < spec.b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::size_t ai = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Segment s;
        s.x = pts[i];
        s.length = pts[i + 1] - pts[i];
        s.q = q.value_at(0.5 * (pts[i] + pts[i + 1]));
        while (ai < atoms_.size() && atoms_[ai].x < pts[i + 1]) ++ai;
        if (ai < atoms_.size() && atoms_[ai].x == pts[i + 1]) s.beta = atoms_[ai].beta;
        if (s.q != 0.0) zero_q_ = false;
        segments_.push_back(s);
    }
}

bool RealizedProblem::nonnegative_measure() const {
    return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.beta >= 0.0; });
}

double RealizedProblem::min_potential() const {
    double m = INFINITY;
    for (const Segment& s : segments_) m = std::min(m, s.q);
    return m;
}

std::size_t RealizedProblem::locate(double x) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                               [](const Segment& s, double v) { return s.x < v; });
    const std::size_t idx = static_cast<std::size_t>(it - segments_.begin());
    return idx == 0 ? 0 : idx - 1;
}

TransferMatrix atom_jump(double beta) { return {1.0, beta, 0.0, 1.0}; }

TransferMatrix stretch_propagator(double L, double q, double z) {
    const double w2 = z - q;
    if (std::abs(w2) * L * L < kSeriesThreshold) return series_stretch(L, w2);
    if (w2 > 0.0) {
        const double w = std::sqrt(w2);
        const double c = std::cos(w * L), s = std::sin(w * L);
        return {c, s / w, -w * s, c};
    }
    const double k = std::sqrt(-w2);
    const double c = std::cosh(k * L), s = std::sinh(k * L);
    return {c, s / k, k * s, c};
}

TransferMatrixC stretch_propagator(double L, double q, Complex z) {
    const Complex w2 = z - q;
    if (std::abs(w2) * L * L < kSeriesThreshold) return series_stretch(L, w2);
    const Complex w = std::sqrt(w2);
    const Complex c = std::cos(w * L), s = std::sin(w * L);
    return {c, s / w, -w * s, c};
}

template <class T>
State<T> PropagationResult<T>::unscaled() const {
    const double f = std::exp(log_scale);
    State<T> s{state.u * f, state.u1 * f};
    if (!std::isfinite(mag(s.u)) || !std::isfinite(mag(s.u1)))
        throw PropagationOverflow("state magnitude exceeds double range; use the scaled result");
    return s;
}

template struct PropagationResult<double>;
template struct PropagationResult<Complex>;

PropagationResult<double> propagate(const RealizedProblem& p, double z, StateVector init, bool from_left) {
    return walk<double>(p, z, init, from_left, [](std::size_t, const StateVector&, double) {});
}

PropagationResult<Complex> propagate(const RealizedProblem& p, Complex z, StateVectorC init, bool from_left) {
    return walk<Complex>(p, z, init, from_left, [](std::size_t, const StateVectorC&, double) {});
}

template <class T>
static Mat2<T> product(const RealizedProblem& p, T z) {
    Mat2<T> m = Mat2<T>::identity();
    for (const Segment& s : p.segments()) {
        m = stretch_propagator(s.length, s.q, z) * m;
        if (s.beta != 0.0) m = Mat2<T>{T(1), T(s.beta), T(0), T(1)} * m;
    }
    return m;
}

TransferMatrix transfer_matrix(const RealizedProblem& p, double z) { return product<double>(p, z); }
TransferMatrixC transfer_matrix(const RealizedProblem& p, Complex z) { return product<Complex>(p, z); }

template <class T>
Solution<T>::Solution(const RealizedProblem& p, T z, State<T> init, bool from_left)
    : p_(&p), z_(z), start_(p.segments().size()), scale_(p.segments().size()) {
    walk<T>(p, z, init, from_left, [&](std::size_t i, const State<T>& s, double ls) {
        start_[i] = s;
        scale_[i] = ls;
    });
}

template <class T>
Scaled<State<T>> Solution<T>::at(double x) const {
    const std::size_t i = p_->locate(x);
    const Segment& seg = p_->segments()[i];
    const double s = std::clamp(x - seg.x, 0.0, seg.length);
    if (s == 0.0) return {start_[i], scale_[i]};
    const auto m = stretch_scaled(s, seg.q, z_);
    return {m.value * start_[i], scale_[i] + m.log_scale};
}

template <class T>
State<T> Solution<T>::value(double x) const {
    const auto v = at(x);
    const double f = std::exp(v.log_scale);
    State<T> s{v.value.u * f, v.value.u1 * f};
    if (!std::isfinite(mag(s.u)) || !std::isfinite(mag(s.u1)))
        throw PropagationOverflow("solution value exceeds double range");
    return s;
}

template class Solution<double>;
template class Solution<Complex>;

}  // namespace dprime
