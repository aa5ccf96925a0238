#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "dprime/measures.hpp"

namespace dprime {

using Complex = std::complex<double>;

enum class Boundary { Dirichlet, Neumann };

// q is constant on [breakpoints[i], breakpoints[i+1]); empty means q = 0.
struct PiecewisePotential {
    std::vector<double> breakpoints;
    std::vector<double> values;

    static PiecewisePotential constant(double a, double b, double value);
    // Cell averages of f over n equal cells of [a, b].
    static PiecewisePotential averaged(const std::function<double(double)>& f, double a, double b, int n);

    bool is_zero() const;
    double value_at(double x) const;
    double integral(double lo, double hi) const;
    double min_value(double a, double b) const;
};

struct ProblemSpec {
    double a = 0.0;
    double b = 1.0;
    Boundary left = Boundary::Dirichlet;
    Boundary right = Boundary::Dirichlet;
    PiecewisePotential potential;
    SingularMeasure measure;
    int level = 0;
};

// Interval split at every atom and potential breakpoint. Segment i spans
// [x, x + length]; beta is the weight of the atom sitting at its right end
// (zero for the last segment).
struct Segment {
    double x = 0.0;
    double length = 0.0;
    double q = 0.0;
    double beta = 0.0;
};

class RealizedProblem {
public:
    explicit RealizedProblem(const ProblemSpec& spec);

    const ProblemSpec& spec() const { return spec_; }
    double a() const { return spec_.a; }
    double b() const { return spec_.b; }
    Boundary left() const { return spec_.left; }
    Boundary right() const { return spec_.right; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Segment>& segments() const { return segments_; }
    bool nonnegative_measure() const;
    bool zero_potential() const { return zero_q_; }
    double min_potential() const;

    // Index of the segment with x in (start, end]; x = a maps to segment 0.
    std::size_t locate(double x) const;

private:
    ProblemSpec spec_;
    std::vector<Atom> atoms_;
    std::vector<Segment> segments_;
    bool zero_q_ = true;
};

template <class T>
struct Mat2 {
    T m00{}, m01{}, m10{}, m11{};

    T det() const { return m00 * m11 - m01 * m10; }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11, m10 * o.m00 + m11 * o.m10,
                m10 * o.m01 + m11 * o.m11};
    }
    static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
};

template <class T>
struct State {
    T u{};
    T u1{};
};

template <class T>
State<T> operator*(const Mat2<T>& m, const State<T>& s) {
    return {m.m00 * s.u + m.m01 * s.u1, m.m10 * s.u + m.m11 * s.u1};
}

using TransferMatrix = Mat2<double>;
using TransferMatrixC = Mat2<Complex>;
using StateVector = State<double>;
using StateVectorC = State<Complex>;

TransferMatrix atom_jump(double beta);

// Flow of u' = u1, u1' = (q - z) u over a stretch of the given length.
TransferMatrix stretch_propagator(double length, double q, double z);
TransferMatrixC stretch_propagator(double length, double q, Complex z);

// Mantissa and natural-log scale: the true value is value * exp(log_scale).
template <class T>
struct Scaled {
    T value{};
    double log_scale = 0.0;
};

template <class T>
struct PropagationResult {
    State<T> state;          // normalized mantissa
    double log_scale = 0.0;  // true state = state * exp(log_scale)
    std::optional<long> zero_count;

    // Throws PropagationOverflow when the unscaled state is not representable.
    State<T> unscaled() const;
};

// from_left = true starts at a, otherwise at b; init is given in the usual
// orientation (u, u^[1]) in both cases. The zero count covers the open interval.
PropagationResult<double> propagate(const RealizedProblem& p, double z, StateVector init, bool from_left = true);
PropagationResult<Complex> propagate(const RealizedProblem& p, Complex z, StateVectorC init, bool from_left = true);

TransferMatrix transfer_matrix(const RealizedProblem& p, double z);
TransferMatrixC transfer_matrix(const RealizedProblem& p, Complex z);

template <class T>
T wronskian(const State<T>& s1, const State<T>& s2) {
    return s1.u * s2.u1 - s1.u1 * s2.u;
}

// A solution of (tau - z)u = 0 with stored data at the left end of every
// segment, so that u(x) can be evaluated anywhere in closed form.
template <class T>
class Solution {
public:
    Solution(const RealizedProblem& p, T z, State<T> init, bool from_left);

    // Left-continuous value at x, as mantissa plus log scale.
    Scaled<State<T>> at(double x) const;
    State<T> value(double x) const;
    // Right limit at the left end of segment i.
    Scaled<State<T>> segment_start(std::size_t i) const { return {start_[i], scale_[i]}; }
    const RealizedProblem& problem() const { return *p_; }
    T z() const { return z_; }

private:
    const RealizedProblem* p_;
    T z_;
    std::vector<State<T>> start_;  // right limit at segment start
    std::vector<double> scale_;
};

}  // namespace dprime
