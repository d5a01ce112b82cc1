#ifndef FFR_LTI_HPP
#define FFR_LTI_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ffr/timeseries.hpp"

namespace ffr::lti {

using Complex = std::complex<double>;

/// Pair-cancellation tolerance: a zero/pole pair is treated as identical when
/// |z - p| <= kCancelTol * max(1, |z|). Pairs that should cancel in this code
/// base are equal by construction; the tolerance only absorbs rounding.
inline constexpr double kCancelTol = 1e-9;

/// Real-axis tolerance for stability classification. Roots with
/// |Re| <= kMarginalTol are reported as marginal, never as stable.
inline constexpr double kMarginalTol = 1e-12;

/// Rational transfer function stored in factored gain/zeros/poles form:
///
///   H(s) = gain * prod(s - z_i) / prod(s - p_j)
///
/// Factored storage keeps constructed-to-cancel right-half-plane factors
/// exact; coefficient expansion happens only at realization time.
/// Construction canonicalizes: complex roots are paired into exact
/// conjugates, zero/pole pairs within tolerance are cancelled, and the
/// result must be proper (no more zeros than poles).
class RationalTF {
  public:
    /// The zero transfer function.
    RationalTF() = default;

    RationalTF(double gain, std::vector<Complex> zeros, std::vector<Complex> poles);

    static RationalTF constant(double k) { return RationalTF(k, {}, {}); }
    static RationalTF identity() { return constant(1.0); }

    /// H(s) = gain / (tau*s + 1). tau must be > 0.
    static RationalTF first_order_lag(double gain, double tau);

    double gain() const { return gain_; }
    const std::vector<Complex>& zeros() const { return zeros_; }
    const std::vector<Complex>& poles() const { return poles_; }
    std::size_t order() const { return poles_.size(); }
    bool is_zero() const { return gain_ == 0.0; }

    Complex eval(Complex s) const;

  private:
    double gain_ = 0.0;
    std::vector<Complex> zeros_;
    std::vector<Complex> poles_;
};

RationalTF series(const RationalTF& a, const RationalTF& b);
RationalTF parallel(const RationalTF& a, const RationalTF& b);
/// a / b in factored form (zero/pole lists swapped for b); the quotient must
/// come out proper after cancellation.
RationalTF divide(const RationalTF& a, const RationalTF& b);
RationalTF scale(const RationalTF& a, double k);

/// Value at s = 0. Throws std::domain_error if the function has a pole at
/// the origin.
double dc_gain(const RationalTF& h);

struct Classification {
    bool stable = true;  // no poles with Re > tol and none marginal
    std::vector<Complex> nmp_zeros;
    std::vector<Complex> unstable_poles;
    std::vector<Complex> marginal_zeros;
    std::vector<Complex> marginal_poles;

    bool minimum_phase() const { return nmp_zeros.empty() && marginal_zeros.empty(); }
};

Classification classify(const RationalTF& h);

/// h(jw) for each frequency. Samples that land on a pole come back
/// non-finite; callers that care should test with std::isfinite.
std::vector<Complex> freq_response(const RationalTF& h, std::span<const double> w);

/// Log-spaced grid of n points covering [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Controllable canonical realization of a proper RationalTF:
/// dx/dt = A x + B u, y = C x + D u.
struct StateSpace {
    int n = 0;
    std::vector<double> a;  // n*n, row-major
    std::vector<double> b;  // n
    std::vector<double> c;  // n
    double d = 0.0;

    void deriv(const double* x, double u, double* dx) const;
    double output(const double* x, double u) const;
    Complex eval(Complex s) const;  // C (sI - A)^-1 B + D
};

StateSpace realize(const RationalTF& h);

/// Unit-step response sampled on a fixed grid, integrated with the same
/// explicit RK4 scheme the grid simulator uses. Throws on divergence.
TimeSeries step_response(const RationalTF& h, double t_end, double dt);

/// Polynomial coefficients of gain*prod(s - z_i) in descending powers of s.
std::vector<double> poly_from_roots(double gain, std::span<const Complex> roots);
/// Roots of a real-coefficient polynomial (descending powers).
std::vector<Complex> poly_roots(std::span<const double> coeffs);

std::vector<double> numerator(const RationalTF& h);    // descending
std::vector<double> denominator(const RationalTF& h);  // descending, monic

/// Factored rendering, e.g. "2 (0.625 - s) / ((s + 1.25)(s + 5))",
/// followed by the expanded polynomial ratio.
std::string to_string(const RationalTF& h);

}  // namespace ffr::lti

#endif
