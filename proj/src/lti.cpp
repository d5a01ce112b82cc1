#include "ffr/lti.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace ffr::lti {

namespace {

bool root_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Snap near-real roots to the axis and force complex ones into exact
// conjugate pairs. Throws if a complex root has no partner.
std::vector<Complex> pair_conjugates(std::vector<Complex> roots, const char* what) {
    for (auto& r : roots) {
        if (std::abs(r.imag()) <= kCancelTol * std::max(1.0, std::abs(r))) r = Complex(r.real(), 0.0);
    }
    std::vector<Complex> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        if (roots[i].imag() == 0.0) {
            out.push_back(roots[i]);
            used[i] = true;
            continue;
        }
        // find the closest unused conjugate partner
        std::size_t best = roots.size();
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j] || roots[j].imag() == 0.0) continue;
            double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        double tol = 1e-6 * std::max(1.0, std::abs(roots[i]));
        if (best == roots.size() || best_d > tol)
            throw std::invalid_argument(std::string(what) + ": complex root without conjugate partner");
        Complex mean = 0.5 * (roots[i] + std::conj(roots[best]));
        out.emplace_back(mean.real(), std::abs(mean.imag()));
        out.emplace_back(mean.real(), -std::abs(mean.imag()));
        used[i] = used[best] = true;
    }
    std::sort(out.begin(), out.end(), root_less);
    return out;
}

}  // namespace

RationalTF::RationalTF(double gain, std::vector<Complex> zeros, std::vector<Complex> poles)
    : gain_(gain) {
    if (!std::isfinite(gain)) throw std::invalid_argument("RationalTF: non-finite gain");
    if (gain_ == 0.0) return;  // canonical zero function carries no roots
    zeros_ = pair_conjugates(std::move(zeros), "zeros");
    poles_ = pair_conjugates(std::move(poles), "poles");

    // cancel zero/pole pairs that agree within tolerance
    std::vector<bool> pole_used(poles_.size(), false);
    std::vector<Complex> kept;
    for (const auto& z : zeros_) {
        std::size_t best = poles_.size();
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < poles_.size(); ++j) {
            if (pole_used[j]) continue;
            double d = std::abs(z - poles_[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < poles_.size() && best_d <= kCancelTol * std::max(1.0, std::abs(z))) {
            pole_used[best] = true;  // cancelled pair
        } else {
            kept.push_back(z);
        }
    }
    std::vector<Complex> poles_left;
    for (std::size_t j = 0; j < poles_.size(); ++j)
        if (!pole_used[j]) poles_left.push_back(poles_[j]);
    zeros_ = std::move(kept);
    poles_ = std::move(poles_left);
    if (zeros_.size() > poles_.size()) throw std::invalid_argument("RationalTF: improper (more zeros than poles)");
}

RationalTF RationalTF::first_order_lag(double gain, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("first_order_lag: tau must be > 0");
    return RationalTF(gain / tau, {}, {Complex(-1.0 / tau, 0.0)});
}

Complex RationalTF::eval(Complex s) const {
    Complex v(gain_, 0.0);
    for (const auto& z : zeros_) v *= (s - z);
    for (const auto& p : poles_) v /= (s - p);
    return v;
}

RationalTF series(const RationalTF& a, const RationalTF& b) {
    if (a.is_zero() || b.is_zero()) return RationalTF();
    std::vector<Complex> z = a.zeros();
    z.insert(z.end(), b.zeros().begin(), b.zeros().end());
    std::vector<Complex> p = a.poles();
    p.insert(p.end(), b.poles().begin(), b.poles().end());
    return RationalTF(a.gain() * b.gain(), std::move(z), std::move(p));
}

RationalTF parallel(const RationalTF& a, const RationalTF& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;

    // Factor out poles the operands share (equal within the cancellation
    // tolerance). Leaving them in would square their multiplicity in the
    // expanded sum, and repeated roots are too ill-conditioned for the
    // re-rooting step to recover the intended exact cancellations.
    std::vector<Complex> common, a_only;
    std::vector<Complex> b_rem = b.poles();
    for (const auto& pa : a.poles()) {
        std::size_t best = b_rem.size();
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < b_rem.size(); ++j) {
            double d = std::abs(pa - b_rem[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < b_rem.size() && best_d <= kCancelTol * std::max(1.0, std::abs(pa))) {
            common.push_back(0.5 * (pa + b_rem[best]));
            b_rem.erase(b_rem.begin() + best);
        } else {
            a_only.push_back(pa);
        }
    }

    std::vector<double> na = poly_from_roots(a.gain(), a.zeros());
    std::vector<double> nb = poly_from_roots(b.gain(), b.zeros());
    std::vector<double> da = poly_from_roots(1.0, a_only);
    std::vector<double> db = poly_from_roots(1.0, b_rem);

    auto conv = [](const std::vector<double>& u, const std::vector<double>& v) {
        std::vector<double> w(u.size() + v.size() - 1, 0.0);
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) w[i + j] += u[i] * v[j];
        return w;
    };
    std::vector<double> lhs = conv(na, db);
    std::vector<double> rhs = conv(nb, da);
    std::size_t n = std::max(lhs.size(), rhs.size());
    std::vector<double> num(n, 0.0);
    double mag = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        num[n - lhs.size() + i] += lhs[i];
        mag = std::max(mag, std::abs(lhs[i]));
    }
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        num[n - rhs.size() + i] += rhs[i];
        mag = std::max(mag, std::abs(rhs[i]));
    }

    double peak = 0.0;
    for (double c : num) peak = std::max(peak, std::abs(c));
    if (peak <= 1e-12 * std::max(1.0, mag)) return RationalTF();  // exact cancellation

    // strip leading coefficients that vanished in the subtraction
    std::size_t lead = 0;
    while (lead + 1 < num.size() && std::abs(num[lead]) <= 1e-12 * peak) ++lead;
    num.erase(num.begin(), num.begin() + lead);

    std::vector<Complex> zeros = poly_roots(num);
    std::vector<Complex> poles = std::move(common);
    poles.insert(poles.end(), a_only.begin(), a_only.end());
    poles.insert(poles.end(), b_rem.begin(), b_rem.end());
    return RationalTF(num.front(), std::move(zeros), std::move(poles));
}

RationalTF divide(const RationalTF& a, const RationalTF& b) {
    if (b.is_zero()) throw std::invalid_argument("divide: division by zero transfer function");
    if (a.is_zero()) return RationalTF();
    std::vector<Complex> z = a.zeros();
    z.insert(z.end(), b.poles().begin(), b.poles().end());
    std::vector<Complex> p = a.poles();
    p.insert(p.end(), b.zeros().begin(), b.zeros().end());
    return RationalTF(a.gain() / b.gain(), std::move(z), std::move(p));
}

RationalTF scale(const RationalTF& a, double k) {
    if (k == 0.0 || a.is_zero()) return RationalTF();
    return RationalTF(k * a.gain(), a.zeros(), a.poles());
}

double dc_gain(const RationalTF& h) {
    if (h.is_zero()) return 0.0;
    for (const auto& p : h.poles())
        if (std::abs(p) <= kMarginalTol) throw std::domain_error("dc_gain: pole at the origin");
    Complex v = h.eval(Complex(0.0, 0.0));
    return v.real();
}

Classification classify(const RationalTF& h) {
    Classification c;
    for (const auto& z : h.zeros()) {
        if (std::abs(z.real()) <= kMarginalTol)
            c.marginal_zeros.push_back(z);
        else if (z.real() > 0.0)
            c.nmp_zeros.push_back(z);
    }
    for (const auto& p : h.poles()) {
        if (std::abs(p.real()) <= kMarginalTol)
            c.marginal_poles.push_back(p);
        else if (p.real() > 0.0)
            c.unstable_poles.push_back(p);
    }
    c.stable = c.unstable_poles.empty() && c.marginal_poles.empty();
    return c;
}

std::vector<Complex> freq_response(const RationalTF& h, std::span<const double> w) {
    std::vector<Complex> out;
    out.reserve(w.size());
    for (double wi : w) out.push_back(h.eval(Complex(0.0, wi)));
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (lo <= 0.0 || hi <= lo || n < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, n >= 2");
    std::vector<double> w(n);
    double llo = std::log10(lo), lhi = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(10.0, llo + (lhi - llo) * double(i) / double(n - 1));
    return w;
}

std::vector<double> poly_from_roots(double gain, std::span<const Complex> roots) {
    // multiply conjugate pairs first so every intermediate stays real
    std::vector<Complex> sorted(roots.begin(), roots.end());
    std::sort(sorted.begin(), sorted.end(), root_less);
    std::vector<double> coeffs{gain};
    std::vector<bool> used(sorted.size(), false);
    auto mul = [&coeffs](std::span<const double> f) {
        std::vector<double> next(coeffs.size() + f.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            for (std::size_t j = 0; j < f.size(); ++j) next[i + j] += coeffs[i] * f[j];
        coeffs = std::move(next);
    };
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (sorted[i].imag() == 0.0) {
            double f[2] = {1.0, -sorted[i].real()};
            mul(f);
        } else {
            std::size_t j = i + 1;
            while (j < sorted.size() && (used[j] || sorted[j].imag() == 0.0 ||
                                         std::abs(sorted[j] - std::conj(sorted[i])) >
                                             1e-9 * std::max(1.0, std::abs(sorted[i]))))
                ++j;
            if (j == sorted.size()) throw std::invalid_argument("poly_from_roots: unpaired complex root");
            used[j] = true;
            double f[3] = {1.0, -2.0 * sorted[i].real(), std::norm(sorted[i])};
            mul(f);
        }
    }
    return coeffs;
}

std::vector<Complex> poly_roots(std::span<const double> coeffs) {
    std::size_t lead = 0;
    double peak = 0.0;
    for (double c : coeffs) peak = std::max(peak, std::abs(c));
    if (peak == 0.0) throw std::invalid_argument("poly_roots: zero polynomial");
    while (lead < coeffs.size() && std::abs(coeffs[lead]) <= 1e-14 * peak) ++lead;
    std::size_t n = coeffs.size() - lead - 1;
    if (n == 0 || lead >= coeffs.size()) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) companion(0, i) = -coeffs[lead + 1 + i] / coeffs[lead];
    for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<Complex> roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = solver.eigenvalues()(i);
    std::sort(roots.begin(), roots.end(), root_less);
    return roots;
}

void StateSpace::deriv(const double* x, double u, double* dx) const {
    for (int i = 0; i < n; ++i) {
        double acc = b[i] * u;
        const double* row = a.data() + std::size_t(i) * n;
        for (int j = 0; j < n; ++j) acc += row[j] * x[j];
        dx[i] = acc;
    }
}

double StateSpace::output(const double* x, double u) const {
    double y = d * u;
    for (int i = 0; i < n; ++i) y += c[i] * x[i];
    return y;
}

Complex StateSpace::eval(Complex s) const {
    if (n == 0) return Complex(d, 0.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = (i == j ? s : Complex(0.0, 0.0)) - a[std::size_t(i) * n + j];
    Eigen::VectorXcd bv(n);
    for (int i = 0; i < n; ++i) bv(i) = b[i];
    Eigen::VectorXcd x = m.partialPivLu().solve(bv);
    Complex y(d, 0.0);
    for (int i = 0; i < n; ++i) y += c[i] * x(i);
    return y;
}

StateSpace realize(const RationalTF& h) {
    StateSpace ss;
    ss.n = static_cast<int>(h.order());
    if (h.is_zero()) return ss;

    std::vector<double> num_desc = poly_from_roots(h.gain(), h.zeros());
    std::vector<double> den_desc = poly_from_roots(1.0, h.poles());
    const int n = ss.n;

    // ascending, padded to length n+1
    std::vector<double> num(n + 1, 0.0), den(n + 1, 0.0);
    for (std::size_t i = 0; i < num_desc.size(); ++i) num[num_desc.size() - 1 - i] = num_desc[i];
    for (std::size_t i = 0; i < den_desc.size(); ++i) den[den_desc.size() - 1 - i] = den_desc[i];

    ss.d = num[n];  // nonzero only when the function is biproper
    ss.a.assign(std::size_t(n) * n, 0.0);
    ss.b.assign(n, 0.0);
    ss.c.assign(n, 0.0);
    if (n == 0) return ss;
    for (int i = 0; i + 1 < n; ++i) ss.a[std::size_t(i) * n + i + 1] = 1.0;
    for (int j = 0; j < n; ++j) ss.a[std::size_t(n - 1) * n + j] = -den[j];
    ss.b[n - 1] = 1.0;
    for (int j = 0; j < n; ++j) ss.c[j] = num[j] - ss.d * den[j];
    return ss;
}

TimeSeries step_response(const RationalTF& h, double t_end, double dt) {
    if (dt <= 0.0 || t_end <= 0.0) throw std::invalid_argument("step_response: need dt > 0 and t_end > 0");
    StateSpace ss = realize(h);
    const int n = ss.n;
    std::vector<double> x(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);

    TimeSeries ts;
    auto& y = ts[ts.add_channel("y")];
    std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
    ts.time.reserve(steps + 1);
    y.reserve(steps + 1);
    ts.time.push_back(0.0);
    y.push_back(ss.output(x.data(), 1.0));
    for (std::size_t k = 0; k < steps; ++k) {
        ss.deriv(x.data(), 1.0, k1.data());
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        ss.deriv(tmp.data(), 1.0, k2.data());
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        ss.deriv(tmp.data(), 1.0, k3.data());
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
        ss.deriv(tmp.data(), 1.0, k4.data());
        for (int i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        double out = ss.output(x.data(), 1.0);
        if (!std::isfinite(out) || std::abs(out) > 1e15)
            throw std::runtime_error("step_response: diverged at t = " + std::to_string((k + 1) * dt));
        ts.time.push_back(double(k + 1) * dt);
        y.push_back(out);
    }
    return ts;
}

std::vector<double> numerator(const RationalTF& h) {
    if (h.is_zero()) return {0.0};
    return poly_from_roots(h.gain(), h.zeros());
}

std::vector<double> denominator(const RationalTF& h) {
    if (h.is_zero()) return {1.0};
    return poly_from_roots(1.0, h.poles());
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string factored(const std::vector<Complex>& roots) {
    if (roots.empty()) return "1";
    std::string out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (roots[i].imag() == 0.0) {
            double r = roots[i].real();
            if (r == 0.0)
                out += "s";
            else
                out += "(s " + std::string(r < 0 ? "+ " : "- ") + fmt(std::abs(r)) + ")";
        } else {
            for (std::size_t j = i + 1; j < roots.size(); ++j) {
                if (!used[j] && roots[j] == std::conj(roots[i])) {
                    used[j] = true;
                    break;
                }
            }
            double b = -2.0 * roots[i].real(), c = std::norm(roots[i]);
            out += "(s^2 " + std::string(b < 0 ? "- " : "+ ") + fmt(std::abs(b)) + "s " +
                   std::string(c < 0 ? "- " : "+ ") + fmt(std::abs(c)) + ")";
        }
    }
    return out;
}

std::string poly_text(const std::vector<double>& c) {
    std::ostringstream os;
    int deg = static_cast<int>(c.size()) - 1;
    bool first = true;
    for (std::size_t i = 0; i < c.size(); ++i, --deg) {
        if (c[i] == 0.0 && c.size() > 1) continue;
        double v = c[i];
        if (first) {
            if (v < 0) os << "-";
            first = false;
        } else {
            os << (v < 0 ? " - " : " + ");
        }
        double av = std::abs(v);
        if (deg == 0 || av != 1.0) os << fmt(av);
        if (deg >= 1) os << (deg == 1 ? "s" : "s^" + std::to_string(deg));
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace

std::string to_string(const RationalTF& h) {
    if (h.is_zero()) return "0";
    std::ostringstream os;
    os << fmt(h.gain()) << " " << factored(h.zeros()) << " / " << factored(h.poles());
    os << "  =  (" << poly_text(numerator(h)) << ") / (" << poly_text(denominator(h)) << ")";
    return os.str();
}

}  // namespace ffr::lti
