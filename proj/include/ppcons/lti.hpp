#pragma once

// SISO transfer functions and their controllable-canonical state-space
// realization.

#include "ppcons/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace ppcons {

/// Polynomial coefficients in descending powers of s.
using Polynomial = std::vector<double>;

[[nodiscard]] inline std::complex<double> polyval(const Polynomial& p, std::complex<double> s) {
    std::complex<double> acc{0.0, 0.0};
    for (double c : p) acc = acc * s + c;
    return acc;
}

[[nodiscard]] inline Polynomial trim_leading_zeros(Polynomial p) {
    std::size_t first = 0;
    while (first < p.size() && p[first] == 0.0) ++first;
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(first));
    return p;
}

/// Roots of a polynomial; exact zero roots are counted from trailing zero
/// coefficients, the rest come from the companion matrix eigenvalues.
[[nodiscard]] inline std::vector<std::complex<double>> poly_roots(const Polynomial& poly) {
    Polynomial p = trim_leading_zeros(poly);
    std::vector<std::complex<double>> roots;
    while (p.size() > 1 && p.back() == 0.0) {
        roots.emplace_back(0.0, 0.0);
        p.pop_back();
    }
    const auto n = static_cast<Eigen::Index>(p.size()) - 1;
    if (n <= 0) return roots;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) companion(0, i) = -p[static_cast<std::size_t>(i + 1)] / p[0];
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()(i));
    return roots;
}

[[nodiscard]] inline Polynomial poly_from_roots(const std::vector<std::complex<double>>& roots, double leading) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= r * c[i];
        }
        c = std::move(next);
    }
    Polynomial out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = leading * c[i].real();
    return out;
}

[[nodiscard]] inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    if (a.empty() || b.empty()) return {};
    Polynomial out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

struct TransferFunction {
    Polynomial num;
    Polynomial den;

    friend bool operator==(const TransferFunction&, const TransferFunction&) = default;
};

/// Proper SISO LTI system: monic denominator after exact common-root
/// cancellation, plus its controllable canonical realization.
class LtiSystem {
public:
    static constexpr double cancellation_tolerance = 1e-9;

    [[nodiscard]] const Polynomial& num() const noexcept { return num_; }
    [[nodiscard]] const Polynomial& den() const noexcept { return den_; }
    [[nodiscard]] const Eigen::MatrixXd& A() const noexcept { return a_; }
    [[nodiscard]] const Eigen::VectorXd& B() const noexcept { return b_; }
    [[nodiscard]] const Eigen::RowVectorXd& C() const noexcept { return c_; }
    [[nodiscard]] double D() const noexcept { return d_; }
    [[nodiscard]] Eigen::Index order() const noexcept { return a_.rows(); }

    [[nodiscard]] std::complex<double> evaluate(std::complex<double> s) const {
        return polyval(num_, s) / polyval(den_, s);
    }

    /// H(j omega) from the polynomial form.
    [[nodiscard]] std::complex<double> response(double omega) const { return evaluate({0.0, omega}); }

    /// C (sI - A)^{-1} B + D from the realization.
    [[nodiscard]] std::complex<double> state_space_response(std::complex<double> s) const {
        if (order() == 0) return d_;
        const Eigen::MatrixXcd resolvent =
            s * Eigen::MatrixXcd::Identity(order(), order()) - a_.cast<std::complex<double>>();
        const Eigen::VectorXcd x = resolvent.partialPivLu().solve(b_.cast<std::complex<double>>());
        return (c_.cast<std::complex<double>>() * x)(0) + d_;
    }

    [[nodiscard]] std::vector<std::complex<double>> poles() const { return poly_roots(den_); }

    friend LtiSystem realize(const Polynomial& num, const Polynomial& den);

private:
    Polynomial num_;
    Polynomial den_;
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::RowVectorXd c_;
    double d_ = 0.0;
};

inline LtiSystem realize(const Polynomial& num_in, const Polynomial& den_in) {
    Polynomial den = trim_leading_zeros(den_in);
    Polynomial num = trim_leading_zeros(num_in);
    if (den.empty()) throw ValidationError("transfer function denominator is zero");
    if (num.empty()) num = {0.0};
    if (num.size() > den.size()) {
        throw UnsupportedSystem("improper transfer function: numerator degree " + std::to_string(num.size() - 1) +
                                " exceeds denominator degree " + std::to_string(den.size() - 1));
    }

    // Cancel common roots that agree to within the tolerance.
    if (num.size() > 1 && den.size() > 1) {
        auto num_roots = poly_roots(num);
        auto den_roots = poly_roots(den);
        std::vector<std::complex<double>> kept_den;
        bool cancelled = false;
        for (const auto& r : den_roots) {
            auto match = num_roots.end();
            for (auto it = num_roots.begin(); it != num_roots.end(); ++it) {
                if (std::abs(*it - r) <= LtiSystem::cancellation_tolerance * std::max(1.0, std::abs(r))) {
                    match = it;
                    break;
                }
            }
            if (match != num_roots.end()) {
                num_roots.erase(match);
                cancelled = true;
            } else {
                kept_den.push_back(r);
            }
        }
        if (cancelled) {
            num = poly_from_roots(num_roots, num.front());
            den = poly_from_roots(kept_den, den.front());
        }
    }

    const double lead = den.front();
    for (double& c : den) c /= lead;
    for (double& c : num) c /= lead;

    const std::size_t n = den.size() - 1;
    Polynomial padded(n + 1 - num.size(), 0.0);
    padded.insert(padded.end(), num.begin(), num.end());

    LtiSystem sys;
    sys.num_ = num;
    sys.den_ = den;
    sys.d_ = padded[0];
    const auto dim = static_cast<Eigen::Index>(n);
    sys.a_ = Eigen::MatrixXd::Zero(dim, dim);
    sys.b_ = Eigen::VectorXd::Zero(dim);
    sys.c_ = Eigen::RowVectorXd::Zero(dim);
    if (n > 0) {
        // x' = A x + B u with A in companion form, last row -a_n ... -a_1.
        for (Eigen::Index i = 0; i + 1 < dim; ++i) sys.a_(i, i + 1) = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            sys.a_(dim - 1, static_cast<Eigen::Index>(i)) = -den[n - i];
            sys.c_(static_cast<Eigen::Index>(i)) = padded[n - i] - den[n - i] * sys.d_;
        }
        sys.b_(dim - 1) = 1.0;
    }
    return sys;
}

[[nodiscard]] inline LtiSystem realize(const TransferFunction& tf) { return realize(tf.num, tf.den); }

}  // namespace ppcons
