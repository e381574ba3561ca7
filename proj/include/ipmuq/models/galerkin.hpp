/// @file galerkin.hpp
/// @brief Closed-form stochastic-Galerkin flux for Burgers' equation in one random dimension.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace ipmuq {

/// <phi_a phi_b phi_c> for orthonormal Legendre polynomials (density 1/2),
/// from the squared Wigner 3j symbol (a b c; 0 0 0).
inline double legendre_triple_product(int a, int b, int c) {
    const int twice_s = a + b + c;
    if (twice_s % 2 != 0) return 0.0;
    if (a > b + c || b > a + c || c > a + b) return 0.0;
    const int s = twice_s / 2;
    auto lfact = [](int n) { return std::lgamma(n + 1.0); };
    const double log_3j_sq = lfact(2 * s - 2 * a) + lfact(2 * s - 2 * b) + lfact(2 * s - 2 * c) - lfact(2 * s + 1) +
                             2.0 * (lfact(s) - lfact(s - a) - lfact(s - b) - lfact(s - c));
    return std::exp(log_3j_sq) * std::sqrt((2.0 * a + 1.0) * (2.0 * b + 1.0) * (2.0 * c + 1.0));
}

/// Matrices C_i = <phi phi^T phi_i>, i = 0..N-1.
class GalerkinTensor {
public:
    explicit GalerkinTensor(int n) {
        c_.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            Eigen::MatrixXd ci(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) ci(a, b) = legendre_triple_product(a, b, i);
            c_.push_back(std::move(ci));
        }
    }

    int size() const { return static_cast<int>(c_.size()); }
    const Eigen::MatrixXd& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

private:
    std::vector<Eigen::MatrixXd> c_;
};

/// G_i = (u_l^T C_i u_l + u_r^T C_i u_r) / 4 - dx/(2 dt) (u_r - u_l)_i.
inline Eigen::VectorXd burgers_sg_analytic_flux(const Eigen::VectorXd& ul, const Eigen::VectorXd& ur, const GalerkinTensor& tensors,
                                                double dx_over_dt) {
    Eigen::VectorXd g(tensors.size());
    for (int i = 0; i < tensors.size(); ++i)
        g(i) = 0.25 * (ul.dot(tensors[i] * ul) + ur.dot(tensors[i] * ur)) - 0.5 * dx_over_dt * (ur(i) - ul(i));
    return g;
}

}  // namespace ipmuq
