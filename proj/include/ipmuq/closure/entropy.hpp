/// @file entropy.hpp
/// @brief Entropy closures: quadratic (stochastic-Galerkin) and Euler gas dynamics.
///
/// A closure provides the entropy s, its gradient, the ansatz map
/// u_s = (grad s)^-1 from dual to conserved variables, and the Jacobian of u_s.
/// Closures are stateless apart from model constants and safe to share.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <string>

#include "ipmuq/errors.hpp"

namespace ipmuq {

template <int M>
using StateVector = Eigen::Matrix<double, M, 1>;
template <int M>
using StateMatrix = Eigen::Matrix<double, M, M>;

template <class C>
concept EntropyClosure = requires(const C c, const StateVector<C::m>& v, StateVector<C::m>& out, StateMatrix<C::m>& jac) {
    { c.entropy(v) } -> std::convertible_to<double>;
    { c.grad_entropy(v) } -> std::convertible_to<StateVector<C::m>>;
    { c.admissible_dual(v) } -> std::convertible_to<bool>;
    { c.u_s(v) } -> std::convertible_to<StateVector<C::m>>;
    { c.jac_u_s(v) } -> std::convertible_to<StateMatrix<C::m>>;
    { c.eval(v, out, jac) } -> std::convertible_to<bool>;
    { C::quadratic } -> std::convertible_to<bool>;
};

/// s(u) = u^T u / 2. u_s is the identity; IPM with this closure is stochastic-Galerkin.
template <int M>
struct QuadraticClosure {
    static constexpr int m = M;
    static constexpr bool quadratic = true;
    using State = StateVector<M>;
    using Jacobian = StateMatrix<M>;

    std::string name() const { return "quadratic"; }
    double entropy(const State& u) const { return 0.5 * u.squaredNorm(); }
    State grad_entropy(const State& u) const { return u; }
    bool admissible_state(const State&) const { return true; }
    bool admissible_dual(const State&) const { return true; }
    State u_s(const State& dual) const { return dual; }
    Jacobian jac_u_s(const State&) const { return Jacobian::Identity(); }

    /// Fused u_s and Jacobian; returns false for an inadmissible dual.
    bool eval(const State& dual, State& u, Jacobian& jac) const {
        u = dual;
        jac.setIdentity();
        return true;
    }
    bool eval(const State& dual, State& u) const {
        u = dual;
        return true;
    }
};

/// Euler entropy s(u) = -rho ln(rho^-gamma (E - |m|^2/(2 rho))) for D space
/// dimensions; state layout (rho, m_1..m_D, E), m = D + 2.
///
/// The inverse gradient is closed form: with q = sum_i Lambda_i^2 over the
/// momentum duals and Lambda_E < 0 the energy dual,
///   rho = alpha = exp((q - 2 Lambda_0 Lambda_E + 2 Lambda_E gamma) / (2 Lambda_E (1 - gamma))) (-Lambda_E)^(1/(1-gamma)),
///   m_i = -Lambda_i alpha / Lambda_E,
///   E   = -alpha (2 Lambda_E - q) / (2 Lambda_E^2).
template <int D>
struct EulerClosure {
    static constexpr int dim = D;
    static constexpr int m = D + 2;
    static constexpr bool quadratic = false;
    using State = StateVector<m>;
    using Jacobian = StateMatrix<m>;

    double gamma = 1.4;

    explicit EulerClosure(double gamma_ = 1.4) : gamma(gamma_) {
        if (!(gamma > 1.0)) throw DomainError("Euler closure requires gamma > 1");
    }

    std::string name() const { return "euler"; }

    static double kinetic(const State& u) {
        double q = 0.0;
        for (int i = 1; i <= D; ++i) q += u(i) * u(i);
        return 0.5 * q / u(0);
    }
    /// rho * internal energy, E - |m|^2 / (2 rho).
    static double internal(const State& u) { return u(m - 1) - kinetic(u); }

    bool admissible_state(const State& u) const { return u(0) > 0.0 && internal(u) > 0.0 && u.allFinite(); }

    double entropy(const State& u) const {
        if (!admissible_state(u)) throw DomainError("Euler entropy evaluated at an inadmissible state");
        return -u(0) * std::log(std::pow(u(0), -gamma) * internal(u));
    }

    State grad_entropy(const State& u) const {
        if (!admissible_state(u)) throw DomainError("Euler entropy gradient evaluated at an inadmissible state");
        const double rho = u(0);
        const double eps = internal(u);
        double q = 0.0;
        for (int i = 1; i <= D; ++i) q += u(i) * u(i);
        State g;
        g(0) = -std::log(std::pow(rho, -gamma) * eps) + gamma - q / (2.0 * rho * eps);
        for (int i = 1; i <= D; ++i) g(i) = u(i) / eps;
        g(m - 1) = -rho / eps;
        return g;
    }

    bool admissible_dual(const State& dual) const { return dual(m - 1) < 0.0 && dual.allFinite(); }

    bool eval(const State& dual, State& u) const {
        const double le = dual(m - 1);
        if (!(le < 0.0)) return false;
        double q = 0.0;
        for (int i = 1; i <= D; ++i) q += dual(i) * dual(i);
        const double inv = 1.0 / (1.0 - gamma);
        const double alpha = std::exp((q - 2.0 * dual(0) * le + 2.0 * le * gamma) / (2.0 * le) * inv + std::log(-le) * inv);
        u(0) = alpha;
        for (int i = 1; i <= D; ++i) u(i) = -dual(i) * alpha / le;
        u(m - 1) = -alpha * (2.0 * le - q) / (2.0 * le * le);
        return alpha > 0.0 && u.allFinite();
    }

    bool eval(const State& dual, State& u, Jacobian& jac) const {
        if (!eval(dual, u)) return false;
        const double le = dual(m - 1);
        const double alpha = u(0);
        double q = 0.0;
        for (int i = 1; i <= D; ++i) q += dual(i) * dual(i);
        const double inv = 1.0 / (1.0 - gamma);
        // grad of ln(alpha)
        State g;
        g(0) = -inv;
        for (int i = 1; i <= D; ++i) g(i) = dual(i) / le * inv;
        g(m - 1) = (-q / (2.0 * le * le) + 1.0 / le) * inv;

        jac.row(0) = alpha * g.transpose();
        for (int i = 1; i <= D; ++i) {
            jac.row(i) = (-dual(i) / le * alpha) * g.transpose();
            jac(i, i) -= alpha / le;
            jac(i, m - 1) += alpha * dual(i) / (le * le);
        }
        const double e_factor = q / (2.0 * le * le) - 1.0 / le;
        jac.row(m - 1) = (e_factor * alpha) * g.transpose();
        for (int i = 1; i <= D; ++i) jac(m - 1, i) += alpha * dual(i) / (le * le);
        jac(m - 1, m - 1) += alpha * (-q / (le * le * le) + 1.0 / (le * le));
        return true;
    }

    State u_s(const State& dual) const {
        State u;
        if (!eval(dual, u)) throw InadmissibleDual("Euler dual requires Lambda_E < 0");
        return u;
    }

    Jacobian jac_u_s(const State& dual) const {
        State u;
        Jacobian jac;
        if (!eval(dual, u, jac)) throw InadmissibleDual("Euler dual requires Lambda_E < 0");
        return jac;
    }
};

}  // namespace ipmuq
