/// @file dual_solver.hpp
/// @brief Dual problem of the entropy closure: gradient, Hessian and Newton iteration.
///
/// For a moment matrix u_hat (N x m) the dual variables lambda (N x m) solve
///   grad L(lambda; u_hat) = <u_s(lambda^T phi) phi^T>_Q^T - u_hat = 0,
/// with Hessian H = <grad u_s(lambda^T phi) (x) phi phi^T>_Q^T. Matrices of
/// size N x m are vectorized column-major: entry (i, l) sits at i + N l, so H
/// consists of m x m blocks of size N x N.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ipmuq/closure/entropy.hpp"
#include "ipmuq/errors.hpp"
#include "ipmuq/random_space/basis.hpp"
#include "ipmuq/random_space/quadrature.hpp"

namespace ipmuq {

template <int M>
using MomentMatrix = Eigen::Matrix<double, Eigen::Dynamic, M>;

/// Norm inside the dual stopping criterion.
enum class StoppingNorm {
    column_sum,  ///< sum over conserved variables of the Euclidean norm of each N-column
    frobenius,
};

struct DualOptions {
    double tau = 1e-7;
    int max_iterations = 1000;
    int max_halvings = 30;
    double armijo = 1e-4;
    /// Damped steps are only tried when the full step does not reduce ||grad L||.
    bool damping = true;
    /// Reciprocal condition estimate below which the Hessian counts as singular.
    double min_rcond = 1e-15;
    StoppingNorm norm = StoppingNorm::column_sum;
    /// Gradients below this Frobenius norm are at round-off level; a full
    /// admissible step is accepted there without a decrease test.
    double stagnation = 1e-13;
    bool record_history = false;
};

struct DualSolveReport {
    int iterations = 0;
    double final_gradient_norm = 0.0;
    bool converged = false;
    std::vector<double> gradient_history;  // Frobenius norms, filled when requested
};

template <int M>
double stopping_quantity(const MomentMatrix<M>& gradient, StoppingNorm norm) {
    if (norm == StoppingNorm::frobenius) return gradient.norm();
    double sum = 0.0;
    for (int l = 0; l < gradient.cols(); ++l) sum += gradient.col(l).norm();
    return sum;
}

/// Dual problem on one (basis, quadrature rule) pair. Precomputes basis values
/// at the rule's points; immutable afterwards and shareable across threads.
template <EntropyClosure Closure>
class DualSystem {
public:
    static constexpr int m = Closure::m;
    using State = StateVector<m>;
    using Jacobian = StateMatrix<m>;
    using Moments = MomentMatrix<m>;

    DualSystem(Closure closure, const BasisSet& basis, const QuadratureRule& rule, int degree = -1)
        : closure_(std::move(closure)), rule_name_(rule.name()), weights_(rule.weighted_density()) {
        const Eigen::MatrixXd full = basis.eval_points(rule.points());
        const auto n = static_cast<Eigen::Index>(degree < 0 ? basis.size() : basis.size_for_degree(degree));
        phi_ = full.leftCols(n);
    }

    int size() const { return static_cast<int>(phi_.cols()); }
    int points() const { return static_cast<int>(phi_.rows()); }
    const Closure& closure() const { return closure_; }
    const std::string& rule_name() const { return rule_name_; }
    const Eigen::MatrixXd& basis_values() const { return phi_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    /// Lambda_k = lambda^T phi(xi_k) for every quadrature point, Q x m.
    Eigen::Matrix<double, Eigen::Dynamic, m> dual_at_points(const Moments& lambda) const { return phi_ * lambda; }

    /// True when lambda^T phi is admissible at every quadrature point.
    bool admissible(const Moments& lambda) const {
        const auto duals = dual_at_points(lambda);
        for (Eigen::Index k = 0; k < duals.rows(); ++k)
            if (!closure_.admissible_dual(duals.row(k).transpose())) return false;
        return true;
    }

    /// <u_s(lambda^T phi) phi^T>_Q^T, the moments of the reconstruction.
    Moments reconstruct_moments(const Moments& lambda) const {
        Eigen::Matrix<double, Eigen::Dynamic, m> values;
        if (!states_at_points(lambda, values)) throw InadmissibleDual("dual variables inadmissible at a quadrature point [rule: " + rule_name_ + "]");
        return phi_.transpose() * (weights_.asDiagonal() * values);
    }

    Moments gradient(const Moments& lambda, const Moments& moments) const { return reconstruct_moments(lambda) - moments; }

    /// Gradient; returns false (leaving `out` unspecified) if inadmissible.
    bool try_gradient(const Moments& lambda, const Moments& moments, Moments& out) const {
        Eigen::Matrix<double, Eigen::Dynamic, m> values;
        if (!states_at_points(lambda, values)) return false;
        out = phi_.transpose() * (weights_.asDiagonal() * values) - moments;
        return true;
    }

    Eigen::MatrixXd hessian(const Moments& lambda) const {
        const auto duals = dual_at_points(lambda);
        const Eigen::Index q = duals.rows();
        const Eigen::Index n = phi_.cols();
        std::vector<Jacobian> jacs(static_cast<std::size_t>(q));
        State u;
        for (Eigen::Index k = 0; k < q; ++k)
            if (!closure_.eval(duals.row(k).transpose(), u, jacs[static_cast<std::size_t>(k)]))
                throw InadmissibleDual("dual variables inadmissible at a quadrature point [rule: " + rule_name_ + "]");
        Eigen::MatrixXd h(n * m, n * m);
        Eigen::VectorXd coeff(q);
        Eigen::MatrixXd scaled(q, n);
        for (int l = 0; l < m; ++l)
            for (int lp = l; lp < m; ++lp) {
                for (Eigen::Index k = 0; k < q; ++k) coeff(k) = weights_(k) * jacs[static_cast<std::size_t>(k)](l, lp);
                scaled.noalias() = coeff.asDiagonal() * phi_;
                h.block(l * n, lp * n, n, n).noalias() = phi_.transpose() * scaled;
                if (lp != l) h.block(lp * n, l * n, n, n) = h.block(l * n, lp * n, n, n).transpose();
            }
        return h;
    }

    /// Newton direction H^-1 vec(gradient), reshaped to N x m.
    Moments newton_direction(const Moments& lambda, const Moments& grad, double min_rcond) const {
        const Eigen::MatrixXd h = hessian(lambda);
        Eigen::LLT<Eigen::MatrixXd> llt(h);
        if (llt.info() != Eigen::Success) throw IllConditionedHessian("dual Hessian is not positive definite", rule_name_);
        const double rcond = llt.rcond();
        if (!(rcond >= min_rcond)) {
            std::ostringstream msg;
            msg << "dual Hessian reciprocal condition " << rcond << " below " << min_rcond;
            throw IllConditionedHessian(msg.str(), rule_name_);
        }
        const Eigen::Map<const Eigen::VectorXd> g(grad.data(), grad.size());
        const Eigen::VectorXd step = llt.solve(g);
        return Eigen::Map<const Moments>(step.data(), grad.rows(), m);
    }

    /// One damped Newton step; `grad` is the gradient at lambda on entry and at
    /// the returned iterate on exit.
    Moments step(const Moments& lambda, const Moments& moments, Moments& grad, const DualOptions& options) const {
        const Moments direction = newton_direction(lambda, grad, options.min_rcond);
        const double merit = grad.squaredNorm();
        Moments trial_grad(grad.rows(), m);
        double t = 1.0;
        for (int halving = 0; halving <= options.max_halvings; ++halving, t *= 0.5) {
            Moments trial = lambda - t * direction;
            if (try_gradient(trial, moments, trial_grad)) {
                const double trial_merit = trial_grad.squaredNorm();
                const bool accept = (halving == 0 && (trial_merit < merit || std::sqrt(merit) < options.stagnation)) ||
                                    trial_merit <= merit * (1.0 - 2.0 * options.armijo * t) || !options.damping;
                if (accept) {
                    grad = trial_grad;
                    return trial;
                }
            } else if (!options.damping && halving == 0) {
                break;
            }
        }
        throw LineSearchFailure("dual Newton step found no admissible decrease [rule: " + rule_name_ + "]");
    }

    /// Newton iteration until the stopping quantity drops below tau.
    Moments solve(const Moments& moments, Moments lambda, const DualOptions& options, DualSolveReport& report) const {
        Moments grad(moments.rows(), m);
        if (!try_gradient(lambda, moments, grad))
            throw InadmissibleDual("initial dual variables inadmissible [rule: " + rule_name_ + "]");
        report = DualSolveReport{};
        if (options.record_history) report.gradient_history.push_back(grad.norm());
        double value = stopping_quantity<m>(grad, options.norm);
        while (!(value < options.tau)) {
            if (report.iterations >= options.max_iterations) {
                report.final_gradient_norm = value;
                throw NonConvergence("dual Newton iteration exceeded the iteration cap [rule: " + rule_name_ + "]",
                                     report.iterations, value);
            }
            lambda = step(lambda, moments, grad, options);
            ++report.iterations;
            value = stopping_quantity<m>(grad, options.norm);
            if (options.record_history) report.gradient_history.push_back(grad.norm());
        }
        report.final_gradient_norm = value;
        report.converged = true;
        return lambda;
    }

    /// Starting dual for moments without history: u_hat itself for the
    /// quadratic closure, otherwise grad s at the mean state in the constant mode.
    Moments initial_dual(const Moments& moments) const {
        if constexpr (Closure::quadratic) {
            return moments;
        } else {
            Moments lambda = Moments::Zero(moments.rows(), m);
            const State mean = moments.row(0).transpose();
            lambda.row(0) = closure_.grad_entropy(mean).transpose();
            return lambda;
        }
    }

private:
    bool states_at_points(const Moments& lambda, Eigen::Matrix<double, Eigen::Dynamic, m>& values) const {
        const auto duals = dual_at_points(lambda);
        values.resize(duals.rows(), m);
        State u;
        for (Eigen::Index k = 0; k < duals.rows(); ++k) {
            if (!closure_.eval(duals.row(k).transpose(), u)) return false;
            values.row(k) = u.transpose();
        }
        return true;
    }

    Closure closure_;
    std::string rule_name_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd phi_;  // Q x N
};

// Free-function forms of the dual operations.

template <EntropyClosure Closure>
MomentMatrix<Closure::m> lagrangian_gradient(const MomentMatrix<Closure::m>& lambda, const MomentMatrix<Closure::m>& moments,
                                             const Closure& closure, const BasisSet& basis, const QuadratureRule& rule) {
    return DualSystem<Closure>(closure, basis, rule).gradient(lambda, moments);
}

template <EntropyClosure Closure>
Eigen::MatrixXd hessian(const MomentMatrix<Closure::m>& lambda, const Closure& closure, const BasisSet& basis, const QuadratureRule& rule) {
    return DualSystem<Closure>(closure, basis, rule).hessian(lambda);
}

template <EntropyClosure Closure>
MomentMatrix<Closure::m> dual_step(const MomentMatrix<Closure::m>& lambda, const MomentMatrix<Closure::m>& moments, const Closure& closure,
                                   const BasisSet& basis, const QuadratureRule& rule, const DualOptions& options = {}) {
    const DualSystem<Closure> system(closure, basis, rule);
    MomentMatrix<Closure::m> grad = system.gradient(lambda, moments);
    return system.step(lambda, moments, grad, options);
}

template <EntropyClosure Closure>
std::pair<MomentMatrix<Closure::m>, DualSolveReport> solve_dual(const MomentMatrix<Closure::m>& moments, const Closure& closure,
                                                                const BasisSet& basis, const QuadratureRule& rule, const DualOptions& options,
                                                                const MomentMatrix<Closure::m>* lambda_init = nullptr) {
    const DualSystem<Closure> system(closure, basis, rule);
    DualSolveReport report;
    auto lambda = system.solve(moments, lambda_init ? *lambda_init : system.initial_dual(moments), options, report);
    return {std::move(lambda), std::move(report)};
}

}  // namespace ipmuq
