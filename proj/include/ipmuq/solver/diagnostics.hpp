/// @file diagnostics.hpp
/// @brief Finite-difference Jacobian of the One-Shot map at a fixed point.
///
/// The map is x = (lambda, u) -> (d(lambda, u), c(d(lambda, u))) over all
/// cells, with the time step frozen. At a fixed point the lambda columns of
/// the Jacobian vanish, so its spectrum is that of du c plus zeros.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "ipmuq/errors.hpp"
#include "ipmuq/solver/engine.hpp"

namespace ipmuq {

struct OneShotJacobianReport {
    Eigen::MatrixXd jacobian;
    double spectral_radius = 0.0;
    double dual_dual_norm = 0.0;    // ||d_lambda d||_F
    double moment_dual_norm = 0.0;  // ||d_lambda c||_F
    double fixed_point_defect = 0.0;
};

/// Spectral radius from power iteration on J^2 (geometric mean growth).
inline double power_iteration_radius(const Eigen::MatrixXd& j, int iterations = 4000) {
    const Eigen::Index n = j.rows();
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.01 * static_cast<double>((i * 7919) % 101);
    v.normalize();
    double log_sum = 0.0;
    int counted = 0;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd w = j * (j * v);
        const double growth = w.norm();
        if (growth == 0.0) return 0.0;
        if (it >= iterations / 2) {
            log_sum += std::log(growth);
            ++counted;
        }
        v = w / growth;
    }
    return std::exp(log_sum / (2.0 * counted));
}

template <ConservationModel Model, EntropyClosure Closure>
OneShotJacobianReport oneshot_jacobian_spectral_radius(const MomentSolver<Model, Closure>& converged, double dt, double fd_step = 1e-6,
                                                       double max_defect = 1e-8) {
    using Moments = typename MomentSolver<Model, Closure>::Moments;
    constexpr int m = Model::m;
    MomentSolver<Model, Closure> solver = converged;
    solver.config().dual.damping = false;
    const auto& levels = solver.levels();
    for (int l : levels)
        if (l != levels.front()) throw PreconditionError("One-Shot Jacobian needs a uniform refinement level");
    const int nc = solver.mesh().cells();
    const Eigen::Index block = static_cast<Eigen::Index>(solver.ladder().moments(levels.front())) * m;
    const Eigen::Index half = block * nc;

    auto unpack = [&](const Eigen::VectorXd& x, std::vector<Moments>& lambda, std::vector<Moments>& u) {
        lambda.resize(static_cast<std::size_t>(nc));
        u.resize(static_cast<std::size_t>(nc));
        const Eigen::Index rows = block / m;
        for (int j = 0; j < nc; ++j) {
            lambda[static_cast<std::size_t>(j)] = Eigen::Map<const Moments>(x.data() + j * block, rows, m);
            u[static_cast<std::size_t>(j)] = Eigen::Map<const Moments>(x.data() + half + j * block, rows, m);
        }
    };
    auto map = [&](const Eigen::VectorXd& x) {
        std::vector<Moments> lambda, u;
        unpack(x, lambda, u);
        const auto lambda_next = solver.dual_phase(lambda, u, levels, DualMode::one_shot);
        const auto u_next = solver.moment_phase(lambda_next, levels, levels, dt, std::numeric_limits<double>::infinity());
        Eigen::VectorXd y(2 * half);
        for (int j = 0; j < nc; ++j) {
            y.segment(j * block, block) = Eigen::Map<const Eigen::VectorXd>(lambda_next[static_cast<std::size_t>(j)].data(), block);
            y.segment(half + j * block, block) = Eigen::Map<const Eigen::VectorXd>(u_next[static_cast<std::size_t>(j)].data(), block);
        }
        return y;
    };

    Eigen::VectorXd x(2 * half);
    for (int j = 0; j < nc; ++j) {
        x.segment(j * block, block) = Eigen::Map<const Eigen::VectorXd>(solver.duals()[static_cast<std::size_t>(j)].data(), block);
        x.segment(half + j * block, block) = Eigen::Map<const Eigen::VectorXd>(solver.moments()[static_cast<std::size_t>(j)].data(), block);
    }
    OneShotJacobianReport report;
    report.fixed_point_defect = (map(x) - x).cwiseAbs().maxCoeff();
    if (!(report.fixed_point_defect <= max_defect)) throw PreconditionError("state is not a One-Shot fixed point");

    report.jacobian.resize(2 * half, 2 * half);
    for (Eigen::Index i = 0; i < 2 * half; ++i) {
        const double h = fd_step * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd plus = x, minus = x;
        plus(i) += h;
        minus(i) -= h;
        report.jacobian.col(i) = (map(plus) - map(minus)) / (2.0 * h);
    }
    report.dual_dual_norm = report.jacobian.topLeftCorner(half, half).norm();
    report.moment_dual_norm = report.jacobian.bottomLeftCorner(half, half).norm();
    report.spectral_radius = power_iteration_radius(report.jacobian);
    return report;
}

}  // namespace ipmuq
