#include <gtest/gtest.h>

#include <random>

#include "ipmuq/closure/dual_solver.hpp"
#include "ipmuq/closure/entropy.hpp"

using namespace ipmuq;

namespace {

using Euler2 = EulerClosure<2>;
using State4 = Euler2::State;

State4 random_admissible_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rho(0.1, 5.0), vel(-3.0, 3.0), pressure(0.05, 10.0);
    const double r = rho(rng), vx = vel(rng), vy = vel(rng), p = pressure(rng);
    State4 u;
    u << r, r * vx, r * vy, p / 0.4 + 0.5 * r * (vx * vx + vy * vy);
    return u;
}

// Finite-difference Jacobian of grad s, used by the Newton oracle.
Eigen::Matrix4d fd_hessian_of_entropy(const Euler2& closure, const State4& u) {
    Eigen::Matrix4d h;
    for (int c = 0; c < 4; ++c) {
        const double step = 1e-6 * std::max(1e-3 * u.norm(), std::abs(u(c)));
        State4 plus = u, minus = u;
        plus(c) += step;
        minus(c) -= step;
        h.col(c) = (closure.grad_entropy(plus) - closure.grad_entropy(minus)) / (2.0 * step);
    }
    return h;
}

// Damped Newton minimizing the convex function s(u) - target^T u; its
// stationary point solves grad s(u) = target.
State4 newton_inverse_gradient(const Euler2& closure, const State4& target, State4 u) {
    auto objective = [&](const State4& v) { return closure.entropy(v) - target.dot(v); };
    for (int it = 0; it < 500; ++it) {
        const State4 residual = closure.grad_entropy(u) - target;
        if (residual.norm() < 1e-14 * (1.0 + target.norm())) break;
        const State4 delta = fd_hessian_of_entropy(closure, u).ldlt().solve(residual);
        const double f0 = objective(u);
        double t = 1.0;
        State4 trial = u - delta;
        while (t > 1e-12 && (!closure.admissible_state(trial) || objective(trial) > f0 - 1e-4 * t * residual.dot(delta))) {
            t *= 0.5;
            trial = u - t * delta;
        }
        if (t <= 1e-12) break;
        u = trial;
    }
    return u;
}

// Admissible manufactured duals at degree M in p = 1: the constant mode is grad s
// of a random state, higher modes are small perturbations.
MomentMatrix<4> manufactured_dual(const Euler2& closure, std::mt19937_64& rng, int n) {
    MomentMatrix<4> lambda = MomentMatrix<4>::Zero(n, 4);
    lambda.row(0) = closure.grad_entropy(random_admissible_state(rng)).transpose();
    std::uniform_real_distribution<double> perturb(-1.0, 1.0);
    for (int i = 1; i < n; ++i)
        for (int l = 0; l < 4; ++l) lambda(i, l) = 0.05 * perturb(rng) * std::abs(lambda(0, l)) / i;
    return lambda;
}

}  // namespace

TEST(QuadraticClosure, IdentityMaps) {
    QuadraticClosure<3> closure;
    const Eigen::Vector3d dual(0.3, -2.0, 7.0);
    EXPECT_EQ(closure.u_s(dual), dual);
    EXPECT_EQ(closure.jac_u_s(dual), Eigen::Matrix3d::Identity());
}

TEST(EulerClosure, RoundTripInversePair) {
    Euler2 closure(1.4);
    std::mt19937_64 rng(42);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
        const State4 u = random_admissible_state(rng);
        const State4 back = closure.u_s(closure.grad_entropy(u));
        worst = std::max(worst, (back - u).norm() / u.norm());
    }
    EXPECT_LT(worst, 1e-8);
    EulerClosure<1> closure1d(1.4);
    Eigen::Vector3d u1(0.8, -0.4, 2.5);
    EXPECT_LT((closure1d.u_s(closure1d.grad_entropy(u1)) - u1).norm(), 1e-12);
}

TEST(EulerClosure, AgreesWithNewtonRootFindingOracle) {
    Euler2 closure(1.4);
    std::mt19937_64 rng(7);
    for (int s = 0; s < 50; ++s) {
        const State4 target_state = random_admissible_state(rng);
        const State4 dual = closure.grad_entropy(target_state);
        const State4 oracle = newton_inverse_gradient(closure, dual, random_admissible_state(rng));
        EXPECT_LT((closure.u_s(dual) - oracle).norm() / oracle.norm(), 1e-8);
    }
}

TEST(EulerClosure, AnsatzIsAlwaysAdmissible) {
    Euler2 closure(1.4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> any(-5.0, 5.0), negative(-5.0, -0.05);
    int tested = 0;
    for (int s = 0; s < 10000; ++s) {
        State4 dual(any(rng), any(rng), any(rng), negative(rng));
        State4 u;
        // Skip duals whose states leave the normal double range.
        if (!closure.eval(dual, u) || u.cwiseAbs().maxCoeff() > 1e100 || u(0) < 1e-100) continue;
        ++tested;
        EXPECT_GT(u(0), 0.0);
        EXPECT_GT(0.4 * Euler2::internal(u), 0.0);
    }
    EXPECT_GT(tested, 5000);
    EXPECT_THROW(closure.u_s(State4(1.0, 0.0, 0.0, 0.0)), InadmissibleDual);
    EXPECT_THROW(closure.u_s(State4(1.0, 0.0, 0.0, 0.5)), InadmissibleDual);
}

TEST(EulerClosure, JacobianMatchesDifferencesAndIsSpd) {
    Euler2 closure(1.4);
    std::mt19937_64 rng(11);
    for (int s = 0; s < 200; ++s) {
        const State4 dual = closure.grad_entropy(random_admissible_state(rng));
        const Eigen::Matrix4d jac = closure.jac_u_s(dual);
        Eigen::Matrix4d fd;
        for (int c = 0; c < 4; ++c) {
            const double h = 1e-6 * std::max(1.0, std::abs(dual(c)));
            State4 plus = dual, minus = dual;
            plus(c) += h;
            minus(c) -= h;
            fd.col(c) = (closure.u_s(plus) - closure.u_s(minus)) / (2.0 * h);
        }
        EXPECT_LT((jac - fd).norm() / jac.norm(), 1e-6);
        EXPECT_LT((jac - jac.transpose()).norm() / jac.norm(), 1e-12);
        EXPECT_EQ(Eigen::LLT<Eigen::Matrix4d>(jac).info(), Eigen::Success);
    }
}

TEST(DualSolver, QuadraticGradientHessianAndStep) {
    QuadraticClosure<2> closure;
    const auto basis = build_total_degree_basis(4, 1);
    const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {5}, 1);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    MomentMatrix<2> moments(5, 2), lambda(5, 2);
    for (int i = 0; i < 5; ++i)
        for (int l = 0; l < 2; ++l) {
            moments(i, l) = normal(rng);
            lambda(i, l) = normal(rng);
        }
    EXPECT_LT(lagrangian_gradient(moments, moments, closure, basis, rule).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(lagrangian_gradient(MomentMatrix<2>::Zero(5, 2), MomentMatrix<2>::Zero(5, 2), closure, basis, rule).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::MatrixXd h = hessian(lambda, closure, basis, rule);
    EXPECT_LT((h - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((dual_step(lambda, moments, closure, basis, rule) - moments).cwiseAbs().maxCoeff(), 1e-13);

    // Central differences of L(lambda) = <|lambda^T phi|^2 / 2>_Q - sum lambda_i^T u_i.
    auto lagrangian = [&](const MomentMatrix<2>& lam) {
        const double dual_part = bracket(rule, [&](const Eigen::VectorXd& xi) {
            const Eigen::VectorXd phi = basis.eval(xi);
            return 0.5 * (lam.transpose() * phi).squaredNorm();
        });
        return dual_part - (lam.cwiseProduct(moments)).sum();
    };
    const MomentMatrix<2> grad = lagrangian_gradient(lambda, moments, closure, basis, rule);
    for (int i = 0; i < 5; ++i)
        for (int l = 0; l < 2; ++l) {
            MomentMatrix<2> plus = lambda, minus = lambda;
            plus(i, l) += 1e-6;
            minus(i, l) -= 1e-6;
            EXPECT_NEAR((lagrangian(plus) - lagrangian(minus)) / 2e-6, grad(i, l), 1e-6);
        }

    auto [solution, report] = solve_dual(moments, closure, basis, rule, DualOptions{}, &lambda);
    EXPECT_EQ(report.iterations, 1);
    EXPECT_TRUE(report.converged);
    EXPECT_LT((solution - moments).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DualSolver, EulerHessianSymmetricAndMatchesDifferences) {
    Euler2 closure(1.4);
    const auto basis = build_total_degree_basis(2, 2);
    const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {4}, 2);
    const DualSystem<Euler2> system(closure, basis, rule);
    std::mt19937_64 rng(19);
    const int n = static_cast<int>(basis.size());
    for (int trial = 0; trial < 10; ++trial) {
        MomentMatrix<4> lambda = MomentMatrix<4>::Zero(n, 4);
        lambda.row(0) = closure.grad_entropy(random_admissible_state(rng)).transpose();
        std::uniform_real_distribution<double> perturb(-0.05, 0.05);
        for (int i = 1; i < n; ++i)
            for (int l = 0; l < 4; ++l) lambda(i, l) = perturb(rng) * std::abs(lambda(0, l));
        const MomentMatrix<4> moments = MomentMatrix<4>::Zero(n, 4);
        const Eigen::MatrixXd h = system.hessian(lambda);
        EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()));
        Eigen::MatrixXd fd(4 * n, 4 * n);
        for (int c = 0; c < 4 * n; ++c) {
            const double step = 1e-6 * std::max(1.0, std::abs(lambda.data()[c]));
            MomentMatrix<4> plus = lambda, minus = lambda;
            plus.data()[c] += step;
            minus.data()[c] -= step;
            const MomentMatrix<4> diff = (system.gradient(plus, moments) - system.gradient(minus, moments)) / (2.0 * step);
            fd.col(c) = Eigen::Map<const Eigen::VectorXd>(diff.data(), diff.size());
        }
        EXPECT_LT((h - fd).norm() / h.norm(), 1e-5);
    }
}

TEST(DualSolver, EulerManufacturedDualIsRecovered) {
    Euler2 closure(1.4);
    const auto basis = build_total_degree_basis(3, 1);
    const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {8}, 1);
    const DualSystem<Euler2> system(closure, basis, rule);
    std::mt19937_64 rng(23);
    DualOptions options;
    options.tau = 1e-10;
    options.record_history = true;
    for (int trial = 0; trial < 20; ++trial) {
        const MomentMatrix<4> target = manufactured_dual(closure, rng, 4);
        const MomentMatrix<4> moments = system.reconstruct_moments(target);
        DualSolveReport report;
        const MomentMatrix<4> lambda = system.solve(moments, system.initial_dual(moments), options, report);
        EXPECT_TRUE(report.converged);
        EXPECT_LT(report.final_gradient_norm, 1e-10);
        EXPECT_LT((lambda - target).cwiseAbs().maxCoeff() / target.cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LT(stopping_quantity<4>(system.gradient(lambda, moments), StoppingNorm::column_sum), 1e-10);
        for (std::size_t k = 1; k < report.gradient_history.size(); ++k)
            EXPECT_LT(report.gradient_history[k], report.gradient_history[k - 1]);
    }
}

TEST(DualSolver, EulerNewtonConvergesQuadratically) {
    Euler2 closure(1.4);
    const auto basis = build_total_degree_basis(2, 1);
    const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {6}, 1);
    const DualSystem<Euler2> system(closure, basis, rule);
    std::mt19937_64 rng(31);
    const MomentMatrix<4> target = manufactured_dual(closure, rng, 3);
    const MomentMatrix<4> moments = system.reconstruct_moments(target);
    MomentMatrix<4> lambda = system.initial_dual(moments);
    MomentMatrix<4> grad = system.gradient(lambda, moments);
    std::vector<double> errors{(lambda - target).norm()};
    for (int k = 0; k < 12 && errors.back() > 1e-12; ++k) {
        lambda = system.step(lambda, moments, grad, DualOptions{});
        errors.push_back((lambda - target).norm());
    }
    // Once in the quadratic regime, e_{k+1} / e_k^2 stays bounded.
    int checked = 0;
    for (std::size_t k = 1; k + 1 < errors.size(); ++k) {
        if (errors[k] > 1e-2 || errors[k + 1] < 1e-13) continue;
        EXPECT_LT(errors[k + 1] / (errors[k] * errors[k]), 1e3);
        ++checked;
    }
    EXPECT_GE(checked, 1);
    // Fixed point: a converged iterate stays put.
    MomentMatrix<4> g = system.gradient(target, system.reconstruct_moments(target));
    const MomentMatrix<4> same = system.step(target, system.reconstruct_moments(target), g, DualOptions{});
    EXPECT_LT((same - target).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DualSolver, ErrorsAreReported) {
    Euler2 closure(1.4);
    const auto basis = build_total_degree_basis(1, 1);
    const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {3}, 1);
    MomentMatrix<4> bad = MomentMatrix<4>::Zero(2, 4);
    bad(0, 3) = 1.0;
    EXPECT_THROW(lagrangian_gradient(bad, bad, closure, basis, rule), InadmissibleDual);
    EXPECT_THROW(hessian(bad, closure, basis, rule), InadmissibleDual);

    // Fewer points than basis functions: singular Hessian, reported with the rule.
    QuadraticClosure<1> quad;
    const auto big = build_total_degree_basis(4, 1);
    const auto coarse = tensor_quadrature(QuadratureFamily::gauss_legendre, {3}, 1);
    MomentMatrix<1> moments = MomentMatrix<1>::Ones(5, 1);
    try {
        solve_dual(moments, quad, big, coarse, DualOptions{});
        FAIL() << "expected IllConditionedHessian";
    } catch (const IllConditionedHessian& e) {
        EXPECT_EQ(e.rule, coarse.name());
    }

    DualOptions capped;
    capped.max_iterations = 1;
    capped.tau = 1e-14;
    const DualSystem<Euler2> system(closure, build_total_degree_basis(2, 1), tensor_quadrature(QuadratureFamily::gauss_legendre, {6}, 1));
    std::mt19937_64 rng(1);
    const MomentMatrix<4> target = manufactured_dual(closure, rng, 3);
    const MomentMatrix<4> m = system.reconstruct_moments(target);
    DualSolveReport report;
    EXPECT_THROW(system.solve(m, system.initial_dual(m), capped, report), NonConvergence);
}
