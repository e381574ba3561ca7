/// @file collocation.hpp
/// @brief Stochastic collocation on top of the deterministic finite-volume solver.
///
/// Blackbox mode runs every quadrature point independently with its own time
/// step and stopping test. Coupled mode advances all points with one shared
/// time step so that moments, and errors against a reference, are available
/// after every step.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <climits>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ipmuq/closure/dual_solver.hpp"
#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/mesh.hpp"
#include "ipmuq/random_space/basis.hpp"
#include "ipmuq/random_space/quadrature.hpp"
#include "ipmuq/solver/deterministic.hpp"
#include "ipmuq/solver/parallel.hpp"

namespace ipmuq {

enum class ScMode { blackbox, coupled };

struct ScOptions {
    ScMode mode = ScMode::blackbox;
    bool steady = false;
    double t_end = 0.0;
    int max_steps = INT_MAX;
    double steady_tolerance = 1e-7;
    int residual_component = 0;  // density by default; -1 for all components
    double cfl = 0.5;
    double fixed_dt = 0.0;
    int workers = 1;
};

struct ScStepReport {
    int step = 0;
    double time = 0.0;
    double dt = 0.0;
    double residual = 0.0;  // maximum over points
    double wall_seconds = 0.0;
};

struct ScPointReport {
    int steps = 0;
    double time = 0.0;
    double residual = 0.0;
    bool converged = false;
};

template <int M>
struct ScResult {
    std::vector<MomentMatrix<M>> moments;
    std::vector<ScPointReport> points;
    std::vector<ScStepReport> history;  // coupled mode only
    double wall_seconds = 0.0;
};

/// u_hat_j = sum_k w_k f(xi_k) u_j(xi_k) phi(xi_k)^T, summed in point order.
template <int M>
std::vector<MomentMatrix<M>> collocation_moments(const std::vector<std::vector<Eigen::Matrix<double, M, 1>>>& point_states, const BasisSet& basis,
                                                 const QuadratureRule& rule, int workers = 1) {
    const Eigen::MatrixXd phi = basis.eval_points(rule.points());
    const Eigen::VectorXd w = rule.weighted_density();
    const int nc = point_states.empty() ? 0 : static_cast<int>(point_states.front().size());
    std::vector<MomentMatrix<M>> out(static_cast<std::size_t>(nc));
    parallel_for(nc, workers, [&](int j) {
        MomentMatrix<M> u = MomentMatrix<M>::Zero(phi.cols(), M);
        for (std::size_t k = 0; k < point_states.size(); ++k)
            u.noalias() += (w(static_cast<Eigen::Index>(k)) * phi.row(static_cast<Eigen::Index>(k)).transpose()) *
                           point_states[k][static_cast<std::size_t>(j)].transpose();
        out[static_cast<std::size_t>(j)] = u;
    });
    return out;
}

/// Collocation run. The observer (coupled mode) sees every step and the
/// current moments.
template <ConservationModel Model>
ScResult<Model::m> run_sc(const Problem<Model>& problem, const BasisSet& basis, const QuadratureRule& rule, const ScOptions& options,
                          const std::function<void(const ScStepReport&, const std::vector<MomentMatrix<Model::m>>&)>& observer = {}) {
    constexpr int m = Model::m;
    using State = Eigen::Matrix<double, m, 1>;
    if (!options.steady && !(options.t_end > 0.0) && options.max_steps == INT_MAX) throw ConfigError("collocation run needs t_end, max_steps or steady mode");
    const auto start = std::chrono::steady_clock::now();
    const int q = static_cast<int>(rule.points().rows());
    std::vector<DeterministicSolver<Model>> solvers;
    solvers.reserve(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) solvers.emplace_back(problem, rule.point(k), options.cfl, options.residual_component);

    ScResult<m> result;
    result.points.resize(static_cast<std::size_t>(q));
    auto snapshot = [&] {
        std::vector<std::vector<State>> states;
        states.reserve(solvers.size());
        for (const auto& s : solvers) states.push_back(s.states());
        return collocation_moments<m>(states, basis, rule, options.workers);
    };
    auto done = [&](const ScPointReport& p, double time) {
        if (options.steady) return p.converged;
        if (options.t_end > 0.0 && time >= options.t_end * (1.0 - 1e-14)) return true;
        return p.steps >= options.max_steps;
    };

    if (options.mode == ScMode::blackbox) {
        parallel_for(q, options.workers, [&](int k) {
            auto& solver = solvers[static_cast<std::size_t>(k)];
            auto& report = result.points[static_cast<std::size_t>(k)];
            while (!done(report, solver.time())) {
                if (options.steady && report.steps >= options.max_steps)
                    throw NonConvergence("collocation point " + std::to_string(k) + " did not reach the steady tolerance", report.steps, report.residual);
                double dt = options.fixed_dt > 0.0 ? options.fixed_dt : solver.stable_dt();
                if (!options.steady && options.t_end > 0.0) dt = std::min(dt, options.t_end - solver.time());
                report.residual = solver.step(dt);
                ++report.steps;
                report.time = solver.time();
                if (options.steady && report.residual <= options.steady_tolerance) report.converged = true;
            }
            if (!options.steady) report.converged = true;
        });
    } else {
        int step = 0;
        double time = 0.0;
        while (true) {
            bool all_done = true;
            for (std::size_t k = 0; k < solvers.size(); ++k) all_done = all_done && done(result.points[k], time);
            if (all_done && (options.steady ? step > 0 : true)) break;
            if (options.steady && step >= options.max_steps)
                throw NonConvergence("coupled collocation did not reach the steady tolerance", step, result.history.empty() ? 0.0 : result.history.back().residual);
            const auto t0 = std::chrono::steady_clock::now();
            double dt = options.fixed_dt;
            if (!(dt > 0.0)) {
                dt = std::numeric_limits<double>::infinity();
                for (const auto& s : solvers) dt = std::min(dt, s.stable_dt());
            }
            if (!options.steady && options.t_end > 0.0) dt = std::min(dt, options.t_end - time);
            std::vector<double> residuals(solvers.size());
            parallel_for(q, options.workers, [&](int k) { residuals[static_cast<std::size_t>(k)] = solvers[static_cast<std::size_t>(k)].step(dt); });
            ++step;
            time += dt;
            ScStepReport report{step, time, dt, *std::max_element(residuals.begin(), residuals.end()), 0.0};
            for (std::size_t k = 0; k < solvers.size(); ++k) {
                auto& p = result.points[k];
                p.steps = step;
                p.time = time;
                p.residual = residuals[k];
                p.converged = options.steady ? report.residual <= options.steady_tolerance : false;
            }
            report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.history.push_back(report);
            if (observer) observer(report, snapshot());
        }
        if (!options.steady)
            for (auto& p : result.points) p.converged = true;
    }
    result.moments = snapshot();
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

struct ErrorRow {
    int step = 0;
    double time = 0.0;
    double wall_seconds = 0.0;       // raw clock of the run that produced the row
    double rescaled_seconds = 0.0;   // raw clock mapped onto a reference (blackbox) run time
    double mean_error = 0.0;
    double variance_error = 0.0;
};

/// Relative discrete L2 errors of E and Var of one conserved component.
template <int M>
std::pair<double, double> moment_errors(const std::vector<MomentMatrix<M>>& moments, const std::vector<MomentMatrix<M>>& reference, const FvMesh& mesh,
                                        const std::optional<MaskBox>& mask = std::nullopt, int component = 0) {
    const int nc = mesh.cells();
    Eigen::VectorXd e(nc), v(nc), er(nc), vr(nc);
    for (int j = 0; j < nc; ++j) {
        const auto& a = moments[static_cast<std::size_t>(j)];
        const auto& b = reference[static_cast<std::size_t>(j)];
        e(j) = a(0, component);
        er(j) = b(0, component);
        v(j) = a.col(component).tail(a.rows() - 1).squaredNorm();
        vr(j) = b.col(component).tail(b.rows() - 1).squaredNorm();
    }
    return {relative_l2_error(e, er, mesh, mask), relative_l2_error(v, vr, mesh, mask)};
}

/// Per-step errors of a coupled collocation run against reference moments.
/// Rows carry the raw coupled clock; rescale_clock maps them onto blackbox time.
template <ConservationModel Model>
std::vector<ErrorRow> sc_error_series(const Problem<Model>& problem, const BasisSet& basis, const QuadratureRule& rule, ScOptions options,
                                      const std::vector<MomentMatrix<Model::m>>& reference, const std::optional<MaskBox>& mask = std::nullopt) {
    options.mode = ScMode::coupled;
    std::vector<ErrorRow> rows;
    double clock = 0.0;
    run_sc<Model>(problem, basis, rule, options, [&](const ScStepReport& report, const std::vector<MomentMatrix<Model::m>>& moments) {
        clock += report.wall_seconds;
        const auto [e, v] = moment_errors<Model::m>(moments, reference, problem.mesh, mask);
        rows.push_back({report.step, report.time, clock, clock, e, v});
    });
    return rows;
}

/// rescaled = reference_seconds * raw / raw_total.
inline void rescale_clock(std::vector<ErrorRow>& rows, double reference_seconds) {
    if (rows.empty()) return;
    const double total = rows.back().wall_seconds;
    for (auto& r : rows) r.rescaled_seconds = total > 0.0 ? reference_seconds * r.wall_seconds / total : 0.0;
}

}  // namespace ipmuq
