/// @file engine.hpp
/// @brief Intrusive moment solver: IPM, One-Shot IPM and their adaptive variants.
///
/// One pseudo-time step has three phases:
///   1. dual phase, per cell: a converged dual solve (IPM) or one damped Newton
///      step (One-Shot) at the cell's current level;
///   2. level phase, per cell: the smoothness indicator moves the level by at
///      most one, capped by the retardation schedule;
///   3. moment phase: reconstructions u_s(lambda^T phi) are evaluated at the
///      quadrature points of the finest level any stencil needs, face fluxes
///      are taken pointwise, and each cell projects
///        u_j(xi_k) - dt/|K_j| sum_faces len g(xi_k)
///      onto its new basis in a fixed point and face order.
/// Stochastic-Galerkin is the same scheme with the quadratic closure. Every
/// per-cell and per-face quantity is computed by exactly one task, so results
/// do not depend on the worker count.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ipmuq/closure/dual_solver.hpp"
#include "ipmuq/closure/entropy.hpp"
#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/boundary.hpp"
#include "ipmuq/models/model.hpp"
#include "ipmuq/random_space/quadrature.hpp"
#include "ipmuq/solver/ladder.hpp"
#include "ipmuq/solver/parallel.hpp"
#include "ipmuq/solver/problem.hpp"

namespace ipmuq {

enum class DualMode { full, one_shot };
enum class ResidualMode { all_moments, zeroth_only };

struct SolverConfig {
    double cfl = 0.5;
    double fixed_dt = 0.0;  // > 0 replaces the CFL time step
    DualOptions dual;
    ResidualMode residual_mode = ResidualMode::all_moments;
    int workers = 1;

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
        if (fixed_dt < 0.0) throw ConfigError("fixed_dt must be non-negative");
        if (!(dual.tau > 0.0)) throw ConfigError("tau must be positive");
        if (workers < 1) throw ConfigError("workers must be at least 1");
    }
};

struct StepReport {
    int step = 0;
    double time = 0.0;
    double dt = 0.0;
    double residual = 0.0;
    long newton_steps = 0;
    int max_level = 0;
    double wall_seconds = 0.0;
};

struct RunOptions {
    DualMode mode = DualMode::full;
    bool steady = false;
    double t_end = 0.0;                   // unsteady: final time (0: run max_steps steps)
    int max_steps = INT_MAX;              // unsteady: N_t; steady: pseudo-time step cap
    double steady_tolerance = 1e-7;       // epsilon of the steady residual
    std::optional<RetardationSchedule> schedule;
    std::function<void(const StepReport&)> observer;
};

struct RunResult {
    std::vector<StepReport> history;
    long newton_steps = 0;
    bool converged = false;
};

template <ConservationModel Model, EntropyClosure Closure>
class MomentSolver {
public:
    static_assert(Model::m == Closure::m, "model and closure disagree on the number of conserved variables");
    static constexpr int m = Model::m;
    using State = Eigen::Matrix<double, m, 1>;
    using Moments = MomentMatrix<m>;
    using PointStates = Eigen::Matrix<double, Eigen::Dynamic, m>;

    MomentSolver(Problem<Model> problem, Closure closure, RefinementLadder ladder, SolverConfig config)
        : problem_(std::move(problem)), closure_(std::move(closure)), ladder_(std::move(ladder)), config_(config) {
        problem_.validate();
        ladder_.validate();
        config_.validate();
        const FvMesh& mesh = problem_.mesh;
        h_min_ = *std::min_element(mesh.h.begin(), mesh.h.end());
        for (int l = 0; l < ladder_.size(); ++l) {
            const QuadratureRule& rule = ladder_.rule(l);
            LevelData data{ladder_.moments(l), ladder_.basis.eval_points(rule.points()), Eigen::MatrixXd(), rule.weighted_density(),
                           DualSystem<Closure>(closure_, ladder_.basis, rule, ladder_.degree(l))};
            data.phi = data.phi_full.leftCols(data.n);
            levels_data_.push_back(std::move(data));
        }
        nest_.assign(static_cast<std::size_t>(ladder_.size() * ladder_.size()), {});
        for (int a = 0; a < ladder_.size(); ++a)
            for (int b = a + 1; b < ladder_.size(); ++b) nest_[static_cast<std::size_t>(a * ladder_.size() + b)] = nest_indices(ladder_.rule(a), ladder_.rule(b));

        // Dirichlet data at each face midpoint and level.
        dirichlet_.resize(mesh.faces.size());
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            const Face& face = mesh.faces[f];
            if (!face.boundary()) continue;
            const auto& bc = problem_.boundary(face.tag);
            if (bc.kind != BoundaryKind::dirichlet) continue;
            for (int l = 0; l < ladder_.size(); ++l) {
                const QuadratureRule& rule = ladder_.rule(l);
                PointStates values(rule.points().rows(), m);
                for (Eigen::Index k = 0; k < values.rows(); ++k) {
                    const State s = bc.state(face.midpoint, rule.point(k));
                    values.row(k) = s.transpose();
                    boundary_speed_ = std::max(boundary_speed_, problem_.model.max_wave_speed(s));
                }
                dirichlet_[f].push_back(std::move(values));
            }
        }
        initialize(0);
    }

    const Problem<Model>& problem() const { return problem_; }
    const FvMesh& mesh() const { return problem_.mesh; }
    const RefinementLadder& ladder() const { return ladder_; }
    const SolverConfig& config() const { return config_; }
    SolverConfig& config() { return config_; }
    const Closure& closure() const { return closure_; }
    const DualSystem<Closure>& dual_system(int level) const { return levels_data_[static_cast<std::size_t>(level)].dual; }

    const std::vector<Moments>& moments() const { return u_; }
    const std::vector<Moments>& duals() const { return lambda_; }
    const std::vector<int>& levels() const { return levels_; }
    double time() const { return time_; }
    int steps() const { return steps_; }
    long newton_steps() const { return newton_; }

    /// Project the initial condition at the given levels and take the closure's
    /// starting duals (u_hat itself for the quadratic closure).
    void initialize(std::vector<int> levels) {
        const int nc = mesh().cells();
        if (static_cast<int>(levels.size()) != nc) throw ConfigError("initial level vector does not match the mesh");
        for (int l : levels)
            if (l < 0 || l > ladder_.top()) throw ConfigError("initial level outside the ladder");
        levels_ = std::move(levels);
        u_.assign(static_cast<std::size_t>(nc), Moments());
        lambda_.assign(static_cast<std::size_t>(nc), Moments());
        parallel_for(nc, config_.workers, [&](int j) {
            const LevelData& data = level(levels_[static_cast<std::size_t>(j)]);
            const QuadratureRule& rule = ladder_.rule(levels_[static_cast<std::size_t>(j)]);
            PointStates values(rule.points().rows(), m);
            for (Eigen::Index k = 0; k < values.rows(); ++k) {
                const Eigen::VectorXd xi = rule.point(k);
                values.row(k) = problem_.initial_cell(j, xi).transpose();
            }
            u_[static_cast<std::size_t>(j)] = data.phi.transpose() * (data.w.asDiagonal() * values);
            lambda_[static_cast<std::size_t>(j)] = data.dual.initial_dual(u_[static_cast<std::size_t>(j)]);
        });
        time_ = 0.0;
        steps_ = 0;
        newton_ = 0;
    }
    void initialize(int level) { initialize(std::vector<int>(static_cast<std::size_t>(mesh().cells()), level)); }

    /// Replace the state (moments, duals and levels) wholesale.
    void set_state(std::vector<Moments> u, std::vector<Moments> lambda, std::vector<int> levels) {
        u_ = std::move(u);
        lambda_ = std::move(lambda);
        levels_ = std::move(levels);
    }

    /// Dual phase. Returns updated duals; adds the Newton step count to *newton.
    std::vector<Moments> dual_phase(const std::vector<Moments>& lambda, const std::vector<Moments>& u, const std::vector<int>& levels, DualMode mode,
                                    long* newton = nullptr) const {
        const int nc = mesh().cells();
        std::vector<Moments> out(static_cast<std::size_t>(nc));
        std::vector<int> iterations(static_cast<std::size_t>(nc), 0);
        parallel_for(nc, config_.workers, [&](int j) {
            const auto idx = static_cast<std::size_t>(j);
            const DualSystem<Closure>& system = level(levels[idx]).dual;
            if (mode == DualMode::full) {
                DualSolveReport report;
                out[idx] = system.solve(u[idx], lambda[idx], config_.dual, report);
                iterations[idx] = report.iterations;
            } else {
                Moments grad;
                if (!system.try_gradient(lambda[idx], u[idx], grad))
                    throw InadmissibleDual("dual variables inadmissible in cell " + std::to_string(j) + " [rule: " + system.rule_name() + "]");
                out[idx] = system.step(lambda[idx], u[idx], grad, config_.dual);
                iterations[idx] = 1;
            }
        });
        if (newton)
            for (int it : iterations) *newton += it;
        return out;
    }

    /// New levels from the smoothness indicator of the current moments.
    std::vector<int> level_phase(const std::vector<Moments>& u, const std::vector<int>& levels, int max_level) const {
        if (ladder_.size() == 1) return levels;
        std::vector<int> out(levels.size());
        for (std::size_t j = 0; j < levels.size(); ++j)
            out[j] = adapt_level(levels[j], smoothness_indicator<m>(u[j], ladder_, levels[j]), ladder_, max_level);
        return out;
    }

    /// Moment phase: duals `lambda` (at `dual_levels`) to moments at
    /// `target_levels`. dt <= 0 selects the CFL step, capped by t_remaining.
    std::vector<Moments> moment_phase(const std::vector<Moments>& lambda, const std::vector<int>& dual_levels, const std::vector<int>& target_levels,
                                      double dt, double t_remaining, double* dt_used = nullptr) const {
        (void)dual_levels;
        const FvMesh& msh = mesh();
        const int nc = msh.cells();
        const int nf = static_cast<int>(msh.faces.size());
        std::vector<int> face_level(static_cast<std::size_t>(nf));
        std::vector<int> eval_level(target_levels);
        for (int f = 0; f < nf; ++f) {
            const Face& face = msh.faces[static_cast<std::size_t>(f)];
            int lf = target_levels[static_cast<std::size_t>(face.left)];
            if (!face.boundary()) lf = std::max(lf, target_levels[static_cast<std::size_t>(face.right)]);
            face_level[static_cast<std::size_t>(f)] = lf;
            eval_level[static_cast<std::size_t>(face.left)] = std::max(eval_level[static_cast<std::size_t>(face.left)], lf);
            if (!face.boundary()) eval_level[static_cast<std::size_t>(face.right)] = std::max(eval_level[static_cast<std::size_t>(face.right)], lf);
        }

        // Reconstruction at the finest level each cell is needed on.
        std::vector<PointStates> states(static_cast<std::size_t>(nc));
        std::vector<double> speed(static_cast<std::size_t>(nc), 0.0);
        parallel_for(nc, config_.workers, [&](int j) {
            const auto idx = static_cast<std::size_t>(j);
            const LevelData& data = level(eval_level[idx]);
            const Eigen::Index n = lambda[idx].rows();
            const PointStates duals = data.phi_full.leftCols(n) * lambda[idx];
            PointStates& values = states[idx];
            values.resize(duals.rows(), m);
            State u;
            double s = 0.0;
            for (Eigen::Index k = 0; k < duals.rows(); ++k) {
                if (!closure_.eval(duals.row(k).transpose(), u))
                    throw AdmissibilityError("inadmissible dual reconstruction in cell " + std::to_string(j) + " at point " + std::to_string(k),
                                             j, static_cast<int>(k));
                if (!problem_.model.admissible(u))
                    throw AdmissibilityError("inadmissible state in cell " + std::to_string(j) + " at point " + std::to_string(k), j,
                                             static_cast<int>(k));
                values.row(k) = u.transpose();
                s = std::max(s, problem_.model.max_wave_speed(u));
            }
            speed[idx] = s;
        });

        if (!(dt > 0.0)) {
            const double smax = std::max(boundary_speed_, *std::max_element(speed.begin(), speed.end()));
            dt = smax > 0.0 ? config_.cfl * h_min_ / smax : std::numeric_limits<double>::infinity();
        }
        dt = std::min(dt, t_remaining);
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step is not positive and finite");
        if (dt_used) *dt_used = dt;
        const FluxContext ctx{h_min_ / dt};

        // Face fluxes times face length, at the face level.
        std::vector<PointStates> flux(static_cast<std::size_t>(nf));
        parallel_for(nf, config_.workers, [&](int f) {
            const auto fi = static_cast<std::size_t>(f);
            const Face& face = msh.faces[fi];
            const int lf = face_level[fi];
            const auto left = static_cast<std::size_t>(face.left);
            const std::vector<int>* map_l = nest(lf, eval_level[left]);
            const Eigen::Index q = ladder_.rule(lf).points().rows();
            PointStates& g = flux[fi];
            g.resize(q, m);
            if (face.boundary()) {
                const auto& bc = problem_.boundary(face.tag);
                for (Eigen::Index k = 0; k < q; ++k) {
                    const State ul = states[left].row(at(map_l, k)).transpose();
                    const State far = bc.kind == BoundaryKind::dirichlet ? State(dirichlet_[fi][static_cast<std::size_t>(lf)].row(k).transpose()) : ul;
                    const State ur = ghost_state<m>(ul, bc.kind, face.normal, far);
                    g.row(k) = face.length * problem_.model.numerical_flux(ul, ur, face.normal, ctx).transpose();
                }
            } else {
                const auto right = static_cast<std::size_t>(face.right);
                const std::vector<int>* map_r = nest(lf, eval_level[right]);
                for (Eigen::Index k = 0; k < q; ++k) {
                    const State ul = states[left].row(at(map_l, k)).transpose();
                    const State ur = states[right].row(at(map_r, k)).transpose();
                    g.row(k) = face.length * problem_.model.numerical_flux(ul, ur, face.normal, ctx).transpose();
                }
            }
        });

        // Per-cell projection.
        std::vector<Moments> out(static_cast<std::size_t>(nc));
        parallel_for(nc, config_.workers, [&](int j) {
            const auto idx = static_cast<std::size_t>(j);
            const int lt = target_levels[idx];
            const LevelData& data = level(lt);
            const Eigen::Index q = data.phi.rows();
            const std::vector<int>* map_self = nest(lt, eval_level[idx]);
            PointStates r(q, m);
            for (Eigen::Index k = 0; k < q; ++k) r.row(k) = states[idx].row(at(map_self, k));
            const double scale = dt / msh.volume[idx];
            for (int f : msh.cell_faces[idx]) {
                const auto fi = static_cast<std::size_t>(f);
                const double sign = msh.faces[fi].left == j ? scale : -scale;
                const std::vector<int>* map_f = nest(lt, face_level[fi]);
                for (Eigen::Index k = 0; k < q; ++k) r.row(k) -= sign * flux[fi].row(at(map_f, k));
            }
            out[idx] = data.phi.transpose() * (data.w.asDiagonal() * r);
        });
        return out;
    }

    /// Sum_j |K_j| ||u_j - v_j|| (Frobenius, zero-padded to the longer vector).
    double residual(const std::vector<Moments>& a, const std::vector<Moments>& b) const {
        double sum = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            double sq = 0.0;
            if (config_.residual_mode == ResidualMode::zeroth_only) {
                sq = (a[j].row(0) - b[j].row(0)).squaredNorm();
            } else {
                const Eigen::Index common = std::min(a[j].rows(), b[j].rows());
                sq = (a[j].topRows(common) - b[j].topRows(common)).squaredNorm() + a[j].bottomRows(a[j].rows() - common).squaredNorm() +
                     b[j].bottomRows(b[j].rows() - common).squaredNorm();
            }
            sum += mesh().volume[j] * std::sqrt(sq);
        }
        return sum;
    }

    /// One (pseudo-)time step; levels stay at or below max_level.
    StepReport step(DualMode mode, int max_level = INT_MAX, double t_remaining = std::numeric_limits<double>::infinity()) {
        const auto start = std::chrono::steady_clock::now();
        long newton = 0;
        std::vector<Moments> lambda = dual_phase(lambda_, u_, levels_, mode, &newton);
        std::vector<int> targets = level_phase(u_, levels_, max_level);
        double dt = 0.0;
        std::vector<Moments> u = moment_phase(lambda, levels_, targets, config_.fixed_dt, t_remaining, &dt);
        StepReport report;
        report.residual = residual(u, u_);
        for (std::size_t j = 0; j < targets.size(); ++j) {
            if (targets[j] == levels_[j]) continue;
            lambda[j] = resize_dual(lambda[j], targets[j], u[j]);
        }
        u_ = std::move(u);
        lambda_ = std::move(lambda);
        levels_ = std::move(targets);
        time_ += dt;
        ++steps_;
        newton_ += newton;
        report.step = steps_;
        report.time = time_;
        report.dt = dt;
        report.newton_steps = newton;
        report.max_level = std::min(max_level, ladder_.top());
        report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }

    /// Time loop (unsteady) or pseudo-time loop to a steady state.
    RunResult run(const RunOptions& options) {
        if (options.schedule) options.schedule->validate(ladder_);
        RunResult result;
        std::size_t stage = 0;
        auto cap = [&] { return options.schedule ? options.schedule->cap(stage, ladder_) : ladder_.top(); };
        auto finished_stages = [&] { return !options.schedule || stage >= options.schedule->caps.size(); };
        while (true) {
            if (!options.steady) {
                if (options.t_end > 0.0 && time_ >= options.t_end * (1.0 - 1e-14)) break;
                if (steps_ >= options.max_steps) break;
            } else if (steps_ >= options.max_steps) {
                throw NonConvergence("steady residual above tolerance after the pseudo-time step cap", steps_,
                                     result.history.empty() ? 0.0 : result.history.back().residual);
            }
            const double remaining = !options.steady && options.t_end > 0.0 ? options.t_end - time_ : std::numeric_limits<double>::infinity();
            const StepReport report = step(options.mode, cap(), remaining);
            result.history.push_back(report);
            result.newton_steps += report.newton_steps;
            if (options.observer) options.observer(report);
            if (options.schedule && !finished_stages() && report.residual < options.schedule->thresholds[stage]) ++stage;
            if (options.steady && report.residual <= options.steady_tolerance && finished_stages()) {
                result.converged = true;
                break;
            }
        }
        if (!options.steady) result.converged = true;
        return result;
    }

private:
    struct LevelData {
        int n;
        Eigen::MatrixXd phi_full;  // Q x N of the ladder basis
        Eigen::MatrixXd phi;       // Q x N_l
        Eigen::VectorXd w;         // weights times density
        DualSystem<Closure> dual;
    };

    const LevelData& level(int l) const { return levels_data_[static_cast<std::size_t>(l)]; }

    /// Indices of rule `a`'s points inside rule `b` (a <= b); nullptr means identity.
    const std::vector<int>* nest(int a, int b) const {
        if (a == b) return nullptr;
        return &nest_[static_cast<std::size_t>(a * ladder_.size() + b)];
    }
    static Eigen::Index at(const std::vector<int>* map, Eigen::Index k) { return map ? (*map)[static_cast<std::size_t>(k)] : k; }

    /// Zero-pad or truncate duals to a new level; fall back to the closure's
    /// starting duals if truncation leaves the admissible set.
    Moments resize_dual(const Moments& lambda, int target, const Moments& u) const {
        const LevelData& data = level(target);
        Moments out = Moments::Zero(data.n, m);
        const Eigen::Index common = std::min<Eigen::Index>(data.n, lambda.rows());
        out.topRows(common) = lambda.topRows(common);
        if (!data.dual.admissible(out)) out = data.dual.initial_dual(u);
        return out;
    }

    Problem<Model> problem_;
    Closure closure_;
    RefinementLadder ladder_;
    SolverConfig config_;
    std::vector<LevelData> levels_data_;
    std::vector<std::vector<int>> nest_;
    std::vector<std::vector<PointStates>> dirichlet_;
    double boundary_speed_ = 0.0;
    double h_min_ = 0.0;

    std::vector<Moments> u_;
    std::vector<Moments> lambda_;
    std::vector<int> levels_;
    double time_ = 0.0;
    int steps_ = 0;
    long newton_ = 0;
};

/// Algorithm 1 for a fixed number of steps or up to t_end.
template <ConservationModel Model, EntropyClosure Closure>
RunResult run_ipm(MomentSolver<Model, Closure>& solver, double t_end, int max_steps = INT_MAX,
                  std::function<void(const StepReport&)> observer = {}) {
    RunOptions options;
    options.t_end = t_end;
    options.max_steps = max_steps;
    options.observer = std::move(observer);
    return solver.run(options);
}

/// Pseudo-time iteration to a steady state with IPM or One-Shot IPM.
template <ConservationModel Model, EntropyClosure Closure>
RunResult run_steady(MomentSolver<Model, Closure>& solver, DualMode variant, double epsilon, int max_steps = 1000000,
                     std::function<void(const StepReport&)> observer = {}) {
    RunOptions options;
    options.mode = variant;
    options.steady = true;
    options.steady_tolerance = epsilon;
    options.max_steps = max_steps;
    options.observer = std::move(observer);
    return solver.run(options);
}

}  // namespace ipmuq
