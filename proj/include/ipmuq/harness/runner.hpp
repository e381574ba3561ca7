/// @file runner.hpp
/// @brief Executes an ExperimentConfig: builds the problem, runs the method,
/// and produces the moment snapshot and per-iteration rows.
#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ipmuq/closure/entropy.hpp"
#include "ipmuq/collocation/collocation.hpp"
#include "ipmuq/harness/config.hpp"
#include "ipmuq/harness/moment_io.hpp"
#include "ipmuq/harness/problems.hpp"
#include "ipmuq/solver/engine.hpp"

namespace ipmuq::harness {

struct HistoryRow {
    int iteration = 0;
    double pseudo_time = 0.0;
    double wall_seconds = 0.0;
    double residual = 0.0;
    std::optional<double> rescaled_seconds;
    std::optional<double> mean_error;
    std::optional<double> variance_error;
};

struct RunOutput {
    Snapshot snapshot;
    std::vector<HistoryRow> history;
};

/// CSV with columns iteration, pseudo_time, wall_seconds, [rescaled_seconds,]
/// residual, [rel_E_error, rel_Var_error].
inline void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows) {
    const bool rescaled = !rows.empty() && rows.front().rescaled_seconds.has_value();
    const bool errors = !rows.empty() && rows.front().mean_error.has_value();
    out << "iteration,pseudo_time,wall_seconds" << (rescaled ? ",rescaled_seconds" : "") << ",residual" << (errors ? ",rel_E_error,rel_Var_error" : "") << "\n";
    char buf[64];
    auto field = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.10g", v);
        out << buf;
    };
    for (const auto& r : rows) {
        out << r.iteration;
        field(r.pseudo_time);
        field(r.wall_seconds);
        if (rescaled) field(r.rescaled_seconds.value_or(0.0));
        field(r.residual);
        if (errors) {
            field(r.mean_error.value_or(0.0));
            field(r.variance_error.value_or(0.0));
        }
        out << "\n";
    }
}

inline FvMesh build_mesh(const ExperimentConfig& c) {
    if (!c.info().two_dimensional) return make_mesh_1d(0.0, 1.0, c.mesh.nx, c.problem == "burgers-periodic");
    if (!c.mesh.file.empty()) return load_mesh(c.mesh.file);
    return generate_rectangle(*c.mesh.rectangle);
}

namespace detail {

inline void require_tags(const FvMesh& mesh, std::initializer_list<const char*> allowed, const std::string& problem) {
    for (const auto& tag : mesh.tags)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return tag == a; }))
            throw ConfigError("problem.mesh: boundary tag '" + tag + "' has no meaning for problem '" + problem + "'");
}

}  // namespace detail

inline Problem<BurgersModel> burgers_problem(const ExperimentConfig& c, FvMesh mesh) {
    Problem<BurgersModel> p;
    if (c.problem == "burgers-shock") {
        const Interval s = c.input("shock_position");
        p = problems::burgers_shock(c.mesh.nx, s.mid(), s.half());
    } else {
        const Interval a = c.input("amplitude");
        p = problems::burgers_periodic(c.mesh.nx, a.mid(), a.mid() != 0.0 ? a.half() / a.mid() : 0.0);
    }
    p.mesh = std::move(mesh);
    return p;
}

inline Problem<EulerModel<1>> euler1d_problem(const ExperimentConfig& c, FvMesh mesh) {
    Problem<EulerModel<1>> p;
    if (c.problem == "sod1d") {
        const Interval s = c.input("interface");
        p = problems::sod1d(c.mesh.nx, s.half(), c.gamma);
        if (s.mid() != 0.5) {
            const auto base = p.initial;
            const double shift = s.mid() - 0.5;
            p.initial = [base, shift](const Point2& x, const Eigen::VectorXd& xi) { return base(Point2(x.x() - shift, x.y()), xi); };
        }
    } else {
        const Interval d = c.input("inflow_density");
        p = problems::supersonic_inflow(c.mesh.nx, 2.0, d.half(), 0.8, c.gamma);
        if (d.mid() != 1.0) throw ConfigError("problem.uncertain.inflow_density: must be centred at 1");
    }
    p.mesh = std::move(mesh);
    return p;
}

inline Problem<EulerModel<2>> euler2d_problem(const ExperimentConfig& c, FvMesh mesh) {
    if (c.gamma != 1.4) throw ConfigError("problem.gamma: 2D presets use gamma = 1.4");
    if (c.problem == "naca1d") {
        detail::require_tags(mesh, {"wall", "farfield"}, c.problem);
        const Interval a = c.input("angle");
        return problems::naca1d(std::move(mesh), a.lo, a.hi);
    }
    if (c.problem == "euler2d-uq2") {
        detail::require_tags(mesh, {"wall", "farfield"}, c.problem);
        const Interval pr = c.input("pressure"), ma = c.input("mach");
        return problems::euler2d_uq2(std::move(mesh), pr.lo, pr.hi, ma.lo, ma.hi);
    }
    detail::require_tags(mesh, {"wall", "top", "bottom"}, c.problem);
    problems::ShockTubeData d;
    const Interval rho = c.input("density_lower"), e = c.input("energy_lower"), y = c.input("shock_position");
    d.rho_lower_min = rho.lo;
    d.rho_lower_max = rho.hi;
    d.energy_lower_min = e.lo;
    d.energy_lower_max = e.hi;
    d.shock_min = y.lo;
    d.shock_max = y.hi;
    return problems::shocktube3d(std::move(mesh), d);
}

/// Calls fn(problem) with the problem of the config's model.
template <class Fn>
auto with_problem(const ExperimentConfig& c, Fn&& fn) {
    FvMesh mesh = build_mesh(c);
    switch (c.info().model) {
        case ModelKind::burgers: return fn(burgers_problem(c, std::move(mesh)));
        case ModelKind::euler1d: return fn(euler1d_problem(c, std::move(mesh)));
        case ModelKind::euler2d: break;
    }
    return fn(euler2d_problem(c, std::move(mesh)));
}

/// Relative L2 errors of E and Var of one component; absolute where the
/// reference field vanishes (e.g. the variance of a deterministic problem).
template <int M>
std::pair<double, double> field_errors(const std::vector<MomentMatrix<M>>& moments, const std::vector<MomentMatrix<M>>& reference, const FvMesh& mesh,
                                       const std::optional<MaskBox>& mask, int component = 0) {
    const int nc = mesh.cells();
    Eigen::VectorXd e(nc), v(nc), er(nc), vr(nc);
    for (int j = 0; j < nc; ++j) {
        const auto [mean, var] = moments_to_quantities<M>(moments[static_cast<std::size_t>(j)]);
        const auto [mean_r, var_r] = moments_to_quantities<M>(reference[static_cast<std::size_t>(j)]);
        e(j) = mean(component);
        v(j) = var(component);
        er(j) = mean_r(component);
        vr(j) = var_r(component);
    }
    auto rel = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const double denom = discrete_l2(b, mesh, mask);
        const double diff = discrete_l2(a - b, mesh, mask);
        return denom > 0.0 ? diff / denom : diff;
    };
    return {rel(e, er), rel(v, vr)};
}

template <ConservationModel Model, EntropyClosure Closure>
RunOutput run_intrusive(const ExperimentConfig& c, Problem<Model> problem, Closure closure, const std::optional<Snapshot>& reference) {
    constexpr int m = Model::m;
    const int p = c.stochastic_dim;
    RefinementLadder ladder = c.ladder ? c.ladder->build(p) : single_level_ladder(c.order, p, c.quadrature.build(p));
    SolverConfig config;
    config.cfl = c.cfl;
    config.fixed_dt = c.dt;
    config.dual.tau = c.tau;
    config.residual_mode = c.residual;
    config.workers = c.workers;
    const FvMesh mesh = problem.mesh;
    std::optional<std::vector<MomentMatrix<m>>> ref;
    if (reference) ref = snapshot_moments<m>(*reference, mesh, p);

    MomentSolver<Model, Closure> solver(std::move(problem), std::move(closure), ladder, config);
    RunOptions options;
    options.mode = is_one_shot(c.method) ? DualMode::one_shot : DualMode::full;
    options.steady = c.steady;
    options.t_end = c.t_end;
    options.max_steps = c.max_steps;
    options.steady_tolerance = c.epsilon;
    if (!c.retardation.empty()) {
        RetardationSchedule schedule;
        for (const auto& stage : c.retardation) {
            schedule.thresholds.push_back(stage.threshold);
            schedule.caps.push_back(level_of_degree(ladder, stage.order));
        }
        options.schedule = schedule;
    }
    RunOutput out;
    double clock = 0.0;
    options.observer = [&](const StepReport& r) {
        clock += r.wall_seconds;
        HistoryRow row{r.step, r.time, clock, r.residual, std::nullopt, std::nullopt, std::nullopt};
        if (ref) {
            const auto [e, v] = field_errors<m>(solver.moments(), *ref, mesh, c.mask);
            row.mean_error = e;
            row.variance_error = v;
        }
        out.history.push_back(row);
    };
    solver.run(options);
    std::vector<int> orders;
    for (int l : solver.levels()) orders.push_back(ladder.degree(l));
    out.snapshot = make_snapshot<m>(to_string(c.method), p, mesh, solver.time(), solver.moments(), orders);
    return out;
}

template <ConservationModel Model>
ScOptions sc_options(const ExperimentConfig& c, ScMode mode) {
    ScOptions o;
    o.mode = mode;
    o.steady = c.steady;
    o.t_end = c.t_end;
    o.max_steps = c.max_steps;
    o.steady_tolerance = c.epsilon;
    o.residual_component = c.residual == ResidualMode::zeroth_only || c.steady ? 0 : -1;
    o.cfl = c.cfl;
    o.fixed_dt = c.dt;
    o.workers = c.workers;
    return o;
}

template <ConservationModel Model>
RunOutput run_collocation(const ExperimentConfig& c, const Problem<Model>& problem, const std::optional<Snapshot>& reference) {
    constexpr int m = Model::m;
    const int p = c.stochastic_dim;
    const BasisSet basis(c.order, p);
    const QuadratureRule rule = c.quadrature.build(p);
    std::optional<std::vector<MomentMatrix<m>>> ref;
    if (reference) ref = snapshot_moments<m>(*reference, problem.mesh, p);
    RunOutput out;
    ScResult<m> result;
    if (c.method == Method::sc_blackbox) {
        result = run_sc<Model>(problem, basis, rule, sc_options<Model>(c, ScMode::blackbox));
        HistoryRow row;
        for (const auto& pt : result.points) {
            row.iteration = std::max(row.iteration, pt.steps);
            row.pseudo_time = std::max(row.pseudo_time, pt.time);
            row.residual = std::max(row.residual, pt.residual);
        }
        row.wall_seconds = result.wall_seconds;
        if (ref) {
            const auto [e, v] = field_errors<m>(result.moments, *ref, problem.mesh, c.mask);
            row.mean_error = e;
            row.variance_error = v;
        }
        out.history.push_back(row);
    } else {
        double clock = 0.0;
        result = run_sc<Model>(problem, basis, rule, sc_options<Model>(c, ScMode::coupled),
                               [&](const ScStepReport& r, const std::vector<MomentMatrix<m>>& moments) {
                                   clock += r.wall_seconds;
                                   HistoryRow row{r.step, r.time, clock, r.residual, std::nullopt, std::nullopt, std::nullopt};
                                   if (ref) {
                                       const auto [e, v] = field_errors<m>(moments, *ref, problem.mesh, c.mask);
                                       row.mean_error = e;
                                       row.variance_error = v;
                                   }
                                   out.history.push_back(row);
                               });
        if (ref && !out.history.empty()) {
            // Error curves are reported on the clock of an uncoupled run.
            const double blackbox = run_sc<Model>(problem, basis, rule, sc_options<Model>(c, ScMode::blackbox)).wall_seconds;
            const double total = out.history.back().wall_seconds;
            for (auto& row : out.history) row.rescaled_seconds = total > 0.0 ? blackbox * row.wall_seconds / total : 0.0;
        }
    }
    out.snapshot = make_snapshot<m>(to_string(c.method), p, problem.mesh, out.history.empty() ? 0.0 : out.history.back().pseudo_time, result.moments,
                                    std::vector<int>(static_cast<std::size_t>(problem.mesh.cells()), c.order));
    return out;
}

/// Run the configured method, optionally recording errors against a reference.
inline RunOutput run_experiment(const ExperimentConfig& c, const std::optional<Snapshot>& reference = std::nullopt) {
    return with_problem(c, [&](auto problem) -> RunOutput {
        using Model = typename decltype(problem)::model_type;
        if (is_collocation(c.method)) return run_collocation<Model>(c, problem, reference);
        if constexpr (std::is_same_v<Model, BurgersModel>) {
            return run_intrusive(c, std::move(problem), QuadraticClosure<1>(), reference);
        } else {
            constexpr int d = Model::m - 2;
            if (c.closure == "quadratic") return run_intrusive(c, std::move(problem), QuadraticClosure<Model::m>(), reference);
            return run_intrusive(c, std::move(problem), EulerClosure<d>(c.gamma), reference);
        }
    });
}

/// Dense Gauss-Legendre collocation with reference.points per dimension.
inline Snapshot run_reference(const ExperimentConfig& c) {
    ExperimentConfig r = c;
    r.method = Method::sc_blackbox;
    r.order = c.reference_order >= 0 ? c.reference_order : c.finest_order();
    r.quadrature = QuadratureSpec{"gauss_legendre", c.reference_points};
    r.ladder.reset();
    r.retardation.clear();
    Snapshot s = run_experiment(r).snapshot;
    s.method = "reference";
    return s;
}

/// Relative L2 errors (E, Var) per conserved variable of `result` against `reference`.
inline std::vector<std::pair<double, double>> compare_snapshots(const ExperimentConfig& c, const Snapshot& result, const Snapshot& reference) {
    const FvMesh mesh = build_mesh(c);
    auto compare = [&]<int M>() {
        const auto a = snapshot_moments<M>(result, mesh, c.stochastic_dim);
        const auto b = snapshot_moments<M>(reference, mesh, c.stochastic_dim);
        std::vector<std::pair<double, double>> out;
        for (int k = 0; k < M; ++k) out.push_back(field_errors<M>(a, b, mesh, c.mask, k));
        return out;
    };
    switch (result.m) {
        case 1: return compare.template operator()<1>();
        case 3: return compare.template operator()<3>();
        case 4: return compare.template operator()<4>();
        default: throw IncompatibleSnapshot("snapshot has an unsupported number of conserved variables");
    }
}

}  // namespace ipmuq::harness
