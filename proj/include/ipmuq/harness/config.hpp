/// @file config.hpp
/// @brief Experiment configuration: JSON schema, validation and presets.
///
/// Validation errors name the offending field by its path, e.g.
/// "solver.cfl: must lie in (0, 1]". The schema is documented in README.md.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/mesh.hpp"
#include "ipmuq/random_space/quadrature.hpp"
#include "ipmuq/solver/engine.hpp"

namespace ipmuq::harness {

using json = nlohmann::json;

enum class Method { sg, ipm, osipm, adaptive_ipm, readosipm, sc_blackbox, sc_coupled };
enum class ModelKind { burgers, euler1d, euler2d };

inline const std::vector<std::pair<std::string, Method>>& method_names() {
    static const std::vector<std::pair<std::string, Method>> names{
        {"sg", Method::sg},          {"ipm", Method::ipm},           {"osipm", Method::osipm},          {"adaptive_ipm", Method::adaptive_ipm},
        {"readosipm", Method::readosipm}, {"sc_blackbox", Method::sc_blackbox}, {"sc_coupled", Method::sc_coupled}};
    return names;
}

inline std::string to_string(Method m) {
    for (const auto& [name, value] : method_names())
        if (value == m) return name;
    return "?";
}

inline bool is_adaptive(Method m) { return m == Method::adaptive_ipm || m == Method::readosipm; }
inline bool is_collocation(Method m) { return m == Method::sc_blackbox || m == Method::sc_coupled; }
inline bool is_one_shot(Method m) { return m == Method::osipm || m == Method::readosipm; }

/// A random input uniform on [lo, hi].
struct Interval {
    double lo = 0.0, hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double half() const { return 0.5 * (hi - lo); }
};

/// Problem family behind a preset: model, stochastic dimension and the
/// names of its random inputs in xi order, with default bounds.
struct ProblemInfo {
    ModelKind model;
    int dim;
    bool two_dimensional;
    std::vector<std::pair<std::string, Interval>> uncertain;
};

inline const std::map<std::string, ProblemInfo>& problem_catalog() {
    static const std::map<std::string, ProblemInfo> catalog{
        {"burgers-shock", {ModelKind::burgers, 1, false, {{"shock_position", {0.25, 0.35}}}}},
        {"burgers-periodic", {ModelKind::burgers, 1, false, {{"amplitude", {0.4, 0.6}}}}},
        {"sod1d", {ModelKind::euler1d, 1, false, {{"interface", {0.45, 0.55}}}}},
        {"supersonic1d", {ModelKind::euler1d, 1, false, {{"inflow_density", {0.9, 1.1}}}}},
        {"naca1d", {ModelKind::euler2d, 1, true, {{"angle", {0.75, 1.75}}}}},
        {"euler2d-uq2", {ModelKind::euler2d, 2, true, {{"pressure", {100325.0, 102325.0}}, {"mach", {0.775, 0.825}}}}},
        {"shocktube3d",
         {ModelKind::euler2d, 3, true, {{"density_lower", {1.189, 1.389}}, {"energy_lower", {0.2, 0.4}}, {"shock_position", {1.0, 1.2}}}}},
    };
    return catalog;
}

/// "gauss_legendre" and "gauss_lobatto" levels are point counts per dimension;
/// "clenshaw_curtis" and "sparse_clenshaw_curtis" levels are 0-based CC levels.
struct QuadratureSpec {
    std::string family = "gauss_legendre";
    int level = 1;

    QuadratureRule build(int dim) const {
        if (family == "sparse_clenshaw_curtis") return sparse_quadrature(level, dim);
        if (family == "gauss_legendre") return tensor_quadrature(QuadratureFamily::gauss_legendre, {level}, dim);
        if (family == "gauss_lobatto") return tensor_quadrature(QuadratureFamily::gauss_lobatto, {level}, dim);
        if (family == "clenshaw_curtis") return tensor_quadrature(QuadratureFamily::clenshaw_curtis, {level}, dim);
        throw ConfigError("unknown quadrature family '" + family + "'");
    }
};

struct LadderSpec {
    std::vector<int> orders;
    std::vector<QuadratureSpec> rules;
    double delta_dec = 0.0;
    double delta_inc = 0.0;

    RefinementLadder build(int dim) const {
        RefinementLadder ladder;
        ladder.basis = BasisSet(orders.back(), dim);
        for (std::size_t i = 0; i < orders.size(); ++i) ladder.levels.push_back({orders[i], rules[i].build(dim)});
        ladder.delta_dec = delta_dec;
        ladder.delta_inc = delta_inc;
        return ladder;
    }
};

struct MeshSpec {
    int nx = 100;                           // 1D presets
    std::string file;                       // 2D: mesh file, or
    std::optional<RectangleSpec> rectangle;  // 2D: generated channel
};

struct RetardationStage {
    double threshold;
    int order;
};

struct ExperimentConfig {
    Method method = Method::ipm;
    std::string problem;
    MeshSpec mesh;
    int stochastic_dim = 1;
    std::map<std::string, Interval> uncertain;
    int order = 1;
    QuadratureSpec quadrature;
    std::optional<LadderSpec> ladder;
    std::string closure = "euler";
    double gamma = 1.4;

    double cfl = 0.5;
    double dt = 0.0;
    double tau = 1e-7;
    double epsilon = 1e-7;
    bool steady = false;
    double t_end = 0.0;
    int max_steps = INT_MAX;
    ResidualMode residual = ResidualMode::all_moments;
    std::vector<RetardationStage> retardation;
    int workers = 1;

    std::string output_dir = ".";
    std::string snapshot = "moments.txt";
    std::string csv = "history.csv";

    int reference_points = 100;  // Gauss-Legendre points per stochastic dimension
    int reference_order = -1;    // basis order of reference snapshots; -1: the run's finest order
    std::optional<MaskBox> mask;

    const ProblemInfo& info() const { return problem_catalog().at(problem); }
    int finest_order() const { return ladder ? ladder->orders.back() : order; }
    Interval input(const std::string& name) const { return uncertain.at(name); }
};

namespace detail {

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] inline void fail(const std::string& path, const std::string& message) { throw ConfigError(path + ": " + message); }

inline const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

template <class T>
T read(const json& j, const std::string& key, const std::string& path, T fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    try {
        if constexpr (std::is_same_v<T, int>) {
            if (!v->is_number_integer()) fail(join(path, key), "expected an integer");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v->is_number()) fail(join(path, key), "expected a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v->is_boolean()) fail(join(path, key), "expected true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v->is_string()) fail(join(path, key), "expected a string");
        }
        return v->get<T>();
    } catch (const json::exception& e) {
        fail(join(path, key), e.what());
    }
}

inline const json& section(const json& j, const std::string& key, const std::string& path) {
    static const json empty = json::object();
    const json* v = find(j, key);
    if (!v) return empty;
    if (!v->is_object()) fail(join(path, key), "expected an object");
    return *v;
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
            fail(join(path, it.key()), "unknown field");
    }
}

inline QuadratureSpec read_quadrature(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown(j, path, {"family", "level"});
    QuadratureSpec q;
    q.family = read<std::string>(j, "family", path, q.family);
    if (q.family != "gauss_legendre" && q.family != "gauss_lobatto" && q.family != "clenshaw_curtis" && q.family != "sparse_clenshaw_curtis")
        fail(join(path, "family"), "expected gauss_legendre, gauss_lobatto, clenshaw_curtis or sparse_clenshaw_curtis");
    if (!find(j, "level")) fail(join(path, "level"), "missing");
    q.level = read<int>(j, "level", path, 0);
    const bool gauss = q.family == "gauss_legendre" || q.family == "gauss_lobatto";
    if (q.level < (q.family == "gauss_lobatto" ? 2 : gauss ? 1 : 0)) fail(join(path, "level"), "out of range");
    return q;
}

inline std::vector<int> read_ints(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_integer()) fail(path + "[" + std::to_string(i) + "]", "expected an integer");
        out.push_back(j[i].get<int>());
    }
    return out;
}

}  // namespace detail

/// Parse and cross-validate a configuration.
inline ExperimentConfig parse_config(const json& j) {
    using namespace detail;
    if (!j.is_object()) fail("<root>", "expected an object");
    reject_unknown(j, "", {"method", "problem", "basis", "quadrature", "ladder", "closure", "solver", "retardation", "workers", "output", "reference",
                          "mask", "stochastic_dim"});
    ExperimentConfig c;

    const std::string method = read<std::string>(j, "method", "", "");
    if (method.empty()) fail("method", "missing");
    auto m = std::find_if(method_names().begin(), method_names().end(), [&](const auto& p) { return p.first == method; });
    if (m == method_names().end()) fail("method", "unknown method '" + method + "'");
    c.method = m->second;

    const json& problem = section(j, "problem", "");
    reject_unknown(problem, "problem", {"preset", "nx", "mesh", "uncertain", "gamma"});
    c.problem = read<std::string>(problem, "preset", "problem", "");
    if (!problem_catalog().count(c.problem)) fail("problem.preset", "unknown problem '" + c.problem + "'");
    const ProblemInfo& info = c.info();
    c.stochastic_dim = read<int>(j, "stochastic_dim", "", info.dim);
    if (c.stochastic_dim != info.dim) fail("stochastic_dim", "problem '" + c.problem + "' has " + std::to_string(info.dim) + " random inputs");
    c.gamma = read<double>(problem, "gamma", "problem", c.gamma);
    if (!(c.gamma > 1.0)) fail("problem.gamma", "must exceed 1");

    c.mesh.nx = read<int>(problem, "nx", "problem", c.mesh.nx);
    if (c.mesh.nx < 2) fail("problem.nx", "need at least 2 cells");
    if (const json* mesh = find(problem, "mesh")) {
        if (!info.two_dimensional) fail("problem.mesh", "1D problems take problem.nx");
        if (mesh->is_string()) {
            c.mesh.file = mesh->get<std::string>();
        } else if (mesh->is_object()) {
            reject_unknown(*mesh, "problem.mesh", {"x0", "x1", "y0", "y1", "nx", "ny", "bump_height", "bump_start", "bump_end", "tags"});
            RectangleSpec r;
            r.x0 = read<double>(*mesh, "x0", "problem.mesh", r.x0);
            r.x1 = read<double>(*mesh, "x1", "problem.mesh", r.x1);
            r.y0 = read<double>(*mesh, "y0", "problem.mesh", r.y0);
            r.y1 = read<double>(*mesh, "y1", "problem.mesh", r.y1);
            r.nx = read<int>(*mesh, "nx", "problem.mesh", r.nx);
            r.ny = read<int>(*mesh, "ny", "problem.mesh", r.ny);
            r.bump_height = read<double>(*mesh, "bump_height", "problem.mesh", r.bump_height);
            r.bump_start = read<double>(*mesh, "bump_start", "problem.mesh", r.bump_start);
            r.bump_end = read<double>(*mesh, "bump_end", "problem.mesh", r.bump_end);
            if (const json* tags = find(*mesh, "tags")) {
                if (!tags->is_array() || tags->size() != 4) fail("problem.mesh.tags", "expected four tags (bottom, right, top, left)");
                for (std::size_t i = 0; i < 4; ++i) {
                    if (!(*tags)[i].is_string()) fail("problem.mesh.tags[" + std::to_string(i) + "]", "expected a string");
                    r.tags[i] = (*tags)[i].get<std::string>();
                }
            }
            if (r.nx < 1 || r.ny < 1) fail("problem.mesh", "nx and ny must be positive");
            if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) fail("problem.mesh", "empty rectangle");
            c.mesh.rectangle = r;
        } else {
            fail("problem.mesh", "expected a file path or a rectangle object");
        }
    } else if (info.two_dimensional) {
        fail("problem.mesh", "2D problems need a mesh file or rectangle");
    }

    for (const auto& [name, interval] : info.uncertain) c.uncertain[name] = interval;
    const json& uncertain = section(problem, "uncertain", "problem");
    for (auto it = uncertain.begin(); it != uncertain.end(); ++it) {
        const std::string path = "problem.uncertain." + it.key();
        if (!c.uncertain.count(it.key())) fail(path, "problem '" + c.problem + "' has no such random input");
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) fail(path, "expected [lower, upper]");
        Interval iv{(*it)[0].get<double>(), (*it)[1].get<double>()};
        if (iv.hi < iv.lo) fail(path, "upper bound below lower bound");
        c.uncertain[it.key()] = iv;
    }

    c.closure = read<std::string>(j, "closure", "", info.model == ModelKind::burgers || c.method == Method::sg ? "quadratic" : "euler");
    if (c.closure != "euler" && c.closure != "quadratic") fail("closure", "expected euler or quadratic");
    if (c.method == Method::sg && c.closure != "quadratic") fail("closure", "sg is IPM with the quadratic closure");
    if (info.model == ModelKind::burgers && c.closure != "quadratic") fail("closure", "Burgers runs use the quadratic closure");

    const json& basis = section(j, "basis", "");
    reject_unknown(basis, "basis", {"order"});
    const bool adaptive = is_adaptive(c.method);
    if (find(basis, "order")) {
        c.order = read<int>(basis, "order", "basis", 1);
        if (c.order < 0) fail("basis.order", "must be non-negative");
    } else if (!adaptive) {
        fail("basis.order", "missing");
    }
    if (const json* q = find(j, "quadrature")) c.quadrature = read_quadrature(*q, "quadrature");
    else if (!adaptive) fail("quadrature", "missing");

    if (const json* l = find(j, "ladder")) {
        if (!adaptive) fail("ladder", "only adaptive methods (adaptive_ipm, readosipm) take a ladder");
        if (!l->is_object()) fail("ladder", "expected an object");
        reject_unknown(*l, "ladder", {"orders", "quadrature", "delta_dec", "delta_inc"});
        LadderSpec spec;
        if (!find(*l, "orders")) fail("ladder.orders", "missing");
        spec.orders = read_ints((*l)["orders"], "ladder.orders");
        if (spec.orders.empty()) fail("ladder.orders", "needs at least one order");
        for (std::size_t i = 1; i < spec.orders.size(); ++i)
            if (spec.orders[i] <= spec.orders[i - 1]) fail("ladder.orders", "orders must increase strictly");
        if (spec.orders.size() > 1 && spec.orders.front() < 1) fail("ladder.orders", "the coarsest order must be at least 1");
        const json* rules = find(*l, "quadrature");
        if (!rules || !rules->is_array() || rules->size() != spec.orders.size()) fail("ladder.quadrature", "expected one rule per order");
        for (std::size_t i = 0; i < rules->size(); ++i) spec.rules.push_back(read_quadrature((*rules)[i], "ladder.quadrature[" + std::to_string(i) + "]"));
        spec.delta_dec = read<double>(*l, "delta_dec", "ladder", 0.0);
        spec.delta_inc = read<double>(*l, "delta_inc", "ladder", 0.0);
        if (spec.orders.size() > 1) {
            if (!(spec.delta_dec > 0.0)) fail("ladder.delta_dec", "must be positive");
            if (!(spec.delta_inc >= spec.delta_dec)) fail("ladder.delta_inc", "must be at least delta_dec");
            for (const auto& r : spec.rules)
                if (r.family == "gauss_legendre" || r.family == "gauss_lobatto")
                    fail("ladder.quadrature", "multi-level ladders need nested Clenshaw-Curtis rules");
        }
        c.ladder = spec;
    } else if (adaptive) {
        fail("ladder", "adaptive methods need a ladder");
    }

    const json& solver = section(j, "solver", "");
    reject_unknown(solver, "solver", {"cfl", "dt", "tau", "epsilon", "steady", "t_end", "max_steps", "residual"});
    c.cfl = read<double>(solver, "cfl", "solver", c.cfl);
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("solver.cfl", "must lie in (0, 1]");
    c.dt = read<double>(solver, "dt", "solver", c.dt);
    if (c.dt < 0.0) fail("solver.dt", "must be non-negative");
    c.tau = read<double>(solver, "tau", "solver", c.tau);
    if (!(c.tau > 0.0)) fail("solver.tau", "must be positive");
    c.epsilon = read<double>(solver, "epsilon", "solver", c.epsilon);
    if (!(c.epsilon > 0.0)) fail("solver.epsilon", "must be positive");
    c.steady = read<bool>(solver, "steady", "solver", c.steady);
    c.t_end = read<double>(solver, "t_end", "solver", c.t_end);
    if (c.t_end < 0.0) fail("solver.t_end", "must be non-negative");
    c.max_steps = read<int>(solver, "max_steps", "solver", c.max_steps);
    if (c.max_steps < 0) fail("solver.max_steps", "must be non-negative");
    const std::string residual = read<std::string>(solver, "residual", "solver", "all_moments");
    if (residual == "all_moments") c.residual = ResidualMode::all_moments;
    else if (residual == "zeroth") c.residual = ResidualMode::zeroth_only;
    else fail("solver.residual", "expected all_moments or zeroth");
    if (!c.steady && c.t_end == 0.0 && c.max_steps == INT_MAX) fail("solver", "unsteady runs need t_end or max_steps");
    if (is_one_shot(c.method) && !c.steady) fail("solver.steady", "One-Shot methods iterate to a steady state");

    if (const json* r = find(j, "retardation")) {
        if (c.method != Method::readosipm && c.method != Method::adaptive_ipm) fail("retardation", "only adaptive methods take a retardation schedule");
        if (!c.steady) fail("retardation", "retardation needs a steady run");
        if (!r->is_array()) fail("retardation", "expected an array of {threshold, order}");
        for (std::size_t i = 0; i < r->size(); ++i) {
            const std::string path = "retardation[" + std::to_string(i) + "]";
            const json& s = (*r)[i];
            if (!s.is_object()) fail(path, "expected {threshold, order}");
            reject_unknown(s, path, {"threshold", "order"});
            if (!find(s, "threshold") || !find(s, "order")) fail(path, "needs threshold and order");
            RetardationStage stage{read<double>(s, "threshold", path, 0.0), read<int>(s, "order", path, 0)};
            if (std::find(c.ladder->orders.begin(), c.ladder->orders.end(), stage.order) == c.ladder->orders.end())
                fail(path + ".order", "not an order of the ladder");
            if (i > 0 && (stage.threshold > c.retardation.back().threshold || stage.order < c.retardation.back().order))
                fail(path, "thresholds must decrease and orders must not decrease");
            c.retardation.push_back(stage);
        }
    } else if (c.method == Method::readosipm) {
        fail("retardation", "readosipm needs a retardation schedule");
    }

    c.workers = read<int>(j, "workers", "", c.workers);
    if (c.workers < 1) fail("workers", "must be at least 1");

    const json& output = section(j, "output", "");
    reject_unknown(output, "output", {"dir", "snapshot", "csv"});
    c.output_dir = read<std::string>(output, "dir", "output", c.output_dir);
    c.snapshot = read<std::string>(output, "snapshot", "output", c.snapshot);
    c.csv = read<std::string>(output, "csv", "output", c.csv);

    const json& reference = section(j, "reference", "");
    reject_unknown(reference, "reference", {"points", "order"});
    c.reference_points = read<int>(reference, "points", "reference", c.reference_points);
    if (c.reference_points < 1) fail("reference.points", "must be positive");
    c.reference_order = read<int>(reference, "order", "reference", c.reference_order);

    if (const json* mask = find(j, "mask")) {
        if (!mask->is_object()) fail("mask", "expected {x: [a, b], y: [c, d]}");
        reject_unknown(*mask, "mask", {"x", "y"});
        auto range = [&](const char* key, double lo, double hi) -> std::pair<double, double> {
            const json* v = find(*mask, key);
            if (!v) return {lo, hi};
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) fail(std::string("mask.") + key, "expected [lower, upper]");
            return {(*v)[0].get<double>(), (*v)[1].get<double>()};
        };
        const auto [x0, x1] = range("x", -1e300, 1e300);
        const auto [y0, y1] = range("y", -1e300, 1e300);
        c.mask = MaskBox{x0, x1, y0, y1};
    }
    return c;
}

/// Full configurations of the named presets. Desk-scale meshes stand in for
/// the airfoil and the bent tube.
inline json preset_config(const std::string& name) {
    if (name == "burgers-shock")
        return json::parse(R"({
          "method": "sg",
          "problem": {"preset": "burgers-shock", "nx": 200},
          "basis": {"order": 5},
          "quadrature": {"family": "gauss_legendre", "level": 10},
          "solver": {"cfl": 0.5, "t_end": 0.3},
          "reference": {"points": 100}
        })");
    if (name == "sod1d")
        return json::parse(R"({
          "method": "ipm",
          "problem": {"preset": "sod1d", "nx": 400},
          "basis": {"order": 4},
          "quadrature": {"family": "gauss_legendre", "level": 8},
          "solver": {"cfl": 0.5, "t_end": 0.2, "tau": 1e-8},
          "reference": {"points": 100}
        })");
    if (name == "naca1d")
        return json::parse(R"({
          "method": "readosipm",
          "problem": {"preset": "naca1d",
                      "mesh": {"x0": -1.0, "x1": 2.0, "y0": 0.0, "y1": 1.5, "nx": 48, "ny": 16,
                               "bump_height": 0.08, "bump_start": 0.0, "bump_end": 1.0,
                               "tags": ["wall", "farfield", "farfield", "farfield"]}},
          "ladder": {"orders": [2, 3, 4, 5, 6, 7, 8, 9],
                     "quadrature": [{"family": "clenshaw_curtis", "level": 2}, {"family": "clenshaw_curtis", "level": 3},
                                    {"family": "clenshaw_curtis", "level": 3}, {"family": "clenshaw_curtis", "level": 3},
                                    {"family": "clenshaw_curtis", "level": 3}, {"family": "clenshaw_curtis", "level": 4},
                                    {"family": "clenshaw_curtis", "level": 4}, {"family": "clenshaw_curtis", "level": 4}],
                     "delta_dec": 2e-5, "delta_inc": 2e-4},
          "retardation": [{"threshold": 6e-5, "order": 2}, {"threshold": 3e-5, "order": 4},
                          {"threshold": 2.2e-5, "order": 5}, {"threshold": 2e-5, "order": 8}],
          "solver": {"cfl": 0.5, "steady": true, "epsilon": 6e-6, "residual": "zeroth", "max_steps": 200000},
          "reference": {"points": 100},
          "mask": {"x": [-0.05, 1.05], "y": [0.0, 1.0]}
        })");
    if (name == "euler2d-uq2")
        return json::parse(R"({
          "method": "readosipm",
          "problem": {"preset": "euler2d-uq2",
                      "mesh": {"x0": -1.0, "x1": 2.0, "y0": 0.0, "y1": 1.5, "nx": 48, "ny": 16,
                               "bump_height": 0.08, "bump_start": 0.0, "bump_end": 1.0,
                               "tags": ["wall", "farfield", "farfield", "farfield"]}},
          "ladder": {"orders": [1, 2, 3, 4, 5, 6, 7, 8, 9],
                     "quadrature": [{"family": "clenshaw_curtis", "level": 1}, {"family": "clenshaw_curtis", "level": 2},
                                    {"family": "clenshaw_curtis", "level": 3}, {"family": "clenshaw_curtis", "level": 3},
                                    {"family": "clenshaw_curtis", "level": 3}, {"family": "clenshaw_curtis", "level": 3},
                                    {"family": "clenshaw_curtis", "level": 4}, {"family": "clenshaw_curtis", "level": 4},
                                    {"family": "clenshaw_curtis", "level": 4}],
                     "delta_dec": 1e-5, "delta_inc": 1e-4},
          "retardation": [{"threshold": 1.5e-05, "order": 1}, {"threshold": 1.385714286e-05, "order": 2},
                          {"threshold": 1.271428571e-05, "order": 3}, {"threshold": 1.157142857e-05, "order": 4},
                          {"threshold": 1.042857143e-05, "order": 5}, {"threshold": 9.285714286e-06, "order": 6},
                          {"threshold": 8.142857143e-06, "order": 7}, {"threshold": 7e-06, "order": 8}],
          "solver": {"cfl": 0.5, "steady": true, "epsilon": 6e-6, "residual": "zeroth", "max_steps": 200000},
          "reference": {"points": 50},
          "mask": {"x": [-0.05, 1.05], "y": [0.0, 1.0]}
        })");
    if (name == "shocktube3d")
        return json::parse(R"({
          "method": "adaptive_ipm",
          "problem": {"preset": "shocktube3d",
                      "mesh": {"x0": 0.0, "x1": 0.2, "y0": -0.8, "y1": 3.0, "nx": 5, "ny": 200,
                               "tags": ["bottom", "wall", "top", "wall"]}},
          "ladder": {"orders": [1, 2, 3, 4],
                     "quadrature": [{"family": "clenshaw_curtis", "level": 1}, {"family": "clenshaw_curtis", "level": 2},
                                    {"family": "clenshaw_curtis", "level": 2}, {"family": "clenshaw_curtis", "level": 3}],
                     "delta_dec": 1e-4, "delta_inc": 1e-3},
          "solver": {"cfl": 0.5, "t_end": 2.0, "tau": 1e-7},
          "reference": {"points": 50}
        })");
    throw ConfigError("preset: unknown preset '" + name + "' (burgers-shock, sod1d, naca1d, euler2d-uq2, shocktube3d)");
}

inline std::vector<std::string> preset_names() { return {"burgers-shock", "sod1d", "naca1d", "euler2d-uq2", "shocktube3d"}; }

}  // namespace ipmuq::harness
