/// @file problem.hpp
/// @brief A random conservation-law problem: model, mesh, boundary data and initial state.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/boundary.hpp"
#include "ipmuq/mesh/mesh.hpp"
#include "ipmuq/models/model.hpp"

namespace ipmuq {

template <ConservationModel Model>
struct Problem {
    using model_type = Model;
    static constexpr int m = Model::m;
    using State = Eigen::Matrix<double, m, 1>;
    /// u(x, xi) for initial and boundary data.
    using Field = std::function<State(const Point2&, const Eigen::VectorXd&)>;
    /// Exact cell average of the initial state: (cell, xi) -> state.
    using CellField = std::function<State(int, const Eigen::VectorXd&)>;

    Model model;
    FvMesh mesh;
    std::vector<BoundaryCondition<m>> boundaries;  // indexed by mesh tag
    Field initial;
    CellField initial_average;  // optional; overrides the quadrature average

    State initial_cell(int cell, const Eigen::VectorXd& xi) const;

    const BoundaryCondition<m>& boundary(int tag) const { return boundaries[static_cast<std::size_t>(tag)]; }

    void validate() const {
        if (!initial) throw ConfigError("problem has no initial condition");
        if (boundaries.size() < mesh.tags.size()) throw ConfigError("every mesh boundary tag needs a boundary condition");
        for (std::size_t t = 0; t < mesh.tags.size(); ++t)
            if (boundaries[t].kind == BoundaryKind::dirichlet && !boundaries[t].state)
                throw ConfigError("Dirichlet boundary '" + mesh.tags[t] + "' has no state");
    }
};

/// Cell averages of f(., xi): 3-point Gauss in 1D, centroid value in 2D.
template <class Fn>
auto cell_average(const FvMesh& mesh, int cell, const Fn& f) {
    const Point2 c = mesh.centroid[static_cast<std::size_t>(cell)];
    if (mesh.dim != 1) return f(c);
    const double half = 0.5 * mesh.volume[static_cast<std::size_t>(cell)];
    const double offset = half * 0.7745966692414834;  // sqrt(3/5)
    return ((5.0 / 18.0) * f(Point2(c.x() - offset, 0.0)) + (8.0 / 18.0) * f(c) + (5.0 / 18.0) * f(Point2(c.x() + offset, 0.0))).eval();
}

template <ConservationModel Model>
typename Problem<Model>::State Problem<Model>::initial_cell(int cell, const Eigen::VectorXd& xi) const {
    if (initial_average) return initial_average(cell, xi);
    return cell_average(mesh, cell, [&](const Point2& x) { return initial(x, xi); });
}

}  // namespace ipmuq
