/// @file deterministic.hpp
/// @brief First-order finite-volume solver for one realization xi of the random problem.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/boundary.hpp"
#include "ipmuq/solver/problem.hpp"

namespace ipmuq {

template <ConservationModel Model>
class DeterministicSolver {
public:
    static constexpr int m = Model::m;
    using State = Eigen::Matrix<double, m, 1>;

    /// residual_component < 0 measures all components in the steady residual.
    DeterministicSolver(const Problem<Model>& problem, Eigen::VectorXd xi, double cfl = 0.5, int residual_component = -1)
        : problem_(&problem), xi_(std::move(xi)), cfl_(cfl), component_(residual_component) {
        problem.validate();
        const FvMesh& mesh = problem.mesh;
        h_min_ = *std::min_element(mesh.h.begin(), mesh.h.end());
        states_.resize(static_cast<std::size_t>(mesh.cells()));
        for (int j = 0; j < mesh.cells(); ++j)
            states_[static_cast<std::size_t>(j)] = problem.initial_cell(j, xi_);
        dirichlet_.resize(mesh.faces.size());
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            const Face& face = mesh.faces[f];
            if (face.boundary() && problem.boundary(face.tag).kind == BoundaryKind::dirichlet) {
                dirichlet_[f] = problem.boundary(face.tag).state(face.midpoint, xi_);
                boundary_speed_ = std::max(boundary_speed_, problem.model.max_wave_speed(dirichlet_[f]));
            }
        }
        fluxes_.resize(mesh.faces.size());
    }

    const std::vector<State>& states() const { return states_; }
    const Eigen::VectorXd& xi() const { return xi_; }
    double time() const { return time_; }
    int steps() const { return steps_; }

    double stable_dt() const {
        double s = boundary_speed_;
        for (const State& u : states_) s = std::max(s, problem_->model.max_wave_speed(u));
        return s > 0.0 ? cfl_ * h_min_ / s : std::numeric_limits<double>::infinity();
    }

    /// Advance by dt; returns sum_j |K_j| ||u_j^{n+1} - u_j^n||.
    double step(double dt) {
        const FvMesh& mesh = problem_->mesh;
        const Model& model = problem_->model;
        const FluxContext ctx{h_min_ / dt};
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            const Face& face = mesh.faces[f];
            const State& ul = states_[static_cast<std::size_t>(face.left)];
            State ur;
            if (face.boundary()) ur = ghost_state<m>(ul, problem_->boundary(face.tag).kind, face.normal, dirichlet_[f]);
            else ur = states_[static_cast<std::size_t>(face.right)];
            fluxes_[f] = face.length * model.numerical_flux(ul, ur, face.normal, ctx);
        }
        double residual = 0.0;
        for (int j = 0; j < mesh.cells(); ++j) {
            const auto idx = static_cast<std::size_t>(j);
            State next = states_[idx];
            const double scale = dt / mesh.volume[idx];
            for (int f : mesh.cell_faces[idx]) {
                const auto fi = static_cast<std::size_t>(f);
                next -= (mesh.faces[fi].left == j ? scale : -scale) * fluxes_[fi];
            }
            if (!model.admissible(next)) throw AdmissibilityError("deterministic update produced an inadmissible state in cell " + std::to_string(j), j, -1);
            const State diff = next - states_[idx];
            residual += mesh.volume[idx] * (component_ < 0 ? diff.norm() : std::abs(diff(component_)));
            states_[idx] = next;
        }
        time_ += dt;
        ++steps_;
        return residual;
    }

private:
    const Problem<Model>* problem_;
    Eigen::VectorXd xi_;
    double cfl_;
    int component_;
    double h_min_ = 0.0;
    double boundary_speed_ = 0.0;
    double time_ = 0.0;
    int steps_ = 0;
    std::vector<State> states_;
    std::vector<State> dirichlet_;
    std::vector<State> fluxes_;
};

}  // namespace ipmuq
