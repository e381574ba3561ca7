/// @file boundary.hpp
/// @brief Boundary conditions applied pointwise in the random space.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "ipmuq/errors.hpp"
#include "ipmuq/mesh/mesh.hpp"
#include "ipmuq/models/model.hpp"

namespace ipmuq {

enum class BoundaryKind {
    outflow,    ///< ghost = interior state
    dirichlet,  ///< ghost = prescribed state, may depend on x and xi
    slip,       ///< ghost = interior state with the normal velocity mirrored
};

inline BoundaryKind boundary_kind_from_string(const std::string& s) {
    if (s == "outflow") return BoundaryKind::outflow;
    if (s == "dirichlet" || s == "farfield") return BoundaryKind::dirichlet;
    if (s == "slip" || s == "wall") return BoundaryKind::slip;
    throw ConfigError("unknown boundary kind '" + s + "'");
}

template <int M>
struct BoundaryCondition {
    using State = Eigen::Matrix<double, M, 1>;
    BoundaryKind kind = BoundaryKind::outflow;
    /// Prescribed state for Dirichlet boundaries, evaluated at the face midpoint.
    std::function<State(const Point2& x, const Eigen::VectorXd& xi)> state;
};

/// Ghost state for one boundary face. Slip requires the Euler layout
/// (rho, momentum..., energy), i.e. M >= 3.
template <int M>
Eigen::Matrix<double, M, 1> ghost_state(const Eigen::Matrix<double, M, 1>& interior, BoundaryKind kind, const Normal& n,
                                        const Eigen::Matrix<double, M, 1>& farfield) {
    switch (kind) {
        case BoundaryKind::outflow:
            return interior;
        case BoundaryKind::dirichlet:
            return farfield;
        case BoundaryKind::slip: {
            if constexpr (M < 3) {
                throw ConfigError("slip boundaries need a momentum component");
            } else {
                constexpr int d = M - 2;
                Eigen::Matrix<double, M, 1> ghost = interior;
                double mn = 0.0;
                for (int i = 0; i < d; ++i) mn += interior(1 + i) * n(i);
                for (int i = 0; i < d; ++i) ghost(1 + i) -= 2.0 * mn * n(i);
                return ghost;
            }
        }
    }
    return interior;
}

}  // namespace ipmuq
