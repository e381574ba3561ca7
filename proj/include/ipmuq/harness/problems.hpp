/// @file problems.hpp
/// @brief Problem builders behind the presets.
///
/// Random inputs are xi in [-1, 1]^p; a parameter uniform on [a, b] is
/// (a + b)/2 + (b - a)/2 xi_i.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "ipmuq/mesh/boundary.hpp"
#include "ipmuq/mesh/mesh.hpp"
#include "ipmuq/models/burgers.hpp"
#include "ipmuq/models/euler.hpp"
#include "ipmuq/solver/problem.hpp"

namespace ipmuq::problems {

inline double uniform(double a, double b, double xi) { return 0.5 * (a + b) + 0.5 * (b - a) * xi; }

constexpr double kPi = 3.14159265358979323846;

/// Exact average over 1D cell `cell` of a step from `left` (x < position) to `right`.
template <class State>
State step_average(const FvMesh& mesh, int cell, double position, const State& left, const State& right) {
    const double c = mesh.centroid[static_cast<std::size_t>(cell)].x(), dx = mesh.volume[static_cast<std::size_t>(cell)];
    const double theta = std::clamp((position - (c - 0.5 * dx)) / dx, 0.0, 1.0);
    return (theta * left + (1.0 - theta) * right).eval();
}

/// Burgers Riemann problem on [0, 1] with the jump from u_l to u_r at
/// x0 + spread xi, outflow boundaries.
inline Problem<BurgersModel> burgers_shock(int nx, double x0 = 0.3, double spread = 0.05, double ul = 1.0, double ur = 0.0) {
    Problem<BurgersModel> p;
    p.mesh = make_mesh_1d(0.0, 1.0, nx);
    p.boundaries.assign(2, {BoundaryKind::outflow, {}});
    p.initial = [=](const Point2& x, const Eigen::VectorXd& xi) {
        return BurgersModel::State(x.x() < x0 + spread * xi(0) ? ul : ur);
    };
    p.initial_average = [mesh = p.mesh, x0, spread, ul, ur](int j, const Eigen::VectorXd& xi) {
        return step_average(mesh, j, x0 + spread * xi(0), BurgersModel::State(ul), BurgersModel::State(ur));
    };
    return p;
}

/// Burgers on the periodic unit interval with a sine profile of random amplitude.
inline Problem<BurgersModel> burgers_periodic(int nx, double amplitude = 0.5, double spread = 0.2) {
    Problem<BurgersModel> p;
    p.mesh = make_mesh_1d(0.0, 1.0, nx, true);
    p.initial = [=](const Point2& x, const Eigen::VectorXd& xi) {
        return BurgersModel::State(0.25 + amplitude * (1.0 + spread * xi(0)) * std::sin(2.0 * kPi * x.x()));
    };
    return p;
}

/// Sod tube on [0, 1] with the interface at 0.5 + spread xi, outflow boundaries.
inline Problem<EulerModel<1>> sod1d(int nx, double spread = 0.0, double gamma = 1.4) {
    Problem<EulerModel<1>> p;
    p.model = EulerModel<1>(gamma);
    p.mesh = make_mesh_1d(0.0, 1.0, nx);
    p.boundaries.assign(2, {BoundaryKind::outflow, {}});
    const EulerModel<1> model(gamma);
    using V = Eigen::Matrix<double, 1, 1>;
    const auto left = model.conserved(1.0, V(0.0), 1.0);
    const auto right = model.conserved(0.125, V(0.0), 0.1);
    p.initial = [=](const Point2& x, const Eigen::VectorXd& xi) { return x.x() < 0.5 + spread * (xi.size() ? xi(0) : 0.0) ? left : right; };
    p.initial_average = [mesh = p.mesh, left, right, spread](int j, const Eigen::VectorXd& xi) {
        return step_average(mesh, j, 0.5 + spread * (xi.size() ? xi(0) : 0.0), left, right);
    };
    return p;
}

/// Supersonic 1D flow with a random inflow density rho = 1 + spread xi at
/// Mach `mach`; the initial state is the mean inflow slowed by `ic_velocity_ratio`.
/// The steady state is the inflow state everywhere.
inline Problem<EulerModel<1>> supersonic_inflow(int nx, double mach = 2.0, double spread = 0.1, double ic_velocity_ratio = 0.8, double gamma = 1.4) {
    Problem<EulerModel<1>> p;
    p.model = EulerModel<1>(gamma);
    p.mesh = make_mesh_1d(0.0, 1.0, nx);
    const EulerModel<1> model(gamma);
    using V = Eigen::Matrix<double, 1, 1>;
    const double v = mach * std::sqrt(gamma);  // p = rho = 1 gives c = sqrt(gamma)
    p.boundaries.push_back({BoundaryKind::dirichlet, [=](const Point2&, const Eigen::VectorXd& xi) {
                                return model.conserved(1.0 + spread * xi(0), V(v), 1.0);
                            }});
    p.boundaries.push_back({BoundaryKind::outflow, {}});
    p.initial = [=](const Point2&, const Eigen::VectorXd&) { return model.conserved(1.0, V(ic_velocity_ratio * v), 1.0); };
    return p;
}

/// Far-field state from Mach number, flow angle (degrees), pressure and temperature.
inline EulerModel<2>::State farfield_state(const EulerModel<2>& model, double mach, double angle_deg, double pressure, double temperature,
                                           double gas_constant = 287.87) {
    const double rho = pressure / (gas_constant * temperature);
    const double speed = mach * std::sqrt(model.gamma * pressure / rho);
    const double a = angle_deg * kPi / 180.0;
    return model.conserved(rho, Eigen::Vector2d(speed * std::cos(a), speed * std::sin(a)), pressure);
}

/// Desk-scale stand-in for the airfoil: a channel with a smooth bump on a slip
/// wall and far-field data on the other sides.
inline RectangleSpec bump_channel_spec(int nx = 48, int ny = 16) {
    RectangleSpec spec{-1.0, 2.0, 0.0, 1.5, nx, ny, 0.08, 0.0, 1.0, {"wall", "farfield", "farfield", "farfield"}};
    return spec;
}

namespace detail {
template <class StateFn>
Problem<EulerModel<2>> farfield_problem(FvMesh mesh, StateFn state) {
    Problem<EulerModel<2>> p;
    p.mesh = std::move(mesh);
    for (const auto& tag : p.mesh.tags) {
        if (tag == "wall") p.boundaries.push_back({BoundaryKind::slip, {}});
        else p.boundaries.push_back({BoundaryKind::dirichlet, state});
    }
    p.initial = state;
    return p;
}
}  // namespace detail

/// Angle of attack uniform on [angle_min, angle_max] degrees; the initial
/// state equals the far field. Tags named "wall" are slip walls.
inline Problem<EulerModel<2>> naca1d(FvMesh mesh, double angle_min = 0.75, double angle_max = 1.75, double mach = 0.8, double pressure = 101325.0,
                                     double temperature = 273.15) {
    const EulerModel<2> model(1.4);
    return detail::farfield_problem(std::move(mesh), [=](const Point2&, const Eigen::VectorXd& xi) {
        return farfield_state(model, mach, uniform(angle_min, angle_max, xi(0)), pressure, temperature);
    });
}

/// Pressure (xi_0) and Mach number (xi_1) uniform on the given intervals.
inline Problem<EulerModel<2>> euler2d_uq2(FvMesh mesh, double p_min = 100325.0, double p_max = 102325.0, double mach_min = 0.775,
                                          double mach_max = 0.825, double angle = 1.25, double temperature = 273.15) {
    const EulerModel<2> model(1.4);
    return detail::farfield_problem(std::move(mesh), [=](const Point2&, const Eigen::VectorXd& xi) {
        return farfield_state(model, uniform(mach_min, mach_max, xi(1)), angle, uniform(p_min, p_max, xi(0)), temperature);
    });
}

/// Straight vertical tube, slip side walls, Dirichlet ends.
inline RectangleSpec shock_tube_spec(int nx = 5, int ny = 200) {
    return RectangleSpec{0.0, 0.2, -0.8, 3.0, nx, ny, 0.0, 0.0, 0.0, {"bottom", "wall", "top", "wall"}};
}

struct ShockTubeData {
    double rho_upper = 1.289;  // p / (R T) with p = 101325 Pa, T = 273.15 K, R = 287.87
    double energy_upper = 1.0;
    double rho_lower_min = 1.189, rho_lower_max = 1.389;
    double energy_lower_min = 0.2, energy_lower_max = 0.4;
    double shock_min = 1.0, shock_max = 1.2;
};

/// Gas at rest; below y_shock(xi_2) the density xi_0 and energy xi_1 are
/// uncertain. The ends hold the mean states.
inline Problem<EulerModel<2>> shocktube3d(FvMesh mesh, const ShockTubeData& d = {}) {
    Problem<EulerModel<2>> p;
    p.mesh = std::move(mesh);
    auto state = [](double rho, double energy) { return EulerModel<2>::State(rho, 0.0, 0.0, energy); };
    const auto upper = state(d.rho_upper, d.energy_upper);
    const auto lower_mean = state(0.5 * (d.rho_lower_min + d.rho_lower_max), 0.5 * (d.energy_lower_min + d.energy_lower_max));
    for (const auto& tag : p.mesh.tags) {
        if (tag == "wall") p.boundaries.push_back({BoundaryKind::slip, {}});
        else if (tag == "top") p.boundaries.push_back({BoundaryKind::dirichlet, [=](const Point2&, const Eigen::VectorXd&) { return upper; }});
        else p.boundaries.push_back({BoundaryKind::dirichlet, [=](const Point2&, const Eigen::VectorXd&) { return lower_mean; }});
    }
    p.initial = [=](const Point2& x, const Eigen::VectorXd& xi) {
        if (x.y() > uniform(d.shock_min, d.shock_max, xi(2))) return upper;
        return state(uniform(d.rho_lower_min, d.rho_lower_max, xi(0)), uniform(d.energy_lower_min, d.energy_lower_max, xi(1)));
    };
    return p;
}

}  // namespace ipmuq::problems
