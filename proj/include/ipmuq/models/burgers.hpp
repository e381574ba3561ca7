/// @file burgers.hpp
/// @brief Inviscid Burgers equation u_t + (u^2/2)_x = 0.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "ipmuq/models/model.hpp"

namespace ipmuq {

struct BurgersModel {
    static constexpr int m = 1;
    static constexpr int dim = 1;
    using State = Eigen::Matrix<double, 1, 1>;

    std::string name() const { return "burgers"; }

    State physical_flux(const State& u, const Normal& n) const { return State(0.5 * u(0) * u(0) * n(0)); }

    /// Lax-Friedrichs: (f(u_l) + f(u_r)) / 2 - dx/(2 dt) (u_r - u_l).
    State numerical_flux(const State& ul, const State& ur, const Normal& n, const FluxContext& ctx) const {
        return State(0.5 * (physical_flux(ul, n)(0) + physical_flux(ur, n)(0)) - 0.5 * ctx.dx_over_dt * (ur(0) - ul(0)));
    }

    double max_wave_speed(const State& u, const Normal& n) const { return std::abs(u(0) * n(0)); }
    double max_wave_speed(const State& u) const { return std::abs(u(0)); }
    bool admissible(const State& u) const { return std::isfinite(u(0)); }
};

}  // namespace ipmuq
