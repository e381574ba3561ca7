/// @file euler.hpp
/// @brief Compressible Euler equations in D = 1 or 2 space dimensions.
///
/// State (rho, rho v_1..rho v_D, rho e) with pressure
/// p = (gamma - 1) (rho e - rho |v|^2 / 2). The numerical flux is Rusanov's
/// local Lax-Friedrichs flux along the face normal with speed |v.n| + c.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "ipmuq/errors.hpp"
#include "ipmuq/models/model.hpp"

namespace ipmuq {

template <int D>
struct EulerModel {
    static_assert(D == 1 || D == 2, "Euler model supports one or two space dimensions");
    static constexpr int dim = D;
    static constexpr int m = D + 2;
    using State = Eigen::Matrix<double, m, 1>;

    double gamma = 1.4;

    explicit EulerModel(double gamma_ = 1.4) : gamma(gamma_) {
        if (!(gamma > 1.0)) throw DomainError("Euler model requires gamma > 1");
    }

    std::string name() const { return D == 1 ? "euler1d" : "euler2d"; }

    double pressure(const State& u) const {
        double q = 0.0;
        for (int i = 1; i <= D; ++i) q += u(i) * u(i);
        return (gamma - 1.0) * (u(m - 1) - 0.5 * q / u(0));
    }
    double sound_speed(const State& u) const { return std::sqrt(gamma * pressure(u) / u(0)); }
    bool admissible(const State& u) const { return u(0) > 0.0 && pressure(u) > 0.0 && u.allFinite(); }

    /// Conserved state from density, velocity and pressure.
    State conserved(double rho, const Eigen::Matrix<double, D, 1>& v, double p) const {
        State u;
        u(0) = rho;
        for (int i = 0; i < D; ++i) u(1 + i) = rho * v(i);
        u(m - 1) = p / (gamma - 1.0) + 0.5 * rho * v.squaredNorm();
        return u;
    }

    double normal_velocity(const State& u, const Normal& n) const {
        double vn = 0.0;
        for (int i = 0; i < D; ++i) vn += u(1 + i) * n(i);
        return vn / u(0);
    }

    State physical_flux(const State& u, const Normal& n) const {
        const double p = pressure(u);
        const double vn = normal_velocity(u, n);
        State f;
        f(0) = u(0) * vn;
        for (int i = 0; i < D; ++i) f(1 + i) = u(1 + i) * vn + p * n(i);
        f(m - 1) = (u(m - 1) + p) * vn;
        return f;
    }

    double max_wave_speed(const State& u, const Normal& n) const { return std::abs(normal_velocity(u, n)) + sound_speed(u); }
    double max_wave_speed(const State& u) const {
        double q = 0.0;
        for (int i = 1; i <= D; ++i) q += u(i) * u(i);
        return std::sqrt(q) / u(0) + sound_speed(u);
    }

    State numerical_flux(const State& ul, const State& ur, const Normal& n, const FluxContext&) const {
        if (!admissible(ul) || !admissible(ur)) throw AdmissibilityError("Euler flux received a state with non-positive density or pressure");
        const double s = std::max(max_wave_speed(ul, n), max_wave_speed(ur, n));
        return 0.5 * (physical_flux(ul, n) + physical_flux(ur, n)) - 0.5 * s * (ur - ul);
    }
};

}  // namespace ipmuq
