/// @file model.hpp
/// @brief Interface shared by the deterministic conservation laws.
#pragma once

#include <Eigen/Dense>

#include <concepts>

namespace ipmuq {

/// Unit normal of a face. One-dimensional models read only the first entry.
using Normal = Eigen::Vector2d;

/// Per-step data some numerical fluxes need from the solver.
struct FluxContext {
    double dx_over_dt = 0.0;
};

template <class Mdl>
concept ConservationModel = requires(const Mdl model, const Eigen::Matrix<double, Mdl::m, 1>& u, const Normal& n, const FluxContext& ctx) {
    { Mdl::m } -> std::convertible_to<int>;
    { Mdl::dim } -> std::convertible_to<int>;
    { model.physical_flux(u, n) } -> std::convertible_to<Eigen::Matrix<double, Mdl::m, 1>>;
    { model.numerical_flux(u, u, n, ctx) } -> std::convertible_to<Eigen::Matrix<double, Mdl::m, 1>>;
    { model.max_wave_speed(u, n) } -> std::convertible_to<double>;
    { model.max_wave_speed(u) } -> std::convertible_to<double>;
    { model.admissible(u) } -> std::convertible_to<bool>;
};

}  // namespace ipmuq
