/// @file riemann.hpp
/// @brief Exact self-similar Riemann solutions for Burgers and 1D Euler.
#pragma once

#include <algorithm>
#include <cmath>

#include "ipmuq/errors.hpp"
#include "ipmuq/models/euler.hpp"

namespace ipmuq {

/// Solution of the Burgers Riemann problem at similarity coordinate x/t.
inline double exact_riemann_burgers(double ul, double ur, double x_over_t) {
    if (ul > ur) return x_over_t < 0.5 * (ul + ur) ? ul : ur;
    if (x_over_t <= ul) return ul;
    if (x_over_t >= ur) return ur;
    return x_over_t;
}

/// Exact Euler Riemann solver (two nonlinear waves and a contact), states in
/// conserved variables. Throws DomainError if the data generate vacuum.
inline EulerModel<1>::State exact_riemann_euler_1d(const EulerModel<1>::State& left, const EulerModel<1>::State& right, double x_over_t,
                                                   double gamma = 1.4) {
    const EulerModel<1> model(gamma);
    if (!model.admissible(left) || !model.admissible(right)) throw DomainError("Riemann data must have positive density and pressure");
    const double rl = left(0), ul = left(1) / rl, pl = model.pressure(left), cl = model.sound_speed(left);
    const double rr = right(0), ur = right(1) / rr, pr = model.pressure(right), cr = model.sound_speed(right);
    const double g = gamma;
    if (2.0 / (g - 1.0) * (cl + cr) <= ur - ul) throw DomainError("Riemann data generate vacuum");

    // Pressure function of one side and its derivative.
    auto side = [g](double p, double rk, double pk, double ck, double& deriv) {
        if (p > pk) {
            const double a = 2.0 / ((g + 1.0) * rk), b = (g - 1.0) / (g + 1.0) * pk;
            const double root = std::sqrt(a / (p + b));
            deriv = root * (1.0 - 0.5 * (p - pk) / (b + p));
            return (p - pk) * root;
        }
        const double ratio = p / pk;
        deriv = std::pow(ratio, -(g + 1.0) / (2.0 * g)) / (rk * ck);
        return 2.0 * ck / (g - 1.0) * (std::pow(ratio, (g - 1.0) / (2.0 * g)) - 1.0);
    };

    // Two-rarefaction guess, then Newton on f_l(p) + f_r(p) + (u_r - u_l) = 0.
    const double z = (g - 1.0) / (2.0 * g);
    double p = std::pow((cl + cr - 0.5 * (g - 1.0) * (ur - ul)) / (cl / std::pow(pl, z) + cr / std::pow(pr, z)), 1.0 / z);
    p = std::max(p, 1e-12);
    for (int it = 0; it < 100; ++it) {
        double dl = 0.0, dr = 0.0;
        const double f = side(p, rl, pl, cl, dl) + side(p, rr, pr, cr, dr) + ur - ul;
        double next = p - f / (dl + dr);
        if (next < 0.0) next = 0.5 * p;
        const double change = 2.0 * std::abs(next - p) / (next + p);
        p = next;
        if (change < 1e-14) break;
    }
    double dl = 0.0, dr = 0.0;
    const double u_star = 0.5 * (ul + ur) + 0.5 * (side(p, rr, pr, cr, dr) - side(p, rl, pl, cl, dl));

    const double s = x_over_t;
    double rho = 0.0, u = 0.0, pres = 0.0;
    const double gm = (g - 1.0) / (g + 1.0);
    if (s <= u_star) {
        if (p > pl) {
            const double shock = ul - cl * std::sqrt((g + 1.0) / (2.0 * g) * p / pl + (g - 1.0) / (2.0 * g));
            if (s <= shock) {
                rho = rl, u = ul, pres = pl;
            } else {
                rho = rl * (p / pl + gm) / (gm * p / pl + 1.0), u = u_star, pres = p;
            }
        } else {
            const double c_star = cl * std::pow(p / pl, z);
            const double head = ul - cl, tail = u_star - c_star;
            if (s <= head) {
                rho = rl, u = ul, pres = pl;
            } else if (s >= tail) {
                rho = rl * std::pow(p / pl, 1.0 / g), u = u_star, pres = p;
            } else {
                u = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * ul + s);
                const double c = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * (ul - s));
                rho = rl * std::pow(c / cl, 2.0 / (g - 1.0));
                pres = pl * std::pow(c / cl, 2.0 * g / (g - 1.0));
            }
        }
    } else {
        if (p > pr) {
            const double shock = ur + cr * std::sqrt((g + 1.0) / (2.0 * g) * p / pr + (g - 1.0) / (2.0 * g));
            if (s >= shock) {
                rho = rr, u = ur, pres = pr;
            } else {
                rho = rr * (p / pr + gm) / (gm * p / pr + 1.0), u = u_star, pres = p;
            }
        } else {
            const double c_star = cr * std::pow(p / pr, z);
            const double head = ur + cr, tail = u_star + c_star;
            if (s >= head) {
                rho = rr, u = ur, pres = pr;
            } else if (s <= tail) {
                rho = rr * std::pow(p / pr, 1.0 / g), u = u_star, pres = p;
            } else {
                u = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * ur + s);
                const double c = 2.0 / (g + 1.0) * (cr - 0.5 * (g - 1.0) * (ur - s));
                rho = rr * std::pow(c / cr, 2.0 / (g - 1.0));
                pres = pr * std::pow(c / cr, 2.0 * g / (g - 1.0));
            }
        }
    }
    return model.conserved(rho, Eigen::Matrix<double, 1, 1>(u), pres);
}

}  // namespace ipmuq
