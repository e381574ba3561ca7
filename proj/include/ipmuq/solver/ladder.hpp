/// @file ladder.hpp
/// @brief Refinement levels, the smoothness indicator and retardation schedules.
///
/// Levels are 0-based: level 0 is the coarsest truncation order.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ipmuq/closure/dual_solver.hpp"
#include "ipmuq/errors.hpp"
#include "ipmuq/random_space/basis.hpp"
#include "ipmuq/random_space/quadrature.hpp"

namespace ipmuq {

struct LadderLevel {
    int degree = 0;
    QuadratureRule rule;
};

struct RefinementLadder {
    BasisSet basis;  // basis of the finest degree; coarser levels use its leading functions
    std::vector<LadderLevel> levels;
    double delta_dec = 0.0;  // S < delta_dec: coarsen
    double delta_inc = 0.0;  // S > delta_inc: refine

    int size() const { return static_cast<int>(levels.size()); }
    int top() const { return size() - 1; }
    int degree(int level) const { return levels[static_cast<std::size_t>(level)].degree; }
    int moments(int level) const { return static_cast<int>(basis_size(degree(level), basis.dim())); }
    const QuadratureRule& rule(int level) const { return levels[static_cast<std::size_t>(level)].rule; }

    /// Throws ConfigError unless degrees increase strictly, thresholds are
    /// ordered and, for several levels, the rules are nested.
    void validate() const {
        if (levels.empty()) throw ConfigError("ladder needs at least one level");
        if (basis.max_degree() < levels.back().degree) throw ConfigError("ladder basis is coarser than its finest level");
        for (int l = 0; l < size(); ++l) {
            if (rule(l).points().cols() != basis.dim()) throw ConfigError("ladder rule dimension does not match the basis");
            if (l > 0 && degree(l) <= degree(l - 1)) throw ConfigError("ladder degrees must increase strictly");
        }
        if (size() > 1) {
            if (degree(0) < 1) throw ConfigError("adaptive ladders need degree >= 1 on the coarsest level");
            if (!(delta_dec > 0.0) || !(delta_inc > 0.0) || delta_dec > delta_inc)
                throw ConfigError("refinement thresholds need 0 < delta_dec <= delta_inc");
            for (int l = 1; l < size(); ++l) {
                try {
                    nest_indices(rule(l - 1), rule(l));
                } catch (const DomainError& e) {
                    throw ConfigError(std::string("adaptive ladders need nested rules: ") + e.what());
                }
            }
        }
    }
};

/// Single-level ladder (non-adaptive runs).
inline RefinementLadder single_level_ladder(int degree, int dim, QuadratureRule rule) {
    RefinementLadder ladder;
    ladder.basis = BasisSet(degree, dim);
    ladder.levels.push_back({degree, std::move(rule)});
    return ladder;
}

/// Energy fraction of the first conserved variable in the top degree band of
/// `level`: sum over M_{l-1} < |i| <= M_l of u_i0^2 over sum_{|i| <= M_l} u_i0^2.
/// On level 0 the band is the single top degree M_0. A zero field gives 0.
template <int M>
double smoothness_indicator(const MomentMatrix<M>& moments, const RefinementLadder& ladder, int level) {
    const int n = ladder.moments(level);
    const int lower_degree = level > 0 ? ladder.degree(level - 1) : ladder.degree(level) - 1;
    const int n_lower = static_cast<int>(basis_size(lower_degree, ladder.basis.dim()));
    if (moments.rows() < n) throw DomainError("moment vector shorter than its level");
    const auto col = moments.col(0);
    const double total = col.head(n).squaredNorm();
    if (total == 0.0) return 0.0;
    return col.segment(n_lower, n - n_lower).squaredNorm() / total;
}

/// One level change per cell: coarsen below delta_dec (floor 0), refine above
/// delta_inc (capped by max_level).
inline int adapt_level(int level, double indicator, const RefinementLadder& ladder, int max_level) {
    int next = level;
    if (indicator < ladder.delta_dec) next = level - 1;
    else if (indicator > ladder.delta_inc) next = level + 1;
    return std::clamp(next, 0, std::max(0, std::min(max_level, ladder.top())));
}

inline std::vector<int> adapt_levels(const std::vector<int>& levels, const std::vector<double>& indicators, const RefinementLadder& ladder,
                                     int max_level) {
    std::vector<int> out(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) out[j] = adapt_level(levels[j], indicators[j], ladder, max_level);
    return out;
}

/// Refinement retardation. Stage l caps the level at `caps[l]` until the
/// steady residual drops below `thresholds[l]`; after the last stage the cap
/// is the finest ladder level. At most one stage advances per step.
struct RetardationSchedule {
    std::vector<double> thresholds;
    std::vector<int> caps;

    void validate(const RefinementLadder& ladder) const {
        if (thresholds.size() != caps.size()) throw ConfigError("retardation schedule needs one cap per threshold");
        for (std::size_t i = 0; i < caps.size(); ++i) {
            if (caps[i] < 0 || caps[i] > ladder.top()) throw ConfigError("retardation cap outside the ladder");
            if (i > 0 && (thresholds[i] > thresholds[i - 1] || caps[i] < caps[i - 1]))
                throw ConfigError("retardation thresholds must decrease and caps must not decrease");
        }
    }
    int cap(std::size_t stage, const RefinementLadder& ladder) const { return stage < caps.size() ? caps[stage] : ladder.top(); }
};

/// Level index whose degree equals `degree`; ConfigError if absent.
inline int level_of_degree(const RefinementLadder& ladder, int degree) {
    for (int l = 0; l < ladder.size(); ++l)
        if (ladder.degree(l) == degree) return l;
    throw ConfigError("no ladder level has degree " + std::to_string(degree));
}

/// Expectation and variance per conserved variable: E = u_0, Var = sum_{i>=1} u_i^2.
template <int M>
std::pair<Eigen::Matrix<double, 1, M>, Eigen::Matrix<double, 1, M>> moments_to_quantities(const MomentMatrix<M>& moments) {
    Eigen::Matrix<double, 1, M> mean = moments.row(0);
    Eigen::Matrix<double, 1, M> var = moments.bottomRows(moments.rows() - 1).colwise().squaredNorm();
    return {mean, var};
}

}  // namespace ipmuq
