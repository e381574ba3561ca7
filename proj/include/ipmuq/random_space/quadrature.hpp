/// @file quadrature.hpp
/// @brief Univariate, tensorized and Smolyak sparse quadrature rules on [-1,1]^p.
///
/// A QuadratureRule stores integration weights w_k (summing to 2^p) together
/// with the uniform density value f(xi_k) = 2^-p, so that the bracket
/// <h>_Q = sum_k w_k h(xi_k) f(xi_k) of the constant 1 is one.
///
/// Clenshaw-Curtis level L has 1 point for L = 0 and 2^L + 1 points for
/// L >= 1, so levels 2/3/4 carry 5/9/17 points. Sparse-grid levels use the same
/// 0-based univariate convention.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ipmuq/errors.hpp"

namespace ipmuq {

enum class QuadratureFamily { gauss_legendre, gauss_lobatto, clenshaw_curtis };

inline std::string to_string(QuadratureFamily family) {
    switch (family) {
        case QuadratureFamily::gauss_legendre: return "gauss_legendre";
        case QuadratureFamily::gauss_lobatto: return "gauss_lobatto";
        case QuadratureFamily::clenshaw_curtis: return "clenshaw_curtis";
    }
    return "unknown";
}

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;  // sums to 2
};

namespace detail {

// Legendre P_n and P_{n-1} at x (unnormalized).
inline void legendre_pair(int n, double x, double& pn, double& pn1) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        pn = 1.0;
        pn1 = 0.0;
        return;
    }
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    pn = p1;
    pn1 = p0;
}

// Mirror the lower half onto the upper half so that x_{n-1-j} = -x_j bit-exactly.
inline void symmetrize(Rule1D& rule) {
    const std::size_t n = rule.x.size();
    for (std::size_t j = 0; j < n / 2; ++j) {
        rule.x[n - 1 - j] = -rule.x[j];
        const double w = 0.5 * (rule.w[j] + rule.w[n - 1 - j]);
        rule.w[j] = w;
        rule.w[n - 1 - j] = w;
    }
    if (n % 2 == 1) rule.x[n / 2] = 0.0;
}

}  // namespace detail

/// Gauss-Legendre rule with n points; exact for polynomials of degree 2n-1.
inline Rule1D gauss_legendre_1d(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one point");
    Rule1D rule{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pn = 0.0, pn1 = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            detail::legendre_pair(n, x, pn, pn1);
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        detail::legendre_pair(n, x, pn, pn1);
        dp = n * (x * pn - pn1) / (x * x - 1.0);
        rule.x[static_cast<std::size_t>(i)] = x;
        rule.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    detail::symmetrize(rule);
    return rule;
}

/// Gauss-Lobatto rule with n >= 2 points (endpoints included); exact to degree 2n-3.
inline Rule1D gauss_lobatto_1d(int n) {
    if (n < 2) throw DomainError("Gauss-Lobatto rule needs at least two points");
    const int order = n - 1;
    Rule1D rule{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(std::numbers::pi * i / order);
        double pn = 0.0, pn1 = 0.0;
        if (i != 0 && i != order) {
            for (int it = 0; it < 100; ++it) {
                detail::legendre_pair(order, x, pn, pn1);
                const double dx = (x * pn - pn1) / (n * pn);
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
        }
        detail::legendre_pair(order, x, pn, pn1);
        rule.x[static_cast<std::size_t>(i)] = x;
        rule.w[static_cast<std::size_t>(i)] = 2.0 / (order * n * pn * pn);
    }
    detail::symmetrize(rule);
    return rule;
}

/// Number of Clenshaw-Curtis points at level L: 1, 3, 5, 9, 17, ...
inline int clenshaw_curtis_points(int level) {
    if (level < 0 || level > 20) throw DomainError("Clenshaw-Curtis level must be in [0, 20]");
    return level == 0 ? 1 : (1 << level) + 1;
}

/// Clenshaw-Curtis rule at a level. Points -cos(pi j/(n-1)) are computed so that
/// level L is a bit-exact subset of level L+1 (index j maps to 2j).
inline Rule1D clenshaw_curtis_1d(int level) {
    const int n = clenshaw_curtis_points(level);
    if (n == 1) return Rule1D{{0.0}, {2.0}};
    Rule1D rule{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    const int segments = n - 1;
    for (int j = 0; j < n; ++j) {
        const double theta = std::numbers::pi * j / segments;
        rule.x[static_cast<std::size_t>(j)] = -std::cos(theta);
        double sum = 0.0;
        for (int k = 1; k <= segments / 2; ++k) {
            const double b = (2 * k == segments) ? 1.0 : 2.0;
            sum += b / (4.0 * k * k - 1.0) * std::cos(2.0 * k * theta);
        }
        const double c = (j == 0 || j == segments) ? 1.0 : 2.0;
        rule.w[static_cast<std::size_t>(j)] = c / segments * (1.0 - sum);
    }
    detail::symmetrize(rule);
    return rule;
}

class QuadratureRule {
public:
    QuadratureRule() = default;
    QuadratureRule(Eigen::MatrixXd points, Eigen::VectorXd weights, std::string name)
        : points_(std::move(points)), weights_(std::move(weights)), name_(std::move(name)) {
        const double density = std::pow(0.5, static_cast<double>(points_.cols()));
        density_ = Eigen::VectorXd::Constant(points_.rows(), density);
        weighted_density_ = weights_.cwiseProduct(density_);
    }

    int dim() const { return static_cast<int>(points_.cols()); }
    int size() const { return static_cast<int>(points_.rows()); }
    const Eigen::MatrixXd& points() const { return points_; }
    Eigen::VectorXd point(int k) const { return points_.row(k).transpose(); }
    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::VectorXd& density_values() const { return density_; }
    /// w_k f(xi_k), the coefficient of h(xi_k) in the bracket.
    const Eigen::VectorXd& weighted_density() const { return weighted_density_; }
    const std::string& name() const { return name_; }

    const std::vector<int>& levels() const { return levels_; }
    void set_levels(std::vector<int> levels) { levels_ = std::move(levels); }
    /// For a nested family: index in this rule of each point of the next coarser rule.
    const std::vector<int>& nesting() const { return nesting_; }
    void set_nesting(std::vector<int> nesting) { nesting_ = std::move(nesting); }

private:
    Eigen::MatrixXd points_;  // Q x p
    Eigen::VectorXd weights_;
    Eigen::VectorXd density_;
    Eigen::VectorXd weighted_density_;
    std::string name_;
    std::vector<int> levels_;
    std::vector<int> nesting_;
};

/// Index of every point of `coarse` inside `fine`; throws when coarse is not a subset.
inline std::vector<int> nest_indices(const QuadratureRule& coarse, const QuadratureRule& fine) {
    if (coarse.dim() != fine.dim()) throw DomainError("nesting requires rules of equal dimension");
    std::map<std::vector<double>, int> lookup;
    for (int k = 0; k < fine.size(); ++k) {
        std::vector<double> key(static_cast<std::size_t>(fine.dim()));
        for (int n = 0; n < fine.dim(); ++n) key[static_cast<std::size_t>(n)] = fine.points()(k, n);
        lookup.emplace(std::move(key), k);
    }
    std::vector<int> map(static_cast<std::size_t>(coarse.size()));
    for (int k = 0; k < coarse.size(); ++k) {
        std::vector<double> key(static_cast<std::size_t>(coarse.dim()));
        for (int n = 0; n < coarse.dim(); ++n) key[static_cast<std::size_t>(n)] = coarse.points()(k, n);
        auto it = lookup.find(key);
        if (it == lookup.end()) throw DomainError("quadrature rules are not nested: " + coarse.name() + " in " + fine.name());
        map[static_cast<std::size_t>(k)] = it->second;
    }
    return map;
}

namespace detail {

inline Rule1D rule_1d(QuadratureFamily family, int level) {
    switch (family) {
        case QuadratureFamily::gauss_legendre: return gauss_legendre_1d(level);
        case QuadratureFamily::gauss_lobatto: return gauss_lobatto_1d(level);
        case QuadratureFamily::clenshaw_curtis: return clenshaw_curtis_1d(level);
    }
    throw DomainError("unknown quadrature family");
}

inline QuadratureRule tensor_product(const std::vector<Rule1D>& factors, const std::string& name) {
    const int p = static_cast<int>(factors.size());
    Eigen::Index total = 1;
    for (const auto& f : factors) total *= static_cast<Eigen::Index>(f.x.size());
    Eigen::MatrixXd points(total, p);
    Eigen::VectorXd weights(total);
    std::vector<std::size_t> counter(static_cast<std::size_t>(p), 0);
    for (Eigen::Index k = 0; k < total; ++k) {
        double w = 1.0;
        for (int n = 0; n < p; ++n) {
            points(k, n) = factors[static_cast<std::size_t>(n)].x[counter[static_cast<std::size_t>(n)]];
            w *= factors[static_cast<std::size_t>(n)].w[counter[static_cast<std::size_t>(n)]];
        }
        weights(k) = w;
        // First dimension runs fastest.
        for (int n = 0; n < p; ++n) {
            auto& c = counter[static_cast<std::size_t>(n)];
            if (++c < factors[static_cast<std::size_t>(n)].x.size()) break;
            c = 0;
        }
    }
    return QuadratureRule(std::move(points), std::move(weights), name);
}

}  // namespace detail

/// Tensorized rule. For Gauss families `level_per_dim` is the point count per
/// dimension; for Clenshaw-Curtis it is the level (see clenshaw_curtis_points).
inline QuadratureRule tensor_quadrature(QuadratureFamily family, std::vector<int> level_per_dim, int dim) {
    if (dim < 1) throw DomainError("quadrature dimension must be >= 1");
    if (level_per_dim.size() == 1 && dim > 1) level_per_dim.assign(static_cast<std::size_t>(dim), level_per_dim.front());
    if (static_cast<int>(level_per_dim.size()) != dim) throw DomainError("one level per stochastic dimension required");
    std::vector<Rule1D> factors;
    std::ostringstream name;
    name << "tensor_" << to_string(family) << "(";
    for (int n = 0; n < dim; ++n) {
        const int level = level_per_dim[static_cast<std::size_t>(n)];
        if (level < (family == QuadratureFamily::clenshaw_curtis ? 0 : 1)) throw DomainError("quadrature level out of range");
        factors.push_back(detail::rule_1d(family, level));
        name << (n ? "," : "") << level;
    }
    name << ")";
    auto rule = detail::tensor_product(factors, name.str());
    rule.set_levels(level_per_dim);
    if (family == QuadratureFamily::clenshaw_curtis) {
        bool has_coarser = std::all_of(level_per_dim.begin(), level_per_dim.end(), [](int l) { return l > 0; });
        if (has_coarser) {
            std::vector<int> coarser = level_per_dim;
            for (int& l : coarser) --l;
            rule.set_nesting(nest_indices(tensor_quadrature(family, coarser, dim), rule));
        }
    }
    return rule;
}

/// Smolyak sparse grid of nested Clenshaw-Curtis rules.
///
/// Level k >= 0 combines tensor rules with univariate levels l (0-based,
/// see clenshaw_curtis_points) satisfying k - p + 1 <= |l| <= k, weighted by
/// (-1)^(k-|l|) binomial(p-1, k-|l|). Level 0 is the single midpoint. For
/// p = 3, levels 0..5 have 1, 7, 25, 69, 177, 441 nodes. Weights may be
/// negative; they are not clipped. Points are sorted lexicographically.
inline QuadratureRule sparse_quadrature(int level, int dim) {
    if (level < 0 || dim < 1) throw DomainError("sparse grid requires level >= 0 and p >= 1");
    auto binomial = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    std::map<std::vector<double>, double> merged;
    std::vector<int> combo(static_cast<std::size_t>(dim), 0);
    auto visit = [&](auto&& self, int pos, int budget) -> void {
        if (pos < dim) {
            for (int l = 0; l <= budget; ++l) {
                combo[static_cast<std::size_t>(pos)] = l;
                self(self, pos + 1, budget - l);
            }
            return;
        }
        const int norm = level - budget;
        if (norm < level - dim + 1) return;
        const int diff = level - norm;
        const double coeff = ((diff % 2) ? -1.0 : 1.0) * binomial(dim - 1, diff);
        std::vector<Rule1D> factors;
        for (int l : combo) factors.push_back(clenshaw_curtis_1d(l));
        const auto part = detail::tensor_product(factors, "");
        for (int k = 0; k < part.size(); ++k) {
            std::vector<double> key(static_cast<std::size_t>(dim));
            for (int n = 0; n < dim; ++n) key[static_cast<std::size_t>(n)] = part.points()(k, n);
            merged[key] += coeff * part.weights()(k);
        }
    };
    visit(visit, 0, level);

    Eigen::MatrixXd points(static_cast<Eigen::Index>(merged.size()), dim);
    Eigen::VectorXd weights(static_cast<Eigen::Index>(merged.size()));
    Eigen::Index k = 0;
    for (const auto& [key, w] : merged) {
        for (int n = 0; n < dim; ++n) points(k, n) = key[static_cast<std::size_t>(n)];
        weights(k) = w;
        ++k;
    }
    std::ostringstream name;
    name << "sparse_clenshaw_curtis(level=" << level << ",p=" << dim << ",Q=" << merged.size() << ")";
    QuadratureRule rule(std::move(points), std::move(weights), name.str());
    rule.set_levels({level});
    if (level > 0) rule.set_nesting(nest_indices(sparse_quadrature(level - 1, dim), rule));
    return rule;
}

/// <h>_Q for scalar or Eigen-vector valued h.
template <class Fn>
auto bracket(const QuadratureRule& rule, Fn&& h) {
    using Value = std::decay_t<decltype(h(rule.point(0)))>;
    if constexpr (std::is_arithmetic_v<Value>) {
        double sum = 0.0;
        for (int k = 0; k < rule.size(); ++k) sum += rule.weighted_density()(k) * h(rule.point(k));
        return sum;
    } else {
        using Plain = typename Value::PlainObject;
        Plain sum = rule.weighted_density()(0) * h(rule.point(0));
        for (int k = 1; k < rule.size(); ++k) sum += rule.weighted_density()(k) * h(rule.point(k));
        return sum;
    }
}

}  // namespace ipmuq
