/// @file basis.hpp
/// @brief Total-degree gPC bases orthonormal w.r.t. the uniform density on [-1,1]^p.
///
/// Multi-indices are stored in graded lexicographic order: sorted by total
/// degree, and within one degree by descending first entry, then descending
/// second entry, and so on. For p = 2 and M = 2 this gives
/// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2). Because the order is graded, the
/// basis of degree M' < M is exactly the first binomial(M'+p, p) entries of
/// the degree-M basis; moment vectors of different truncation orders share
/// their leading rows.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "ipmuq/errors.hpp"

namespace ipmuq {

using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& index) {
    return std::accumulate(index.begin(), index.end(), 0);
}

/// binomial(M + p, p), the number of multi-indices with |i| <= M.
inline std::size_t basis_size(int max_degree, int dim) {
    if (max_degree < 0) return 0;
    std::size_t n = 1;
    for (int k = 1; k <= dim; ++k) n = n * static_cast<std::size_t>(max_degree + k) / static_cast<std::size_t>(k);
    return n;
}

/// Orthonormal Legendre polynomials phi_0..phi_degree at x, density 1/2 on [-1,1].
inline void legendre_orthonormal(double x, int degree, double* out) {
    double p_prev = 1.0;
    out[0] = 1.0;
    if (degree == 0) return;
    double p_curr = x;
    out[1] = std::sqrt(3.0) * x;
    for (int n = 1; n < degree; ++n) {
        const double p_next = ((2.0 * n + 1.0) * x * p_curr - n * p_prev) / (n + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
        out[n + 1] = std::sqrt(2.0 * (n + 1) + 1.0) * p_curr;
    }
}

class BasisSet {
public:
    BasisSet() = default;

    BasisSet(int max_degree, int dim) : dim_(dim), max_degree_(max_degree) {
        if (max_degree < 0 || dim < 1) throw DomainError("basis requires M >= 0 and p >= 1");
        for (int degree = 0; degree <= max_degree; ++degree) {
            MultiIndex index(static_cast<std::size_t>(dim), 0);
            append_degree(index, 0, degree);
        }
    }

    int dim() const { return dim_; }
    int max_degree() const { return max_degree_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& index(std::size_t i) const { return indices_[i]; }

    /// Number of leading basis functions with total degree <= degree.
    std::size_t size_for_degree(int degree) const { return basis_size(std::min(degree, max_degree_), dim_); }

    /// (phi_i(xi))_i. Throws DomainError outside [-1,1]^p.
    Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& xi) const {
        Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
        eval_into(xi, out.data());
        return out;
    }

    void eval_into(const Eigen::Ref<const Eigen::VectorXd>& xi, double* out) const {
        if (xi.size() != dim_) throw DomainError("basis evaluation point has wrong dimension");
        std::vector<double> univariate(static_cast<std::size_t>(dim_ * (max_degree_ + 1)));
        for (int n = 0; n < dim_; ++n) {
            const double x = xi(n);
            if (!(x >= -1.0 - 1e-14 && x <= 1.0 + 1e-14)) throw DomainError("xi outside the support [-1,1]^p");
            legendre_orthonormal(x, max_degree_, univariate.data() + n * (max_degree_ + 1));
        }
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            double value = 1.0;
            for (int n = 0; n < dim_; ++n) value *= univariate[static_cast<std::size_t>(n * (max_degree_ + 1) + indices_[i][static_cast<std::size_t>(n)])];
            out[i] = value;
        }
    }

    /// Basis values at every row of `points` (Q x p); returns Q x N.
    Eigen::MatrixXd eval_points(const Eigen::MatrixXd& points) const {
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values(points.rows(), static_cast<Eigen::Index>(size()));
        for (Eigen::Index k = 0; k < points.rows(); ++k) eval_into(points.row(k).transpose(), values.row(k).data());
        return values;
    }

private:
    // Fill entries [pos, dim) with a composition of `remaining`, largest leading entry first.
    void append_degree(MultiIndex& index, int pos, int remaining) {
        if (pos == dim_ - 1) {
            index[static_cast<std::size_t>(pos)] = remaining;
            indices_.push_back(index);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            index[static_cast<std::size_t>(pos)] = v;
            append_degree(index, pos + 1, remaining - v);
        }
        index[static_cast<std::size_t>(pos)] = 0;
    }

    int dim_ = 1;
    int max_degree_ = 0;
    std::vector<MultiIndex> indices_;
};

inline BasisSet build_total_degree_basis(int max_degree, int dim) { return BasisSet(max_degree, dim); }

}  // namespace ipmuq
