#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ipmuq/random_space/basis.hpp"
#include "ipmuq/random_space/quadrature.hpp"

using namespace ipmuq;

namespace {

// Exact <x^a> under U(-1,1).
double monomial_moment(int a) { return (a % 2) ? 0.0 : 1.0 / (a + 1.0); }

// Gram-Schmidt on monomials with weight 1/2, using exact monomial moments.
// Returns coefficient rows c[n][k] of the n-th orthonormal polynomial in x^k.
std::vector<std::vector<double>> gram_schmidt(int degree) {
    auto inner = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) s += a[i] * b[j] * monomial_moment(static_cast<int>(i + j));
        return s;
    };
    std::vector<std::vector<double>> basis;
    for (int n = 0; n <= degree; ++n) {
        std::vector<double> v(static_cast<std::size_t>(degree + 1), 0.0);
        v[static_cast<std::size_t>(n)] = 1.0;
        for (const auto& q : basis) {
            const double c = inner(v, q);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
        }
        const double norm = std::sqrt(inner(v, v));
        for (double& x : v) x /= norm;
        basis.push_back(v);
    }
    return basis;
}

}  // namespace

TEST(Basis, CountsMatchBinomial) {
    EXPECT_EQ(build_total_degree_basis(9, 2).size(), 55u);
    EXPECT_EQ(build_total_degree_basis(0, 3).size(), 1u);
    EXPECT_EQ(build_total_degree_basis(3, 1).size(), 4u);
    for (int p = 1; p <= 4; ++p)
        for (int M = 0; M <= 10; ++M) {
            double binom = 1.0;
            for (int k = 1; k <= p; ++k) binom = binom * (M + k) / k;
            EXPECT_EQ(static_cast<double>(build_total_degree_basis(M, p).size()), binom);
        }
}

TEST(Basis, GradedLexicographicOrder) {
    const auto basis = build_total_degree_basis(2, 2);
    const std::vector<MultiIndex> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    EXPECT_EQ(basis.indices(), expected);
    const auto big = build_total_degree_basis(5, 3);
    for (std::size_t i = 1; i < big.size(); ++i) EXPECT_LE(total_degree(big.index(i - 1)), total_degree(big.index(i)));
    EXPECT_EQ(big.size_for_degree(2), build_total_degree_basis(2, 3).size());
}

TEST(Basis, MatchesGramSchmidtOracle) {
    const int degree = 7;
    const auto oracle = gram_schmidt(degree);
    const auto basis = build_total_degree_basis(degree, 1);
    for (double x : {-1.0, -0.7, -0.1, 0.0, 0.33, 0.9, 1.0}) {
        Eigen::VectorXd xi(1);
        xi << x;
        const auto values = basis.eval(xi);
        for (int n = 0; n <= degree; ++n) {
            double expected = 0.0;
            for (int k = 0; k <= degree; ++k) expected += oracle[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] * std::pow(x, k);
            EXPECT_NEAR(values(n), expected, 1e-10) << "n=" << n << " x=" << x;
        }
    }
    Eigen::VectorXd one(1);
    one << 1.0;
    EXPECT_NEAR(basis.eval(one)(1), std::sqrt(3.0), 1e-15);
}

TEST(Basis, FirstEntryIsOneAndOutOfSupportThrows) {
    const auto basis = build_total_degree_basis(4, 3);
    Eigen::Vector3d xi(0.3, -0.2, 0.9);
    EXPECT_EQ(basis.eval(xi)(0), 1.0);
    Eigen::Vector3d bad(0.3, 1.5, 0.0);
    EXPECT_THROW(basis.eval(bad), DomainError);
}

TEST(Basis, GramMatrixIsIdentityUnderGauss) {
    for (int p = 1; p <= 3; ++p)
        for (int M = 0; M <= 10; ++M) {
            if (basis_size(M, p) > 300) continue;
            const auto basis = build_total_degree_basis(M, p);
            const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {M + 1}, p);
            const Eigen::MatrixXd phi = basis.eval_points(rule.points());
            const Eigen::MatrixXd gram = phi.transpose() * rule.weighted_density().asDiagonal() * phi;
            const auto n = static_cast<Eigen::Index>(basis.size());
            EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10) << "M=" << M << " p=" << p;
        }
}

TEST(Quadrature, GaussExactness) {
    for (int q = 1; q <= 20; ++q) {
        const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {q}, 1);
        for (int a = 0; a <= 2 * q - 1; ++a)
            EXPECT_NEAR(bracket(rule, [a](const Eigen::VectorXd& xi) { return std::pow(xi(0), a); }), monomial_moment(a), 1e-14);
    }
    for (int q = 2; q <= 20; ++q) {
        const auto rule = tensor_quadrature(QuadratureFamily::gauss_lobatto, {q}, 1);
        for (int a = 0; a <= 2 * q - 3; ++a)
            EXPECT_NEAR(bracket(rule, [a](const Eigen::VectorXd& xi) { return std::pow(xi(0), a); }), monomial_moment(a), 1e-14);
        EXPECT_EQ(rule.points()(0, 0), -1.0);
        EXPECT_EQ(rule.points()(q - 1, 0), 1.0);
    }
}

TEST(Quadrature, BracketBasics) {
    const auto rule = tensor_quadrature(QuadratureFamily::gauss_legendre, {2}, 1);
    EXPECT_NEAR(bracket(rule, [](const Eigen::VectorXd&) { return 1.0; }), 1.0, 1e-15);
    EXPECT_NEAR(bracket(rule, [](const Eigen::VectorXd& xi) { return xi(0) * xi(0); }), 1.0 / 3.0, 1e-15);
    const auto basis = build_total_degree_basis(3, 1);
    const auto exact = tensor_quadrature(QuadratureFamily::gauss_legendre, {4}, 1);
    const Eigen::MatrixXd gram = bracket(exact, [&](const Eigen::VectorXd& xi) {
        const Eigen::VectorXd phi = basis.eval(xi);
        return Eigen::MatrixXd(phi * phi.transpose());
    });
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Quadrature, WeightsNormalized) {
    std::vector<QuadratureRule> rules{tensor_quadrature(QuadratureFamily::clenshaw_curtis, {4}, 1),
                                      tensor_quadrature(QuadratureFamily::clenshaw_curtis, {2}, 3),
                                      tensor_quadrature(QuadratureFamily::gauss_legendre, {7, 3}, 2),
                                      sparse_quadrature(5, 3)};
    for (const auto& rule : rules) EXPECT_NEAR(rule.weighted_density().sum(), 1.0, 1e-12) << rule.name();
}

TEST(Quadrature, ClenshawCurtisCounts) {
    EXPECT_EQ(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {2}, 1).size(), 5);
    EXPECT_EQ(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {3}, 1).size(), 9);
    EXPECT_EQ(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {4}, 1).size(), 17);
    EXPECT_EQ(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {1}, 3).size(), 27);
    EXPECT_EQ(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {2}, 3).size(), 125);
    EXPECT_EQ(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {3}, 3).size(), 729);
    EXPECT_EQ(sparse_quadrature(2, 3).size(), 25);
    EXPECT_EQ(sparse_quadrature(5, 3).size(), 441);
}

TEST(Quadrature, SparseDegeneratesToOneDimensional) {
    for (int level = 0; level <= 5; ++level) {
        const auto sparse = sparse_quadrature(level, 1);
        const auto cc = tensor_quadrature(QuadratureFamily::clenshaw_curtis, {level}, 1);
        ASSERT_EQ(sparse.size(), cc.size());
        for (int k = 0; k < cc.size(); ++k) {
            EXPECT_EQ(sparse.points()(k, 0), cc.points()(k, 0));
            EXPECT_NEAR(sparse.weights()(k), cc.weights()(k), 1e-15);
        }
    }
}

TEST(Quadrature, SparseIntegratesTotalDegree) {
    // Level k is exact for total degree 2k+1.
    for (int level = 1; level <= 5; ++level) {
        const auto rule = sparse_quadrature(level, 3);
        const int degree = 2 * level + 1;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b)
                for (int c = 0; a + b + c <= degree; ++c) {
                    const double exact = monomial_moment(a) * monomial_moment(b) * monomial_moment(c);
                    const double approx = bracket(rule, [&](const Eigen::VectorXd& xi) {
                        return std::pow(xi(0), a) * std::pow(xi(1), b) * std::pow(xi(2), c);
                    });
                    EXPECT_NEAR(approx, exact, 1e-10) << "level " << level << " (" << a << b << c << ")";
                }
    }
    EXPECT_LT(sparse_quadrature(5, 3).weights().minCoeff(), 0.0);
}

TEST(Quadrature, NestingRestrictionIsBitExact) {
    auto f = [](const Eigen::VectorXd& xi) { return std::exp(xi.sum()) * std::sin(3.0 * xi(0)); };
    auto check = [&](const QuadratureRule& fine, const QuadratureRule& coarse) {
        ASSERT_EQ(fine.nesting().size(), static_cast<std::size_t>(coarse.size()));
        for (int k = 0; k < coarse.size(); ++k) EXPECT_EQ(f(fine.point(fine.nesting()[static_cast<std::size_t>(k)])), f(coarse.point(k)));
    };
    for (int level = 1; level <= 5; ++level)
        check(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {level}, 1), tensor_quadrature(QuadratureFamily::clenshaw_curtis, {level - 1}, 1));
    check(tensor_quadrature(QuadratureFamily::clenshaw_curtis, {3}, 2), tensor_quadrature(QuadratureFamily::clenshaw_curtis, {2}, 2));
    check(sparse_quadrature(4, 3), sparse_quadrature(3, 3));
    EXPECT_TRUE(tensor_quadrature(QuadratureFamily::gauss_legendre, {5}, 1).nesting().empty());
}
