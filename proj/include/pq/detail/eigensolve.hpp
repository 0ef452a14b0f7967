#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "pq/error.hpp"

namespace pq::detail {

struct Eigenpairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, empty when not requested
};

inline Eigenpairs dense_lowest(const Eigen::MatrixXd& h, Eigen::Index count, bool want_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, want_vectors ? Eigen::ComputeEigenvectors
                                                                      : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    count = std::min(count, h.rows());
    Eigenpairs out;
    out.values = es.eigenvalues().head(count);
    if (want_vectors) out.vectors = es.eigenvectors().leftCols(count);
    return out;
}

/// Lowest eigenpairs of a real symmetric operator given only its action,
/// by Lanczos with full reorthogonalization. The basis grows until the
/// residual of every requested Ritz pair is below tol * ||H||. A single
/// starting vector finds one copy of each exactly degenerate eigenvalue.
template <typename Apply>
Eigenpairs lanczos_lowest(Apply&& apply, Eigen::Index dim, Eigen::Index count, bool want_vectors,
                          double tol = 1e-10, Eigen::Index max_basis = 1200) {
    count = std::min(count, dim);
    max_basis = std::min(std::max(max_basis, count + 10), dim);
    Eigen::MatrixXd v(dim, max_basis);
    std::vector<double> alpha, beta;

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd q(dim);
    for (Eigen::Index i = 0; i < dim; ++i) q(i) = dist(rng);
    v.col(0) = q.normalized();

    Eigen::VectorXd w(dim);
    Eigen::Index m = 0;
    bool invariant = false;
    while (true) {
        apply(v.col(m), w);
        alpha.push_back(v.col(m).dot(w));
        for (int pass = 0; pass < 2; ++pass) w -= v.leftCols(m + 1) * (v.leftCols(m + 1).transpose() * w);
        const double b = w.norm();
        ++m;

        const bool check = m >= count && (m % 10 == 0 || m == max_basis || b == 0.0);
        const double scale = std::abs(alpha.front()) + b + 1e-300;
        if (b <= 1e-14 * scale) invariant = true;
        if (check || invariant) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
            for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
            const Eigen::Index found = std::min(count, m);
            bool ok = found == count;
            for (Eigen::Index i = 0; ok && i < found; ++i)
                ok = b * std::abs(es.eigenvectors()(m - 1, i)) <= tol * norm;
            if (ok || invariant) {
                if (!ok && found < count && m < dim)
                    throw NumericalError("lanczos: invariant subspace smaller than the requested level count");
                Eigenpairs out;
                out.values = es.eigenvalues().head(found);
                if (want_vectors) out.vectors = v.leftCols(m) * es.eigenvectors().leftCols(found);
                return out;
            }
            if (m == max_basis)
                throw NumericalError("lanczos: no convergence within a basis of " + std::to_string(max_basis));
        }
        beta.push_back(b);
        v.col(m) = w / b;
    }
}

}  // namespace pq::detail
