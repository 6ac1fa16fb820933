#include <cmath>

#include <Eigen/Dense>

#include "ctigap/metrics/metrics.hpp"
#include "ctigap/util/errors.hpp"

namespace ctigap::metrics {

Embedding embed_2d(const DistanceMatrix& distances) {
    const std::size_t n = distances.size();
    Embedding out;
    if (n == 0) return out;
    for (const auto& row : distances)
        if (row.size() != n)
            throw util::DomainError("distance matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(distances[i][j] - distances[j][i]) > 1e-9)
                throw util::DomainError("distance matrix must be symmetric");

    // Double centering: B = -1/2 * J D^2 J with J = I - 11^T/n.
    Eigen::MatrixXd d2(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d2(i, j) = distances[i][j] * distances[i][j];
    Eigen::VectorXd row_mean = d2.rowwise().mean();
    const double grand_mean = d2.mean();
    Eigen::MatrixXd b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - row_mean(j) + grand_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success)
        throw util::DomainError("eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
    const Eigen::MatrixXd& vectors = solver.eigenvectors();

    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) < -1e-9) {
            ++out.negative_eigenvalues;
            out.most_negative = std::max(out.most_negative, -values(i));
        }
    }

    out.coords.assign(n, {0.0, 0.0});
    for (int axis = 0; axis < 2 && axis < static_cast<int>(n); ++axis) {
        const Eigen::Index idx = static_cast<Eigen::Index>(n) - 1 - axis;
        const double lambda = values(idx);
        out.eigenvalues[axis] = lambda;
        if (lambda <= 0.0) continue;  // clamped axis: all coordinates zero
        const double scale = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i)
            out.coords[i][axis] = vectors(static_cast<Eigen::Index>(i), idx) * scale;

        // Sign convention: the largest-magnitude coordinate on each axis
        // points positive (first such index on ties).
        std::size_t peak = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(out.coords[i][axis]) > std::abs(out.coords[peak][axis]))
                peak = i;
        if (out.coords[peak][axis] < 0.0)
            for (std::size_t i = 0; i < n; ++i) out.coords[i][axis] = -out.coords[i][axis];
    }
    return out;
}

}  // namespace ctigap::metrics
