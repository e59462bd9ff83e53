#include "sbw/numerics.hpp"

#include <cmath>
#include <limits>

namespace sbw::numerics {

namespace {

// Diagonal Pade(13) approximant of e^M, valid for ||M||_1 <= theta_13.
Matrix pade13(const Matrix& m) {
    static constexpr double c[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const Eigen::Index n = m.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix m2 = m * m;
    const Matrix m4 = m2 * m2;
    const Matrix m6 = m4 * m2;
    const Matrix u =
        m * (m6 * (c[13] * m6 + c[11] * m4 + c[9] * m2) + c[7] * m6 + c[5] * m4 + c[3] * m2 + c[1] * ident);
    const Matrix v =
        m6 * (c[12] * m6 + c[10] * m4 + c[8] * m2) + c[6] * m6 + c[4] * m4 + c[2] * m2 + c[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("expm: matrix must be square");
    if (!m.allFinite()) throw ParamError("expm: matrix has non-finite entries");
    if (m.rows() == 0) throw DimensionError("expm: empty matrix");

    const double theta13 = 5.371920351148152;
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    }
    Matrix result = pade13(m / std::exp2(squarings));
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

ObservabilityReport observability(const Matrix& a, const Matrix& c) {
    if (a.rows() != a.cols()) throw DimensionError("observability: A must be square");
    if (c.cols() != a.rows()) throw DimensionError("observability: C columns must match A");

    const Eigen::Index n = a.rows();
    const Eigen::Index m = c.rows();
    Matrix obs(n * m, n);
    Matrix block = c;
    for (Eigen::Index k = 0; k < n; ++k) {
        obs.middleRows(k * m, m) = block;
        block = block * a;
    }

    Eigen::JacobiSVD<Matrix> svd(obs);
    const Vector sigma = svd.singularValues();

    ObservabilityReport report;
    report.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    const double tol = sigma(0) * static_cast<double>(std::max(obs.rows(), obs.cols())) *
                       std::numeric_limits<double>::epsilon();
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > tol) ++report.rank;
    }
    report.condition_2norm = (report.rank == sigma.size() && sigma(sigma.size() - 1) > 0.0)
                                 ? sigma(0) / sigma(sigma.size() - 1)
                                 : std::numeric_limits<double>::infinity();
    return report;
}

}  // namespace sbw::numerics
