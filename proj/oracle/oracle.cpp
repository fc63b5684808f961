#include "scacsp/oracle.hpp"

#include "scacsp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scacsp::oracle {

std::pair<double, Vector> rayleigh_extremum(const Matrix& a, const Matrix& b, bool maximize) {
    const Matrix m = b.inverse() * a;
    Eigen::EigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("oracle: eigensolve failed");
    const Vector values = es.eigenvalues().real();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i)
        if (maximize ? values(i) > values(best) : values(i) < values(best)) best = i;
    Vector w = es.eigenvectors().col(best).real();
    w.normalize();
    const double value = w.dot(a * w) / w.dot(b * w);
    return {value, w};
}

ExplicitScatter explicit_scatter(const VecCovSamples& v) {
    if (v.channels > 12) throw InvalidArgument("oracle: explicit scatter limited to 12 channels");
    const Eigen::Index d = v.samples.rows();
    ExplicitScatter s{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
    for (int k = 0; k < v.class_count; ++k) {
        const double size = v.class_sizes[static_cast<std::size_t>(k)];
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index q = 0; q < d; ++q)
                s.between(p, q) += size * (v.class_means(p, k) - v.grand_mean(p)) * (v.class_means(q, k) - v.grand_mean(q));
    }
    for (Eigen::Index i = 0; i < v.samples.cols(); ++i) {
        const int k = v.labels[static_cast<std::size_t>(i)] - 1;
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index q = 0; q < d; ++q) {
                s.within(p, q) += (v.samples(p, i) - v.class_means(p, k)) * (v.samples(q, i) - v.class_means(q, k));
                s.total(p, q) += (v.samples(p, i) - v.grand_mean(p)) * (v.samples(q, i) - v.grand_mean(q));
            }
    }
    return s;
}

Vector small_sym_eigenvalues(const Matrix& a) {
    Vector out(a.rows());
    if (a.rows() == 2) {
        const double mean = 0.5 * (a(0, 0) + a(1, 1));
        const double half = 0.5 * (a(0, 0) - a(1, 1));
        const double r = std::sqrt(half * half + a(0, 1) * a(0, 1));
        out << mean + r, mean - r;
        return out;
    }
    if (a.rows() != 3) throw InvalidArgument("oracle: only 2x2 and 3x3 supported");
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double q = a.trace() / 3.0;
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    if (p == 0.0) {
        out.setConstant(q);
        return out;
    }
    const Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
    const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    out(0) = q + 2.0 * p * std::cos(phi);
    out(2) = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    out(1) = 3.0 * q - out(0) - out(2);
    return out;
}

int gram_rank(const Matrix& samples, double tol) {
    const Matrix gram = samples.transpose() * samples;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Vector values = es.eigenvalues();
    const double top = values.maxCoeff();
    if (!(top > 0.0)) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > tol * tol * top) ++r;
    return r;
}

}  // namespace scacsp::oracle
