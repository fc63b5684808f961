#include "scacsp/kernels.hpp"

#include "scacsp/error.hpp"

#include <atomic>
#include <exception>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scacsp::kernels {

namespace {

std::atomic<int> thread_override{0};

int env_threads() {
    static const int value = [] {
        const char* raw = std::getenv("SCACSP_THREADS");
        if (!raw) return 0;
        try {
            const int n = std::stoi(raw);
            return n > 0 ? n : 0;
        } catch (...) {
            return 0;
        }
    }();
    return value;
}

Eigen::Index signed_size(std::size_t n) { return static_cast<Eigen::Index>(n); }

// Single-element bodies shared by both variants.

Matrix covariance_of(const Matrix& x) {
    if (x.cols() < 2) throw InvalidArgument("trial_covariances: need at least 2 samples per trial");
    Matrix c = (x * x.transpose()) / static_cast<double>(x.cols() - 1);
    return symmetrize(c);
}

Vector whitened_vec_of(const Matrix& c, const Matrix& p) {
    const Matrix r = p.transpose() * c * p;
    return vec(symmetrize(r));
}

void quadratic_column(const Matrix& w, const Matrix& c, Eigen::Ref<Vector> out) {
    const Matrix cw = c * w;
    for (Eigen::Index j = 0; j < w.cols(); ++j) out(j) = w.col(j).dot(cw.col(j));
}

void variance_column(const Matrix& w, const Matrix& x, Eigen::Ref<Vector> out) {
    const Matrix y = w.transpose() * x;
    const double denom = static_cast<double>(x.cols() - 1);
    for (Eigen::Index j = 0; j < y.rows(); ++j) out(j) = y.row(j).squaredNorm() / denom;
}

void filter_row(const Matrix& in, Matrix& out, Eigen::Index row, std::span<const Biquad> sections) {
    const Eigen::Index n = in.cols();
    for (Eigen::Index t = 0; t < n; ++t) out(row, t) = in(row, t);
    for (const auto& s : sections) {
        double z1 = 0.0, z2 = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double x = out(row, t);
            const double y = s.b0 * x + z1;
            z1 = s.b1 * x - s.a1 * y + z2;
            z2 = s.b2 * x - s.a2 * y;
            out(row, t) = y;
        }
    }
}

void check_filters(const Matrix& w, Eigen::Index channels, const char* what) {
    if (w.rows() != channels) throw InvalidArgument(std::string(what) + ": filter/channel dimension mismatch");
}

}  // namespace

int thread_count() {
#ifdef _OPENMP
    if (const int o = thread_override.load(); o > 0) return o;
    if (const int e = env_threads(); e > 0) return e;
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_thread_count(int threads) { thread_override.store(threads > 0 ? threads : 0); }

namespace serial {

std::vector<Matrix> trial_covariances(std::span<const Matrix> trials) {
    std::vector<Matrix> out;
    out.reserve(trials.size());
    for (const auto& x : trials) out.push_back(covariance_of(x));
    return out;
}

Matrix whitened_vecs(std::span<const Matrix> covs, const Matrix& whitener) {
    const Eigen::Index n = whitener.cols();
    Matrix out(n * n, signed_size(covs.size()));
    for (std::size_t i = 0; i < covs.size(); ++i) out.col(signed_size(i)) = whitened_vec_of(covs[i], whitener);
    return out;
}

Matrix quadratic_features(const Matrix& filters, std::span<const Matrix> covs) {
    Matrix out(filters.cols(), signed_size(covs.size()));
    for (std::size_t i = 0; i < covs.size(); ++i) {
        check_filters(filters, covs[i].rows(), "quadratic_features");
        quadratic_column(filters, covs[i], out.col(signed_size(i)));
    }
    return out;
}

Matrix projected_variances(const Matrix& filters, std::span<const Matrix> trials) {
    Matrix out(filters.cols(), signed_size(trials.size()));
    for (std::size_t i = 0; i < trials.size(); ++i) {
        check_filters(filters, trials[i].rows(), "projected_variances");
        variance_column(filters, trials[i], out.col(signed_size(i)));
    }
    return out;
}

Matrix filter_rows(const Matrix& signal, std::span<const Biquad> sections) {
    Matrix out(signal.rows(), signal.cols());
    for (Eigen::Index r = 0; r < signal.rows(); ++r) filter_row(signal, out, r, sections);
    return out;
}

}  // namespace serial

namespace parallel {

// Exceptions must not escape an OpenMP region; the first one is rethrown afterwards.
#define SCACSP_PARALLEL_FOR(count, ...)                                             \
    do {                                                                             \
        std::exception_ptr failure;                                                  \
        const long long total_ = static_cast<long long>(count);                      \
        _Pragma("omp parallel for schedule(static) num_threads(thread_count())")    \
        for (long long i_ = 0; i_ < total_; ++i_) {                                  \
            try {                                                                    \
                const auto i = static_cast<std::size_t>(i_);                         \
                __VA_ARGS__;                                                         \
            } catch (...) {                                                          \
                _Pragma("omp critical(scacsp_kernel_failure)")                       \
                if (!failure) failure = std::current_exception();                    \
            }                                                                        \
        }                                                                            \
        if (failure) std::rethrow_exception(failure);                                \
    } while (0)

std::vector<Matrix> trial_covariances(std::span<const Matrix> trials) {
    std::vector<Matrix> out(trials.size());
    SCACSP_PARALLEL_FOR(trials.size(), out[i] = covariance_of(trials[i]));
    return out;
}

Matrix whitened_vecs(std::span<const Matrix> covs, const Matrix& whitener) {
    const Eigen::Index n = whitener.cols();
    Matrix out(n * n, signed_size(covs.size()));
    SCACSP_PARALLEL_FOR(covs.size(), out.col(signed_size(i)) = whitened_vec_of(covs[i], whitener));
    return out;
}

Matrix quadratic_features(const Matrix& filters, std::span<const Matrix> covs) {
    Matrix out(filters.cols(), signed_size(covs.size()));
    SCACSP_PARALLEL_FOR(covs.size(), {
        check_filters(filters, covs[i].rows(), "quadratic_features");
        quadratic_column(filters, covs[i], out.col(signed_size(i)));
    });
    return out;
}

Matrix projected_variances(const Matrix& filters, std::span<const Matrix> trials) {
    Matrix out(filters.cols(), signed_size(trials.size()));
    SCACSP_PARALLEL_FOR(trials.size(), {
        check_filters(filters, trials[i].rows(), "projected_variances");
        variance_column(filters, trials[i], out.col(signed_size(i)));
    });
    return out;
}

Matrix filter_rows(const Matrix& signal, std::span<const Biquad> sections) {
    Matrix out(signal.rows(), signal.cols());
    SCACSP_PARALLEL_FOR(signal.rows(), filter_row(signal, out, static_cast<Eigen::Index>(i), sections));
    return out;
}

#undef SCACSP_PARALLEL_FOR

}  // namespace parallel

}  // namespace scacsp::kernels
