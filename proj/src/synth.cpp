#include "scacsp/synth.hpp"

#include "scacsp/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace scacsp::synth {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    const std::uint64_t base = splitmix64(state);
    state = base ^ index;
    return splitmix64(state);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Matrix Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = gaussian();
    return out;
}

void SynthSpec::validate() const {
    if (n_channels < 1) throw InvalidArgument("synth: n_channels must be positive");
    if (n_samples < 2) throw InvalidArgument("synth: n_samples must be at least 2");
    if (trials_per_class < 1) throw InvalidArgument("synth: trials_per_class must be positive");
    if (class_covariances.empty()) throw InvalidArgument("synth: no class covariances");
    if (!(nonstationarity >= 0.0)) throw InvalidArgument("synth: nonstationarity must be non-negative");
    if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) throw InvalidArgument("synth: outlier_rate must lie in [0, 1]");
    if (!(outlier_scale > 0.0)) throw InvalidArgument("synth: outlier_scale must be positive");
    if (!(fs > 0.0)) throw InvalidArgument("synth: fs must be positive");
    for (std::size_t k = 0; k < class_covariances.size(); ++k) {
        const Matrix& c = class_covariances[k];
        if (c.rows() != n_channels || c.cols() != n_channels) {
            std::ostringstream os;
            os << "synth: class " << k + 1 << " covariance is " << c.rows() << "x" << c.cols() << ", expected "
               << n_channels << "x" << n_channels;
            throw InvalidArgument(os.str());
        }
        const SymEig e = sym_eig(c);
        const double lo = e.values(e.values.size() - 1);
        if (!(lo > 0.0)) {
            std::ostringstream os;
            os << "synth: class " << k + 1 << " covariance is not positive definite (eigenvalue " << lo << ")";
            throw DefinitenessError(os.str(), lo);
        }
    }
}

TrialSet generate(const SynthSpec& spec) {
    spec.validate();
    const int classes = static_cast<int>(spec.class_covariances.size());
    const Eigen::Index n = spec.n_channels;
    std::vector<Matrix> factors;
    for (const auto& c : spec.class_covariances) factors.push_back(Eigen::LLT<Matrix>(symmetrize(c)).matrixL());

    TrialSet out;
    out.fs = spec.fs;
    out.class_count = classes;
    for (Eigen::Index j = 0; j < n; ++j) out.channel_names.push_back("ch" + std::to_string(j + 1));
    const auto total = static_cast<std::size_t>(classes) * static_cast<std::size_t>(spec.trials_per_class);
    out.trials.reserve(total);
    out.labels.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const int label = static_cast<int>(i % static_cast<std::size_t>(classes)) + 1;
        Rng rng(trial_seed(spec.seed, i));
        const bool outlier = rng.uniform() < spec.outlier_rate;
        Matrix l = factors[static_cast<std::size_t>(label - 1)];
        if (spec.nonstationarity > 0.0)
            l = l * (Matrix::Identity(n, n) + spec.nonstationarity * rng.gaussian_matrix(n, n));
        if (outlier) l *= spec.outlier_scale;
        Matrix x = l * rng.gaussian_matrix(n, spec.n_samples);
        center_rows(x);
        out.trials.push_back(std::move(x));
        out.labels.push_back(label);
    }
    return out;
}

Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
    const Matrix g = rng.gaussian_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Matrix random_spd(Eigen::Index n, Rng& rng, double condition) {
    const Matrix q = random_orthogonal(n, rng);
    Vector e(n);
    for (Eigen::Index j = 0; j < n; ++j) e(j) = std::exp(rng.uniform() * std::log(condition));
    return symmetrize(q * e.asDiagonal() * q.transpose());
}

std::vector<Matrix> separated_class_covariances(Eigen::Index n_channels, int class_count, double separation,
                                                std::uint64_t seed) {
    if (class_count < 1 || n_channels < 1) throw InvalidArgument("separated_class_covariances: bad sizes");
    Rng rng(seed);
    const Matrix q = random_orthogonal(n_channels, rng);
    Vector base(n_channels);
    for (Eigen::Index j = 0; j < n_channels; ++j) base(j) = 1.0 + rng.uniform();
    std::vector<Matrix> out;
    for (int k = 0; k < class_count; ++k) {
        Vector d = base;
        for (Eigen::Index j = 0; j < n_channels; ++j)
            if (j % class_count == k) d(j) *= 1.0 + separation;
        out.push_back(symmetrize(q * d.asDiagonal() * q.transpose()));
    }
    return out;
}

}  // namespace scacsp::synth
