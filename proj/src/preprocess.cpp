#include "scacsp/preprocess.hpp"

#include "scacsp/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace scacsp {

void TrialSet::validate(bool require_all_classes) const {
    if (trials.size() != labels.size()) throw DataError("trial set: trial and label counts differ");
    if (trials.empty()) throw DataError("trial set is empty");
    if (class_count < 1) throw DataError("trial set: class count must be positive");
    const Eigen::Index nc = channels(), nt = samples();
    std::vector<int> seen(static_cast<std::size_t>(class_count), 0);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (trials[i].rows() != nc || trials[i].cols() != nt) {
            std::ostringstream os;
            os << "trial set: trial " << i << " is " << trials[i].rows() << "x" << trials[i].cols() << ", expected "
               << nc << "x" << nt;
            throw DataError(os.str());
        }
        if (labels[i] < 1 || labels[i] > class_count) {
            std::ostringstream os;
            os << "trial set: trial " << i << " has label " << labels[i] << " outside 1.." << class_count;
            throw DataError(os.str());
        }
        ++seen[static_cast<std::size_t>(labels[i] - 1)];
    }
    if (require_all_classes)
        for (int k = 0; k < class_count; ++k)
            if (seen[static_cast<std::size_t>(k)] == 0)
                throw DataError("trial set: class " + std::to_string(k + 1) + " has no trials");
}

TrialSet TrialSet::subset(const std::vector<std::size_t>& indices) const {
    TrialSet out;
    out.fs = fs;
    out.class_count = class_count;
    out.channel_names = channel_names;
    out.trials.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (auto i : indices) {
        out.trials.push_back(trials.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

std::vector<int> CovarianceSet::class_sizes() const {
    std::vector<int> sizes(static_cast<std::size_t>(class_count), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l - 1)];
    return sizes;
}

Matrix CovarianceSet::whitened_class_mean(int class_id) const {
    return symmetrize(whitener.transpose() * class_means.at(static_cast<std::size_t>(class_id - 1)) * whitener);
}

void BandpassSpec::validate() const {
    if (!(fs > 0.0)) throw InvalidArgument("band-pass: sampling rate must be positive");
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0)) {
        std::ostringstream os;
        os << "band-pass: corners " << low_hz << "-" << high_hz << " Hz must satisfy 0 < low < high < fs/2 = "
           << fs / 2.0;
        throw InvalidArgument(os.str());
    }
    if (order < 1) throw InvalidArgument("band-pass: order must be at least 1");
}

std::vector<kernels::Biquad> butterworth_bandpass_sections(const BandpassSpec& spec) {
    using cd = std::complex<double>;
    using std::numbers::pi;
    spec.validate();
    const int n = spec.order;

    // Prewarped analog corners.
    const double fs2 = 2.0 * spec.fs;
    const double wl = fs2 * std::tan(pi * spec.low_hz / spec.fs);
    const double wh = fs2 * std::tan(pi * spec.high_hz / spec.fs);
    const double bw = wh - wl;
    const double w0sq = wl * wh;

    // Analog low-pass prototype poles, then low-pass to band-pass.
    std::vector<cd> poles;
    poles.reserve(static_cast<std::size_t>(2 * n));
    for (int m = -n + 1; m < n; m += 2) {
        const cd p = -std::exp(cd(0.0, pi * m / (2.0 * n)));
        const cd scaled = p * (bw / 2.0);
        const cd root = std::sqrt(scaled * scaled - w0sq);
        poles.push_back(scaled + root);
        poles.push_back(scaled - root);
    }
    double gain = std::pow(bw, n);

    // Bilinear transform: n zeros at s=0 map to z=+1, n zeros at infinity to z=-1.
    cd num = std::pow(cd(fs2), n);
    cd den = 1.0;
    std::vector<cd> zpoles;
    zpoles.reserve(poles.size());
    for (const auto& p : poles) {
        zpoles.push_back((fs2 + p) / (fs2 - p));
        den *= (fs2 - p);
    }
    gain *= (num / den).real();

    // Pair conjugates; sections ordered by pole radius so the sharpest come last.
    std::vector<std::pair<cd, cd>> pairs;
    std::vector<cd> upper, reals;
    for (const auto& p : zpoles) {
        if (std::abs(p.imag()) <= 1e-12 * std::abs(p)) reals.push_back(cd(p.real(), 0.0));
        else if (p.imag() > 0.0) upper.push_back(p);
    }
    for (const auto& p : upper) pairs.emplace_back(p, std::conj(p));
    std::sort(reals.begin(), reals.end(), [](cd a, cd b) { return a.real() < b.real(); });
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2) pairs.emplace_back(reals[i], reals[i + 1]);
    if (pairs.size() != static_cast<std::size_t>(n))
        throw NumericalError("band-pass design: could not pair poles into second-order sections");
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return std::abs(a.first) < std::abs(b.first); });

    std::vector<kernels::Biquad> sections;
    sections.reserve(pairs.size());
    for (const auto& [p1, p2] : pairs) {
        kernels::Biquad s{1.0, 0.0, -1.0, -(p1 + p2).real(), (p1 * p2).real()};
        sections.push_back(s);
    }
    sections.front().b0 *= gain;
    sections.front().b1 *= gain;
    sections.front().b2 *= gain;
    return sections;
}

Matrix butterworth_bandpass(const Matrix& signal, const BandpassSpec& spec) {
    spec.validate();
    if (signal.cols() <= 3 * spec.order) {
        std::ostringstream os;
        os << "band-pass: need more than " << 3 * spec.order << " samples, got " << signal.cols();
        throw InvalidArgument(os.str());
    }
    const auto sections = butterworth_bandpass_sections(spec);
    return kernels::filter_rows(signal, sections);
}

void center_rows(Matrix& x) {
    if (x.cols() == 0) return;
    const Vector means = x.rowwise().mean();
    x.colwise() -= means;
}

TrialSet extract_epochs(const Matrix& continuous, const std::vector<Event>& events, EpochWindow window, double fs,
                        int class_count) {
    if (!(fs > 0.0)) throw InvalidArgument("extract_epochs: sampling rate must be positive");
    if (!(window.end_s > window.start_s)) throw InvalidArgument("extract_epochs: window end must exceed start");
    const auto offset = static_cast<long long>(std::llround(window.start_s * fs));
    const auto length = static_cast<long long>(std::llround((window.end_s - window.start_s) * fs));
    if (length < 2) throw InvalidArgument("extract_epochs: window shorter than 2 samples");

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const long long start = events[i].sample + offset;
        if (start < 0 || start + length > continuous.cols()) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "extract_epochs: window out of recording bounds for event indices";
        for (auto i : bad) os << ' ' << i;
        throw DataError(os.str());
    }

    TrialSet out;
    out.fs = fs;
    out.class_count = class_count;
    for (const auto& ev : events) {
        Matrix trial = continuous.middleCols(ev.sample + offset, length);
        center_rows(trial);
        out.trials.push_back(std::move(trial));
        out.labels.push_back(ev.label);
    }
    return out;
}

CovarianceSet covariances(const TrialSet& trials, RankTolerance tol) {
    trials.validate();
    return covariance_set_from(kernels::trial_covariances(trials.trials), trials.labels, trials.class_count, tol);
}

CovarianceSet covariance_set_from(std::vector<Matrix> per_trial, std::vector<int> labels, int class_count,
                                  RankTolerance tol) {
    if (per_trial.empty()) throw DataError("covariances: no trials");
    if (per_trial.size() != labels.size()) throw DataError("covariances: trial and label counts differ");
    const Eigen::Index n = per_trial.front().rows();
    std::vector<Matrix> means(static_cast<std::size_t>(class_count), Matrix::Zero(n, n));
    std::vector<int> sizes(static_cast<std::size_t>(class_count), 0);
    // Fixed trial-index summation order.
    for (std::size_t i = 0; i < per_trial.size(); ++i) {
        const int l = labels[i];
        if (l < 1 || l > class_count) throw DataError("covariances: label out of range");
        if (per_trial[i].rows() != n || per_trial[i].cols() != n)
            throw DataError("covariances: trial covariances differ in size");
        means[static_cast<std::size_t>(l - 1)] += per_trial[i];
        ++sizes[static_cast<std::size_t>(l - 1)];
    }
    for (int k = 0; k < class_count; ++k) {
        if (sizes[static_cast<std::size_t>(k)] == 0)
            throw DataError("covariances: class " + std::to_string(k + 1) + " has no trials");
        means[static_cast<std::size_t>(k)] /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
    }
    return covariance_set_from(std::move(per_trial), std::move(labels), class_count, std::move(means), tol);
}

CovarianceSet covariance_set_from(std::vector<Matrix> per_trial, std::vector<int> labels, int class_count,
                                  std::vector<Matrix> class_means, RankTolerance tol) {
    if (class_means.size() != static_cast<std::size_t>(class_count))
        throw InvalidArgument("covariances: class mean count differs from class count");
    CovarianceSet set;
    set.per_trial = std::move(per_trial);
    set.labels = std::move(labels);
    set.class_count = class_count;
    set.class_means = std::move(class_means);
    const Eigen::Index n = set.class_means.front().rows();
    set.composite = Matrix::Zero(n, n);
    for (const auto& m : set.class_means) set.composite += m;
    try {
        set.whitener = whitening_transform(set.composite, tol);
    } catch (const RankError& e) {
        throw RankError(std::string("composite covariance: ") + e.what() +
                            " (add trials or remove redundant channels)",
                        e.deficient_dimensions());
    }
    set.whitened_per_trial.resize(set.per_trial.size());
    for (std::size_t i = 0; i < set.per_trial.size(); ++i)
        set.whitened_per_trial[i] = symmetrize(set.whitener.transpose() * set.per_trial[i] * set.whitener);
    return set;
}

}  // namespace scacsp
