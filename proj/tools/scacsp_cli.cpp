// scacsp command-line tool: synth, train, eval, bench, grid.

#include "scacsp/diagnostics.hpp"
#include "scacsp/error.hpp"
#include "scacsp/evaluation.hpp"
#include "scacsp/io.hpp"
#include "scacsp/kernels.hpp"
#include "scacsp/pipeline.hpp"
#include "scacsp/subspace.hpp"
#include "scacsp/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace scacsp;

namespace {

struct Options {
    std::string config_path;
    std::string data;
    std::string out;
    std::string model;
    std::string report;
    std::string method;
    std::string methods;
    std::string band;
    std::string window;
    std::string extra;
    std::string nsr;
    std::string ovr_rest;
    std::string session;
    std::optional<int> m;
    std::optional<int> cv_folds;
    std::optional<std::uint64_t> seed;
    std::optional<double> rank_tol;
    int repeats = 5;
    bool raw_features = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument(flag + ": '" + s + "' is not a number");
}

BandpassSpec parse_band(const std::string& text, BandpassSpec band) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InvalidArgument("--band expects lo:hi:order");
    band.low_hz = parse_number(parts[0], "--band");
    band.high_hz = parse_number(parts[1], "--band");
    const double order = parse_number(parts[2], "--band");
    if (order != std::floor(order)) throw InvalidArgument("--band: order must be an integer");
    band.order = static_cast<int>(order);
    return band;
}

EpochWindow parse_window(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw InvalidArgument("--window expects start:end (seconds)");
    return {parse_number(parts[0], "--window"), parse_number(parts[1], "--window")};
}

// Config file first, then command-line overrides.
PipelineConfig build_config(const Options& o) {
    PipelineConfig c;
    if (!o.config_path.empty()) c = io::config_from_json(io::read_text(o.config_path), c, o.config_path);
    if (!o.method.empty()) c.method = method_from_string(o.method);
    if (o.m) c.m = *o.m;
    if (!o.band.empty()) {
        c.band = parse_band(o.band, c.band);
        c.bandpass = true;
    }
    if (!o.window.empty()) c.window = parse_window(o.window);
    if (o.cv_folds && *o.cv_folds != 0) c.cv.folds = *o.cv_folds;
    if (o.seed) c.cv.seed = *o.seed;
    if (o.rank_tol) c.tol.relative = *o.rank_tol;
    if (!o.ovr_rest.empty()) {
        if (o.ovr_rest == "class-mean") c.ovr_rest = OvrRest::class_mean;
        else if (o.ovr_rest == "trial-pool") c.ovr_rest = OvrRest::trial_pool;
        else throw InvalidArgument("--ovr-rest expects class-mean or trial-pool");
    }
    if (!o.extra.empty()) c.extra = SubspaceSelector::parse(o.extra);
    if (!o.nsr.empty()) c.nsr = nsr_mode_from_string(o.nsr);
    if (o.raw_features) c.log_features = false;
    c.validate();
    return c;
}

void check_method_flags(const Options& o, const PipelineConfig& c) {
    const auto name = std::string(to_string(c.method));
    if (!o.nsr.empty() && name.find("nsr") == std::string::npos)
        throw InvalidArgument("--nsr only applies to the scacsp-nsr methods");
    if (!o.extra.empty() && name.find("extrasub") == std::string::npos)
        throw InvalidArgument("--extra only applies to the extrasub methods");
    if (!o.ovr_rest.empty() && c.method != Method::csp_ovr)
        throw InvalidArgument("--ovr-rest only applies to csp-ovr");
}

fs::path sidecar(const fs::path& base, const std::string& suffix) {
    fs::path p = base;
    p.replace_extension(suffix);
    return p;
}

void require(const std::string& value, const std::string& flag) {
    if (value.empty()) throw InvalidArgument(flag + " is required");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int cmd_synth(const Options& o) {
    require(o.config_path, "--config");
    require(o.out, "--out");
    io::SynthFile spec = io::synth_from_json(io::read_text(o.config_path), o.config_path);
    if (o.seed) spec.spec.seed = *o.seed;

    TrialSet all = synth::generate(spec.spec);
    std::vector<std::string> sessions(all.size(), "train");
    if (spec.test_trials_per_class > 0) {
        synth::SynthSpec test_spec = spec.spec;
        test_spec.trials_per_class = spec.test_trials_per_class;
        test_spec.seed = synth::trial_seed(spec.spec.seed, ~std::uint64_t{0});
        TrialSet test = synth::generate(test_spec);
        for (std::size_t i = 0; i < test.size(); ++i) {
            all.trials.push_back(std::move(test.trials[i]));
            all.labels.push_back(test.labels[i]);
            sessions.push_back("test");
        }
    }
    const fs::path out(o.out);
    io::write_dataset(out, out.stem().string(), all, sessions, spec.label_names);
    std::cout << "wrote " << all.size() << " trials (" << all.class_count << " classes, " << all.channels()
              << " channels) to " << out.string() << "\n";
    return 0;
}

int cmd_train(const Options& o) {
    require(o.data, "--data");
    require(o.out, "--out");
    const PipelineConfig config = build_config(o);
    check_method_flags(o, config);
    const auto manifest = io::DatasetManifest::load(o.data);
    const TrialSet trials = io::ingest(manifest, "train", config);
    trials.validate(true);
    const CovarianceSet cov = covariances(trials, config.tol);
    const std::string label = std::string(to_string(config.method));

    double alpha = 0.0, beta = 0.0;
    const bool skip_cv = o.cv_folds && *o.cv_folds == 0;
    if (skip_cv && regularizer_count(config.method) > 0)
        throw InvalidArgument(label + " selects its regularization by cross-validation; --cv-folds 0 is not allowed");
    if (!skip_cv) {
        CvResult cv;
        try {
            cv = cross_validate(config, cov);
        } catch (const Error& e) {
            throw Error(e.kind(), label + ": cross-validation: " + e.what());
        }
        alpha = cv.best_point().alpha;
        beta = cv.best_point().beta;
        const fs::path report = o.report.empty() ? sidecar(o.out, ".cv.csv") : fs::path(o.report);
        io::cv_report(cv).save(report);
        io::cv_summary(cv).save(sidecar(report, ".summary.csv"));
        std::printf("%s: cv mean accuracy %.4f at alpha=%g beta=%g (%zu grid points x %d folds)\n", label.c_str(),
                    cv.best_point().mean_accuracy, alpha, beta, cv.points.size(), config.cv.folds);
    }
    PipelineModel model = train_pipeline(config, cov, alpha, beta);
    model.channel_names = trials.channel_names;
    io::save_model(o.out, model);
    const double train_acc = accuracy(model.predict(trials.trials), trials.labels);
    std::printf("%s: %td filters, training accuracy %.4f, model written to %s\n", label.c_str(),
                static_cast<std::ptrdiff_t>(model.filter_count()), train_acc, o.out.c_str());
    return 0;
}

int cmd_eval(const Options& o) {
    require(o.model, "--model");
    require(o.data, "--data");
    require(o.out, "--out");
    const PipelineModel model = io::load_model(o.model);
    const auto manifest = io::DatasetManifest::load(o.data);
    const std::string session = o.session.empty() ? "test" : o.session;
    const TrialSet trials = io::ingest(manifest, session, model.config);
    if (trials.channels() != model.channels) {
        std::ostringstream os;
        os << o.model << ": model expects " << model.channels << " channels, " << o.data << " has "
           << trials.channels();
        throw DataError(os.str());
    }
    if (manifest.class_count() != model.class_count) {
        std::ostringstream os;
        os << o.model << ": model has " << model.class_count << " classes, " << o.data << " has "
           << manifest.class_count();
        throw DataError(os.str());
    }
    const std::vector<int> predicted = model.predict(trials.trials);

    std::vector<std::string> names(static_cast<std::size_t>(manifest.class_count()));
    for (const auto& [label, id] : manifest.label_map) names[static_cast<std::size_t>(id - 1)] = label;
    io::Csv pred({"trial", "true_class", "predicted_class", "true_label", "predicted_label", "correct"});
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int t = trials.labels[i], p = predicted[i];
        pred.row({std::to_string(i + 1), std::to_string(t), std::to_string(p), names[static_cast<std::size_t>(t - 1)],
                  names[static_cast<std::size_t>(p - 1)], t == p ? "1" : "0"});
    }
    pred.save(o.out);

    const double acc = accuracy(predicted, trials.labels);
    io::Csv summary({"method", "session", "trials", "classes", "accuracy"});
    summary.row({std::string(to_string(model.config.method)), session, std::to_string(trials.size()),
                 std::to_string(model.class_count), io::Csv::number(acc)});
    summary.save(sidecar(o.out, ".summary.csv"));

    if (model.class_count > 2) {
        const Eigen::MatrixXi cm = confusion_matrix(predicted, trials.labels, model.class_count);
        std::vector<std::string> header{"true_label"};
        for (const auto& n : names) header.push_back(n);
        io::Csv confusion(header);
        for (int r = 0; r < model.class_count; ++r) {
            std::vector<std::string> cells{names[static_cast<std::size_t>(r)]};
            for (int c = 0; c < model.class_count; ++c) cells.push_back(std::to_string(cm(r, c)));
            confusion.row(std::move(cells));
        }
        confusion.save(sidecar(o.out, ".confusion.csv"));
    }
    std::printf("%s on %s/%s: accuracy %.4f (%zu trials)\n", std::string(to_string(model.config.method)).c_str(),
                manifest.name.c_str(), session.c_str(), acc, trials.size());
    return 0;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

int cmd_bench(const Options& o) {
    require(o.data, "--data");
    require(o.out, "--out");
    if (o.repeats < 1) throw InvalidArgument("--repeats must be at least 1");
    const PipelineConfig base = build_config(o);
    const auto manifest = io::DatasetManifest::load(o.data);
    // Band-pass and epoching happen once, outside the timed region.
    const TrialSet train = io::ingest(manifest, "train", base);
    train.validate(true);
    bool has_test = false;
    for (const auto& t : manifest.trials) has_test |= t.session == "test";
    for (const auto& r : manifest.recordings) has_test |= r.session == "test";
    const TrialSet test = has_test ? io::ingest(manifest, "test", base) : train;

    std::vector<std::string> methods;
    if (!o.methods.empty()) methods = split(o.methods, ',');
    else if (!o.method.empty()) methods = {o.method};
    else if (train.class_count == 2) methods = {"csp", "scacsp"};
    else methods = {"csp-ovr", "csp-pw", "scacsp"};

    io::Csv csv({"method", "train_s", "test_s", "accuracy", "train_s_std", "test_s_std", "repetitions"});
    for (const auto& name : methods) {
        PipelineConfig config = base;
        config.method = method_from_string(name);
        if (binary_only(config.method) && train.class_count != 2) {
            diag::warn(name + " is binary only; skipped on " + std::to_string(train.class_count) + "-class data");
            continue;
        }
        if (regularizer_count(config.method) < 2 && config.grid) config.grid.reset();
        const RegGrid grid = config.effective_grid();
        const double alpha = grid.alphas.front();
        const double beta = grid.betas.empty() ? 0.0 : grid.betas.front();
        std::vector<double> train_s, test_s;
        double acc = 0.0;
        for (int r = 0; r < o.repeats; ++r) {
            const auto t0 = Clock::now();
            const PipelineModel model = train_pipeline(config, train, alpha, beta);
            train_s.push_back(seconds_since(t0));
            const auto t1 = Clock::now();
            const std::vector<int> predicted = model.predict(test.trials);
            test_s.push_back(seconds_since(t1));
            acc = accuracy(predicted, test.labels);
        }
        csv.row({name, io::Csv::number(median(train_s)), io::Csv::number(median(test_s)), io::Csv::number(acc),
                 io::Csv::number(stddev(train_s)), io::Csv::number(stddev(test_s)), std::to_string(o.repeats)});
        std::printf("%-20s train %.6fs  test %.6fs  accuracy %.4f\n", name.c_str(), median(train_s), median(test_s),
                    acc);
    }
    csv.save(o.out);
    return 0;
}

int cmd_grid(const Options& o) {
    require(o.data, "--data");
    require(o.out, "--out");
    const PipelineConfig config = build_config(o);
    const auto manifest = io::DatasetManifest::load(o.data);
    const TrialSet train = io::ingest(manifest, "train", config);
    train.validate(true);
    const TrialSet test = io::ingest(manifest, "test", config);
    const CovarianceSet cov = covariances(train, config.tol);
    const SubspaceGrid grid =
        empirical_grid(cov, kernels::trial_covariances(test.trials), test.labels, config.m, config.tol);
    io::grid_report(grid, false).save(o.out);
    io::grid_report(grid, true).save(sidecar(o.out, ".train.csv"));
    std::printf("subspace grid (%d filters per source) written to %s\n", grid.filters_per_source, o.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial filtering (CSP family and scatter-based variants) for multichannel trials"};
    app.require_subcommand(1);
    Options o;

    auto add_pipeline_flags = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "pipeline config JSON");
        sub->add_option("--data", o.data, "dataset manifest");
        sub->add_option("--out", o.out, "output path");
        sub->add_option("--method", o.method, "csp, trcsp, scsp, strcsp, csp-ovr, csp-pw, scacsp, ...");
        sub->add_option("--m", o.m, "filters per class or tail");
        sub->add_option("--band", o.band, "band-pass lo:hi:order");
        sub->add_option("--window", o.window, "epoch window start:end in seconds");
        sub->add_option("--cv-folds", o.cv_folds, "cross-validation folds (0 skips CV for methods without regularizers)");
        sub->add_option("--seed", o.seed, "fold assignment seed");
        sub->add_option("--rank-tol", o.rank_tol, "relative rank tolerance");
        sub->add_option("--ovr-rest", o.ovr_rest, "class-mean or trial-pool");
        sub->add_option("--extra", o.extra, "extra filter subspaces, e.g. Sw_range,Sb_range");
        sub->add_option("--nsr", o.nsr, "cnsr or bnsr");
        sub->add_flag("--raw-features", o.raw_features, "use band power without the log");
    };

    auto* train = app.add_subcommand("train", "cross-validate, train and save a model");
    add_pipeline_flags(train);
    train->add_option("--report", o.report, "CV report CSV (default: next to the model)");

    auto* eval = app.add_subcommand("eval", "evaluate a saved model");
    eval->add_option("--model", o.model, "model JSON")->required();
    eval->add_option("--data", o.data, "dataset manifest")->required();
    eval->add_option("--out", o.out, "predictions CSV")->required();
    eval->add_option("--session", o.session, "session to evaluate (default test)");

    auto* bench = app.add_subcommand("bench", "time training and testing per method");
    add_pipeline_flags(bench);
    bench->add_option("--methods", o.methods, "comma-separated methods");
    bench->add_option("--repeats", o.repeats, "repetitions per method");

    auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
    synth->add_option("--config", o.config_path, "synthetic spec JSON")->required();
    synth->add_option("--out", o.out, "manifest path")->required();
    synth->add_option("--seed", o.seed, "override the spec seed");

    auto* grid = app.add_subcommand("grid", "filter source x component subspace accuracy table");
    add_pipeline_flags(grid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
    }

    try {
        if (*synth) return cmd_synth(o);
        if (*train) return cmd_train(o);
        if (*eval) return cmd_eval(o);
        if (*bench) return cmd_bench(o);
        if (*grid) return cmd_grid(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
