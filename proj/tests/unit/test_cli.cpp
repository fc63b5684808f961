#include "scacsp/io.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>

using namespace scacsp;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("scacsp_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(SCACSP_CLI_PATH) + " " + args + " >>" + (workdir() / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

std::vector<std::vector<std::string>> csv(const std::string& name) { return io::parse_csv(io::read_text(path(name))); }

void write_spec(const std::string& name, int classes, int channels, double separation, int seed) {
    io::write_atomic(path(name), "{\"n_channels\":" + std::to_string(channels) +
                                     ",\"n_samples\":300,\"trials_per_class\":30,\"test_trials_per_class\":30,"
                                     "\"class_count\":" + std::to_string(classes) +
                                     ",\"separation\":" + std::to_string(separation) +
                                     ",\"covariance_seed\":5,\"seed\":" + std::to_string(seed) + "}");
}

struct Cleanup {
    ~Cleanup() {
        std::error_code ec;
        fs::remove_all(workdir(), ec);
    }
} cleanup;

}  // namespace

TEST_CASE("synth is deterministic and writes a manifest", "[cli]") {
    write_spec("spec2.json", 2, 6, 2.0, 1);
    write_spec("spec4.json", 4, 8, 2.0, 2);
    REQUIRE(run("synth --config " + path("spec2.json") + " --out " + path("d2/m.json")) == 0);
    REQUIRE(run("synth --config " + path("spec2.json") + " --out " + path("d2b/m.json")) == 0);
    REQUIRE(run("synth --config " + path("spec4.json") + " --out " + path("d4/m.json")) == 0);
    CHECK(io::read_text(path("d2/m.json")) == io::read_text(path("d2b/m.json")));
    CHECK(io::read_text(path("d2/m_trials/00017.sca")) == io::read_text(path("d2b/m_trials/00017.sca")));
    const auto m4 = io::DatasetManifest::load(path("d4/m.json"));
    CHECK(m4.class_count() == 4);
    CHECK(m4.trials.size() == 240);
}

TEST_CASE("train and eval round trip", "[cli]") {
    REQUIRE(run("train --data " + path("d2/m.json") + " --method csp --out " + path("csp.json")) == 0);
    REQUIRE(run("eval --model " + path("csp.json") + " --data " + path("d2/m.json") + " --out " + path("csp_pred.csv")) == 0);
    const auto summary = csv("csp_pred.summary.csv");
    REQUIRE(summary.size() == 2);
    CHECK(std::stod(summary[1][4]) >= 0.95);
    CHECK(csv("csp.cv.csv").size() == 11);
    CHECK(csv("csp_pred.csv").size() == 61);

    REQUIRE(run("train --data " + path("d2/m.json") + " --method scacsp --out " + path("sca.json")) == 0);
    REQUIRE(run("eval --model " + path("sca.json") + " --data " + path("d2/m.json") + " --out " + path("sca_pred.csv")) == 0);
    const auto a = csv("csp_pred.csv"), b = csv("sca_pred.csv");
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i][2] == b[i][2]);

    REQUIRE(run("train --data " + path("d4/m.json") + " --method scacsp --out " + path("sca4.json")) == 0);
    REQUIRE(run("eval --model " + path("sca4.json") + " --data " + path("d4/m.json") + " --out " + path("sca4.csv")) == 0);
    const auto confusion = csv("sca4.confusion.csv");
    CHECK(confusion.size() == 5);
    CHECK(confusion[0].size() == 5);
}

TEST_CASE("strcsp grid search writes one row per point and fold", "[cli]") {
    io::write_atomic(path("strcsp.json"), R"({"m": 1})");
    REQUIRE(run("train --config " + path("strcsp.json") + " --data " + path("d2/m.json") + " --method strcsp --out " +
                path("strcsp_model.json") + " --report " + path("strcsp_cv.csv")) == 0);
    const auto rows = csv("strcsp_cv.csv");
    CHECK(rows.size() == 641);
    CHECK(rows[0] == std::vector<std::string>{"alpha", "beta", "fold", "accuracy"});
    const auto summary = csv("strcsp_cv.summary.csv");
    CHECK(summary.size() == 65);
}

TEST_CASE("bench and grid commands", "[cli]") {
    REQUIRE(run("bench --data " + path("d4/m.json") + " --methods scacsp --repeats 2 --out " + path("bench1.csv")) == 0);
    const auto one = csv("bench1.csv");
    REQUIRE(one.size() == 2);
    CHECK(one[0][0] == "method");
    CHECK(one[0][1] == "train_s");
    CHECK(one[0][2] == "test_s");
    CHECK(one[0][3] == "accuracy");
    REQUIRE(run("grid --data " + path("d4/m.json") + " --m 1 --out " + path("grid.csv")) == 0);
    CHECK(csv("grid.csv").size() == 7);
    CHECK(csv("grid.train.csv").size() == 7);
}

TEST_CASE("exit codes", "[cli]") {
    CHECK(run("") == 2);
    CHECK(run("train --no-such-flag") == 2);
    CHECK(run("train --data " + path("d2/m.json") + " --out " + path("x.json") + " --method nope") == 2);
    CHECK(run("train --data " + path("d2/m.json") + " --out " + path("x.json") + " --m 0") == 2);
    CHECK(run("train --data " + path("d2/m.json") + " --out " + path("x.json") + " --band 7:31") == 2);
    CHECK(run("train --data " + path("d2/m.json") + " --out " + path("x.json") + " --method csp --nsr cnsr") == 2);
    CHECK(run("train --data " + path("missing.json") + " --out " + path("x.json")) == 3);
    CHECK(run("eval --model " + path("csp.json") + " --data " + path("d4/m.json") + " --out " + path("x.csv")) == 3);

    // duplicated channel: the composite covariance is singular
    TrialSet t = test_support::make_trials(4, 2, 12, 3);
    for (auto& x : t.trials) x.row(3) = x.row(2);
    io::write_dataset(path("bad/m.json"), "bad", t, std::vector<std::string>(t.size(), "train"), {"a", "b"});
    CHECK(run("train --data " + path("bad/m.json") + " --method csp --out " + path("x.json")) == 4);
}
