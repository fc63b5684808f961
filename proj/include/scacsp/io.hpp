#pragma once

// On-disk formats.
//
// Trial file: "SCA1", u32 LE n_channels, u32 LE n_samples, then
// n_channels·n_samples f64 LE values in row-major order.
// Manifest and model files are JSON. CSV output follows RFC 4180 with
// numbers printed to 17 significant digits. Every writer goes through a
// temporary file and a rename.

#include "scacsp/evaluation.hpp"
#include "scacsp/pipeline.hpp"
#include "scacsp/subspace.hpp"
#include "scacsp/synth.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scacsp::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

Matrix read_trial_file(const fs::path& path);
std::string encode_trial(const Matrix& x);
void write_trial_file(const fs::path& path, const Matrix& x);

struct ManifestTrial {
    std::string file;
    std::string label;
    std::string session;
};

struct ManifestEvent {
    long long sample = 0;
    std::string label;
};

/// A continuous recording cut into trials around its events.
struct ManifestRecording {
    std::string file;
    std::string session;
    std::vector<ManifestEvent> events;
};

struct DatasetManifest {
    std::string name;
    double fs_hz = 0.0;
    std::vector<std::string> channel_names;
    std::map<std::string, int> label_map;
    std::vector<ManifestTrial> trials;
    std::vector<ManifestRecording> recordings;
    bool filtered = false;  // trial files already band-limited and centered; used as stored
    fs::path base_dir;      // relative file paths resolve against this

    /// Throws DataError naming the offending field.
    static DatasetManifest load(const fs::path& path);
    static DatasetManifest parse(const std::string& json_text, const fs::path& base_dir, const std::string& origin);
    std::string to_json() const;
    int class_count() const { return static_cast<int>(label_map.size()); }
};

/// Loads the trials of one session ("" for all). Trial files are band-passed
/// and row-centered individually unless the manifest is marked filtered;
/// recordings are band-passed whole, then epoched with `window` and centered.
TrialSet ingest(const DatasetManifest& manifest, const std::string& session, const PipelineConfig& config);

/// Writes trial files next to the manifest and the manifest itself.
/// `sessions[i]` tags trial i.
void write_dataset(const fs::path& manifest_path, const std::string& name, const TrialSet& trials,
                   const std::vector<std::string>& sessions, const std::vector<std::string>& label_names);

std::string config_to_json(const PipelineConfig& config);
/// Keys absent from the JSON keep the values already in `base`.
PipelineConfig config_from_json(const std::string& json_text, PipelineConfig base = {},
                                const std::string& origin = "config");

std::string model_to_json(const PipelineModel& model);
PipelineModel model_from_json(const std::string& json_text, const std::string& origin = "model");
void save_model(const fs::path& path, const PipelineModel& model);
PipelineModel load_model(const fs::path& path);

/// Synthetic dataset description for the `synth` command. Class covariances
/// are given explicitly or generated from (class_count, separation, covariance_seed).
struct SynthFile {
    synth::SynthSpec spec;
    int test_trials_per_class = 0;
    std::vector<std::string> label_names;
};
SynthFile synth_from_json(const std::string& json_text, const std::string& origin = "synth spec");

/// RFC-4180 CSV builder.
class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    Csv& row(std::vector<std::string> cells);
    std::string str() const;
    void save(const fs::path& path) const { write_atomic(path, str()); }

    static std::string number(double v);
    static std::string quote(const std::string& cell);

private:
    std::size_t width_;
    std::string text_;
};

/// Strict RFC-4180 reader (used by tests). Throws DataError on malformed input.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

Csv cv_report(const CvResult& result);
Csv cv_summary(const CvResult& result);
Csv grid_report(const SubspaceGrid& grid, bool train_split);

}  // namespace scacsp::io
