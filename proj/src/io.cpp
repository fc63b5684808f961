#include "scacsp/io.hpp"

#include "scacsp/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace scacsp::io {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr char trial_magic[4] = {'S', 'C', 'A', '1'};

[[noreturn]] void schema_error(const std::string& origin, const std::string& path, const std::string& what) {
    throw DataError(origin + ": " + path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& origin, const std::string& path) {
    if (!obj.is_object()) schema_error(origin, path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(origin, path.empty() ? key : path + "." + key, "missing");
    return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string get_string(const json& obj, const std::string& key, const std::string& origin, const std::string& path) {
    const json& v = field(obj, key, origin, path);
    if (!v.is_string()) schema_error(origin, join(path, key), "expected a string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& origin, const std::string& path) {
    if (!v.is_number()) schema_error(origin, path, "expected a number");
    return v.get<double>();
}

long long get_integer(const json& v, const std::string& origin, const std::string& path) {
    if (!v.is_number_integer()) schema_error(origin, path, "expected an integer");
    return v.get<long long>();
}

bool get_bool(const json& v, const std::string& origin, const std::string& path) {
    if (!v.is_boolean()) schema_error(origin, path, "expected true or false");
    return v.get<bool>();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(origin + ": invalid JSON: " + e.what());
    }
}

ojson matrix_json(const Matrix& m) {
    ojson rows = ojson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ojson row = ojson::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

ojson vector_json(const Vector& v) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Matrix matrix_from(const json& v, const std::string& origin, const std::string& path) {
    if (!v.is_array()) schema_error(origin, path, "expected a matrix (array of rows)");
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::Index cols = 0;
    if (rows > 0) {
        if (!v[0].is_array()) schema_error(origin, path + "[0]", "expected an array");
        cols = static_cast<Eigen::Index>(v[0].size());
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = v[static_cast<std::size_t>(r)];
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            schema_error(origin, rp, "expected " + std::to_string(cols) + " entries");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = get_number(row[static_cast<std::size_t>(c)], origin, rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

Vector vector_from(const json& v, const std::string& origin, const std::string& path) {
    if (!v.is_array()) schema_error(origin, path, "expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = get_number(v[i], origin, path + "[" + std::to_string(i) + "]");
    return out;
}

std::vector<double> doubles_from(const json& v, const std::string& origin, const std::string& path) {
    const Vector x = vector_from(v, origin, path);
    return {x.data(), x.data() + x.size()};
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

ojson bank_json(const FilterBank& b) {
    ojson out;
    out["filters"] = matrix_json(b.filters);
    out["directions"] = matrix_json(b.directions);
    out["scores"] = vector_json(b.scores);
    ojson prov = ojson::array();
    for (auto p : b.provenance) prov.push_back(std::string(to_string(p)));
    out["provenance"] = prov;
    out["whitener"] = matrix_json(b.whitener);
    return out;
}

FilterBank bank_from(const json& v, const std::string& origin, const std::string& path) {
    FilterBank b;
    b.filters = matrix_from(field(v, "filters", origin, path), origin, join(path, "filters"));
    b.directions = matrix_from(field(v, "directions", origin, path), origin, join(path, "directions"));
    b.scores = vector_from(field(v, "scores", origin, path), origin, join(path, "scores"));
    const json& prov = field(v, "provenance", origin, path);
    if (!prov.is_array()) schema_error(origin, join(path, "provenance"), "expected an array");
    for (const auto& p : prov) {
        if (!p.is_string()) schema_error(origin, join(path, "provenance"), "expected strings");
        try {
            b.provenance.push_back(provenance_from_string(p.get<std::string>()));
        } catch (const InvalidArgument& e) {
            schema_error(origin, join(path, "provenance"), e.what());
        }
    }
    b.whitener = matrix_from(field(v, "whitener", origin, path), origin, join(path, "whitener"));
    if (b.directions.rows() == 0) b.directions.resize(0, 0);
    return b;
}

ojson lda_json(const LdaModel& m) {
    ojson out;
    out["class_count"] = m.class_count;
    out["means"] = matrix_json(m.means);
    out["pooled_covariance"] = matrix_json(m.pooled_covariance);
    out["priors"] = vector_json(m.priors);
    out["ridge"] = m.ridge;
    out["weights"] = matrix_json(m.weights);
    out["biases"] = vector_json(m.biases);
    return out;
}

LdaModel lda_from(const json& v, const std::string& origin, const std::string& path) {
    LdaModel m;
    m.class_count = static_cast<int>(get_integer(field(v, "class_count", origin, path), origin, join(path, "class_count")));
    m.means = matrix_from(field(v, "means", origin, path), origin, join(path, "means"));
    m.pooled_covariance = matrix_from(field(v, "pooled_covariance", origin, path), origin, join(path, "pooled_covariance"));
    m.priors = vector_from(field(v, "priors", origin, path), origin, join(path, "priors"));
    m.ridge = get_number(field(v, "ridge", origin, path), origin, join(path, "ridge"));
    m.weights = matrix_from(field(v, "weights", origin, path), origin, join(path, "weights"));
    m.biases = vector_from(field(v, "biases", origin, path), origin, join(path, "biases"));
    if (m.weights.cols() != m.class_count || m.biases.size() != m.class_count || m.means.cols() != m.class_count)
        schema_error(origin, path, "LDA sizes are inconsistent with class_count");
    // An empty feature space serializes as zero rows; keep the column count.
    if (m.means.rows() == 0) m.means.resize(0, m.class_count);
    if (m.weights.rows() == 0) m.weights.resize(0, m.class_count);
    return m;
}

ojson problems_json(const std::vector<BinaryProblem>& problems) {
    ojson out = ojson::array();
    for (const auto& p : problems) {
        ojson j;
        j["positive_class"] = p.positive_class;
        j["negative_class"] = p.negative_class;
        j["bank"] = bank_json(p.bank);
        j["lda"] = lda_json(p.lda);
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<BinaryProblem> problems_from(const json& v, const std::string& origin, const std::string& path) {
    if (!v.is_array()) schema_error(origin, path, "expected an array");
    std::vector<BinaryProblem> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        BinaryProblem b;
        b.positive_class = static_cast<int>(get_integer(field(v[i], "positive_class", origin, p), origin, p));
        b.negative_class = static_cast<int>(get_integer(field(v[i], "negative_class", origin, p), origin, p));
        b.bank = bank_from(field(v[i], "bank", origin, p), origin, join(p, "bank"));
        b.lda = lda_from(field(v[i], "lda", origin, p), origin, join(p, "lda"));
        out.push_back(std::move(b));
    }
    return out;
}

std::string_view selection_name(Selection s) {
    switch (s) {
    case Selection::automatic: return "auto";
    case Selection::per_tail: return "per-tail";
    case Selection::largest_magnitude: return "largest-magnitude";
    }
    return "auto";
}

Selection selection_from(const std::string& s, const std::string& origin, const std::string& path) {
    if (s == "auto") return Selection::automatic;
    if (s == "per-tail") return Selection::per_tail;
    if (s == "largest-magnitude") return Selection::largest_magnitude;
    schema_error(origin, path, "expected auto, per-tail or largest-magnitude");
}

ojson config_ojson(const PipelineConfig& c) {
    ojson j;
    j["method"] = std::string(to_string(c.method));
    j["m"] = c.m;
    j["bandpass"] = c.bandpass;
    j["band"] = {{"low_hz", c.band.low_hz}, {"high_hz", c.band.high_hz}, {"order", c.band.order}};
    j["window"] = {c.window.start_s, c.window.end_s};
    j["extra_subspaces"] = c.extra.to_string();
    j["extra_count"] = c.extra_count;
    j["nsr"] = std::string(to_string(c.nsr));
    if (c.grid) j["grid"] = {{"alphas", c.grid->alphas}, {"betas", c.grid->betas}};
    j["cv"] = {{"folds", c.cv.folds}, {"seed", c.cv.seed}, {"stratified", c.cv.stratified}};
    j["log_features"] = c.log_features;
    j["rank_tol"] = c.tol.relative;
    j["ovr_rest"] = c.ovr_rest == OvrRest::class_mean ? "class-mean" : "trial-pool";
    j["selection"] = std::string(selection_name(c.selection));
    return j;
}

PipelineConfig config_from(const json& j, PipelineConfig c, const std::string& origin, const std::string& path) {
    if (!j.is_object()) schema_error(origin, path.empty() ? "(root)" : path, "expected an object");
    auto has = [&](const char* k) { return j.contains(k); };
    auto p = [&](const std::string& k) { return join(path, k); };
    try {
        if (has("method")) c.method = method_from_string(get_string(j, "method", origin, path));
        if (has("extra_subspaces")) c.extra = SubspaceSelector::parse(get_string(j, "extra_subspaces", origin, path));
        if (has("nsr")) c.nsr = nsr_mode_from_string(get_string(j, "nsr", origin, path));
    } catch (const InvalidArgument& e) {
        schema_error(origin, path.empty() ? "(root)" : path, e.what());
    }
    if (has("m")) c.m = static_cast<int>(get_integer(j["m"], origin, p("m")));
    if (has("bandpass")) c.bandpass = get_bool(j["bandpass"], origin, p("bandpass"));
    if (has("band")) {
        const json& b = j["band"];
        c.band.low_hz = get_number(field(b, "low_hz", origin, p("band")), origin, p("band.low_hz"));
        c.band.high_hz = get_number(field(b, "high_hz", origin, p("band")), origin, p("band.high_hz"));
        c.band.order = static_cast<int>(get_integer(field(b, "order", origin, p("band")), origin, p("band.order")));
    }
    if (has("window")) {
        const auto w = doubles_from(j["window"], origin, p("window"));
        if (w.size() != 2) schema_error(origin, p("window"), "expected [start_s, end_s]");
        c.window = {w[0], w[1]};
    }
    if (has("extra_count")) c.extra_count = static_cast<int>(get_integer(j["extra_count"], origin, p("extra_count")));
    if (has("grid")) {
        RegGrid g;
        g.alphas = doubles_from(field(j["grid"], "alphas", origin, p("grid")), origin, p("grid.alphas"));
        if (j["grid"].contains("betas")) g.betas = doubles_from(j["grid"]["betas"], origin, p("grid.betas"));
        c.grid = g;
    }
    if (has("cv")) {
        const json& cv = j["cv"];
        if (cv.contains("folds")) c.cv.folds = static_cast<int>(get_integer(cv["folds"], origin, p("cv.folds")));
        if (cv.contains("seed")) c.cv.seed = static_cast<std::uint64_t>(get_integer(cv["seed"], origin, p("cv.seed")));
        if (cv.contains("stratified")) c.cv.stratified = get_bool(cv["stratified"], origin, p("cv.stratified"));
    }
    if (has("log_features")) c.log_features = get_bool(j["log_features"], origin, p("log_features"));
    if (has("rank_tol")) c.tol.relative = get_number(j["rank_tol"], origin, p("rank_tol"));
    if (has("ovr_rest")) {
        const std::string r = get_string(j, "ovr_rest", origin, path);
        if (r == "class-mean") c.ovr_rest = OvrRest::class_mean;
        else if (r == "trial-pool") c.ovr_rest = OvrRest::trial_pool;
        else schema_error(origin, p("ovr_rest"), "expected class-mean or trial-pool");
    }
    if (has("selection")) c.selection = selection_from(get_string(j, "selection", origin, path), origin, p("selection"));
    return c;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw DataError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot move output into place at " + path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string encode_trial(const Matrix& x) {
    if (x.rows() > 0xFFFFFFFFLL || x.cols() > 0xFFFFFFFFLL) throw InvalidArgument("trial too large for the file format");
    std::string out(trial_magic, 4);
    put_u32(out, static_cast<std::uint32_t>(x.rows()));
    put_u32(out, static_cast<std::uint32_t>(x.cols()));
    out.reserve(out.size() + static_cast<std::size_t>(x.size()) * 8);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            std::uint64_t bits;
            const double v = x(r, c);
            std::memcpy(&bits, &v, 8);
            for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
        }
    return out;
}

void write_trial_file(const fs::path& path, const Matrix& x) { write_atomic(path, encode_trial(x)); }

Matrix read_trial_file(const fs::path& path) {
    const std::string raw = read_text(path);
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    if (raw.size() < 12 || std::memcmp(raw.data(), trial_magic, 4) != 0)
        throw DataError(path.string() + ": not a trial file (bad magic)");
    const std::uint32_t rows = read_u32(p + 4), cols = read_u32(p + 8);
    const std::uint64_t expected = 12 + 8ULL * rows * cols;
    if (raw.size() != expected) {
        std::ostringstream os;
        os << path.string() << ": size " << raw.size() << " bytes, header " << rows << "x" << cols << " needs " << expected;
        throw DataError(os.str());
    }
    Matrix x(rows, cols);
    const unsigned char* q = p + 12;
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c, q += 8) {
            std::uint64_t bits = 0;
            for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(q[i]) << (8 * i);
            double v;
            std::memcpy(&v, &bits, 8);
            x(r, c) = v;
        }
    if (!x.allFinite()) throw DataError(path.string() + ": contains non-finite samples");
    return x;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
    return parse(read_text(path), path.parent_path(), path.string());
}

DatasetManifest DatasetManifest::parse(const std::string& json_text, const fs::path& base_dir,
                                       const std::string& origin) {
    const json j = parse_json(json_text, origin);
    DatasetManifest m;
    m.base_dir = base_dir;
    m.name = get_string(j, "name", origin, "");
    m.fs_hz = get_number(field(j, "fs_hz", origin, ""), origin, "fs_hz");
    if (!(m.fs_hz > 0.0)) schema_error(origin, "fs_hz", "must be positive");
    const json& names = field(j, "channel_names", origin, "");
    if (!names.is_array()) schema_error(origin, "channel_names", "expected an array of strings");
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!names[i].is_string()) schema_error(origin, "channel_names[" + std::to_string(i) + "]", "expected a string");
        m.channel_names.push_back(names[i].get<std::string>());
    }
    const json& lm = field(j, "label_map", origin, "");
    if (!lm.is_object() || lm.empty()) schema_error(origin, "label_map", "expected a non-empty object");
    std::vector<int> seen(lm.size() + 1, 0);
    for (const auto& [label, id] : lm.items()) {
        const long long v = get_integer(id, origin, "label_map." + label);
        if (v < 1 || v > static_cast<long long>(lm.size()))
            schema_error(origin, "label_map." + label, "class ids must be contiguous from 1");
        if (seen[static_cast<std::size_t>(v)]++) schema_error(origin, "label_map." + label, "duplicate class id");
        m.label_map[label] = static_cast<int>(v);
    }
    if (j.contains("filtered")) m.filtered = get_bool(j["filtered"], origin, "filtered");

    auto check_label = [&](const std::string& label, const std::string& path) {
        if (!m.label_map.count(label)) schema_error(origin, path, "label '" + label + "' is not in label_map");
    };
    auto check_session = [&](const std::string& s, const std::string& path) {
        if (s != "train" && s != "test") schema_error(origin, path, "session must be train or test");
    };
    auto check_file = [&](const std::string& f, const std::string& path) {
        const fs::path full = fs::path(f).is_absolute() ? fs::path(f) : m.base_dir / f;
        if (!fs::exists(full)) schema_error(origin, path, "file " + full.string() + " does not exist");
    };

    if (j.contains("trials")) {
        const json& t = j["trials"];
        if (!t.is_array()) schema_error(origin, "trials", "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string p = "trials[" + std::to_string(i) + "]";
            ManifestTrial e{get_string(t[i], "file", origin, p), get_string(t[i], "label", origin, p),
                            get_string(t[i], "session", origin, p)};
            check_label(e.label, p + ".label");
            check_session(e.session, p + ".session");
            check_file(e.file, p + ".file");
            m.trials.push_back(std::move(e));
        }
    }
    if (j.contains("recordings")) {
        const json& r = j["recordings"];
        if (!r.is_array()) schema_error(origin, "recordings", "expected an array");
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string p = "recordings[" + std::to_string(i) + "]";
            ManifestRecording rec{get_string(r[i], "file", origin, p), get_string(r[i], "session", origin, p), {}};
            check_session(rec.session, p + ".session");
            check_file(rec.file, p + ".file");
            const json& ev = field(r[i], "events", origin, p);
            if (!ev.is_array()) schema_error(origin, p + ".events", "expected an array");
            for (std::size_t k = 0; k < ev.size(); ++k) {
                const std::string ep = p + ".events[" + std::to_string(k) + "]";
                ManifestEvent e{get_integer(field(ev[k], "sample", origin, ep), origin, ep + ".sample"),
                                get_string(ev[k], "label", origin, ep)};
                check_label(e.label, ep + ".label");
                rec.events.push_back(std::move(e));
            }
            m.recordings.push_back(std::move(rec));
        }
    }
    if (m.trials.empty() && m.recordings.empty()) schema_error(origin, "trials", "manifest lists no trials or recordings");
    return m;
}

std::string DatasetManifest::to_json() const {
    ojson j;
    j["name"] = name;
    j["fs_hz"] = fs_hz;
    j["channel_names"] = channel_names;
    ojson lm = ojson::object();
    for (const auto& [label, id] : label_map) lm[label] = id;
    j["label_map"] = lm;
    j["filtered"] = filtered;
    if (!trials.empty()) {
        ojson t = ojson::array();
        for (const auto& e : trials) t.push_back({{"file", e.file}, {"label", e.label}, {"session", e.session}});
        j["trials"] = t;
    }
    if (!recordings.empty()) {
        ojson r = ojson::array();
        for (const auto& rec : recordings) {
            ojson ev = ojson::array();
            for (const auto& e : rec.events) ev.push_back({{"sample", e.sample}, {"label", e.label}});
            r.push_back({{"file", rec.file}, {"session", rec.session}, {"events", ev}});
        }
        j["recordings"] = r;
    }
    return j.dump(2) + "\n";
}

TrialSet ingest(const DatasetManifest& manifest, const std::string& session, const PipelineConfig& config) {
    TrialSet out;
    out.fs = manifest.fs_hz;
    out.class_count = manifest.class_count();
    out.channel_names = manifest.channel_names;
    const bool filter = config.bandpass && !manifest.filtered;
    BandpassSpec band = config.band;
    band.fs = manifest.fs_hz;
    const auto expected_channels = static_cast<Eigen::Index>(manifest.channel_names.size());
    Eigen::Index samples = -1;

    auto resolve = [&](const std::string& f) { return fs::path(f).is_absolute() ? fs::path(f) : manifest.base_dir / f; };
    auto check_channels = [&](const Matrix& x, const fs::path& file) {
        if (expected_channels > 0 && x.rows() != expected_channels) {
            std::ostringstream os;
            os << file.string() << ": has " << x.rows() << " channels, manifest lists " << expected_channels;
            throw DataError(os.str());
        }
    };

    for (const auto& t : manifest.trials) {
        if (!session.empty() && t.session != session) continue;
        const fs::path file = resolve(t.file);
        Matrix x = read_trial_file(file);
        check_channels(x, file);
        if (samples >= 0 && x.cols() != samples) {
            std::ostringstream os;
            os << file.string() << ": has " << x.cols() << " samples, earlier trials have " << samples;
            throw DataError(os.str());
        }
        samples = x.cols();
        if (filter) x = butterworth_bandpass(x, band);
        if (!manifest.filtered) center_rows(x);
        out.trials.push_back(std::move(x));
        out.labels.push_back(manifest.label_map.at(t.label));
    }
    for (const auto& rec : manifest.recordings) {
        if (!session.empty() && rec.session != session) continue;
        const fs::path file = resolve(rec.file);
        Matrix x = read_trial_file(file);
        check_channels(x, file);
        if (filter) x = butterworth_bandpass(x, band);
        std::vector<Event> events;
        for (const auto& e : rec.events) events.push_back({e.sample, manifest.label_map.at(e.label)});
        TrialSet part;
        try {
            part = extract_epochs(x, events, config.window, manifest.fs_hz, out.class_count);
        } catch (const DataError& e) {
            throw DataError(file.string() + ": " + e.what());
        }
        for (std::size_t i = 0; i < part.size(); ++i) {
            if (samples >= 0 && part.trials[i].cols() != samples)
                throw DataError(file.string() + ": epoch length differs from other trials");
            samples = part.trials[i].cols();
            out.trials.push_back(std::move(part.trials[i]));
            out.labels.push_back(part.labels[i]);
        }
    }
    if (out.trials.empty())
        throw DataError("manifest '" + manifest.name + "' has no trials" +
                        (session.empty() ? std::string() : " in session '" + session + "'"));
    out.validate(false);
    return out;
}

void write_dataset(const fs::path& manifest_path, const std::string& name, const TrialSet& trials,
                   const std::vector<std::string>& sessions, const std::vector<std::string>& label_names) {
    if (sessions.size() != trials.size()) throw InvalidArgument("write_dataset: one session tag per trial required");
    if (label_names.size() != static_cast<std::size_t>(trials.class_count))
        throw InvalidArgument("write_dataset: one label name per class required");
    DatasetManifest m;
    m.name = name;
    m.fs_hz = trials.fs;
    m.channel_names = trials.channel_names;
    m.filtered = true;
    for (std::size_t k = 0; k < label_names.size(); ++k) m.label_map[label_names[k]] = static_cast<int>(k) + 1;
    const fs::path dir = manifest_path.parent_path();
    const std::string stem = manifest_path.stem().string();
    for (std::size_t i = 0; i < trials.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%05zu.sca", i + 1);
        const std::string rel = stem + "_trials/" + buf;
        write_trial_file(dir / rel, trials.trials[i]);
        m.trials.push_back({rel, label_names[static_cast<std::size_t>(trials.labels[i] - 1)], sessions[i]});
    }
    write_atomic(manifest_path, m.to_json());
}

std::string config_to_json(const PipelineConfig& config) { return config_ojson(config).dump(2) + "\n"; }

PipelineConfig config_from_json(const std::string& json_text, PipelineConfig base, const std::string& origin) {
    return config_from(parse_json(json_text, origin), std::move(base), origin, "");
}

std::string model_to_json(const PipelineModel& model) {
    ojson j;
    j["format"] = "scacsp-model";
    j["version"] = 1;
    j["config"] = config_ojson(model.config);
    j["class_count"] = model.class_count;
    j["channels"] = model.channels;
    j["channel_names"] = model.channel_names;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    if (model.ovr) {
        j["ovr"] = {{"rest", model.ovr->rest == OvrRest::class_mean ? "class-mean" : "trial-pool"},
                    {"log_features", model.ovr->log_features},
                    {"problems", problems_json(model.ovr->problems)}};
    } else if (model.pw) {
        j["pw"] = {{"log_features", model.pw->log_features}, {"problems", problems_json(model.pw->problems)}};
    } else {
        j["bank"] = bank_json(model.bank);
        if (model.nsr)
            j["nsr"] = {{"mode", std::string(to_string(model.nsr->mode))},
                        {"applicable", model.nsr->applicable},
                        {"range_basis", matrix_json(model.nsr->range.columns)}};
        j["lda"] = lda_json(model.lda);
    }
    return j.dump(1) + "\n";
}

PipelineModel model_from_json(const std::string& json_text, const std::string& origin) {
    const json j = parse_json(json_text, origin);
    if (get_string(j, "format", origin, "") != "scacsp-model") schema_error(origin, "format", "not a model file");
    if (get_integer(field(j, "version", origin, ""), origin, "version") != 1)
        schema_error(origin, "version", "unsupported model version");
    PipelineModel m;
    m.config = config_from(field(j, "config", origin, ""), PipelineConfig{}, origin, "config");
    m.class_count = static_cast<int>(get_integer(field(j, "class_count", origin, ""), origin, "class_count"));
    m.channels = static_cast<Eigen::Index>(get_integer(field(j, "channels", origin, ""), origin, "channels"));
    const json& names = field(j, "channel_names", origin, "");
    if (!names.is_array()) schema_error(origin, "channel_names", "expected an array");
    for (const auto& n : names) m.channel_names.push_back(n.get<std::string>());
    m.alpha = get_number(field(j, "alpha", origin, ""), origin, "alpha");
    m.beta = get_number(field(j, "beta", origin, ""), origin, "beta");
    if (j.contains("ovr")) {
        OvrModel o;
        o.class_count = m.class_count;
        o.rest = get_string(j["ovr"], "rest", origin, "ovr") == "trial-pool" ? OvrRest::trial_pool : OvrRest::class_mean;
        o.log_features = get_bool(field(j["ovr"], "log_features", origin, "ovr"), origin, "ovr.log_features");
        o.problems = problems_from(field(j["ovr"], "problems", origin, "ovr"), origin, "ovr.problems");
        m.ovr = std::move(o);
    } else if (j.contains("pw")) {
        PwModel p;
        p.class_count = m.class_count;
        p.log_features = get_bool(field(j["pw"], "log_features", origin, "pw"), origin, "pw.log_features");
        p.problems = problems_from(field(j["pw"], "problems", origin, "pw"), origin, "pw.problems");
        m.pw = std::move(p);
    } else {
        m.bank = bank_from(field(j, "bank", origin, ""), origin, "bank");
        if (j.contains("nsr")) {
            NsrProjector p;
            p.mode = nsr_mode_from_string(get_string(j["nsr"], "mode", origin, "nsr"));
            p.applicable = get_bool(field(j["nsr"], "applicable", origin, "nsr"), origin, "nsr.applicable");
            p.range.columns = matrix_from(field(j["nsr"], "range_basis", origin, "nsr"), origin, "nsr.range_basis");
            p.range.source = p.mode == NsrMode::cnsr ? ScatterSource::total : ScatterSource::between;
            p.channels = m.channels;
            m.nsr = std::move(p);
        }
        m.lda = lda_from(field(j, "lda", origin, ""), origin, "lda");
        if (m.bank.channels() != m.channels) schema_error(origin, "bank.filters", "row count differs from channels");
    }
    return m;
}

void save_model(const fs::path& path, const PipelineModel& model) { write_atomic(path, model_to_json(model)); }

PipelineModel load_model(const fs::path& path) { return model_from_json(read_text(path), path.string()); }

SynthFile synth_from_json(const std::string& json_text, const std::string& origin) {
    const json j = parse_json(json_text, origin);
    SynthFile f;
    auto& s = f.spec;
    s.n_channels = static_cast<Eigen::Index>(get_integer(field(j, "n_channels", origin, ""), origin, "n_channels"));
    s.n_samples = static_cast<Eigen::Index>(get_integer(field(j, "n_samples", origin, ""), origin, "n_samples"));
    s.trials_per_class = static_cast<int>(get_integer(field(j, "trials_per_class", origin, ""), origin, "trials_per_class"));
    if (j.contains("test_trials_per_class"))
        f.test_trials_per_class = static_cast<int>(get_integer(j["test_trials_per_class"], origin, "test_trials_per_class"));
    if (j.contains("seed")) s.seed = static_cast<std::uint64_t>(get_integer(j["seed"], origin, "seed"));
    if (j.contains("fs")) s.fs = get_number(j["fs"], origin, "fs");
    if (j.contains("nonstationarity")) s.nonstationarity = get_number(j["nonstationarity"], origin, "nonstationarity");
    if (j.contains("outlier_rate")) s.outlier_rate = get_number(j["outlier_rate"], origin, "outlier_rate");
    if (j.contains("outlier_scale")) s.outlier_scale = get_number(j["outlier_scale"], origin, "outlier_scale");
    if (j.contains("class_covariances")) {
        const json& cs = j["class_covariances"];
        if (!cs.is_array()) schema_error(origin, "class_covariances", "expected an array of matrices");
        for (std::size_t k = 0; k < cs.size(); ++k)
            s.class_covariances.push_back(matrix_from(cs[k], origin, "class_covariances[" + std::to_string(k) + "]"));
    } else {
        const int classes = static_cast<int>(get_integer(field(j, "class_count", origin, ""), origin, "class_count"));
        const double separation = j.contains("separation") ? get_number(j["separation"], origin, "separation") : 1.0;
        const auto cov_seed = j.contains("covariance_seed")
                                  ? static_cast<std::uint64_t>(get_integer(j["covariance_seed"], origin, "covariance_seed"))
                                  : s.seed;
        try {
            s.class_covariances = synth::separated_class_covariances(s.n_channels, classes, separation, cov_seed);
        } catch (const InvalidArgument& e) {
            schema_error(origin, "class_count", e.what());
        }
    }
    if (j.contains("label_names")) {
        for (const auto& n : j["label_names"]) {
            if (!n.is_string()) schema_error(origin, "label_names", "expected strings");
            f.label_names.push_back(n.get<std::string>());
        }
        if (f.label_names.size() != s.class_covariances.size())
            schema_error(origin, "label_names", "needs one name per class");
    } else {
        for (std::size_t k = 0; k < s.class_covariances.size(); ++k) f.label_names.push_back("class" + std::to_string(k + 1));
    }
    try {
        s.validate();
    } catch (const Error& e) {
        schema_error(origin, "(spec)", e.what());
    }
    return f;
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) { row(std::move(header)); }

Csv& Csv::row(std::vector<std::string> cells) {
    if (cells.size() != width_) throw InvalidArgument("csv: row width differs from header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += quote(cells[i]);
    }
    text_ += "\r\n";
    return *this;
}

std::string Csv::str() const { return text_; }

std::string Csv::number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string Csv::quote(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto end_row = [&] {
        row.push_back(std::move(cell));
        cell.clear();
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("csv: record " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < n) {
        if (text[i] == '"') {
            ++i;
            while (true) {
                if (i >= n) throw DataError("csv: unterminated quoted field");
                if (text[i] == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        cell += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                cell += text[i++];
            }
            if (i < n && text[i] != ',' && text[i] != '\r' && text[i] != '\n')
                throw DataError("csv: characters after closing quote");
        }
        while (i < n && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
            if (text[i] == '"') throw DataError("csv: quote inside unquoted field");
            cell += text[i++];
        }
        if (i >= n) {
            end_row();
            break;
        }
        if (text[i] == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            ++i;
        } else {
            if (text[i] == '\r') {
                if (i + 1 >= n || text[i + 1] != '\n') throw DataError("csv: bare carriage return");
                ++i;
            }
            ++i;
            end_row();
        }
    }
    return rows;
}

Csv cv_report(const CvResult& result) {
    Csv csv({"alpha", "beta", "fold", "accuracy"});
    for (const auto& p : result.points)
        for (std::size_t f = 0; f < p.fold_accuracy.size(); ++f)
            csv.row({Csv::number(p.alpha), Csv::number(p.beta), std::to_string(f + 1), Csv::number(p.fold_accuracy[f])});
    return csv;
}

Csv cv_summary(const CvResult& result) {
    Csv csv({"alpha", "beta", "mean_accuracy", "selected"});
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& p = result.points[i];
        csv.row({Csv::number(p.alpha), Csv::number(p.beta), Csv::number(p.mean_accuracy), i == result.best ? "1" : "0"});
    }
    return csv;
}

Csv grid_report(const SubspaceGrid& grid, bool train_split) {
    std::vector<std::string> header{"filter_subspace"};
    for (std::size_t c = 0; c < 7; ++c) header.push_back(SubspaceGrid::column_name(c));
    Csv csv(header);
    const auto& rows = train_split ? grid.train : grid.test;
    for (std::size_t f = 0; f < rows.size(); ++f) {
        std::vector<std::string> cells{std::string(to_string(all_subspaces[f]))};
        for (const auto& cell : rows[f]) cells.push_back(cell ? Csv::number(*cell) : std::string());
        csv.row(std::move(cells));
    }
    return csv;
}

}  // namespace scacsp::io
