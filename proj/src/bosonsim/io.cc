// Copyright 2026 The BosonSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bosonsim/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bosonsim {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(std::string_view what) {
    throw std::invalid_argument(std::string(what));
}

Json parse_json(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error &e) {
        fail(std::string(what) + ": malformed JSON: " + e.what());
    }
}

const Json &field(const Json &obj, const char *key, std::string_view what) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(std::string(what) + ": missing field \"" + key + "\"");
    }
    return obj.at(key);
}

double as_double(const Json &j, std::string_view what) {
    if (!j.is_number()) {
        fail(std::string(what) + " must be a number");
    }
    return j.get<double>();
}

size_t as_index(const Json &j, std::string_view what) {
    if (!j.is_number_unsigned()) {
        fail(std::string(what) + " must be a non-negative integer");
    }
    return j.get<size_t>();
}

std::string as_string(const Json &j, std::string_view what) {
    if (!j.is_string()) {
        fail(std::string(what) + " must be a string");
    }
    return j.get<std::string>();
}

void check_schema(const Json &obj, std::string_view what) {
    const auto &v = field(obj, "schema_version", what);
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
        fail(std::string(what) + ": unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
}

std::string dump(const Json &j) {
    return j.dump(2) + "\n";
}

Json real_matrix(const Eigen::MatrixXd &m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(m(i, k));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXd read_real_matrix(const Json &j, size_t m, std::string_view what) {
    if (!j.is_array() || j.size() != m) {
        fail(std::string(what) + " must be an array of " + std::to_string(m) + " rows");
    }
    Eigen::MatrixXd out(m, m);
    for (size_t i = 0; i < m; ++i) {
        if (!j[i].is_array() || j[i].size() != m) {
            fail(std::string(what) + " row " + std::to_string(i) + " must hold " + std::to_string(m) + " entries");
        }
        for (size_t k = 0; k < m; ++k) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                as_double(j[i][k], std::string(what) + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
        }
    }
    return out;
}

ModeOccupation parse_occupation(std::string_view s) {
    if (s.empty()) {
        return ModeOccupation();
    }
    return ModeOccupation::from_string(s);
}

const char *kind_name(OutcomeKind kind) {
    return kind == OutcomeKind::kClickPattern ? "clicks" : "occupation";
}

OutcomeKind parse_kind(std::string_view s) {
    if (s == "occupation") {
        return OutcomeKind::kOccupation;
    }
    if (s == "clicks") {
        return OutcomeKind::kClickPattern;
    }
    fail("unknown outcome kind \"" + std::string(s) + "\"");
}

// CSV: "# key=value" lines, then a header, then rows.
struct CsvTable {
    std::map<std::string, std::string> meta;
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> line_numbers;
};

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

CsvTable parse_csv(std::string_view text, std::string_view header, std::string_view what) {
    CsvTable table;
    bool seen_header = false;
    size_t line_no = 0;
    size_t pos = 0;
    const size_t columns = split(header).size();
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!seen_header && line.front() == '#') {
            auto body = line.substr(1);
            while (!body.empty() && body.front() == ' ') {
                body.remove_prefix(1);
            }
            auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                fail(std::string(what) + " line " + std::to_string(line_no) + ": metadata must be key=value");
            }
            table.meta[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
            continue;
        }
        if (!seen_header) {
            if (line != header) {
                fail(std::string(what) + " line " + std::to_string(line_no) + ": expected header \"" + std::string(header) + "\"");
            }
            seen_header = true;
            continue;
        }
        auto cells = split(line);
        if (cells.size() != columns) {
            fail(std::string(what) + " line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
        }
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    if (!seen_header) {
        fail(std::string(what) + ": missing header \"" + std::string(header) + "\"");
    }
    auto it = table.meta.find("schema_version");
    if (it != table.meta.end() && it->second != std::to_string(kSchemaVersion)) {
        fail(std::string(what) + ": unsupported schema_version " + it->second);
    }
    return table;
}

std::string meta_or_empty(const CsvTable &t, const char *key) {
    auto it = t.meta.find(key);
    return it == t.meta.end() ? std::string() : it->second;
}

uint64_t parse_u64(std::string_view s, std::string_view what) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        fail(std::string(what) + ": expected a non-negative integer, got \"" + std::string(s) + "\"");
    }
    return v;
}

std::string at_line(const CsvTable &t, size_t row, std::string_view what) {
    return std::string(what) + " line " + std::to_string(t.line_numbers[row]);
}

}  // namespace

std::string format_double(double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("cannot write a non-finite number");
    }
    if (value == 0) {
        value = 0;  // drop the sign of -0
    }
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, p);
}

double parse_double(std::string_view text, std::string_view what) {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
        fail(std::string(what) + ": expected a number, got \"" + std::string(text) + "\"");
    }
    return v;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("error writing " + path);
    }
}

std::string matrix_to_json(const TransferMatrix &lambda) {
    const auto &e = lambda.entries();
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["m"] = lambda.size();
    j["re"] = real_matrix(e.real());
    j["im"] = real_matrix(e.imag());
    if (lambda.sigma()) {
        Json sigma;
        sigma["magnitude"] = real_matrix(lambda.sigma()->magnitude);
        sigma["phase"] = real_matrix(lambda.sigma()->phase);
        j["sigma"] = std::move(sigma);
    }
    return dump(j);
}

TransferMatrix matrix_from_json(std::string_view text) {
    const char *what = "matrix file";
    auto j = parse_json(text, what);
    check_schema(j, what);
    const size_t m = as_index(field(j, "m", what), "m");
    if (m == 0) {
        fail("matrix file: m must be positive");
    }
    auto re = read_real_matrix(field(j, "re", what), m, "re");
    auto im = read_real_matrix(field(j, "im", what), m, "im");
    ComplexMatrix e(m, m);
    e.real() = re;
    e.imag() = im;
    TransferMatrix lambda(e);
    if (j.contains("sigma")) {
        const auto &s = j.at("sigma");
        lambda.set_sigma({read_real_matrix(field(s, "magnitude", "sigma"), m, "sigma.magnitude"),
                          read_real_matrix(field(s, "phase", "sigma"), m, "sigma.phase")});
    }
    return lambda;
}

std::string matrix_hash(const TransferMatrix &lambda) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : matrix_to_json(lambda)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string distribution_to_csv(const OutcomeDistribution &dist) {
    const auto &meta = dist.metadata();
    std::string out;
    out += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    out += std::string("# kind=") + kind_name(meta.kind) + "\n";
    out += "# input=" + (meta.input.num_modes() ? meta.input.str() : std::string()) + "\n";
    out += "# matrix_id=" + meta.matrix_id + "\n";
    out += "# postselection=" + meta.postselection + "\n";
    out += "outcome,probability\n";
    for (size_t k = 0; k < dist.size(); ++k) {
        out += dist.outcomes()[k].str() + "," + format_double(dist.probs()[k]) + "\n";
    }
    return out;
}

OutcomeDistribution distribution_from_csv(std::string_view text) {
    const char *what = "distribution CSV";
    auto t = parse_csv(text, "outcome,probability", what);
    DistributionMetadata meta;
    auto kind = meta_or_empty(t, "kind");
    meta.kind = kind.empty() ? OutcomeKind::kOccupation : parse_kind(kind);
    meta.input = parse_occupation(meta_or_empty(t, "input"));
    meta.matrix_id = meta_or_empty(t, "matrix_id");
    meta.postselection = meta_or_empty(t, "postselection");
    std::vector<ModeOccupation> outcomes;
    std::vector<double> probs;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        auto where = at_line(t, r, what);
        try {
            outcomes.push_back(ModeOccupation::from_string(t.rows[r][0]));
        } catch (const std::invalid_argument &e) {
            fail(where + ": " + e.what());
        }
        probs.push_back(parse_double(t.rows[r][1], where));
    }
    return OutcomeDistribution(std::move(outcomes), std::move(probs), std::move(meta));
}

std::string distribution_to_json(const OutcomeDistribution &dist) {
    const auto &meta = dist.metadata();
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind_name(meta.kind);
    j["input"] = meta.input.num_modes() ? meta.input.str() : std::string();
    j["matrix_id"] = meta.matrix_id;
    j["postselection"] = meta.postselection;
    Json rows = Json::array();
    for (size_t k = 0; k < dist.size(); ++k) {
        rows.push_back({{"outcome", dist.outcomes()[k].str()}, {"probability", dist.probs()[k]}});
    }
    j["outcomes"] = std::move(rows);
    return dump(j);
}

OutcomeDistribution distribution_from_json(std::string_view text) {
    const char *what = "distribution JSON";
    auto j = parse_json(text, what);
    check_schema(j, what);
    DistributionMetadata meta;
    meta.kind = parse_kind(as_string(field(j, "kind", what), "kind"));
    meta.input = parse_occupation(as_string(field(j, "input", what), "input"));
    meta.matrix_id = as_string(field(j, "matrix_id", what), "matrix_id");
    meta.postselection = as_string(field(j, "postselection", what), "postselection");
    const auto &rows = field(j, "outcomes", what);
    if (!rows.is_array()) {
        fail("distribution JSON: outcomes must be an array");
    }
    std::vector<ModeOccupation> outcomes;
    std::vector<double> probs;
    for (const auto &row : rows) {
        outcomes.push_back(ModeOccupation::from_string(as_string(field(row, "outcome", "outcome row"), "outcome")));
        probs.push_back(as_double(field(row, "probability", "outcome row"), "probability"));
    }
    return OutcomeDistribution(std::move(outcomes), std::move(probs), std::move(meta));
}

std::string samples_to_csv(const SampleFile &samples) {
    std::string out;
    out += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    out += std::string("# kind=") + kind_name(samples.kind) + "\n";
    out += "# input=" + (samples.input.num_modes() ? samples.input.str() : std::string()) + "\n";
    out += "# seed=" + std::to_string(samples.record.seed) + "\n";
    out += "# n=" + std::to_string(samples.record.total) + "\n";
    out += "# matrix_hash=" + samples.matrix_hash + "\n";
    out += "outcome,count\n";
    for (const auto &[outcome, count] : samples.record.counts) {
        if (count) {
            out += outcome.str() + "," + std::to_string(count) + "\n";
        }
    }
    return out;
}

SampleFile samples_from_csv(std::string_view text) {
    const char *what = "sample CSV";
    auto t = parse_csv(text, "outcome,count", what);
    SampleFile s;
    auto kind = meta_or_empty(t, "kind");
    s.kind = kind.empty() ? OutcomeKind::kOccupation : parse_kind(kind);
    s.input = parse_occupation(meta_or_empty(t, "input"));
    s.record.seed = parse_u64(meta_or_empty(t, "seed"), "seed");
    s.matrix_hash = meta_or_empty(t, "matrix_hash");
    uint64_t total = 0;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        auto where = at_line(t, r, what);
        auto outcome = ModeOccupation::from_string(t.rows[r][0]);
        uint64_t count = parse_u64(t.rows[r][1], where);
        if (!s.record.counts.emplace(outcome, count).second) {
            fail(where + ": duplicate outcome " + outcome.str());
        }
        total += count;
    }
    s.record.total = parse_u64(meta_or_empty(t, "n"), "n");
    if (s.record.total != total) {
        fail("sample CSV: counts sum to " + std::to_string(total) + " but n=" + std::to_string(s.record.total));
    }
    return s;
}

std::string samples_to_json(const SampleFile &samples) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind_name(samples.kind);
    j["input"] = samples.input.num_modes() ? samples.input.str() : std::string();
    j["seed"] = samples.record.seed;
    j["n"] = samples.record.total;
    j["matrix_hash"] = samples.matrix_hash;
    Json rows = Json::array();
    for (const auto &[outcome, count] : samples.record.counts) {
        if (count) {
            rows.push_back({{"outcome", outcome.str()}, {"count", count}});
        }
    }
    j["counts"] = std::move(rows);
    return dump(j);
}

SampleFile samples_from_json(std::string_view text) {
    const char *what = "sample JSON";
    auto j = parse_json(text, what);
    check_schema(j, what);
    SampleFile s;
    s.kind = parse_kind(as_string(field(j, "kind", what), "kind"));
    s.input = parse_occupation(as_string(field(j, "input", what), "input"));
    s.record.seed = as_index(field(j, "seed", what), "seed");
    s.record.total = as_index(field(j, "n", what), "n");
    s.matrix_hash = as_string(field(j, "matrix_hash", what), "matrix_hash");
    uint64_t total = 0;
    for (const auto &row : field(j, "counts", what)) {
        auto outcome = ModeOccupation::from_string(as_string(field(row, "outcome", "count row"), "outcome"));
        uint64_t count = as_index(field(row, "count", "count row"), "count");
        if (!s.record.counts.emplace(outcome, count).second) {
            fail("sample JSON: duplicate outcome " + outcome.str());
        }
        total += count;
    }
    if (total != s.record.total) {
        fail("sample JSON: counts do not sum to n");
    }
    return s;
}

std::string topology_to_json(const CircuitTopology &topo) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["modes"] = topo.modes;
    j["accessible"] = topo.accessible;
    Json elements = Json::array();
    for (const auto &e : topo.elements) {
        elements.push_back({{"a", e.a}, {"b", e.b}, {"r", e.reflectivity}, {"theta", e.phase}});
    }
    j["elements"] = std::move(elements);
    return dump(j);
}

CircuitTopology topology_from_json(std::string_view text) {
    const char *what = "topology JSON";
    auto j = parse_json(text, what);
    check_schema(j, what);
    CircuitTopology topo;
    topo.modes = as_index(field(j, "modes", what), "modes");
    const auto &acc = field(j, "accessible", what);
    if (!acc.is_array()) {
        fail("topology JSON: accessible must be an array");
    }
    for (const auto &a : acc) {
        topo.accessible.push_back(as_index(a, "accessible entry"));
    }
    const auto &elements = field(j, "elements", what);
    if (!elements.is_array()) {
        fail("topology JSON: elements must be an array");
    }
    for (size_t k = 0; k < elements.size(); ++k) {
        const auto &e = elements[k];
        auto where = "element " + std::to_string(k);
        BeamSplitter b;
        b.a = as_index(field(e, "a", where), where + ".a");
        b.b = as_index(field(e, "b", where), where + ".b");
        b.reflectivity = as_double(field(e, "r", where), where + ".r");
        b.phase = e.contains("theta") ? as_double(e.at("theta"), where + ".theta") : 0.0;
        topo.elements.push_back(b);
    }
    topo.validate();
    return topo;
}

std::string noise_params_to_json(const NoiseParams &params) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    Json sources = Json::array();
    for (const auto &s : params.sources) {
        sources.push_back({{"lambda2", s.lambda2}, {"modes", s.modes}, {"pairs", s.pairs}, {"truncation", s.truncation}});
    }
    j["sources"] = std::move(sources);
    j["alpha"] = params.alpha;
    if (params.dark_rate.size() == 1) {
        j["dark_rate"] = params.dark_rate[0];
    } else {
        j["dark_rate"] = params.dark_rate;
    }
    j["postselect_N"] = params.postselect_n;
    return dump(j);
}

NoiseParams noise_params_from_json(std::string_view text) {
    const char *what = "noise parameters";
    auto j = parse_json(text, what);
    if (j.contains("schema_version")) {
        check_schema(j, what);
    }
    NoiseParams p;
    const auto &sources = field(j, "sources", what);
    if (!sources.is_array()) {
        fail("noise parameters: sources must be an array");
    }
    for (size_t k = 0; k < sources.size(); ++k) {
        const auto &s = sources[k];
        auto where = "source " + std::to_string(k);
        PdcSource src;
        src.lambda2 = as_double(field(s, "lambda2", where), where + ".lambda2");
        const auto &modes = field(s, "modes", where);
        if (!modes.is_array()) {
            fail(where + ".modes must be an array");
        }
        for (const auto &m : modes) {
            src.modes.push_back(as_index(m, where + ".modes entry"));
        }
        if (s.contains("pairs")) {
            src.pairs = static_cast<uint32_t>(as_index(s.at("pairs"), where + ".pairs"));
        }
        if (s.contains("truncation")) {
            src.truncation = static_cast<uint32_t>(as_index(s.at("truncation"), where + ".truncation"));
        }
        p.sources.push_back(std::move(src));
    }
    if (j.contains("alpha")) {
        p.alpha = as_double(j.at("alpha"), "alpha");
    }
    if (j.contains("dark_rate")) {
        const auto &d = j.at("dark_rate");
        if (d.is_array()) {
            for (const auto &x : d) {
                p.dark_rate.push_back(as_double(x, "dark_rate entry"));
            }
        } else {
            p.dark_rate.push_back(as_double(d, "dark_rate"));
        }
    }
    p.postselect_n = as_index(field(j, "postselect_N", what), "postselect_N");
    return p;
}

std::string one_photon_to_csv(const OnePhotonData &data) {
    data.validate();
    std::string out = "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    out += "input_i,output_j,frequency,variance\n";
    for (Eigen::Index i = 0; i < data.frequency.rows(); ++i) {
        for (Eigen::Index k = 0; k < data.frequency.cols(); ++k) {
            out += std::to_string(i) + "," + std::to_string(k) + "," + format_double(data.frequency(i, k)) + "," +
                   format_double(data.variance(i, k)) + "\n";
        }
    }
    return out;
}

OnePhotonData one_photon_from_csv(std::string_view text) {
    const char *what = "one-photon CSV";
    auto t = parse_csv(text, "input_i,output_j,frequency,variance", what);
    size_t m = 0;
    while (m * m < t.rows.size()) {
        ++m;
    }
    if (m == 0 || m * m != t.rows.size()) {
        fail("one-photon CSV: expected M*M rows, got " + std::to_string(t.rows.size()));
    }
    OnePhotonData data;
    data.frequency = Eigen::MatrixXd::Constant(m, m, std::nan(""));
    data.variance = Eigen::MatrixXd::Zero(m, m);
    for (size_t r = 0; r < t.rows.size(); ++r) {
        auto where = at_line(t, r, what);
        size_t i = parse_u64(t.rows[r][0], where);
        size_t k = parse_u64(t.rows[r][1], where);
        if (i >= m || k >= m) {
            fail(where + ": index out of range for M=" + std::to_string(m));
        }
        auto ii = static_cast<Eigen::Index>(i);
        auto kk = static_cast<Eigen::Index>(k);
        if (!std::isnan(data.frequency(ii, kk))) {
            fail(where + ": duplicate entry (" + std::to_string(i) + ", " + std::to_string(k) + ")");
        }
        data.frequency(ii, kk) = parse_double(t.rows[r][2], where);
        data.variance(ii, kk) = parse_double(t.rows[r][3], where);
    }
    data.validate();
    return data;
}

std::string two_photon_to_csv(const TwoPhotonData &data) {
    std::string out = "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    out += "i1,i2,j1,j2,visibility,variance\n";
    for (const auto &r : data) {
        out += std::to_string(r.i1) + "," + std::to_string(r.i2) + "," + std::to_string(r.j1) + "," +
               std::to_string(r.j2) + "," + format_double(r.visibility) + "," + format_double(r.variance) + "\n";
    }
    return out;
}

TwoPhotonData two_photon_from_csv(std::string_view text) {
    const char *what = "two-photon CSV";
    auto t = parse_csv(text, "i1,i2,j1,j2,visibility,variance", what);
    TwoPhotonData data;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        auto where = at_line(t, r, what);
        VisibilityRecord rec;
        rec.i1 = parse_u64(t.rows[r][0], where);
        rec.i2 = parse_u64(t.rows[r][1], where);
        rec.j1 = parse_u64(t.rows[r][2], where);
        rec.j2 = parse_u64(t.rows[r][3], where);
        rec.visibility = parse_double(t.rows[r][4], where);
        rec.variance = parse_double(t.rows[r][5], where);
        if (rec.i1 == rec.i2 || rec.j1 == rec.j2) {
            fail(where + ": a record needs two distinct inputs and two distinct outputs");
        }
        data.push_back(rec);
    }
    return data;
}

std::string mask_to_json(const PhaseModel &model) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["m"] = model.size();
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < model.mask().rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < model.mask().cols(); ++k) {
            row.push_back(model.mask()(i, k) ? 1 : 0);
        }
        rows.push_back(std::move(row));
    }
    j["mask"] = std::move(rows);
    return dump(j);
}

PhaseModel mask_from_json(std::string_view text) {
    const char *what = "mask JSON";
    auto j = parse_json(text, what);
    check_schema(j, what);
    const size_t m = as_index(field(j, "m", what), "m");
    const auto &rows = field(j, "mask", what);
    if (m == 0 || !rows.is_array() || rows.size() != m) {
        fail("mask JSON: mask must be an M x M array");
    }
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(m, m);
    for (size_t i = 0; i < m; ++i) {
        if (!rows[i].is_array() || rows[i].size() != m) {
            fail("mask JSON: row " + std::to_string(i) + " must hold " + std::to_string(m) + " entries");
        }
        for (size_t k = 0; k < m; ++k) {
            size_t v = as_index(rows[i][k], "mask entry");
            if (v > 1) {
                fail("mask JSON: entries must be 0 or 1");
            }
            mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v == 1;
        }
    }
    return PhaseModel(std::move(mask));
}

TransferMatrix Reconstruction::matrix() const {
    return assemble_matrix(tau, phases);
}

std::string reconstruction_to_json(const Reconstruction &rec) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["m"] = rec.tau.rows();
    j["tau"] = real_matrix(rec.tau);
    j["phi"] = real_matrix(rec.phases);
    j["residual"] = rec.residual;
    j["rank"] = rec.rank;
    j["free_phases"] = rec.free_phases;
    Json fixed = Json::array();
    for (const auto &[i, k] : rec.fixed) {
        fixed.push_back({i, k});
    }
    j["gauge"] = {{"fixed", std::move(fixed)}, {"note", rec.gauge_note}};
    return dump(j);
}

Reconstruction reconstruction_from_json(std::string_view text) {
    const char *what = "reconstruction JSON";
    auto j = parse_json(text, what);
    check_schema(j, what);
    Reconstruction rec;
    const size_t m = as_index(field(j, "m", what), "m");
    rec.tau = read_real_matrix(field(j, "tau", what), m, "tau");
    rec.phases = read_real_matrix(field(j, "phi", what), m, "phi");
    rec.residual = as_double(field(j, "residual", what), "residual");
    rec.rank = as_index(field(j, "rank", what), "rank");
    rec.free_phases = as_index(field(j, "free_phases", what), "free_phases");
    const auto &gauge = field(j, "gauge", what);
    for (const auto &pair : field(gauge, "fixed", "gauge")) {
        if (!pair.is_array() || pair.size() != 2) {
            fail("reconstruction JSON: gauge.fixed entries must be [i, j] pairs");
        }
        rec.fixed.emplace_back(as_index(pair[0], "gauge index"), as_index(pair[1], "gauge index"));
    }
    rec.gauge_note = as_string(field(gauge, "note", "gauge"), "gauge.note");
    return rec;
}

}  // namespace bosonsim
