#include "gfsc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gfsc/normalize.hpp"

namespace gfsc {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string to_string(Orientation o)
{
    return o == Orientation::FeaturesBySamples ? "features×samples" : "samples×features";
}

Orientation parse_orientation(const std::string& text)
{
    if (text == "features×samples" || text == "features_x_samples" || text == "features")
        return Orientation::FeaturesBySamples;
    if (text == "samples×features" || text == "samples_x_features" || text == "samples")
        return Orientation::SamplesByFeatures;
    throw DatasetError("unknown orientation '" + text + "'");
}

namespace {

double parse_number(std::string_view token, const fs::path& path, std::size_t line)
{
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
        token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
        throw DatasetError(path.string() + ":" + std::to_string(line) + ": cannot parse '" +
                           std::string(token) + "' as a number");
    return value;
}

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write " + path.string());
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

} // namespace

Matrix<double> read_csv_matrix(const fs::path& path, bool header)
{
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header && line_no == 1) continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view token(line.data() + start,
                                         (comma == std::string::npos ? line.size() : comma) - start);
            row.push_back(parse_number(token, path, line_no));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(rows.front().size()) + " columns, found " +
                               std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DatasetError(path.string() + ": no data rows");
    Matrix<double> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void write_csv_matrix(const Matrix<double>& m, const fs::path& path)
{
    auto out = open_output(path);
    char buffer[64];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), m(i, j));
            out.write(buffer, ptr - buffer);
        }
        out << '\n';
    }
}

Labels read_labels(const fs::path& path, bool header)
{
    const Matrix<double> m = read_csv_matrix(path, header);
    if (m.rows() != 1 && m.cols() != 1)
        throw DatasetError(path.string() + ": labels must be a single row or column");
    Labels labels(static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.size(); ++i) {
        const double v = m.data()[i];
        if (v != static_cast<double>(static_cast<int>(v)))
            throw DatasetError(path.string() + ": label " + std::to_string(v) + " is not an integer");
        labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    return labels;
}

void write_labels(const Labels& labels, const fs::path& path)
{
    auto out = open_output(path);
    for (int l : labels) out << l << '\n';
}

DatasetManifest read_manifest(const fs::path& path)
{
    auto in = open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DatasetError(path.string() + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.name = j.value("name", path.stem().string());
        for (const auto& v : j.at("views")) {
            ViewSource src;
            src.path = v.at("path").get<std::string>();
            src.format = v.value("format", "csv");
            src.orientation = parse_orientation(v.value("orientation", "features×samples"));
            src.header = v.value("header", false);
            src.name = v.value("name", "");
            if (src.format != "csv") throw DatasetError("unsupported view format '" + src.format + "'");
            m.views.push_back(std::move(src));
        }
        if (j.contains("labels_path") && !j.at("labels_path").is_null())
            m.labels_path = j.at("labels_path").get<std::string>();
        m.labels_header = j.value("labels_header", false);
        if (j.contains("expected_n")) m.expected_n = j.at("expected_n").get<long>();
        if (j.contains("expected_t")) m.expected_t = j.at("expected_t").get<long>();
        if (j.contains("expected_k")) m.expected_k = j.at("expected_k").get<long>();
    } catch (const json::exception& e) {
        throw DatasetError(path.string() + ": " + e.what());
    }
    m.base_dir = path.parent_path();
    return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& path)
{
    json j;
    j["name"] = m.name;
    j["views"] = json::array();
    for (const auto& v : m.views) {
        json view = {{"path", v.path},
                     {"format", v.format},
                     {"orientation", to_string(v.orientation)},
                     {"header", v.header}};
        if (!v.name.empty()) view["name"] = v.name;
        j["views"].push_back(std::move(view));
    }
    if (m.labels_path) {
        j["labels_path"] = *m.labels_path;
        j["labels_header"] = m.labels_header;
    }
    if (m.expected_n) j["expected_n"] = *m.expected_n;
    if (m.expected_t) j["expected_t"] = *m.expected_t;
    if (m.expected_k) j["expected_k"] = *m.expected_k;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

MultiViewDataset<double> load_dataset(const DatasetManifest& manifest)
{
    if (manifest.views.empty()) throw DatasetError(manifest.name + ": manifest lists no views");
    std::vector<std::string> problems;
    if (manifest.expected_t && *manifest.expected_t != static_cast<long>(manifest.views.size()))
        problems.push_back("declares " + std::to_string(manifest.views.size()) +
                           " views, expected_t is " + std::to_string(*manifest.expected_t));

    std::vector<Matrix<double>> views;
    std::vector<std::string> names;
    for (std::size_t v = 0; v < manifest.views.size(); ++v) {
        const auto& src = manifest.views[v];
        Matrix<double> m = read_csv_matrix(resolve(manifest.base_dir, src.path), src.header);
        if (src.orientation == Orientation::SamplesByFeatures) m.transposeInPlace();
        names.push_back(src.name.empty() ? "view" + std::to_string(v + 1) : src.name);
        views.push_back(std::move(m));
    }

    const long n = static_cast<long>(views.front().cols());
    for (std::size_t v = 0; v < views.size(); ++v) {
        const long nv = static_cast<long>(views[v].cols());
        if (nv != n)
            problems.push_back("view " + std::to_string(v + 1) + " (" + manifest.views[v].path +
                               ") has " + std::to_string(nv) + " samples x " +
                               std::to_string(views[v].rows()) + " features; view 1 has " +
                               std::to_string(n) + " samples");
    }
    if (manifest.expected_n && *manifest.expected_n != n)
        problems.push_back("found " + std::to_string(n) + " samples, expected_n is " +
                           std::to_string(*manifest.expected_n));

    std::optional<Labels> labels;
    if (manifest.labels_path) {
        labels = read_labels(resolve(manifest.base_dir, *manifest.labels_path), manifest.labels_header);
        if (static_cast<long>(labels->size()) != n)
            problems.push_back("labels file has " + std::to_string(labels->size()) +
                               " entries for " + std::to_string(n) + " samples");
        const long k = count_distinct(reencode_labels(*labels));
        if (manifest.expected_k && *manifest.expected_k != k)
            problems.push_back("labels contain " + std::to_string(k) + " classes, expected_k is " +
                               std::to_string(*manifest.expected_k));
    }

    if (!problems.empty()) {
        std::string message = manifest.name + ": dataset validation failed";
        for (const auto& p : problems) message += "\n  - " + p;
        throw DatasetError(message);
    }
    return normalize_dataset(MultiViewDataset<double>(std::move(views), std::move(labels), std::move(names)));
}

DatasetManifest write_dataset(const MultiViewDataset<double>& data, const std::string& name,
                              const fs::path& dir)
{
    fs::create_directories(dir);
    DatasetManifest m;
    m.name = name;
    m.base_dir = dir;
    for (Index v = 0; v < data.t(); ++v) {
        const std::string file = "view" + std::to_string(v + 1) + ".csv";
        write_csv_matrix(data.view(v), dir / file);
        m.views.push_back({file, "csv", Orientation::FeaturesBySamples, false,
                           data.view_names()[static_cast<std::size_t>(v)]});
    }
    m.expected_n = data.n();
    m.expected_t = data.t();
    if (data.has_labels()) {
        write_labels(*data.labels(), dir / "labels.csv");
        m.labels_path = "labels.csv";
        m.expected_k = data.num_classes();
    }
    write_manifest(m, dir / "manifest.json");
    return m;
}

} // namespace gfsc
