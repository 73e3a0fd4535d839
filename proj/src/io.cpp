#include "vislip/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <limits>
#include <fstream>
#include <sstream>

#include "vislip/common.hpp"

namespace vislip::io {

std::string format_double(double v) {
    char buf[32];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string format_feature(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_text(const fs::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
    const auto text = read_text(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path.string() + " is not valid JSON: " + e.what());
    }
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("CSV has no column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
    CsvTable t;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t c = 0;
        while (true) {
            const auto comma = line.find(',', c);
            cells.emplace_back(line.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
            if (comma == std::string_view::npos) break;
            c = comma + 1;
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size())
                throw IoError(source + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                              std::to_string(cells.size()) + " cells, header has " + std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw IoError(source + " is empty");
    return t;
}

std::string join_csv(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\n\r\"") != std::string::npos)
            throw IoError("CSV cell '" + cells[i] + "' contains a separator");
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

std::vector<std::string> feature_names(Method m, std::size_t dim, double band_lo, double band_width) {
    std::vector<std::string> out;
    if (is_electrode_method(m)) {
        for (int idx : electrode_subset(electrode_count(m))) out.push_back("e" + std::to_string(idx));
    } else {
        for (std::size_t i = 0; i < dim; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "b%g", band_lo + band_width * static_cast<double>(i));
            out.emplace_back(buf);
        }
    }
    if (out.size() != dim) throw ShapeError("feature name count does not match dataset width");
    return out;
}

std::string dataset_csv(const Dataset& ds, const std::vector<std::string>& feature_columns) {
    if (feature_columns.size() != ds.features.cols()) throw ShapeError("feature column names do not match");
    std::string out;
    out.reserve(ds.size() * (ds.features.cols() * 12 + 40));
    std::vector<std::string> header{"trial_id", "material", "f_n", "step", "label_s"};
    header.insert(header.end(), feature_columns.begin(), feature_columns.end());
    out += join_csv(header);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += std::to_string(ds.trial_ids[i]);
        out += ',';
        out += ds.materials[i];
        out += ',';
        out += format_double(ds.f_n[i]);
        out += ',';
        out += std::to_string(ds.steps[i]);
        out += ',';
        out += format_double(ds.labels[i]);
        for (double v : ds.features.row(i)) {
            out += ',';
            out += format_feature(v);
        }
        out += '\n';
    }
    return out;
}

Dataset parse_dataset_csv(std::string_view text, Method method, const std::string& source) {
    const auto t = parse_csv(text, source);
    static const char* fixed[] = {"trial_id", "material", "f_n", "step", "label_s"};
    for (std::size_t i = 0; i < 5; ++i)
        if (t.header.size() <= i || t.header[i] != fixed[i])
            throw IoError(source + ": expected column '" + fixed[i] + "' at position " + std::to_string(i));
    Dataset ds;
    ds.method = method;
    const std::size_t dim = t.header.size() - 5;
    ds.features = Matrix(0, dim);
    std::vector<double> row(dim);
    try {
        for (const auto& r : t.rows) {
            ds.trial_ids.push_back(std::stoi(r[0]));
            ds.materials.push_back(r[1]);
            ds.f_n.push_back(std::stod(r[2]));
            ds.steps.push_back(std::stoi(r[3]));
            ds.labels.push_back(std::stod(r[4]));
            ds.s_true.push_back(std::numeric_limits<double>::quiet_NaN());
            for (std::size_t k = 0; k < dim; ++k) row[k] = std::stod(r[5 + k]);
            ds.features.append_row(row);
        }
    } catch (const std::logic_error&) {
        throw IoError(source + ": malformed number");
    }
    return ds;
}

std::string file_checksum(const fs::path& path) { return hex64(fnv1a64(read_text(path))); }

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

Manifest Manifest::load_or_new(const fs::path& run_dir) {
    Manifest m;
    m.run_dir_ = run_dir;
    const auto path = run_dir / "manifest.json";
    if (fs::exists(path)) {
        m.doc_ = read_json(path);
    } else {
        m.doc_ = {{"tool_version", kToolVersion}, {"files", nlohmann::json::object()},
                  {"timestamps", nlohmann::json::object()}};
    }
    return m;
}

void Manifest::record(const std::string& command, const std::string& config_hash,
                      const std::vector<std::string>& relative_paths) {
    doc_["tool_version"] = kToolVersion;
    doc_["config_hash"] = config_hash;
    doc_["timestamps"][command] = utc_now();
    for (const auto& rel : relative_paths) {
        const auto full = run_dir_ / rel;
        doc_["files"][rel] = {{"checksum", file_checksum(full)},
                              {"bytes", static_cast<std::uint64_t>(fs::file_size(full))},
                              {"command", command}};
    }
}

bool Manifest::contains(const std::string& relative_path) const {
    return doc_.contains("files") && doc_["files"].contains(relative_path);
}

void Manifest::verify(const std::string& relative_path) const {
    const auto full = run_dir_ / relative_path;
    if (!fs::exists(full)) throw IoError("missing artifact " + full.string());
    if (!contains(relative_path)) throw IoError("artifact " + relative_path + " is not recorded in the run manifest");
    const auto expected = doc_["files"][relative_path]["checksum"].get<std::string>();
    if (file_checksum(full) != expected)
        throw IoError("artifact " + relative_path + " changed since it was recorded (stale input)");
}

void Manifest::save() const { write_json(run_dir_ / "manifest.json", doc_); }

}  // namespace vislip::io
