#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vislip/features.hpp"

namespace vislip::io {

namespace fs = std::filesystem;

/// Shortest "%.*g" text that reads back to the same double (at most 17 digits).
std::string format_double(double v);
/// Compact "%.9g" text for bulky feature columns.
std::string format_feature(double v);

void write_text(const fs::path& path, std::string_view content);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws IoError when absent
};

CsvTable parse_csv(std::string_view text, const std::string& source = "csv");
std::string join_csv(const std::vector<std::string>& cells);

std::vector<std::string> feature_names(Method m, std::size_t dim, double band_lo, double band_width);

/// trial_id, material, f_n, step, label_s, then feature columns.
std::string dataset_csv(const Dataset& ds, const std::vector<std::string>& feature_columns);
Dataset parse_dataset_csv(std::string_view text, Method method, const std::string& source);

std::string file_checksum(const fs::path& path);

/// Run manifest: tool version, config hash, per-command timestamps and a file
/// inventory with checksums. Paths are relative to the run directory.
class Manifest {
public:
    static Manifest load_or_new(const fs::path& run_dir);

    void record(const std::string& command, const std::string& config_hash,
                const std::vector<std::string>& relative_paths);
    /// Throws IoError if the file is missing, unrecorded or changed since recording.
    void verify(const std::string& relative_path) const;
    bool contains(const std::string& relative_path) const;
    void save() const;

    const nlohmann::json& json() const { return doc_; }

private:
    fs::path run_dir_;
    nlohmann::json doc_;
};

}  // namespace vislip::io
