#include "itlm/csv.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>

#include "itlm/errors.hpp"

namespace itlm {

namespace {

bool needs_quoting(const std::string& value) {
    return value.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::ostream& out, const std::string& value) {
    if (!needs_quoting(value)) {
        out << value;
        return;
    }
    out << '"';
    for (char c : value) {
        if (c == '"') {
            out << '"';
        }
        out << c;
    }
    out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        write_cell(out, row[i]);
    }
    out << '\n';
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                         std::chars_format::general, 17);
    if (ec != std::errc()) {
        throw IoError("failed to format a value");
    }
    return std::string(buf, ptr);
}

void emit_csv(const Table& table, const std::string& path,
              const nlohmann::ordered_json& metadata) {
    if (table.header.empty()) {
        throw ConfigError("table needs a header row");
    }
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw ConfigError(fmt::format(
                "row width {} does not match header width {}", row.size(),
                table.header.size()));
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(fmt::format("cannot open '{}' for writing", path));
    }
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        write_row(out, row);
    }
    if (!out) {
        throw IoError(fmt::format("write to '{}' failed", path));
    }

    const std::string meta_path = path + ".meta.json";
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) {
        throw IoError(fmt::format("cannot open '{}' for writing", meta_path));
    }
    meta << metadata.dump(2) << '\n';
    if (!meta) {
        throw IoError(fmt::format("write to '{}' failed", meta_path));
    }
}

} // namespace itlm
