#ifndef ITLM_CSV_HPP
#define ITLM_CSV_HPP

#include <json.hpp>
#include <string>
#include <vector>

namespace itlm {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Locale-independent decimal rendering with 17 significant digits, so a
/// round-trip parse reproduces the exact 64-bit value.
std::string format_double(double value);

/// UTF-8 CSV with a header row plus a '<path>.meta.json' sidecar holding
/// the caller's metadata verbatim. Values containing separators are
/// quoted. Rows must match the header width.
void emit_csv(const Table& table, const std::string& path,
              const nlohmann::ordered_json& metadata);

} // namespace itlm

#endif // ITLM_CSV_HPP
