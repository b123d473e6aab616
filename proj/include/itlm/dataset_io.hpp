#ifndef ITLM_DATASET_IO_HPP
#define ITLM_DATASET_IO_HPP

#include <string>

#include "itlm/glm.hpp"

namespace itlm {

/// Plain-text dataset format, one token stream per line:
///
///   itlm-dataset v1
///   n <rows> d <cols>
///   link identity            (or: link piecewise <neg> <pos>)
///   truth <components>       (0 = no ground truth)
///   theta <d values>         (one line per component)
///   <d features> <response> [<clean> <component>]   (n data lines)
///
/// Every real number is a C++17 hexadecimal float literal (no 0x
/// prefix), so reloading reproduces the exact 64-bit values.
void save_dataset(const Dataset& dataset, const std::string& path);

Dataset load_dataset(const std::string& path);

/// Hex-literal helpers shared with the tests; parse errors throw IoError.
std::string format_hex_double(double value);
double parse_hex_double(const std::string& token);

} // namespace itlm

#endif // ITLM_DATASET_IO_HPP
