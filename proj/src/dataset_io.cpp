#include "itlm/dataset_io.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <system_error>

#include "itlm/errors.hpp"

namespace itlm {

namespace {

constexpr const char* kMagic = "itlm-dataset v1";

Index parse_count(const std::string& token, const char* what) {
    Index value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
        throw IoError(fmt::format("invalid {} '{}' in dataset file", what,
                                  token));
    }
    return value;
}

std::string next_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(fmt::format("dataset file truncated before {}", what));
    }
    return line;
}

} // namespace

std::string format_hex_double(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::hex);
    if (ec != std::errc()) {
        throw IoError("failed to format a value");
    }
    return std::string(buf, ptr);
}

double parse_hex_double(const std::string& token) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(
        token.data(), token.data() + token.size(), value,
        std::chars_format::hex);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw IoError(
            fmt::format("invalid value '{}' in dataset file", token));
    }
    return value;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(fmt::format("cannot open '{}' for writing", path));
    }
    const Index n = dataset.n();
    const Index d = dataset.d();
    out << kMagic << '\n';
    out << "n " << n << " d " << d << '\n';
    if (dataset.link.is_identity()) {
        out << "link identity\n";
    } else {
        out << "link piecewise " << format_hex_double(dataset.link.neg_slope())
            << ' ' << format_hex_double(dataset.link.pos_slope()) << '\n';
    }
    if (dataset.truth) {
        out << "truth " << dataset.truth->theta_star.size() << '\n';
        for (const Vector& t : dataset.truth->theta_star) {
            out << "theta";
            for (Index j = 0; j < d; ++j) {
                out << ' ' << format_hex_double(t[j]);
            }
            out << '\n';
        }
    } else {
        out << "truth 0\n";
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            out << format_hex_double(dataset.features(i, j)) << ' ';
        }
        out << format_hex_double(dataset.responses[i]);
        if (dataset.truth) {
            out << ' '
                << int(dataset.truth->clean_mask[static_cast<std::size_t>(i)])
                << ' '
                << dataset.truth->component_id[static_cast<std::size_t>(i)];
        }
        out << '\n';
    }
    if (!out) {
        throw IoError(fmt::format("write to '{}' failed", path));
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}' for reading", path));
    }
    if (next_line(in, "header") != kMagic) {
        throw IoError(fmt::format("'{}' is not an itlm-dataset v1 file", path));
    }

    std::string word, tok_n, tok_d;
    {
        std::istringstream dims(next_line(in, "dimensions"));
        std::string kw_n, kw_d;
        if (!(dims >> kw_n >> tok_n >> kw_d >> tok_d) || kw_n != "n" ||
            kw_d != "d") {
            throw IoError("malformed dimension line in dataset file");
        }
    }
    const Index n = parse_count(tok_n, "row count");
    const Index d = parse_count(tok_d, "column count");
    if (n < 1 || d < 1) {
        throw IoError("dataset dimensions must be positive");
    }

    Dataset ds;
    {
        std::istringstream link(next_line(in, "link"));
        std::string kw, kind;
        if (!(link >> kw >> kind) || kw != "link") {
            throw IoError("malformed link line in dataset file");
        }
        if (kind == "identity") {
            ds.link = LinkFunction::identity();
        } else if (kind == "piecewise") {
            std::string neg, pos;
            if (!(link >> neg >> pos)) {
                throw IoError("piecewise link needs two slopes");
            }
            ds.link = LinkFunction::piecewise_linear(parse_hex_double(neg),
                                                     parse_hex_double(pos));
        } else {
            throw IoError(fmt::format("unknown link kind '{}'", kind));
        }
    }

    Index n_components = 0;
    {
        std::istringstream truth(next_line(in, "truth flag"));
        std::string kw, count;
        if (!(truth >> kw >> count) || kw != "truth") {
            throw IoError("malformed truth line in dataset file");
        }
        n_components = parse_count(count, "component count");
    }
    if (n_components > 0) {
        TruthInfo truth;
        for (Index c = 0; c < n_components; ++c) {
            std::istringstream line(next_line(in, "truth component"));
            std::string kw;
            if (!(line >> kw) || kw != "theta") {
                throw IoError("malformed component line in dataset file");
            }
            Vector t(d);
            std::string tok;
            for (Index j = 0; j < d; ++j) {
                if (!(line >> tok)) {
                    throw IoError("truth component line too short");
                }
                t[j] = parse_hex_double(tok);
            }
            truth.theta_star.push_back(std::move(t));
        }
        truth.clean_mask.resize(static_cast<std::size_t>(n));
        truth.component_id.resize(static_cast<std::size_t>(n));
        ds.truth = std::move(truth);
    }

    ds.features.resize(n, d);
    ds.responses.resize(n);
    for (Index i = 0; i < n; ++i) {
        std::istringstream line(next_line(in, "data row"));
        std::string tok;
        for (Index j = 0; j < d; ++j) {
            if (!(line >> tok)) {
                throw IoError(fmt::format("data row {} too short", i));
            }
            ds.features(i, j) = parse_hex_double(tok);
        }
        if (!(line >> tok)) {
            throw IoError(fmt::format("data row {} is missing a response", i));
        }
        ds.responses[i] = parse_hex_double(tok);
        if (ds.truth) {
            std::string clean, comp;
            if (!(line >> clean >> comp)) {
                throw IoError(
                    fmt::format("data row {} is missing truth columns", i));
            }
            if (clean != "0" && clean != "1") {
                throw IoError(
                    fmt::format("invalid clean flag '{}' at row {}", clean, i));
            }
            ds.truth->clean_mask[static_cast<std::size_t>(i)] =
                clean == "1" ? 1 : 0;
            int value = 0;
            const auto [ptr, ec] = std::from_chars(
                comp.data(), comp.data() + comp.size(), value);
            if (ec != std::errc() || ptr != comp.data() + comp.size()) {
                throw IoError(fmt::format(
                    "invalid component id '{}' at row {}", comp, i));
            }
            ds.truth->component_id[static_cast<std::size_t>(i)] = value;
        }
    }

    try {
        ds.validate();
    } catch (const ConfigError& e) {
        throw IoError(
            fmt::format("dataset file '{}' is inconsistent: {}", path, e.what()));
    }
    return ds;
}

} // namespace itlm
