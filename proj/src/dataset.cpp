#include "phasegp/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "phasegp/expr.hpp"

namespace phasegp {

namespace {

constexpr std::size_t kColumns = 8;
constexpr std::array<std::string_view, kColumns> kColumnNames { "ks", "T", "t", "p1dot", "p2dot", "p3dot", "p4dot",
    "ra" };

std::string_view trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto const comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

}  // namespace

DatasetError::DatasetError(Kind kind, std::string const& message, std::optional<std::size_t> row)
    : std::runtime_error(message)
    , kind_(kind)
    , row_(row)
{
}

std::string_view to_string(DatasetError::Kind kind)
{
    using K = DatasetError::Kind;
    switch (kind) {
    case K::FileNotFound: return "FileNotFound";
    case K::BadHeader: return "BadHeader";
    case K::MissingColumn: return "MissingColumn";
    case K::ExtraColumn: return "ExtraColumn";
    case K::ParseFailure: return "ParseFailure";
    case K::NonFinite: return "NonFinite";
    case K::NonMonotoneTime: return "NonMonotoneTime";
    case K::RaOutOfRange: return "RaOutOfRange";
    case K::InconsistentKs: return "InconsistentKs";
    case K::NonPositiveKs: return "NonPositiveKs";
    case K::EmptyDataset: return "EmptyDataset";
    }
    return "Unknown";
}

std::span<double const> Dataset::target(std::size_t k) const
{
    switch (k) {
    case 0: return p1dot;
    case 1: return p2dot;
    case 2: return p3dot;
    case 3: return ra;
    default: throw std::out_of_range("equation index out of range");
    }
}

Dataset Dataset::head(std::size_t n) const
{
    n = std::min(n, size());
    auto cut = [n](std::vector<double> const& v) { return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)); };
    Dataset out;
    out.ks = ks;
    out.t = cut(t);
    out.temperature = cut(temperature);
    out.p1dot = cut(p1dot);
    out.p2dot = cut(p2dot);
    out.p3dot = cut(p3dot);
    out.p4dot = cut(p4dot);
    out.ra = cut(ra);
    return out;
}

void validate(Dataset const& data)
{
    using K = DatasetError::Kind;
    if (data.size() == 0) {
        throw DatasetError(K::EmptyDataset, "dataset has no data rows");
    }
    if (!(data.ks > 0.0)) {
        throw DatasetError(K::NonPositiveKs, "cooling rate ks must be positive", 0);
    }
    std::array<std::vector<double> const*, 7> const columns { &data.t, &data.temperature, &data.p1dot, &data.p2dot,
        &data.p3dot, &data.p4dot, &data.ra };
    for (auto const* c : columns) {
        if (c->size() != data.size()) {
            throw DatasetError(K::MissingColumn, "dataset columns differ in length");
        }
    }
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (auto const* c : columns) {
            if (!std::isfinite((*c)[r])) {
                throw DatasetError(K::NonFinite, row_label(r) + ": non-finite value", r);
            }
        }
        if (r > 0 && !(data.t[r] > data.t[r - 1])) {
            throw DatasetError(K::NonMonotoneTime, row_label(r) + ": time is not strictly increasing", r);
        }
        if (data.ra[r] < 0.0 || data.ra[r] > 1.0) {
            throw DatasetError(K::RaOutOfRange, row_label(r) + ": ra outside [0, 1]", r);
        }
    }
}

Dataset parse_dataset(std::istream& in, std::string const& source)
{
    using K = DatasetError::Kind;
    std::string line;
    if (!std::getline(in, line)) {
        throw DatasetError(K::EmptyDataset, source + ": file is empty");
    }

    // header: map each expected column to its position
    auto const names = split(line);
    std::array<std::size_t, kColumns> position {};
    for (std::size_t c = 0; c < kColumns; ++c) {
        auto const it = std::find(names.begin(), names.end(), kColumnNames[c]);
        if (it == names.end()) {
            throw DatasetError(K::MissingColumn, source + ": missing column '" + std::string(kColumnNames[c]) + "'");
        }
        position[c] = static_cast<std::size_t>(it - names.begin());
    }
    if (names.size() > kColumns) {
        for (auto const& n : names) {
            if (std::find(kColumnNames.begin(), kColumnNames.end(), n) == kColumnNames.end()) {
                throw DatasetError(K::ExtraColumn, source + ": unexpected column '" + std::string(n) + "'");
            }
        }
        throw DatasetError(K::BadHeader, source + ": duplicate column in header");
    }

    Dataset data;
    std::size_t row = 0;
    std::array<double, kColumns> values {};
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        auto const fields = split(line);
        if (fields.size() < kColumns) {
            throw DatasetError(K::MissingColumn, source + ": " + row_label(row) + ": expected 8 fields", row);
        }
        if (fields.size() > kColumns) {
            throw DatasetError(K::ExtraColumn, source + ": " + row_label(row) + ": expected 8 fields", row);
        }
        for (std::size_t c = 0; c < kColumns; ++c) {
            auto const field = fields[position[c]];
            char const* first = field.data();
            char const* last = field.data() + field.size();
            if (first != last && *first == '+') {
                ++first;
            }
            auto [ptr, ec] = std::from_chars(first, last, values[c]);
            if (ec != std::errc {} || ptr != last || field.empty()) {
                throw DatasetError(K::ParseFailure,
                    source + ": " + row_label(row) + ": cannot parse " + std::string(kColumnNames[c]) + " value '"
                        + std::string(field) + "'",
                    row);
            }
            if (!std::isfinite(values[c])) {
                throw DatasetError(K::NonFinite,
                    source + ": " + row_label(row) + ": non-finite " + std::string(kColumnNames[c]), row);
            }
        }
        if (row == 0) {
            data.ks = values[0];
        } else if (values[0] != data.ks) {
            throw DatasetError(K::InconsistentKs, source + ": " + row_label(row) + ": ks differs from row 0", row);
        }
        data.temperature.push_back(values[1]);
        data.t.push_back(values[2]);
        data.p1dot.push_back(values[3]);
        data.p2dot.push_back(values[4]);
        data.p3dot.push_back(values[5]);
        data.p4dot.push_back(values[6]);
        data.ra.push_back(values[7]);
        ++row;
    }

    try {
        validate(data);
    } catch (DatasetError const& e) {
        throw DatasetError(e.kind(), source + ": " + e.what(), e.row());
    }
    return data;
}

Dataset load_dataset(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DatasetError(DatasetError::Kind::FileNotFound, "cannot open dataset " + path.string());
    }
    return parse_dataset(in, path.string());
}

std::string format_dataset(Dataset const& data, Predictions const* predictions)
{
    if (predictions && predictions->samples.size() != data.size()) {
        throw std::invalid_argument("prediction count does not match the dataset");
    }
    std::string out(kDatasetHeader);
    if (predictions) {
        out += ",pred_p1dot,pred_p2dot,pred_p3dot,pred_ra";
    }
    out += '\n';
    std::string const ks = format_number(data.ks);
    for (std::size_t r = 0; r < data.size(); ++r) {
        out += ks;
        for (double v : { data.temperature[r], data.t[r], data.p1dot[r], data.p2dot[r], data.p3dot[r], data.p4dot[r],
                 data.ra[r] }) {
            out += ',';
            out += format_number(v);
        }
        if (predictions) {
            for (double v : predictions->samples[r]) {
                out += ',';
                out += format_number(v);
            }
        }
        out += '\n';
    }
    return out;
}

void write_dataset(std::filesystem::path const& path, Dataset const& data, Predictions const* predictions)
{
    auto const text = format_dataset(data, predictions);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace phasegp
