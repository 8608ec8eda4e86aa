#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phasegp/ode.hpp"

namespace phasegp {

// Fixed CSV header of a trajectory file.
inline constexpr std::string_view kDatasetHeader = "ks,T,t,p1dot,p2dot,p3dot,p4dot,ra";

// One cooling-rate trajectory.
struct Dataset {
    double ks { 0.0 };
    std::vector<double> t;
    std::vector<double> temperature;
    std::vector<double> p1dot, p2dot, p3dot, p4dot;
    std::vector<double> ra;

    std::size_t size() const noexcept { return t.size(); }
    ExogenousSignal exogenous() const { return { t, temperature, ks }; }
    StateVector initial_state() const { return { p1dot.at(0), p2dot.at(0), p3dot.at(0), ra.at(0) }; }

    // Target column of equation k (P1dot, P2dot, P3dot, RA).
    std::span<double const> target(std::size_t k) const;

    // First n rows.
    Dataset head(std::size_t n) const;

    friend bool operator==(Dataset const&, Dataset const&) = default;
};

class DatasetError : public std::runtime_error {
public:
    enum class Kind {
        FileNotFound,
        BadHeader,
        MissingColumn,
        ExtraColumn,
        ParseFailure,
        NonFinite,
        NonMonotoneTime,
        RaOutOfRange,
        InconsistentKs,
        NonPositiveKs,
        EmptyDataset,
    };

    DatasetError(Kind kind, std::string const& message, std::optional<std::size_t> row = std::nullopt);

    Kind kind() const noexcept { return kind_; }
    // 0-based index of the offending data row (the header is not a row)
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    Kind kind_;
    std::optional<std::size_t> row_;
};

std::string_view to_string(DatasetError::Kind kind);

Dataset parse_dataset(std::istream& in, std::string const& source = "<stream>");
Dataset load_dataset(std::filesystem::path const& path);
void validate(Dataset const& data);

// Prediction columns appended to a dataset when exporting simulations.
struct Predictions {
    std::vector<StateVector> samples;
};

std::string format_dataset(Dataset const& data, Predictions const* predictions = nullptr);
void write_dataset(std::filesystem::path const& path, Dataset const& data, Predictions const* predictions = nullptr);

}  // namespace phasegp
