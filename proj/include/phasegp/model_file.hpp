#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "phasegp/expr.hpp"

namespace phasegp {

// One right-hand side per modeled quantity: d(P1dot)/dt, d(P2dot)/dt,
// d(P3dot)/dt and d(RA)/dt, in that order.
inline constexpr std::size_t kNumEquations = 4;
using TreeSet = std::array<Tree, kNumEquations>;

inline constexpr std::array<std::string_view, kNumEquations> kEquationNames { "P1", "P2", "P3", "RA" };

std::size_t parameter_count(TreeSet const& trees) noexcept;
std::vector<double> extract_params(TreeSet const& trees);
TreeSet inject_params(TreeSet const& trees, std::span<double const> params);

// Model file: four sections, each a header line "[NAME]" followed by one
// prefix expression, e.g.
//
//   [P1]
//   (add (var P1dot) (const 1))
//
// Whitespace is insignificant; lines starting with '#' are comments.
std::string format_model(TreeSet const& trees);
TreeSet parse_model(std::string_view text);

TreeSet read_model(std::filesystem::path const& path);
void write_model(std::filesystem::path const& path, TreeSet const& trees);

}  // namespace phasegp
