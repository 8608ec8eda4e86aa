#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phasegp/rng.hpp"

namespace phasegp {

enum class Symbol : std::uint8_t {
    Add,
    Mul,
    Div,
    Square,
    Exp,
    Tanh,
    AQ,  // analytic quotient x / sqrt(1 + y^2)
    Variable,
    Parameter,
};

constexpr int arity(Symbol s) noexcept
{
    switch (s) {
    case Symbol::Add:
    case Symbol::Mul:
    case Symbol::Div:
    case Symbol::AQ:
        return 2;
    case Symbol::Square:
    case Symbol::Exp:
    case Symbol::Tanh:
        return 1;
    default:
        return 0;
    }
}

constexpr bool is_function(Symbol s) noexcept { return arity(s) > 0; }
constexpr bool is_terminal(Symbol s) noexcept { return arity(s) == 0; }

inline constexpr std::array kAllFunctions {
    Symbol::Add, Symbol::Mul, Symbol::Div, Symbol::Square, Symbol::Exp, Symbol::Tanh, Symbol::AQ
};

// Keyword used by the prefix model-file syntax ("add", "aq", ...).
std::string_view symbol_keyword(Symbol s);
std::optional<Symbol> symbol_from_keyword(std::string_view word);

// Order of the evaluation state. Every serialized artifact uses it.
enum class Variable : std::uint8_t { P1dot = 0, P2dot, P3dot, RA, Ks, T };

inline constexpr std::size_t kNumVariables = 6;
using EvalState = std::array<double, kNumVariables>;

inline constexpr std::array kAllVariables {
    Variable::P1dot, Variable::P2dot, Variable::P3dot, Variable::RA, Variable::Ks, Variable::T
};

std::string_view variable_name(Variable v);
std::optional<Variable> variable_from_name(std::string_view name);

struct Node {
    Symbol symbol { Symbol::Parameter };
    Variable variable { Variable::P1dot };
    double value { 0.0 };
    // number of descendants; maintained by Tree
    std::uint32_t length { 0 };

    static Node parameter(double v) { return Node { Symbol::Parameter, Variable::P1dot, v, 0 }; }
    static Node var(Variable v) { return Node { Symbol::Variable, v, 0.0, 0 }; }
    static Node function(Symbol s) { return Node { s, Variable::P1dot, 0.0, 0 }; }

    friend bool operator==(Node const&, Node const&) = default;
};

struct TreeLimits {
    std::size_t max_nodes { 30 };
    std::size_t max_depth { 10 };

    friend bool operator==(TreeLimits const&, TreeLimits const&) = default;
};

class TreeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An expression tree stored as a flat prefix-ordered node array. The subtree
// rooted at node i occupies [i, subtree_end(i)). Trees are values: every
// modification returns a new tree.
class Tree {
public:
    Tree();  // single Parameter(0) leaf
    explicit Tree(std::vector<Node> prefix);

    static Tree constant(double value);
    static Tree variable(Variable v);
    static Tree unary(Symbol s, Tree const& child);
    static Tree binary(Symbol s, Tree const& lhs, Tree const& rhs);

    std::span<Node const> nodes() const noexcept { return nodes_; }
    Node const& operator[](std::size_t i) const { return nodes_[i]; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t depth() const { return subtree_depth(0); }

    std::size_t subtree_end(std::size_t i) const { return i + nodes_[i].length + 1; }
    std::size_t subtree_size(std::size_t i) const { return nodes_[i].length + 1; }
    std::size_t subtree_depth(std::size_t i) const;
    // Level of node i; the root is at level 1.
    std::size_t level(std::size_t i) const;

    Tree subtree(std::size_t i) const;
    Tree replace_subtree(std::size_t i, Tree const& replacement) const;
    Tree with_node(std::size_t i, Node const& node) const;

    std::size_t parameter_count() const noexcept;
    bool satisfies(TreeLimits const& limits) const;
    bool same_shape(Tree const& other) const noexcept;

    friend bool operator==(Tree const&, Tree const&) = default;

private:
    void update_lengths();

    std::vector<Node> nodes_;
};

// Recursive evaluation over the state [P1dot, P2dot, P3dot, RA, Ks, T].
// Div is plain IEEE division; non-finite values propagate.
double evaluate(Tree const& tree, EvalState const& state) noexcept;

std::vector<double> extract_params(Tree const& tree);
void extract_params(Tree const& tree, std::vector<double>& out);
Tree inject_params(Tree const& tree, std::span<double const> params);

// Writes params[offset..] into the Parameter nodes of tree and advances offset.
void inject_params_inplace(Tree& tree, std::span<double const> params, std::size_t& offset);

// Terminal and function set from which random trees are drawn.
struct Grammar {
    std::vector<Symbol> functions { kAllFunctions.begin(), kAllFunctions.end() };
    std::vector<Variable> variables { kAllVariables.begin(), kAllVariables.end() };
    double parameter_probability { 0.5 };  // chance that a terminal is a parameter
    double function_probability { 0.5 };   // chance to grow an internal node when allowed
    double param_min { -10.0 };
    double param_max { 10.0 };

    bool allows_parameters() const noexcept { return variables.empty() || parameter_probability > 0.0; }
};

Node random_terminal(Rng& rng, Grammar const& grammar);
Tree random_tree(Rng& rng, Grammar const& grammar, std::size_t max_nodes, std::size_t max_depth);

// Text forms. Constants print in shortest round-trip form.
std::string format_infix(Tree const& tree);
std::string format_prefix(Tree const& tree);
std::string format_number(double value);

class ParseError : public std::runtime_error {
public:
    ParseError(std::string const& message, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

Tree parse_prefix(std::string_view text);
Tree parse_infix(std::string_view text);

}  // namespace phasegp
