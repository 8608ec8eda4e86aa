#include "phasegp/expr.hpp"

#include <algorithm>
#include <cmath>

namespace phasegp {

namespace {

constexpr std::array<std::string_view, kNumVariables> kVariableNames { "P1dot", "P2dot", "P3dot", "RA", "Ks", "T" };

void check_finite_parameter(Node const& node)
{
    if (node.symbol == Symbol::Parameter && !std::isfinite(node.value)) {
        throw TreeError("parameter values must be finite");
    }
}

}  // namespace

std::string_view symbol_keyword(Symbol s)
{
    switch (s) {
    case Symbol::Add: return "add";
    case Symbol::Mul: return "mul";
    case Symbol::Div: return "div";
    case Symbol::Square: return "sq";
    case Symbol::Exp: return "exp";
    case Symbol::Tanh: return "tanh";
    case Symbol::AQ: return "aq";
    case Symbol::Variable: return "var";
    case Symbol::Parameter: return "const";
    }
    return "?";
}

std::optional<Symbol> symbol_from_keyword(std::string_view word)
{
    for (auto s : { Symbol::Add, Symbol::Mul, Symbol::Div, Symbol::Square, Symbol::Exp, Symbol::Tanh, Symbol::AQ,
             Symbol::Variable, Symbol::Parameter }) {
        if (symbol_keyword(s) == word) {
            return s;
        }
    }
    return std::nullopt;
}

std::string_view variable_name(Variable v) { return kVariableNames[static_cast<std::size_t>(v)]; }

std::optional<Variable> variable_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kVariableNames.size(); ++i) {
        if (kVariableNames[i] == name) {
            return static_cast<Variable>(i);
        }
    }
    return std::nullopt;
}

Tree::Tree()
    : nodes_ { Node::parameter(0.0) }
{
}

Tree::Tree(std::vector<Node> prefix)
    : nodes_(std::move(prefix))
{
    if (nodes_.empty()) {
        throw TreeError("a tree needs at least one node");
    }
    std::size_t open = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (open == 0) {
            throw TreeError("trailing nodes after a complete expression");
        }
        auto const& node = nodes_[i];
        if (node.symbol == Symbol::Variable && static_cast<std::size_t>(node.variable) >= kNumVariables) {
            throw TreeError("variable index out of range");
        }
        check_finite_parameter(node);
        open = open - 1 + static_cast<std::size_t>(arity(node.symbol));
    }
    if (open != 0) {
        throw TreeError("incomplete expression: missing operands");
    }
    update_lengths();
}

void Tree::update_lengths()
{
    std::vector<std::uint32_t> sizes;
    sizes.reserve(nodes_.size());
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        auto& node = nodes_[i];
        std::uint32_t total = 1;
        for (int k = 0; k < arity(node.symbol); ++k) {
            total += sizes.back();
            sizes.pop_back();
        }
        node.length = total - 1;
        sizes.push_back(total);
    }
}

Tree Tree::constant(double value)
{
    return Tree(std::vector { Node::parameter(value) });
}

Tree Tree::variable(Variable v)
{
    return Tree(std::vector { Node::var(v) });
}

Tree Tree::unary(Symbol s, Tree const& child)
{
    if (arity(s) != 1) {
        throw TreeError("symbol is not unary");
    }
    std::vector<Node> nodes;
    nodes.reserve(child.size() + 1);
    nodes.push_back(Node::function(s));
    nodes.insert(nodes.end(), child.nodes_.begin(), child.nodes_.end());
    return Tree(std::move(nodes));
}

Tree Tree::binary(Symbol s, Tree const& lhs, Tree const& rhs)
{
    if (arity(s) != 2) {
        throw TreeError("symbol is not binary");
    }
    std::vector<Node> nodes;
    nodes.reserve(lhs.size() + rhs.size() + 1);
    nodes.push_back(Node::function(s));
    nodes.insert(nodes.end(), lhs.nodes_.begin(), lhs.nodes_.end());
    nodes.insert(nodes.end(), rhs.nodes_.begin(), rhs.nodes_.end());
    return Tree(std::move(nodes));
}

std::size_t Tree::subtree_depth(std::size_t i) const
{
    // levels relative to node i, filled in prefix order
    std::size_t const end = subtree_end(i);
    std::vector<std::size_t> pending;  // remaining child slots per open ancestor
    std::size_t best = 0;
    for (std::size_t j = i; j < end; ++j) {
        std::size_t const lvl = pending.size() + 1;
        best = std::max(best, lvl);
        if (!pending.empty()) {
            --pending.back();
        }
        if (auto a = arity(nodes_[j].symbol); a > 0) {
            pending.push_back(static_cast<std::size_t>(a));
        }
        while (!pending.empty() && pending.back() == 0) {
            pending.pop_back();
        }
    }
    return best;
}

std::size_t Tree::level(std::size_t i) const
{
    std::size_t cur = 0;
    std::size_t lvl = 1;
    while (cur != i) {
        std::size_t child = cur + 1;
        while (subtree_end(child) <= i) {
            child = subtree_end(child);
        }
        cur = child;
        ++lvl;
    }
    return lvl;
}

Tree Tree::subtree(std::size_t i) const
{
    return Tree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
        nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i))));
}

Tree Tree::replace_subtree(std::size_t i, Tree const& replacement) const
{
    std::vector<Node> nodes;
    nodes.reserve(size() - subtree_size(i) + replacement.size());
    nodes.insert(nodes.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
    nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    nodes.insert(nodes.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i)), nodes_.end());
    return Tree(std::move(nodes));
}

Tree Tree::with_node(std::size_t i, Node const& node) const
{
    if (arity(node.symbol) != arity(nodes_[i].symbol)) {
        throw TreeError("replacement node must have the same arity");
    }
    check_finite_parameter(node);
    Tree copy = *this;
    auto const length = copy.nodes_[i].length;
    copy.nodes_[i] = node;
    copy.nodes_[i].length = length;
    return copy;
}

std::size_t Tree::parameter_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
        [](Node const& n) { return n.symbol == Symbol::Parameter; }));
}

bool Tree::satisfies(TreeLimits const& limits) const
{
    return size() <= limits.max_nodes && depth() <= limits.max_depth;
}

bool Tree::same_shape(Tree const& other) const noexcept
{
    if (size() != other.size()) {
        return false;
    }
    for (std::size_t i = 0; i < size(); ++i) {
        auto const& a = nodes_[i];
        auto const& b = other.nodes_[i];
        if (a.symbol != b.symbol) {
            return false;
        }
        if (a.symbol == Symbol::Variable && a.variable != b.variable) {
            return false;
        }
    }
    return true;
}

double evaluate(Tree const& tree, EvalState const& state) noexcept
{
    auto const nodes = tree.nodes();
    constexpr std::size_t kInline = 64;
    std::array<double, kInline> inline_stack {};
    std::vector<double> heap_stack;
    double* stack = inline_stack.data();
    if (nodes.size() > kInline) {
        heap_stack.resize(nodes.size());
        stack = heap_stack.data();
    }

    // Reverse prefix order: children are on the stack, first child on top.
    std::size_t top = 0;
    for (std::size_t i = nodes.size(); i-- > 0;) {
        auto const& n = nodes[i];
        switch (n.symbol) {
        case Symbol::Parameter:
            stack[top++] = n.value;
            break;
        case Symbol::Variable:
            stack[top++] = state[static_cast<std::size_t>(n.variable)];
            break;
        case Symbol::Add:
            stack[top - 2] = stack[top - 1] + stack[top - 2];
            --top;
            break;
        case Symbol::Mul:
            stack[top - 2] = stack[top - 1] * stack[top - 2];
            --top;
            break;
        case Symbol::Div:
            stack[top - 2] = stack[top - 1] / stack[top - 2];
            --top;
            break;
        case Symbol::AQ: {
            double const y = stack[top - 2];
            stack[top - 2] = stack[top - 1] / std::sqrt(1.0 + y * y);
            --top;
            break;
        }
        case Symbol::Square:
            stack[top - 1] = stack[top - 1] * stack[top - 1];
            break;
        case Symbol::Exp:
            stack[top - 1] = std::exp(stack[top - 1]);
            break;
        case Symbol::Tanh:
            stack[top - 1] = std::tanh(stack[top - 1]);
            break;
        }
    }
    return stack[0];
}

void extract_params(Tree const& tree, std::vector<double>& out)
{
    for (auto const& n : tree.nodes()) {
        if (n.symbol == Symbol::Parameter) {
            out.push_back(n.value);
        }
    }
}

std::vector<double> extract_params(Tree const& tree)
{
    std::vector<double> out;
    extract_params(tree, out);
    return out;
}

void inject_params_inplace(Tree& tree, std::span<double const> params, std::size_t& offset)
{
    auto const needed = tree.parameter_count();
    if (offset + needed > params.size()) {
        throw TreeError("parameter vector is too short for the tree");
    }
    std::vector<Node> nodes(tree.nodes().begin(), tree.nodes().end());
    for (auto& n : nodes) {
        if (n.symbol == Symbol::Parameter) {
            n.value = params[offset++];
        }
    }
    tree = Tree(std::move(nodes));
}

Tree inject_params(Tree const& tree, std::span<double const> params)
{
    if (params.size() != tree.parameter_count()) {
        throw TreeError("parameter vector length " + std::to_string(params.size()) + " does not match "
            + std::to_string(tree.parameter_count()) + " parameter nodes");
    }
    std::vector<Node> nodes(tree.nodes().begin(), tree.nodes().end());
    std::size_t k = 0;
    for (auto& n : nodes) {
        if (n.symbol == Symbol::Parameter) {
            n.value = params[k++];
        }
    }
    return Tree(std::move(nodes));
}

Node random_terminal(Rng& rng, Grammar const& grammar)
{
    if (grammar.variables.empty() || uniform01(rng) < grammar.parameter_probability) {
        std::uniform_real_distribution<double> dist(grammar.param_min, grammar.param_max);
        return Node::parameter(dist(rng));
    }
    return Node::var(grammar.variables[uniform_index(rng, grammar.variables.size())]);
}

namespace {

    // Grows a subtree using at most `budget` nodes and `depth_left` levels.
    // Returns the number of nodes appended.
    std::size_t grow(Rng& rng, Grammar const& grammar, std::size_t budget, std::size_t depth_left,
        std::vector<Node>& out)
    {
        std::vector<Symbol> candidates;
        if (depth_left >= 2) {
            for (auto s : grammar.functions) {
                if (static_cast<std::size_t>(arity(s)) + 1 <= budget) {
                    candidates.push_back(s);
                }
            }
        }
        if (candidates.empty() || uniform01(rng) >= grammar.function_probability) {
            out.push_back(random_terminal(rng, grammar));
            return 1;
        }
        auto const symbol = candidates[uniform_index(rng, candidates.size())];
        auto const a = static_cast<std::size_t>(arity(symbol));
        out.push_back(Node::function(symbol));
        std::size_t remaining = budget - 1;
        std::size_t used = 1;
        for (std::size_t c = 0; c < a; ++c) {
            std::size_t const reserve = a - 1 - c;
            std::size_t const n = grow(rng, grammar, remaining - reserve, depth_left - 1, out);
            remaining -= n;
            used += n;
        }
        return used;
    }

}  // namespace

Tree random_tree(Rng& rng, Grammar const& grammar, std::size_t max_nodes, std::size_t max_depth)
{
    if (max_nodes < 1 || max_depth < 1) {
        throw TreeError("tree limits must be at least 1");
    }
    std::vector<Node> nodes;
    nodes.reserve(max_nodes);
    grow(rng, grammar, max_nodes, max_depth, nodes);
    return Tree(std::move(nodes));
}

}  // namespace phasegp
