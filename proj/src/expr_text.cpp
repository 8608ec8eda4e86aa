#include "phasegp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace phasegp {

ParseError::ParseError(std::string const& message, std::size_t position)
    : std::runtime_error(message + " (at offset " + std::to_string(position) + ")")
    , position_(position)
{
}

std::string format_number(double value)
{
    std::array<char, 64> buf {};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc {}) {
        throw std::runtime_error("cannot format number");
    }
    return std::string(buf.data(), end);
}

namespace {

void infix(Tree const& tree, std::size_t i, std::string& out)
{
    auto const& n = tree[i];
    auto const child = [&](int k) {
        std::size_t c = i + 1;
        for (int j = 0; j < k; ++j) {
            c = tree.subtree_end(c);
        }
        return c;
    };
    switch (n.symbol) {
    case Symbol::Parameter:
        out += format_number(n.value);
        return;
    case Symbol::Variable:
        out += variable_name(n.variable);
        return;
    case Symbol::Add:
    case Symbol::Mul:
    case Symbol::Div: {
        char const op = n.symbol == Symbol::Add ? '+' : n.symbol == Symbol::Mul ? '*' : '/';
        out += '(';
        infix(tree, child(0), out);
        out += ' ';
        out += op;
        out += ' ';
        infix(tree, child(1), out);
        out += ')';
        return;
    }
    case Symbol::AQ:
        out += "AQ(";
        infix(tree, child(0), out);
        out += ", ";
        infix(tree, child(1), out);
        out += ')';
        return;
    case Symbol::Square:
    case Symbol::Exp:
    case Symbol::Tanh:
        out += symbol_keyword(n.symbol);
        out += '(';
        infix(tree, child(0), out);
        out += ')';
        return;
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view text)
        : text_(text)
    {
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool at_end()
    {
        skip_space();
        return pos_ >= text_.size();
    }

    char peek()
    {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c)
    {
        if (peek() != c) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
        ++pos_;
    }

    bool accept(char c)
    {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view word()
    {
        skip_space();
        std::size_t const start = pos_;
        while (pos_ < text_.size()
            && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) {
            throw ParseError("expected an identifier", pos_);
        }
        return text_.substr(start, pos_ - start);
    }

    double number()
    {
        skip_space();
        double value = 0.0;
        char const* first = text_.data() + pos_;
        char const* last = text_.data() + text_.size();
        // from_chars rejects a leading '+'
        if (first != last && *first == '+') {
            ++first;
        }
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc {}) {
            throw ParseError("expected a number", pos_);
        }
        if (!std::isfinite(value)) {
            throw ParseError("constant is not finite", pos_);
        }
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    std::size_t position() const { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_ { 0 };
};

void parse_prefix_node(Lexer& lex, std::vector<Node>& out, int depth)
{
    if (depth > 10000) {
        throw ParseError("expression nested too deeply", lex.position());
    }
    lex.expect('(');
    auto const pos = lex.position();
    auto const word = lex.word();
    auto const symbol = symbol_from_keyword(word);
    if (!symbol) {
        throw ParseError("unknown symbol '" + std::string(word) + "'", pos);
    }
    if (*symbol == Symbol::Parameter) {
        out.push_back(Node::parameter(lex.number()));
    } else if (*symbol == Symbol::Variable) {
        auto const vpos = lex.position();
        auto const name = lex.word();
        auto const v = variable_from_name(name);
        if (!v) {
            throw ParseError("unknown variable '" + std::string(name) + "'", vpos);
        }
        out.push_back(Node::var(*v));
    } else {
        out.push_back(Node::function(*symbol));
        for (int k = 0; k < arity(*symbol); ++k) {
            parse_prefix_node(lex, out, depth + 1);
        }
    }
    lex.expect(')');
}

// Infix grammar:
//   sum     := product ('+' product)*
//   product := factor (('*' | '/') factor)*
//   factor  := number | variable | name '(' sum [',' sum] ')' | '(' sum ')'
class InfixParser {
public:
    explicit InfixParser(std::string_view text)
        : lex_(text)
    {
    }

    Tree parse()
    {
        Tree t = sum();
        if (!lex_.at_end()) {
            throw ParseError("unexpected trailing input", lex_.position());
        }
        return t;
    }

private:
    Tree sum()
    {
        Tree lhs = product();
        while (lex_.accept('+')) {
            lhs = Tree::binary(Symbol::Add, lhs, product());
        }
        return lhs;
    }

    Tree product()
    {
        Tree lhs = factor();
        for (;;) {
            if (lex_.accept('*')) {
                lhs = Tree::binary(Symbol::Mul, lhs, factor());
            } else if (lex_.accept('/')) {
                lhs = Tree::binary(Symbol::Div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    Tree factor()
    {
        char const c = lex_.peek();
        if (c == '(') {
            lex_.expect('(');
            Tree inner = sum();
            lex_.expect(')');
            return inner;
        }
        if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
            return Tree::constant(lex_.number());
        }
        auto const pos = lex_.position();
        auto const name = lex_.word();
        if (auto v = variable_from_name(name)) {
            return Tree::variable(*v);
        }
        Symbol symbol {};
        if (name == "AQ") {
            symbol = Symbol::AQ;
        } else if (name == "sq") {
            symbol = Symbol::Square;
        } else if (name == "exp") {
            symbol = Symbol::Exp;
        } else if (name == "tanh") {
            symbol = Symbol::Tanh;
        } else {
            throw ParseError("unknown name '" + std::string(name) + "'", pos);
        }
        lex_.expect('(');
        Tree first = sum();
        if (arity(symbol) == 2) {
            lex_.expect(',');
            Tree second = sum();
            lex_.expect(')');
            return Tree::binary(symbol, first, second);
        }
        lex_.expect(')');
        return Tree::unary(symbol, first);
    }

    Lexer lex_;
};

}  // namespace

std::string format_infix(Tree const& tree)
{
    std::string out;
    infix(tree, 0, out);
    return out;
}

std::string format_prefix(Tree const& tree)
{
    std::string out;
    std::vector<std::size_t> open;  // remaining children per open function node
    for (std::size_t i = 0; i < tree.size(); ++i) {
        auto const& n = tree[i];
        if (i > 0) {
            out += ' ';
        }
        out += '(';
        out += symbol_keyword(n.symbol);
        if (n.symbol == Symbol::Parameter) {
            out += ' ';
            out += format_number(n.value);
        } else if (n.symbol == Symbol::Variable) {
            out += ' ';
            out += variable_name(n.variable);
        }
        if (is_function(n.symbol)) {
            open.push_back(static_cast<std::size_t>(arity(n.symbol)));
            continue;
        }
        out += ')';
        while (!open.empty()) {
            if (--open.back() > 0) {
                break;
            }
            open.pop_back();
            out += ')';
        }
    }
    return out;
}

Tree parse_prefix(std::string_view text)
{
    Lexer lex(text);
    std::vector<Node> nodes;
    parse_prefix_node(lex, nodes, 0);
    if (!lex.at_end()) {
        throw ParseError("unexpected trailing input", lex.position());
    }
    return Tree(std::move(nodes));
}

Tree parse_infix(std::string_view text)
{
    return InfixParser(text).parse();
}

}  // namespace phasegp
