#include "phasegp/model_file.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace phasegp {

std::size_t parameter_count(TreeSet const& trees) noexcept
{
    std::size_t n = 0;
    for (auto const& t : trees) {
        n += t.parameter_count();
    }
    return n;
}

std::vector<double> extract_params(TreeSet const& trees)
{
    std::vector<double> out;
    for (auto const& t : trees) {
        extract_params(t, out);
    }
    return out;
}

TreeSet inject_params(TreeSet const& trees, std::span<double const> params)
{
    if (params.size() != parameter_count(trees)) {
        throw TreeError("parameter vector length does not match the tree set");
    }
    TreeSet out = trees;
    std::size_t offset = 0;
    for (auto& t : out) {
        inject_params_inplace(t, params, offset);
    }
    return out;
}

std::string format_model(TreeSet const& trees)
{
    std::string out;
    for (std::size_t k = 0; k < kNumEquations; ++k) {
        out += '[';
        out += kEquationNames[k];
        out += "]\n";
        out += format_prefix(trees[k]);
        out += "\n\n";
    }
    return out;
}

TreeSet parse_model(std::string_view text)
{
    std::array<std::optional<std::string>, kNumEquations> bodies;
    std::optional<std::size_t> current;
    std::size_t line_no = 0;
    std::size_t offset = 0;

    while (offset <= text.size()) {
        auto const nl = text.find('\n', offset);
        auto line = text.substr(offset, nl == std::string_view::npos ? std::string_view::npos : nl - offset);
        offset = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto const first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) {
            continue;
        }
        line = line.substr(first);
        if (line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            auto const close = line.find(']');
            if (close == std::string_view::npos) {
                throw ParseError("unterminated section header on line " + std::to_string(line_no), 0);
            }
            auto const name = line.substr(1, close - 1);
            current.reset();
            for (std::size_t k = 0; k < kNumEquations; ++k) {
                if (kEquationNames[k] == name) {
                    current = k;
                }
            }
            if (!current) {
                throw ParseError("unknown section '" + std::string(name) + "' on line " + std::to_string(line_no), 0);
            }
            if (bodies[*current]) {
                throw ParseError("duplicate section '" + std::string(name) + "'", 0);
            }
            bodies[*current] = std::string {};
            continue;
        }
        if (!current) {
            throw ParseError("expression outside of a section on line " + std::to_string(line_no), 0);
        }
        *bodies[*current] += ' ';
        *bodies[*current] += line;
    }

    TreeSet trees;
    for (std::size_t k = 0; k < kNumEquations; ++k) {
        if (!bodies[k]) {
            throw ParseError("missing section '" + std::string(kEquationNames[k]) + "'", 0);
        }
        try {
            trees[k] = parse_prefix(*bodies[k]);
        } catch (ParseError const& e) {
            throw ParseError("section " + std::string(kEquationNames[k]) + ": " + e.what(), e.position());
        } catch (TreeError const& e) {
            throw ParseError("section " + std::string(kEquationNames[k]) + ": " + e.what(), 0);
        }
    }
    return trees;
}

TreeSet read_model(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open model file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

void write_model(std::filesystem::path const& path, TreeSet const& trees)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write model file " + path.string());
    }
    out << format_model(trees);
    if (!out) {
        throw std::runtime_error("failed writing model file " + path.string());
    }
}

}  // namespace phasegp
