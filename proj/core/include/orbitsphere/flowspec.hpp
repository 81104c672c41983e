#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitsphere {

struct Gluing {
    std::string from;
    std::string side;  // "right" or "top"
    std::string to;
    bool flipped = false;
    bool operator==(const Gluing&) const = default;
};

struct SingularDecl {
    std::string vertex;  // "<rect>.<corner>", corner in {bl, br, tl, tr}
    int prongs = 0;
    bool operator==(const SingularDecl&) const = default;
};

struct Crossing {
    std::string target;
    char orientation = '+';
    bool operator==(const Crossing&) const = default;
};

struct GeneratorDecl {
    std::string name;
    std::vector<std::string> tokens;
    bool operator==(const GeneratorDecl&) const = default;
};

struct Breakpoint {
    std::string x;  // rationals kept as canonical text
    std::string y;
    bool operator==(const Breakpoint&) const = default;
};

struct FlowSpec {
    int genus = -1;
    std::string model = "flat";         // "flat" or "skewed"
    std::optional<std::string> dilatation;  // documentation only
    std::vector<std::string> rectangles;
    std::vector<Gluing> gluings;
    std::vector<SingularDecl> singular;
    std::map<std::string, std::vector<Crossing>> transition;
    std::vector<GeneratorDecl> generators;
    std::vector<Breakpoint> homeomorphism;  // skewed model only

    // Copy with every list sorted by identifier.
    FlowSpec canonical() const;
    bool structurally_equal(const FlowSpec& o) const;
    const GeneratorDecl* monodromy() const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& msg);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> errors;
    int primitivity_power = 0;  // 0 when not primitive
    int genus = -1;
    int computed_genus = -1;
    std::map<int, int> census;  // prong count -> number of vertices
    std::map<std::string, std::vector<Crossing>> computed_transition;
    bool operator==(const ValidationReport&) const = default;
};

FlowSpec parse_flowspec(const std::string& text);
FlowSpec load_flowspec(const std::string& path);
std::string serialize(const FlowSpec& spec);
ValidationReport validate(const FlowSpec& spec);

// Smallest e <= (k-1)^2 + 1 with M^e entrywise positive, else 0.
int primitivity_exponent(const std::vector<std::vector<long>>& m);
std::vector<std::vector<long>> transition_matrix(
    const FlowSpec& spec, const std::map<std::string, std::vector<Crossing>>& table);

}  // namespace orbitsphere
