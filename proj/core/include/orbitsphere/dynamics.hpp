#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitsphere/ideal_circle.hpp"

namespace orbitsphere {

// Parses "a b^-1 t^2", "t", "e" or raw tile words such as "[URRD]" using the
// generator names of the model's spec. Throws std::invalid_argument.
GroupElem parse_element(FlowModel& M, const std::string& text);

enum class ElementKind { Identity, PeriodicSingular, PeriodicRegular, Free, UndecidedAtRadius };
const char* element_kind_name(ElementKind k);

struct ElementClass {
    ElementKind kind = ElementKind::UndecidedAtRadius;
    int prongs = 0;          // prongs at the fixed point of a periodic element
    bool all_fixed = false;  // identity fixes everything
    std::vector<CPoint> fixed;
    std::optional<int> vertex;
    std::optional<Leaf> axis;  // leaf L with g L separating L from g^2 L
    std::string witness;
    std::string name() const;
};

ElementClass classify_element(FlowModel& M, const GroupElem& g, int radius);

struct FixedEnd {
    Kind kind = Kind::Stable;
    int arm = 0;
    int position = 0;
    bool attracting = false;
};

// Fixed ideal points of a prong-preserving power of a periodic element.
struct FixedPointReport {
    Tri status = Tri::Undecided;
    std::string note;
    GroupElem element;
    long exponent = 1;     // the power of element that fixes every prong
    GroupElem power;
    CPoint center;
    int prongs = 0;
    Kind expanded = Kind::Stable;  // leaf kind stretched by the power
    QuadNum factor;                // stretch factor along the expanded leaf
    Leaf stable_leaf, unstable_leaf;
    std::vector<FixedEnd> ends;    // in circle order
    std::size_t circle_size = 0;
    std::size_t fixed_leaf_ends = 0;  // fixed ends found among all circle leaves
    bool alternating = false;
    bool nesting_ok = false;
    std::size_t neighbors = 0;
    std::size_t converged = 0;
    std::size_t step_checked = 0;
    int iterations = 10;
};

FixedPointReport fixed_points_on_circle(FlowModel& M, const GroupElem& g, int depth);

struct SourceSinkReport {
    Tri status = Tri::Undecided;
    std::string note;
    GroupElem element;
    int source = -1;  // quotient vertex ids in the report's complex
    int sink = -1;
    Kind source_kind = Kind::Unstable;
    Leaf source_leaf, sink_leaf;
    bool distinct = false;
    std::size_t grid = 0;
    std::size_t contracted = 0;
    std::size_t step_checked = 0;
    std::size_t vertex_count = 0;
};

SourceSinkReport source_sink_on_sphere(FlowModel& M, const GroupElem& g, int depth,
                                       std::size_t grid = 200);

// A point of the quotient sphere: the class of a leaf end, or the ideal point
// of a straight ray leaving the base reference point in a direction that is
// not a leaf direction.
struct QuotientPoint {
    std::optional<RaySpec> end;
    std::optional<Vec2> direction;
    std::string label;
};

struct ConicalWitness {
    Tri status = Tri::Undecided;
    std::string method;  // "periodic-leaf" or "translates"
    std::vector<GroupElem> sequence;
    std::string a, b;
    std::string note;
};

ConicalWitness conical_witness(FlowModel& M, const QuotientPoint& x, int depth,
                               int max_word_length = 6);

// Deterministic mix of quotient points near the base: ends of singular
// leaves at nearby vertices, an end of the regular leaf through the base and
// straight rays in fixed rational directions.
std::vector<QuotientPoint> conical_samples(FlowModel& M, std::size_t leaf_points = 7,
                                           std::size_t ray_points = 3);

// Periodic elements with word length at most max_len and their fixed points.
struct PeriodicEntry {
    GroupElem g;
    CPoint fixed;
    int length = 0;
};
std::vector<PeriodicEntry> periodic_table(FlowModel& M, int radius, int max_len);

}  // namespace orbitsphere
