#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orbitsphere/ideal_circle.hpp"

namespace orbitsphere {

// Raised when the input lies outside the supported class (perfect fits or a
// product region), before any quotient is attempted.
class Refusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LinkedChords : public std::runtime_error {
public:
    LinkedChords(const std::string& msg, int a, int b) : std::runtime_error(msg), first(a), second(b) {}
    int first, second;
};

struct Chord {
    Kind kind = Kind::Stable;
    int leaf = -1;           // leaf index in the circle, -1 for injected chords
    std::vector<int> ends;   // sorted circle positions
};

struct ChordSystem {
    std::size_t circle_size = 0;
    std::vector<Chord> stable;
    std::vector<Chord> unstable;
    int p_max = 2;
};

// Throws LinkedChords naming the first interleaving pair within a system.
void check_unlinked(const ChordSystem& cs);
ChordSystem gluing_pairs(const CircleApprox& circle);
// As above after refusing perfect fits and product regions found within depth.
ChordSystem gluing_pairs(FlowModel& M, const CircleApprox& circle, int detector_depth);

struct QuotientComplex {
    std::vector<int> class_of;                   // quotient vertex of each circle position
    std::vector<int> class_kind;                 // 0 singleton, 1 stable chord, 2 unstable chord
    std::vector<std::pair<int, int>> edges;      // images of the circle arcs
    std::vector<std::vector<int>> faces;         // vertex cycles
    int euler = 0;
    bool connected = false;
    bool links_ok = false;
    int failing_vertex = -1;
    std::map<std::string, int> census;
    std::size_t vertex_count() const { return class_kind.size(); }
    bool sphere() const { return euler == 2 && connected && links_ok; }
};

// With verify_unlinked off, linked input is still assembled and shows up as
// a failed sphere certificate.
QuotientComplex build_quotient(const ChordSystem& cs, bool verify_unlinked = true);

struct PeanoPoint {
    double t = 0;       // circle parameter in [0, 1)
    int position = 0;   // circle position sampled
    int vertex = 0;     // quotient vertex
    double x = 0, y = 0, z = 0;
};

struct PeanoSample {
    std::vector<PeanoPoint> points;
    std::vector<std::array<double, 3>> embedding;  // per quotient vertex
};

// Deterministic force-directed placement of the quotient 1-skeleton on the
// unit sphere (fixed seed and step count).
std::vector<std::array<double, 3>> sphere_embedding(const QuotientComplex& q, int steps = 500,
                                                    unsigned seed = 20240601u);
PeanoSample peano_sample(const QuotientComplex& q, std::size_t n, unsigned seed = 20240601u);

struct EquivarianceReport {
    std::size_t elements = 0;
    std::size_t checked = 0;      // sample ends whose image was located
    std::size_t skipped = 0;      // samples whose orbit left the budget
    std::size_t class_mismatches = 0;
    std::size_t order_violations = 0;
    bool ok() const { return class_mismatches == 0 && order_violations == 0; }
};

// Checks that each element maps the sampled chord classes to chord classes
// and preserves the cyclic order of their ideal points.
EquivarianceReport check_equivariance(FlowModel& M, int depth, const std::vector<GroupElem>& elements);

void write_chords_svg(const ChordSystem& cs, const std::string& path);
void write_curve_svg(const PeanoSample& s, const std::string& path);
void write_complex_json(const QuotientComplex& q, const std::string& path);
std::string complex_json(const QuotientComplex& q);

}  // namespace orbitsphere
