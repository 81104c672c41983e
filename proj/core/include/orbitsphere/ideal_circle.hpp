#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orbitsphere/arrangement.hpp"
#include "orbitsphere/flowspec.hpp"

namespace orbitsphere {

// Surface, cover and foliations of a flat FlowSpec bundled together.
class FlowModel {
public:
    explicit FlowModel(const FlowSpec& spec, std::size_t budget = 1000000);
    const FlowSpec& spec() const { return spec_; }
    const Surface& surface() const { return *S_; }
    Cover& cover() { return *C_; }
    Leaves& leaves() { return *L_; }
    int max_prongs() const { return std::max(2, S_->prongs()); }

private:
    FlowSpec spec_;
    std::unique_ptr<Surface> S_;
    std::unique_ptr<Cover> C_;
    std::unique_ptr<Leaves> L_;
};

enum class Tri { Yes, No, Undecided };
const char* tri_name(Tri t);

// ----- polygonal paths -------------------------------------------------------

// A polygonal path through the leaves l_1 ... l_n. Segment i joins
// z_{i-1} = l_{i-1} ∩ l_i to z_i = l_i ∩ l_{i+1}; the first and last segments
// are rays running out along first_arm of l_1 and last_arm of l_n. A path of
// length 1 is the slice of l_1 formed by first_arm and last_arm.
struct PathSpec {
    std::vector<Leaf> leaves;
    int first_arm = 0;
    int last_arm = 1;
};

struct PathPoint {
    int arm = -1;  // arm holding the point, -1 for a vertex center
    QuadNum param;
};

struct PolygonalPath {
    PathSpec spec;
    std::vector<PathPoint> on_prev;  // z_i as a point of l_i (i = 0..n-2)
    std::vector<PathPoint> on_next;  // z_i as a point of l_{i+1}
    std::size_t length() const { return spec.leaves.size(); }
};

class PathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

PolygonalPath make_path(Leaves& L, const PathSpec& spec);

struct ConvexResult {
    bool left_convex = true;
    bool right_convex = true;
    int left_bad_vertex = -1;   // index i of the offending z_i
    int right_bad_vertex = -1;
};
ConvexResult is_convex(Leaves& L, const PolygonalPath& path);

// The path with a designated convex complementary side.
struct ConvexChain {
    PolygonalPath path;
    bool left = true;
};


// ----- sequences ---------------------------------------------------------------

struct RaySpec {
    Leaf leaf;
    int arm = 0;
};

struct AdmissibleSequence {
    RaySpec ray;                       // the ray the sequence was built around
    std::vector<ConvexChain> chains;
    std::vector<QuadNum> crossing_params;  // where chain i meets the ray
    std::vector<long> escape_bound;    // certified lower bound on tile distance
    std::vector<bool> nested;          // region(i+1) inside region(i), from the circle
    bool escape_ok = false;
    bool nesting_ok = false;
};

enum class PointClass { SliceNeighborhood, PerfectFitEndpoint, NonSeparatedFamily, Quadrant };
const char* class_name(PointClass c);

struct IdealPointApprox {
    AdmissibleSequence seq;
    bool master = false;
    PointClass cls = PointClass::SliceNeighborhood;
};

// A circle holding the leaves of some sequences and rays. Each chain's
// convex region is the open counterclockwise arc arcs[seq][chain] between
// the ideal points of its end rays.
struct SequenceCircle {
    CircleApprox circle;
    std::vector<std::vector<std::pair<int, int>>> arcs;
    std::vector<int> seq_ray_pos;  // ideal point of each sequence's ray
    std::vector<int> ray_pos;      // ideal point of each extra ray
    bool in_arc(const std::pair<int, int>& arc, int x) const { return circle.between(arc.first, x, arc.second); }
    bool contained(const std::pair<int, int>& inner, const std::pair<int, int>& outer) const;
    bool disjoint(const std::pair<int, int>& a, const std::pair<int, int>& b) const;
};

AdmissibleSequence standard_sequence(FlowModel& M, const RaySpec& ray, int depth, int circle_depth = 2);
bool is_master(FlowModel& M, const AdmissibleSequence& seq);
// Arm of host (the same leaf as r.leaf) that carries the tail of r, or -1.
int ray_arm_on(Leaves& L, const RaySpec& r, const Leaf& host);
// True when the two rays eventually run along the same half-leaf.
bool same_tail(FlowModel& M, const RaySpec& a, const RaySpec& b);
Tri equivalent_rays(FlowModel& M, const RaySpec& a, const RaySpec& b, int depth);
IdealPointApprox ideal_point(FlowModel& M, const RaySpec& ray, int depth);
Tri same_ideal_point(FlowModel& M, const IdealPointApprox& p, const IdealPointApprox& q, int depth);
SequenceCircle sequence_circle(FlowModel& M, const std::vector<const AdmissibleSequence*>& seqs,
                               const std::vector<RaySpec>& rays, int circle_depth);

// Counterclockwise order of the given ideal points: result[i] is the index
// of the input occupying cyclic position i, starting from input 0.
std::vector<int> circular_order(FlowModel& M, const std::vector<RaySpec>& points, int center_tile,
                                int circle_depth);

// ----- boundary sample and detectors --------------------------------------------

struct SamplePoint {
    int id = 0;
    PointClass cls = PointClass::SliceNeighborhood;
    std::optional<EndRef> end;  // absent for quadrant points
};

struct BoundarySample {
    CircleApprox circle;
    std::vector<SamplePoint> points;  // cyclic order, quadrant points included
    bool product = false;
    int depth = 0;
};

BoundarySample boundary_sample(FlowModel& M, int depth, std::size_t count);

struct PerfectFit {
    std::string certificate;  // group word fixing two tiles
    std::vector<int> fixed_tiles;
    std::vector<std::string> fixed;  // printable labels of the fixed tiles
};
// True when a leaf of kind k at this level would pass through a lattice point
// of the developing image.
bool level_hits_lattice(const Foliation& F, Kind k, const QuadNum& level);
// Fixed points of g among tiles within the radius of the base.
std::vector<CPoint> fixed_points_in_ball(FlowModel& M, const GroupElem& g, int radius);
std::vector<PerfectFit> detect_perfect_fits(FlowModel& M, int depth, int max_word_length = 6);
bool detect_product_region(FlowModel& M, int depth);

struct LemmaVerdict {
    bool consistent = true;
    std::string diagnostic;
};
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
// Pure decision on precomputed per-depth predicates.
LemmaVerdict fundamental_lemma_verdict(const std::vector<bool>& regions_meet,
                                       const std::vector<bool>& e_meets_r,
                                       const std::vector<bool>& f_meets_l);
LemmaVerdict fundamental_lemma_check(FlowModel& M, const AdmissibleSequence& E,
                                     const AdmissibleSequence& F, const RaySpec& l,
                                     const RaySpec& r, int circle_depth = 2);

}  // namespace orbitsphere
