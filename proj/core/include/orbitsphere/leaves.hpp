#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "orbitsphere/cover.hpp"

namespace orbitsphere {

enum class Kind { Stable = 0, Unstable = 1 };
inline Kind other(Kind k) { return k == Kind::Stable ? Kind::Unstable : Kind::Stable; }
const char* kind_name(Kind k);

// Leaf geometry of the two straight-line foliations in developed coordinates.
// The level of a point on a leaf of kind k is y - s_k x; the parameter along
// a leaf of kind k is the level of the other kind, so it increases strictly
// in the forward direction of the leaf.
class Foliation {
public:
    explicit Foliation(const Surface& S);
    const QuadNum& slope(Kind k) const { return slope_[static_cast<int>(k)]; }
    QuadNum level(Kind k, const Vec2& dev) const { return dev.y - slope(k) * dev.x; }
    QuadNum param(Kind k, const Vec2& dev) const { return level(other(k), dev); }
    // Developed displacement for a unit parameter increase along kind k.
    const Vec2& forward(Kind k) const { return fwd_[static_cast<int>(k)]; }
    // Quadrant (0 NE, 1 NW, 2 SW, 3 SE) of the direction sigma * forward(k).
    int quadrant(Kind k, int sigma) const;

private:
    QuadNum slope_[2];
    Vec2 fwd_[2];
};

int quadrant_of(const Vec2& dir);

struct Arm {
    int sigma = 1;   // parameter grows along the arm when +1
    CPoint start;    // seed point, or the prong corner of its quadrant tile
    int slot = -1;   // position in the vertex's quadrant cycle for prongs
};

struct Leaf {
    Kind kind = Kind::Stable;
    int vertex = -1;  // cone vertex for singular leaves
    CPoint seed;      // generic seed for regular leaves, vertex corner otherwise
    QuadNum level;
    QuadNum seed_param;
    std::vector<Arm> arms;  // regular: {backward, forward}; singular: prongs ccw
    bool singular() const { return vertex >= 0 && arms.size() > 2; }
    bool at_vertex() const { return vertex >= 0; }
};

struct LeafRay {
    Leaf leaf;
    int arm = 0;
    std::vector<int> itinerary;
    CPoint end;
    QuadNum end_param;
    std::optional<int> terminal_vertex;
};

struct Slice {
    Leaf leaf;
    int arm_a = 0;
    int arm_b = 1;
    bool line_leaf = false;  // a pair of adjacent prongs bounding one sector
};

class SingularVertexReached : public std::runtime_error {
public:
    explicit SingularVertexReached(int v)
        : std::runtime_error("ray reached a singular vertex"), vertex(v) {}
    int vertex;
};

class Leaves {
public:
    explicit Leaves(Cover& cover) : C_(&cover), fol_(cover.surface()) {}
    Cover& cover() { return *C_; }
    const Foliation& foliation() const { return fol_; }

    Leaf leaf_at(const CPoint& p, Kind k);
    Leaf singular_leaf(int vertex, Kind k);
    std::vector<LeafRay> leaf_through(const CPoint& p, Kind k);
    LeafRay extend_ray(const LeafRay& ray, int steps);
    std::vector<Slice> line_leaves(const CPoint& p, Kind k);

    QuadNum param_of(Kind k, const CPoint& p) { return fol_.param(k, C_->dev(p)); }
    // Point of the arm at the given parameter (must lie on the arm's side).
    CPoint point_at(const Leaf& L, int arm, const QuadNum& param);
    bool on_arm(const Leaf& L, int arm, const QuadNum& param) const;
    // Walks an arm to the target parameter and reports each tile piece as
    // (tile, lower parameter, upper parameter).
    void trace_arm(const Leaf& L, int arm, const QuadNum& until,
                   const std::function<void(int, const QuadNum&, const QuadNum&)>& piece);

    struct Crossing {
        int arm_s, arm_u;
        QuadNum param_s, param_u;  // parameter on the stable and unstable leaf
        bool at_center = false;
    };
    // Intersection of a stable and an unstable leaf, if any (at most one).
    std::optional<Crossing> crossing(const Leaf& s, const Leaf& u);
    bool same_leaf(const Leaf& a, const Leaf& b);
    // Image of a leaf under a group element, with arms matched to the source.
    Leaf image(const GroupElem& g, const Leaf& L, std::vector<int>* arm_map);

private:
    Cover* C_;
    Foliation fol_;
};

}  // namespace orbitsphere
