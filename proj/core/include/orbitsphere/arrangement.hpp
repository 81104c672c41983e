#pragma once

#include <map>
#include <set>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orbitsphere/leaves.hpp"

namespace orbitsphere {

// One end of a leaf: the ideal point of one of its arms.
struct EndRef {
    int leaf = 0;
    int arm = 0;
    bool operator==(const EndRef&) const = default;
    bool operator<(const EndRef& o) const { return std::pair(leaf, arm) < std::pair(o.leaf, o.arm); }
};

class CircleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cyclically ordered ends of a finite family of leaves. The order is read
// counterclockwise along the unbounded face of the leaf arrangement; since
// no traced arm meets another sample leaf beyond its truncation point, this
// is the order of the corresponding ideal points.
struct CircleApprox {
    std::vector<Leaf> leaves;
    std::vector<int> seed_tile;  // reference-point tile of the seed, -1 otherwise
    std::vector<EndRef> order;
    std::vector<std::vector<int>> position;  // position[leaf][arm] into order
    std::set<std::pair<int, int>> crossings; // (stable leaf, unstable leaf)
    std::size_t node_count = 0;
    int depth = 0;

    std::size_t size() const { return order.size(); }
    int pos(const EndRef& e) const { return position[e.leaf][e.arm]; }
    // True when b lies strictly inside the counterclockwise arc from a to c.
    bool between(int a, int b, int c) const;
};

class CircleBuilder {
public:
    explicit CircleBuilder(Leaves& leaves) : L_(&leaves) {}
    // Adds a leaf unless it is already present; returns its index either way.
    int add_leaf(const Leaf& leaf, int seed_tile = -1);
    int find_leaf(const Leaf& leaf);
    // Regular leaves through the reference points of every tile within the
    // radius of center, and singular leaves at the corners of those tiles.
    void add_ball_seeds(int center, int radius);
    const std::vector<Leaf>& leaves() const { return leaves_; }
    CircleApprox build();

private:
    Leaves* L_;
    std::vector<Leaf> leaves_;
    std::vector<int> seed_tile_;
    std::set<std::pair<int, int>> seen_tiles_;     // (tile, kind)
    std::set<std::pair<int, int>> seen_vertices_;  // (vertex, kind)
    std::map<std::pair<int, std::string>, std::vector<int>> by_level_;
};

std::vector<int> local_ball(Cover& C, int center, int radius);

}  // namespace orbitsphere
