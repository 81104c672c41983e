#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "orbitsphere/surface.hpp"

namespace orbitsphere {

using Word = std::vector<std::uint8_t>;  // letters are Dir values

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
std::string word_string(const Word& w);
Word parse_word(const std::string& letters);

// The group <r, u | (r^-1 u^-1 r u)^m> whose Cayley graph is the dual graph
// of the universal cover of the square-tiled surface.
class TileGroup {
public:
    explicit TileGroup(int m) : m_(m) {}
    int m() const { return m_; }
    // Free reduction followed by Dehn reduction; trivial elements reduce to
    // the empty word.
    Word reduce(Word w) const;
    bool is_trivial(const Word& w) const;

private:
    int m_;
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutsideBall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tile {
    int id = 0;
    Word word;
    int label = 0;
    long X = 0, Y = 0;  // developed position of the lower-left corner
    int dist = -1;      // combinatorial distance from the base, -1 if unknown
    int parent = -1;
    Dir parent_dir = kRight;  // this tile = parent * parent_dir
    std::array<int, 4> nbr{-1, -1, -1, -1};
};

struct CPoint {
    int tile = 0;
    Vec2 local;
};

// Group element L_k o F^n with k in the deck group and F the chosen lift of
// the monodromy.
struct GroupElem {
    Word fiber;
    long power = 0;
};

class Cover {
public:
    explicit Cover(const Surface& S, std::size_t budget = 1000000);

    const Surface& surface() const { return *S_; }
    const TileGroup& group() const { return group_; }
    int base() const { return 0; }
    int radius() const { return radius_; }
    std::size_t budget() const { return budget_; }
    std::size_t size() const { return tiles_.size(); }
    const Tile& tile(int id) const { return tiles_[id]; }

    int neighbor(int t, Dir d);
    int tile_of_word(const Word& w, int start = 0);
    std::optional<int> find_tile(const Word& w) const;
    // Tiles within the given distance of the base.
    void build_ball(int radius);
    void enlarge(int new_radius) { build_ball(new_radius); }
    std::vector<int> ball_tiles(int radius) const;
    std::vector<int> tiles_at(long X, long Y, int label) const;

    Vec2 dev(const CPoint& p) const;
    CPoint reference(int t) const { return {t, Surface::reference_point()}; }
    // Straight segment in the developed metric; throws NonGenericPath if it
    // meets a cone point before its end.
    CPoint trace(const CPoint& p, const Vec2& w);
    // Canonical representative of the vertex at a corner (0/1, 0/1) of a tile.
    int vertex_at(int t, int cx, int cy);
    int vertex_at_lower_left(int t);
    // The 4m tiles around a vertex in counterclockwise order, starting with
    // the canonical northeast tile: NE_0, NW_0, SW_0, SE_0, NE_1, ...
    std::vector<int> quadrants(int vertex);
    // Returns the canonical vertex when p is a tile corner.
    std::optional<int> as_vertex(const CPoint& p);
    bool same_point(const CPoint& a, const CPoint& b);

    // Deck group.
    bool is_deck(const Word& w) const;
    int apply_left(const Word& k, int t);
    Word element_of(int t) const { return tiles_[t].word; }

    // Monodromy lift fixing the base vertex.
    CPoint lift(const CPoint& p);
    CPoint lift_inverse(const CPoint& p);
    CPoint apply(const GroupElem& g, const CPoint& p);
    int apply_vertex(const GroupElem& g, int vertex);
    int apply_deck(const GroupElem& g, int t);
    Word twist_automorphism(const Word& k, long n);
    GroupElem compose(const GroupElem& a, const GroupElem& b);
    GroupElem inverse(const GroupElem& g);
    GroupElem power(const GroupElem& g, long n);
    bool equal(const GroupElem& a, const GroupElem& b);
    // dev(g p) = A^n dev(p) + offset for every point p.
    Mat2 derivative(const GroupElem& g) const;
    Vec2 offset(const GroupElem& g);

    std::string dump_json(int radius) const;

private:
    int intern(int parent, Dir d);
    std::uint64_t key(long X, long Y, int label) const;
    CPoint lift_reference(int t);
    CPoint lift_inverse_reference(int t);
    void init_lift();

    const Surface* S_;
    TileGroup group_;
    std::size_t budget_;
    int radius_ = -1;
    std::vector<Tile> tiles_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
    std::unordered_map<int, CPoint> lift_memo_;
    std::unordered_map<int, CPoint> lift_inv_memo_;
    bool lift_ready_ = false;
};

GroupElem identity_element();
GroupElem monodromy_element();
GroupElem deck_element(const Word& w);
std::string element_string(const GroupElem& g);

}  // namespace orbitsphere
