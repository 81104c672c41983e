#pragma once

#include <array>
#include <string>
#include <vector>

#include "orbitsphere/flowspec.hpp"
#include "orbitsphere/qnum.hpp"

namespace orbitsphere {

// Unit moves between adjacent squares. The inverse of d is (d + 2) % 4.
enum Dir : int { kRight = 0, kUp = 1, kLeft = 2, kDown = 3 };
inline Dir inverse(Dir d) { return static_cast<Dir>((d + 2) % 4); }
char dir_letter(Dir d);
Dir dir_from_letter(char c);

struct SurfacePoint {
    int square = 0;
    Vec2 local;
};

struct Twist {
    char axis = 'H';  // 'H' shears horizontal cylinders, 'V' vertical ones
    long shear = 0;
    Mat2 matrix() const;
};

class NonGenericPath : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Square-tiled translation surface with an affine multitwist map.
class Surface {
public:
    static Surface from_spec(const FlowSpec& spec);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int sq) const { return names_[sq]; }
    int index_of(const std::string& name) const;
    int neighbor(int sq, Dir d) const { return nbr_[sq][d]; }
    int base() const { return 0; }

    // Cone angle of every vertex is 2*pi*m.
    int cone_m() const { return cone_m_; }
    int prongs() const { return 2 * cone_m_; }
    int vertex_count() const { return static_cast<int>(vertex_cycles_.size()); }
    // Vertex at the lower-left corner of the square.
    int vertex_of(int sq) const { return bl_vertex_[sq]; }
    int vertex_of_corner(int sq, const std::string& corner) const;
    const std::vector<int>& vertex_cycle(int v) const { return vertex_cycles_[v]; }
    int euler_genus() const;
    std::vector<int> cylinder_widths(char axis) const;

    const std::vector<Twist>& twists() const { return twists_; }
    const Mat2& matrix() const { return A_; }
    int field() const { return field_d_; }
    const QuadNum& dilatation() const { return lambda_; }
    const QuadNum& stable_slope() const { return s_stable_; }
    const QuadNum& unstable_slope() const { return s_unstable_; }

    SurfacePoint apply_twist(const Twist& tw, const SurfacePoint& p, bool inverse) const;
    SurfacePoint f(const SurfacePoint& p) const;
    SurfacePoint f_inverse(const SurfacePoint& p) const;
    // Straight segment by vector w; records every square entered after the first.
    SurfacePoint walk(const SurfacePoint& p, const Vec2& w, std::vector<int>* entered) const;

    static Vec2 reference_point();
    std::vector<std::vector<int>> computed_transition() const;

private:
    std::vector<std::string> names_;
    std::vector<std::array<int, 4>> nbr_;
    std::vector<std::vector<int>> vertex_cycles_;
    std::vector<int> bl_vertex_;
    int cone_m_ = 1;
    std::vector<Twist> twists_;
    Mat2 A_;
    int field_d_ = 0;
    QuadNum lambda_;
    QuadNum s_stable_;
    QuadNum s_unstable_;
};

// Squarefree part and square factor: n = k^2 * d.
void squarefree_split(long n, long& k, long& d);

// Generic walk of a straight segment inside the unit square grid. Calls
// cross(dir) for every edge crossed and returns the end point in local
// coordinates of the final square. The callback also receives the exit point
// in the coordinates of the square being left.
template <class CrossFn>
Vec2 walk_segment(Vec2 p, Vec2 w, CrossFn&& cross) {
    const QuadNum one(1L);
    while (true) {
        int sx = w.x.sign();
        int sy = w.y.sign();
        if (sx == 0 && sy == 0) return p;
        bool hasx = sx != 0, hasy = sy != 0;
        QuadNum tx, ty;
        if (hasx) tx = (sx > 0 ? one - p.x : -p.x) / w.x;
        if (hasy) ty = (sy > 0 ? one - p.y : -p.y) / w.y;
        bool xfirst;
        if (hasx && hasy) {
            int c = (tx - ty).sign();
            if (c == 0 && tx < one) throw NonGenericPath("segment passes through a vertex");
            xfirst = c < 0;
        } else {
            xfirst = hasx;
        }
        QuadNum t = xfirst ? tx : ty;
        if (t >= one) return p + w;
        p = p + t * w;
        w = (one - t) * w;
        if (xfirst) {
            cross(sx > 0 ? kRight : kLeft, p);
            p.x = QuadNum(sx > 0 ? 0L : 1L);
        } else {
            cross(sy > 0 ? kUp : kDown, p);
            p.y = QuadNum(sy > 0 ? 0L : 1L);
        }
    }
}

}  // namespace orbitsphere
