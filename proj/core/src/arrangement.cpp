#include "orbitsphere/arrangement.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace orbitsphere {

bool CircleApprox::between(int a, int b, int c) const {
    int n = static_cast<int>(order.size());
    int db = ((b - a) % n + n) % n;
    int dc = ((c - a) % n + n) % n;
    return db > 0 && db < dc;
}

std::vector<int> local_ball(Cover& C, int center, int radius) {
    std::unordered_map<int, int> dist{{center, 0}};
    std::deque<int> q{center};
    std::vector<int> out{center};
    while (!q.empty()) {
        int t = q.front();
        q.pop_front();
        if (dist[t] >= radius) continue;
        for (int d = 0; d < 4; ++d) {
            int n = C.neighbor(t, static_cast<Dir>(d));
            if (dist.emplace(n, dist[t] + 1).second) {
                q.push_back(n);
                out.push_back(n);
            }
        }
    }
    return out;
}

int CircleBuilder::find_leaf(const Leaf& leaf) {
    auto it = by_level_.find({static_cast<int>(leaf.kind), leaf.level.str()});
    if (it == by_level_.end()) return -1;
    for (int i : it->second)
        if (L_->same_leaf(leaves_[i], leaf)) return i;
    return -1;
}

int CircleBuilder::add_leaf(const Leaf& leaf, int seed_tile) {
    int i = find_leaf(leaf);
    if (i >= 0) {
        if (leaf.at_vertex() && !leaves_[i].at_vertex()) leaves_[i] = leaf;
        return i;
    }
    leaves_.push_back(leaf);
    seed_tile_.push_back(seed_tile);
    i = static_cast<int>(leaves_.size()) - 1;
    by_level_[{static_cast<int>(leaf.kind), leaf.level.str()}].push_back(i);
    return i;
}

void CircleBuilder::add_ball_seeds(int center, int radius) {
    Cover& C = L_->cover();
    for (int t : local_ball(C, center, radius)) {
        for (Kind k : {Kind::Stable, Kind::Unstable})
            if (seen_tiles_.insert({t, static_cast<int>(k)}).second)
                add_leaf(L_->leaf_at(C.reference(t), k), t);
    }
    for (int t : local_ball(C, center, radius)) {
        for (int cx = 0; cx <= 1; ++cx)
            for (int cy = 0; cy <= 1; ++cy) {
                int v = C.vertex_at(t, cx, cy);
                for (Kind k : {Kind::Stable, Kind::Unstable})
                    if (seen_vertices_.insert({v, static_cast<int>(k)}).second)
                        add_leaf(L_->singular_leaf(v, k));
            }
    }
}

namespace {

struct Piece {
    int leaf;
    int arm;
    QuadNum lo, hi;
};

// Direction code of a half-edge: 4*slot-class. For crossings and regular
// leaves we use the quadrant of the geometric direction; at a vertex the
// quadrant slot in the 4m-cycle.
struct Half {
    int from, to;
    int angle;  // sort key for the counterclockwise rotation at `from`
};

}  // namespace

CircleApprox CircleBuilder::build() {
    Cover& C = L_->cover();
    const Foliation& F = L_->foliation();
    CircleApprox out;
    out.leaves = leaves_;
    out.seed_tile = seed_tile_;
    const int nl = static_cast<int>(leaves_.size());
    if (nl == 0) return out;

    // Parameter windows: every crossing of a stable leaf happens at the level
    // of some unstable leaf, and conversely.
    std::optional<QuadNum> lo[2], hi[2];
    for (const auto& L : leaves_) {
        int k = static_cast<int>(L.kind);
        if (!lo[k] || L.level < *lo[k]) lo[k] = L.level;
        if (!hi[k] || L.level > *hi[k]) hi[k] = L.level;
    }
    std::unordered_map<int, std::vector<Piece>> pieces[2];
    for (int li = 0; li < nl; ++li) {
        const Leaf& L = leaves_[li];
        int ko = 1 - static_cast<int>(L.kind);
        for (int a = 0; a < static_cast<int>(L.arms.size()); ++a) {
            int sg = L.arms[a].sigma;
            QuadNum bound = L.seed_param + QuadNum(static_cast<long>(sg));
            if (lo[ko]) {
                QuadNum b = sg > 0 ? *hi[ko] + QuadNum(1L) : *lo[ko] - QuadNum(1L);
                if (((b - bound).sign()) * sg > 0) bound = b;
            }
            L_->trace_arm(L, a, bound, [&](int tile, const QuadNum& plo, const QuadNum& phi) {
                pieces[static_cast<int>(L.kind)][tile].push_back({li, a, plo, phi});
            });
        }
    }

    struct Cross {
        int s, as, u, au;
        QuadNum ps, pu;
    };
    std::vector<Cross> crosses;
    for (const auto& [tile, sp] : pieces[0]) {
        auto it = pieces[1].find(tile);
        if (it == pieces[1].end()) continue;
        for (const Piece& s : sp) {
            const Leaf& Ls = leaves_[s.leaf];
            for (const Piece& u : it->second) {
                const Leaf& Lu = leaves_[u.leaf];
                if (Ls.at_vertex() && Lu.at_vertex() && Ls.vertex == Lu.vertex) continue;
                if (Lu.level < s.lo || Lu.level > s.hi) continue;
                if (Ls.level < u.lo || Ls.level > u.hi) continue;
                if (!out.crossings.insert({s.leaf, u.leaf}).second) continue;
                crosses.push_back({s.leaf, s.arm, u.leaf, u.arm, Lu.level, Ls.level});
            }
        }
    }

    // Nodes: crossings, vertex centers, arm ends.
    int next_node = 0;
    std::vector<int> cross_node(crosses.size());
    for (auto& n : cross_node) n = next_node++;
    std::map<int, int> center_node;
    for (const auto& L : leaves_)
        if (L.at_vertex() && !center_node.count(L.vertex)) center_node[L.vertex] = next_node++;
    std::map<int, std::vector<int>> stable_at;
    for (int i = 0; i < nl; ++i)
        if (leaves_[i].at_vertex() && leaves_[i].kind == Kind::Stable) stable_at[leaves_[i].vertex].push_back(i);
    for (int j = 0; j < nl; ++j) {
        if (!leaves_[j].at_vertex() || leaves_[j].kind != Kind::Unstable) continue;
        auto it = stable_at.find(leaves_[j].vertex);
        if (it != stable_at.end())
            for (int i : it->second) out.crossings.insert({i, j});
    }
    std::vector<std::vector<int>> end_node(nl);
    std::vector<std::pair<int, int>> end_of_node;  // node -> (leaf, arm), offset by first end id
    int first_end = next_node;
    for (int li = 0; li < nl; ++li)
        for (size_t a = 0; a < leaves_[li].arms.size(); ++a) {
            end_node[li].push_back(next_node++);
            end_of_node.push_back({li, static_cast<int>(a)});
        }
    out.node_count = static_cast<std::size_t>(next_node);

    // Per leaf (and per arm for vertex leaves) ordered crossing lists.
    struct OnLeaf {
        QuadNum param;
        int node;
        int arm;
    };
    std::vector<std::vector<OnLeaf>> along(nl);
    for (size_t i = 0; i < crosses.size(); ++i) {
        along[crosses[i].s].push_back({crosses[i].ps, cross_node[i], crosses[i].as});
        along[crosses[i].u].push_back({crosses[i].pu, cross_node[i], crosses[i].au});
    }

    std::vector<std::vector<Half>> rot(static_cast<size_t>(next_node));
    auto dir_angle = [&](Kind k, int sigma) { return F.quadrant(k, sigma); };
    auto add_edge = [&](int a, int angle_a, int b, int angle_b) {
        rot[a].push_back({a, b, angle_a});
        rot[b].push_back({b, a, angle_b});
    };
    for (int li = 0; li < nl; ++li) {
        const Leaf& L = leaves_[li];
        auto& list = along[li];
        if (!L.at_vertex()) {
            std::sort(list.begin(), list.end(),
                      [](const OnLeaf& x, const OnLeaf& y) { return x.param < y.param; });
            int prev = end_node[li][0];
            int prev_angle = dir_angle(L.kind, 1);
            for (const auto& ol : list) {
                add_edge(prev, prev_angle, ol.node, dir_angle(L.kind, -1));
                prev = ol.node;
                prev_angle = dir_angle(L.kind, 1);
            }
            add_edge(prev, prev_angle, end_node[li][1], dir_angle(L.kind, -1));
        } else {
            for (int a = 0; a < static_cast<int>(L.arms.size()); ++a) {
                int sg = L.arms[a].sigma;
                std::vector<OnLeaf> arm_list;
                for (const auto& ol : list)
                    if (ol.arm == a) arm_list.push_back(ol);
                std::sort(arm_list.begin(), arm_list.end(), [sg](const OnLeaf& x, const OnLeaf& y) {
                    return sg > 0 ? x.param < y.param : x.param > y.param;
                });
                int prev = center_node.at(L.vertex);
                int prev_angle = L.arms[a].slot;
                for (const auto& ol : arm_list) {
                    add_edge(prev, prev_angle, ol.node, dir_angle(L.kind, -sg));
                    prev = ol.node;
                    prev_angle = dir_angle(L.kind, sg);
                }
                add_edge(prev, prev_angle, end_node[li][a], dir_angle(L.kind, -sg));
            }
        }
    }
    for (auto& r : rot) {
        std::sort(r.begin(), r.end(), [](const Half& x, const Half& y) { return x.angle < y.angle; });
        for (size_t i = 1; i < r.size(); ++i)
            if (r[i].angle == r[i - 1].angle) throw CircleError("degenerate rotation at a node");
    }

    // Walk the face to the left of the half-edge entering the first end.
    auto index_of = [&](int v, int to) {
        for (size_t i = 0; i < rot[v].size(); ++i)
            if (rot[v][i].to == to) return static_cast<int>(i);
        throw CircleError("broken half-edge structure");
    };
    int e0 = end_node[0][0];
    int u0 = rot[e0][0].to;
    int cu = u0, cv = e0;
    std::vector<int> cw;
    std::size_t guard = 0, limit = 4 * static_cast<std::size_t>(next_node) + 16;
    do {
        if (cv >= first_end) cw.push_back(cv - first_end);
        int i = index_of(cv, cu);
        int deg = static_cast<int>(rot[cv].size());
        int nx = rot[cv][(i - 1 + deg) % deg].to;
        cu = cv;
        cv = nx;
        if (++guard > limit) throw CircleError("face walk did not close");
    } while (!(cu == u0 && cv == e0));

    std::size_t total_ends = end_of_node.size();
    if (cw.size() != total_ends) {
        throw CircleError("outer face holds " + std::to_string(cw.size()) + " of " +
                          std::to_string(total_ends) + " leaf ends (arrangement not connected)");
    }
    // The unbounded face lies to the left, so the walk runs clockwise.
    std::reverse(cw.begin(), cw.end());
    out.position.assign(nl, {});
    for (int li = 0; li < nl; ++li) out.position[li].assign(leaves_[li].arms.size(), -1);
    for (size_t i = 0; i < cw.size(); ++i) {
        auto [li, a] = end_of_node[cw[i]];
        out.order.push_back({li, a});
        out.position[li][a] = static_cast<int>(i);
    }
    return out;
}

}  // namespace orbitsphere
