#include "orbitsphere/cover.hpp"

#include <algorithm>
#include <deque>
#include <nlohmann/json.hpp>

namespace orbitsphere {

Word inverse(const Word& w) {
    Word r(w.rbegin(), w.rend());
    for (auto& c : r) c = static_cast<std::uint8_t>((c + 2) % 4);
    return r;
}

Word concat(const Word& a, const Word& b) {
    Word r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

std::string word_string(const Word& w) {
    std::string s;
    for (auto c : w) s += dir_letter(static_cast<Dir>(c));
    return s;
}

Word parse_word(const std::string& letters) {
    Word w;
    for (char c : letters) w.push_back(static_cast<std::uint8_t>(dir_from_letter(c)));
    return w;
}

namespace {

Word free_reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto c : w) {
        if (!out.empty() && (out.back() + 2) % 4 == c) out.pop_back();
        else out.push_back(c);
    }
    return out;
}

}  // namespace

Word TileGroup::reduce(Word w) const {
    w = free_reduce(w);
    if (m_ == 1) {
        long x = 0, y = 0;
        for (auto c : w) {
            if (c == kRight) ++x;
            if (c == kLeft) --x;
            if (c == kUp) ++y;
            if (c == kDown) --y;
        }
        Word r;
        for (long i = 0; i < std::labs(x); ++i) r.push_back(x > 0 ? kRight : kLeft);
        for (long i = 0; i < std::labs(y); ++i) r.push_back(y > 0 ? kUp : kDown);
        return r;
    }
    const int rel = 4 * m_;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int step : {1, 3}) {
            size_t i = 0;
            while (i < w.size()) {
                size_t j = i + 1;
                while (j < w.size() && w[j] == (w[j - 1] + step) % 4 && static_cast<int>(j - i) < rel) ++j;
                int k = static_cast<int>(j - i);
                if (2 * k > rel) {
                    // w[i..j) . rest = relator, so w[i..j) = rest^-1.
                    Word rest;
                    std::uint8_t c = w[j - 1];
                    for (int t = 0; t < rel - k; ++t) {
                        c = static_cast<std::uint8_t>((c + step) % 4);
                        rest.push_back(c);
                    }
                    Word rep = orbitsphere::inverse(rest);
                    Word nw(w.begin(), w.begin() + static_cast<long>(i));
                    nw.insert(nw.end(), rep.begin(), rep.end());
                    nw.insert(nw.end(), w.begin() + static_cast<long>(j), w.end());
                    w = free_reduce(nw);
                    changed = true;
                    break;
                }
                i = j;
            }
            if (changed) break;
        }
    }
    return w;
}

bool TileGroup::is_trivial(const Word& w) const { return reduce(w).empty(); }

Cover::Cover(const Surface& S, std::size_t budget) : S_(&S), group_(S.cone_m()), budget_(budget) {
    Tile t;
    t.id = 0;
    t.label = S.base();
    t.dist = 0;
    tiles_.push_back(t);
    buckets_[key(0, 0, t.label)].push_back(0);
}

std::uint64_t Cover::key(long X, long Y, int label) const {
    auto ux = static_cast<std::uint64_t>(X + (1L << 23)) & 0xFFFFFF;
    auto uy = static_cast<std::uint64_t>(Y + (1L << 23)) & 0xFFFFFF;
    return (ux << 40) | (uy << 16) | static_cast<std::uint64_t>(label);
}

int Cover::intern(int parent, Dir d) {
    const Tile& p = tiles_[parent];
    Word w = p.word;
    w.push_back(d);
    w = group_.reduce(w);
    long X = p.X + (d == kRight) - (d == kLeft);
    long Y = p.Y + (d == kUp) - (d == kDown);
    int label = S_->neighbor(p.label, d);
    auto& bucket = buckets_[key(X, Y, label)];
    for (int c : bucket) {
        if (tiles_[c].word == w) return c;
        if (group_.is_trivial(concat(w, orbitsphere::inverse(tiles_[c].word)))) return c;
    }
    if (tiles_.size() >= budget_)
        throw BudgetExceeded("tile budget of " + std::to_string(budget_) + " exceeded");
    Tile t;
    t.id = static_cast<int>(tiles_.size());
    t.word = std::move(w);
    t.label = label;
    t.X = X;
    t.Y = Y;
    t.parent = parent;
    t.parent_dir = d;
    bucket.push_back(t.id);
    tiles_.push_back(std::move(t));
    return tiles_.back().id;
}

int Cover::neighbor(int t, Dir d) {
    int n = tiles_[t].nbr[d];
    if (n >= 0) return n;
    n = intern(t, d);
    tiles_[t].nbr[d] = n;
    tiles_[n].nbr[orbitsphere::inverse(d)] = t;
    return n;
}

int Cover::tile_of_word(const Word& w, int start) {
    int t = start;
    for (auto c : w) t = neighbor(t, static_cast<Dir>(c));
    return t;
}

std::optional<int> Cover::find_tile(const Word& w) const {
    Word r = group_.reduce(w);
    long X = 0, Y = 0;
    int label = S_->base();
    for (auto c : r) {
        X += (c == kRight) - (c == kLeft);
        Y += (c == kUp) - (c == kDown);
        label = S_->neighbor(label, static_cast<Dir>(c));
    }
    auto it = buckets_.find(key(X, Y, label));
    if (it == buckets_.end()) return std::nullopt;
    for (int c : it->second)
        if (tiles_[c].word == r || group_.is_trivial(concat(r, orbitsphere::inverse(tiles_[c].word))))
            return c;
    return std::nullopt;
}

void Cover::build_ball(int radius) {
    if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
    if (radius <= radius_) return;
    std::vector<int> dist(tiles_.size(), -1);
    std::deque<int> q{0};
    dist[0] = 0;
    while (!q.empty()) {
        int t = q.front();
        q.pop_front();
        if (dist[t] >= radius) continue;
        for (int d = 0; d < 4; ++d) {
            int n = neighbor(t, static_cast<Dir>(d));
            if (n >= static_cast<int>(dist.size())) dist.resize(tiles_.size(), -1);
            if (dist[n] < 0) {
                dist[n] = dist[t] + 1;
                q.push_back(n);
            }
        }
    }
    for (size_t i = 0; i < dist.size(); ++i)
        if (dist[i] >= 0) tiles_[i].dist = dist[i];
    radius_ = radius;
}

std::vector<int> Cover::ball_tiles(int radius) const {
    std::vector<int> out;
    for (const auto& t : tiles_)
        if (t.dist >= 0 && t.dist <= radius && radius <= radius_) out.push_back(t.id);
    return out;
}

std::vector<int> Cover::tiles_at(long X, long Y, int label) const {
    auto it = buckets_.find(key(X, Y, label));
    if (it == buckets_.end()) return {};
    return it->second;
}

Vec2 Cover::dev(const CPoint& p) const {
    const Tile& t = tiles_[p.tile];
    return {p.local.x + QuadNum(t.X), p.local.y + QuadNum(t.Y)};
}

CPoint Cover::trace(const CPoint& p, const Vec2& w) {
    int t = p.tile;
    Vec2 end = walk_segment(p.local, w, [&](Dir d, const Vec2&) { t = neighbor(t, d); });
    return {t, end};
}

int Cover::vertex_at(int t, int cx, int cy) {
    int ne = t;
    if (cx) ne = neighbor(ne, kRight);
    if (cy) ne = neighbor(ne, kUp);
    return vertex_at_lower_left(ne);
}

int Cover::vertex_at_lower_left(int t) {
    int best = t;
    int x = t;
    for (int j = 0; j < group_.m(); ++j) {
        x = neighbor(neighbor(neighbor(neighbor(x, kLeft), kDown), kRight), kUp);
        best = std::min(best, x);
    }
    return best;
}

std::vector<int> Cover::quadrants(int vertex) {
    std::vector<int> out;
    int x = vertex;
    for (int j = 0; j < group_.m(); ++j) {
        out.push_back(x);
        x = neighbor(x, kLeft);
        out.push_back(x);
        x = neighbor(x, kDown);
        out.push_back(x);
        x = neighbor(x, kRight);
        out.push_back(x);
        x = neighbor(x, kUp);
    }
    return out;
}

std::optional<int> Cover::as_vertex(const CPoint& p) {
    const QuadNum one(1L);
    bool x0 = p.local.x.sign() == 0, x1 = p.local.x == one;
    bool y0 = p.local.y.sign() == 0, y1 = p.local.y == one;
    if ((x0 || x1) && (y0 || y1)) return vertex_at(p.tile, x1 ? 1 : 0, y1 ? 1 : 0);
    return std::nullopt;
}

bool Cover::same_point(const CPoint& a, const CPoint& b) {
    auto va = as_vertex(a), vb = as_vertex(b);
    if (va || vb) return va && vb && *va == *vb;
    auto norm = [&](CPoint p) {
        const QuadNum one(1L);
        if (p.local.x == one) {
            p.tile = neighbor(p.tile, kRight);
            p.local.x = QuadNum(0L);
        }
        if (p.local.y == one) {
            p.tile = neighbor(p.tile, kUp);
            p.local.y = QuadNum(0L);
        }
        return p;
    };
    CPoint na = norm(a), nb = norm(b);
    return na.tile == nb.tile && na.local == nb.local;
}

bool Cover::is_deck(const Word& w) const {
    int sq = S_->base();
    for (auto c : w) sq = S_->neighbor(sq, static_cast<Dir>(c));
    return sq == S_->base();
}

int Cover::apply_left(const Word& k, int t) {
    int start = tile_of_word(k, 0);
    return tile_of_word(tiles_[t].word, start);
}

void Cover::init_lift() {
    if (lift_ready_) return;
    const Surface& S = *S_;
    const Vec2 z = Surface::reference_point();
    SurfacePoint fz = S.f({S.base(), z});
    build_ball(std::max(radius_, 2));
    int w0 = -1;
    for (int r = 0; w0 < 0; ++r) {
        build_ball(std::max(radius_, r));
        for (int t : ball_tiles(r))
            if (tiles_[t].label == fz.square) {
                w0 = t;
                break;
            }
    }
    Vec2 back = S.matrix().apply({-z.x, -z.y});
    CPoint img_v = trace({w0, fz.local}, back);
    auto vimg = as_vertex(img_v);
    if (!vimg) throw std::logic_error("monodromy does not map the base vertex to a vertex");
    int v0 = vertex_at_lower_left(base());
    auto quads = quadrants(v0);
    Word k;
    bool found = false;
    for (size_t j = 0; j < quads.size(); j += 4) {
        if (tiles_[quads[j]].label == tiles_[*vimg].label) {
            k = group_.reduce(concat(tiles_[quads[j]].word, orbitsphere::inverse(tiles_[*vimg].word)));
            found = true;
            break;
        }
    }
    if (!found) throw std::logic_error("monodromy does not fix the base vertex on the surface");
    lift_memo_[base()] = {apply_left(k, w0), fz.local};
    lift_ready_ = true;
    // Inverse lift: locate the preimage of the base reference point.
    Vec2 b = dev(lift_memo_[base()]) - S.matrix().apply(z);
    Mat2 Ai = S.matrix().inverse();
    Vec2 qdev = Ai.apply(z - b);
    long qx = qdev.x.floor(), qy = qdev.y.floor();
    Vec2 qloc{qdev.x - QuadNum(qx), qdev.y - QuadNum(qy)};
    SurfacePoint fiz = S.f_inverse({S.base(), z});
    for (int r = radius_;; ++r) {
        build_ball(r);
        for (int c : tiles_at(qx, qy, fiz.square)) {
            CPoint cand{c, qloc};
            if (same_point(lift(cand), reference(base()))) {
                lift_inv_memo_[base()] = cand;
                return;
            }
        }
        if (r > 64) throw std::logic_error("inverse monodromy lift not found");
    }
}

CPoint Cover::lift_reference(int t) {
    init_lift();
    auto it = lift_memo_.find(t);
    if (it != lift_memo_.end()) return it->second;
    std::vector<int> chain;
    int x = t;
    while (!lift_memo_.count(x)) {
        chain.push_back(x);
        x = tiles_[x].parent;
    }
    const Mat2& A = S_->matrix();
    for (auto ci = chain.rbegin(); ci != chain.rend(); ++ci) {
        const Tile& tl = tiles_[*ci];
        Vec2 e{QuadNum(static_cast<long>((tl.parent_dir == kRight) - (tl.parent_dir == kLeft))),
               QuadNum(static_cast<long>((tl.parent_dir == kUp) - (tl.parent_dir == kDown)))};
        CPoint img = trace(lift_memo_.at(tl.parent), A.apply(e));
        lift_memo_[*ci] = img;
    }
    return lift_memo_.at(t);
}

CPoint Cover::lift_inverse_reference(int t) {
    init_lift();
    auto it = lift_inv_memo_.find(t);
    if (it != lift_inv_memo_.end()) return it->second;
    std::vector<int> chain;
    int x = t;
    while (!lift_inv_memo_.count(x)) {
        chain.push_back(x);
        x = tiles_[x].parent;
    }
    Mat2 Ai = S_->matrix().inverse();
    for (auto ci = chain.rbegin(); ci != chain.rend(); ++ci) {
        const Tile& tl = tiles_[*ci];
        Vec2 e{QuadNum(static_cast<long>((tl.parent_dir == kRight) - (tl.parent_dir == kLeft))),
               QuadNum(static_cast<long>((tl.parent_dir == kUp) - (tl.parent_dir == kDown)))};
        CPoint img = trace(lift_inv_memo_.at(tl.parent), Ai.apply(e));
        lift_inv_memo_[*ci] = img;
    }
    return lift_inv_memo_.at(t);
}

CPoint Cover::lift(const CPoint& p) {
    CPoint q = p;
    if (auto v = as_vertex(p)) q = {*v, {QuadNum(0L), QuadNum(0L)}};
    CPoint fz = lift_reference(q.tile);
    Vec2 delta = q.local - Surface::reference_point();
    return trace(fz, S_->matrix().apply(delta));
}

CPoint Cover::lift_inverse(const CPoint& p) {
    CPoint q = p;
    if (auto v = as_vertex(p)) q = {*v, {QuadNum(0L), QuadNum(0L)}};
    CPoint fz = lift_inverse_reference(q.tile);
    Vec2 delta = q.local - Surface::reference_point();
    return trace(fz, S_->matrix().inverse().apply(delta));
}

CPoint Cover::apply(const GroupElem& g, const CPoint& p) {
    CPoint q = p;
    for (long i = 0; i < g.power; ++i) q = lift(q);
    for (long i = 0; i < -g.power; ++i) q = lift_inverse(q);
    if (!g.fiber.empty()) q.tile = apply_left(g.fiber, q.tile);
    return q;
}



int Cover::apply_vertex(const GroupElem& g, int vertex) {
    CPoint img = apply(g, {vertex, {QuadNum(0L), QuadNum(0L)}});
    auto v = as_vertex(img);
    if (!v) throw std::logic_error("group element maps a vertex to a regular point");
    return *v;
}

int Cover::apply_deck(const GroupElem& g, int t) {
    if (g.power == 0) {
        if (!is_deck(g.fiber)) throw std::invalid_argument("fiber word is not a deck element");
        return apply_left(g.fiber, t);
    }
    return apply(g, reference(t)).tile;
}

Word Cover::twist_automorphism(const Word& k, long n) {
    Word w = group_.reduce(k);
    for (long i = 0; i < std::labs(n); ++i) {
        int kt = tile_of_word(w, 0);
        CPoint a = n > 0 ? lift(reference(kt)) : lift_inverse(reference(kt));
        CPoint b = n > 0 ? lift(reference(base())) : lift_inverse(reference(base()));
        w = group_.reduce(concat(tiles_[a.tile].word, orbitsphere::inverse(tiles_[b.tile].word)));
    }
    return w;
}

GroupElem Cover::compose(const GroupElem& a, const GroupElem& b) {
    Word k = group_.reduce(concat(a.fiber, twist_automorphism(b.fiber, a.power)));
    return {k, a.power + b.power};
}

GroupElem Cover::inverse(const GroupElem& g) {
    return {twist_automorphism(orbitsphere::inverse(g.fiber), -g.power), -g.power};
}

GroupElem Cover::power(const GroupElem& g, long n) {
    GroupElem base_el = n >= 0 ? g : inverse(g);
    GroupElem r = identity_element();
    for (long i = 0; i < std::labs(n); ++i) r = compose(r, base_el);
    return r;
}

bool Cover::equal(const GroupElem& a, const GroupElem& b) {
    return a.power == b.power && group_.is_trivial(concat(a.fiber, orbitsphere::inverse(b.fiber)));
}

Mat2 Cover::derivative(const GroupElem& g) const {
    Mat2 A = S_->matrix();
    Mat2 r;
    Mat2 step = g.power >= 0 ? A : A.inverse();
    for (long i = 0; i < std::labs(g.power); ++i) r = r * step;
    return r;
}

Vec2 Cover::offset(const GroupElem& g) {
    CPoint img = apply(g, reference(base()));
    return dev(img) - derivative(g).apply(Surface::reference_point());
}

std::string Cover::dump_json(int radius) const {
    nlohmann::json j;
    j["radius"] = radius;
    j["base"] = 0;
    j["tiles"] = nlohmann::json::array();
    for (const auto& t : tiles_) {
        if (t.dist < 0 || t.dist > radius) continue;
        nlohmann::json n = nlohmann::json::array();
        for (int d = 0; d < 4; ++d) {
            int x = t.nbr[d];
            if (x >= 0 && tiles_[x].dist >= 0 && tiles_[x].dist <= radius) n.push_back(x);
            else n.push_back(nullptr);
        }
        j["tiles"].push_back({{"id", t.id},
                              {"word", word_string(t.word)},
                              {"rectangle", S_->name(t.label)},
                              {"dev", {t.X, t.Y}},
                              {"distance", t.dist},
                              {"neighbors", n}});
    }
    return j.dump(2);
}

GroupElem identity_element() { return {}; }
GroupElem monodromy_element() { return {{}, 1}; }
GroupElem deck_element(const Word& w) { return {w, 0}; }

std::string element_string(const GroupElem& g) {
    std::string s = word_string(g.fiber);
    if (g.power != 0) s += (s.empty() ? "" : " ") + std::string("t^") + std::to_string(g.power);
    return s.empty() ? "e" : s;
}

}  // namespace orbitsphere
