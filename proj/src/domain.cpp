#include "critlat/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "critlat/rng.hpp"

namespace critlat {

namespace {

Point add(const Point& p, const Point& q) { return {p[0] + q[0], p[1] + q[1], 0}; }
Point sub(const Point& p, const Point& q) { return {p[0] - q[0], p[1] - q[1], 0}; }

using Key = std::pair<int, int>;  // doubled midpoint
Key mid_key(const Point& x, int k) {
    Point u = unit_step(k);
    return {2 * x[0] + u[0], 2 * x[1] + u[1]};
}

enum class Mid { free_edge, ab, ba, ba_edge };

// lower-left corner of the face in quadrant k of x
Point quadrant_corner(const Point& x, int k) {
    static const int cx[4] = {0, -1, -1, 0}, cy[4] = {0, 0, -1, -1};
    return {x[0] + cx[k & 3], x[1] + cy[k & 3], 0};
}

struct Outward {
    Point x;
    int k;
};

}  // namespace

int DobrushinDomain::contracted_vertex_count() const {
    return graph_.num_vertices() - static_cast<int>(arc_ba_.size()) + 1;
}

int DobrushinDomain::medial_edge_at(int x, int k) const {
    auto it = edge_at_.find({x, k & 3});
    return it == edge_at_.end() ? -1 : it->second;
}

int DobrushinDomain::face_index(const Point& corner) const {
    auto it = face_at_.find({corner[0], corner[1], 0});
    return it == face_at_.end() ? -1 : it->second;
}

cplx DobrushinDomain::frame(double x, double y) const { return rot_ * cplx(x, y); }

DobrushinDomain medial_domain(const LatticeGraph& omega, int a, int b) {
    if (omega.dim() != 2) throw std::invalid_argument("Dobrushin domains live in Z^2");
    const int nv = omega.num_vertices();
    if (nv == 0) throw std::invalid_argument("empty domain");
    if (a < 0 || a >= nv || b < 0 || b >= nv) throw std::invalid_argument("a and b must be vertices of the domain");
    LatticeGraph full = LatticeGraph::induced(2, omega.points());
    if (!is_connected(full)) throw std::invalid_argument("domain is not connected");
    auto inside = [&](const Point& p) { return full.index_of(p) >= 0; };

    std::vector<Outward> outward;
    for (int v = 0; v < nv; ++v)
        for (int k = 0; k < 4; ++k)
            if (!inside(add(full.point(v), unit_step(k)))) outward.push_back({full.point(v), k});
    if (outward.empty()) throw std::invalid_argument("domain has no boundary");

    // counterclockwise trace of the outer boundary
    std::vector<Outward> trace;
    Outward cur = outward.front();
    do {
        trace.push_back(cur);
        if (trace.size() > outward.size()) break;
        Point d = unit_step(cur.k), t = unit_step(cur.k + 1);
        Point L = add(cur.x, t), R = add(L, d);
        bool li = inside(L), ri = inside(R);
        if (li && ri)
            cur = {R, (cur.k + 3) & 3};
        else if (li)
            cur = {L, cur.k};
        else if (!ri)
            cur = {cur.x, (cur.k + 1) & 3};
        else
            throw std::invalid_argument("domain is pinched at a diagonal corner");
    } while (!(cur.x == trace.front().x && cur.k == trace.front().k));
    if (trace.size() != outward.size()) throw std::invalid_argument("complement of the domain is not connected");

    const int n = static_cast<int>(trace.size());
    const Point pa = full.point(a), pb = full.point(b);
    auto at = [&](int i) -> const Outward& { return trace[((i % n) + n) % n]; };
    int s = -1;
    for (int i = 0; i < n && s < 0; ++i)
        if (at(i).x == pb && !(at(i - 1).x == pb)) s = i;
    if (s < 0) {
        for (int i = 0; i < n && s < 0; ++i)
            if (at(i).x == pb) s = i;
    }
    if (s < 0) throw std::invalid_argument("b is not on the boundary");
    int j = s;
    if (!(pa == pb)) {
        while (j < s + n && !(at(j).x == pa)) ++j;
        if (j == s + n) throw std::invalid_argument("a is not on the boundary");
    }
    while (j + 1 < s + n && at(j + 1).x == pa) ++j;

    std::map<Key, Mid> kind;
    std::set<Point> arc;
    for (int i = 0; i < n; ++i) {
        const Outward& o = at(s + i);
        bool ba = i <= j - s;
        kind[mid_key(o.x, o.k)] = ba ? Mid::ba : Mid::ab;
        if (ba) arc.insert(o.x);
    }
    auto kind_of = [&](const Point& x, int k) -> const Mid* {
        auto it = kind.find(mid_key(x, k));
        return it == kind.end() ? nullptr : &it->second;
    };

    // dual vertices: full faces and faces touching (ab)*
    std::set<Point> face_set;
    std::map<Point, bool> fullness;
    for (int v = 0; v < nv; ++v)
        for (int k = 0; k < 4; ++k) {
            Point c = quadrant_corner(full.point(v), k);
            if (fullness.count(c)) continue;
            Point c1 = add(c, {1, 0, 0}), c2 = add(c, {0, 1, 0}), c3 = add(c, {1, 1, 0});
            bool f = inside(c) && inside(c1) && inside(c2) && inside(c3);
            fullness[c] = f;
            bool touches = false;
            // the four sides, each named from one endpoint
            const std::pair<Point, int> sides[8] = {{c, 0}, {c1, 2}, {c, 1}, {c2, 3}, {c1, 1}, {c3, 3}, {c2, 0}, {c3, 2}};
            for (const auto& [p, k2] : sides) {
                if (!inside(p)) continue;
                const Mid* m = kind_of(p, k2);
                if (m && *m == Mid::ab) touches = true;
            }
            if (f || touches) face_set.insert(c);
        }

    DobrushinDomain dom;
    std::vector<std::pair<Point, Point>> free_edges;
    for (const Edge& e : full.edges()) {
        Point p = full.point(e.u), q = full.point(e.v);
        bool horizontal = p[1] == q[1];
        Point f1 = p, f2 = horizontal ? sub(p, {0, 1, 0}) : sub(p, {1, 0, 0});
        if (face_set.count(f1) && face_set.count(f2)) {
            free_edges.push_back({p, q});
        } else {
            if (!arc.count(p) || !arc.count(q)) throw std::invalid_argument("boundary edge off the arc (ba)");
            dom.ba_edges_.push_back({p, q});
            int kk = horizontal ? 0 : 1;
            kind[mid_key(p, kk)] = Mid::ba_edge;
        }
    }
    {
        // the wired arc must not enclose faces of its own
        UnionFind uf(nv);
        for (const auto& [p, q] : dom.ba_edges_)
            if (!uf.unite(full.index_of(p), full.index_of(q)))
                throw std::invalid_argument("the arc (ba) closes a cycle of boundary edges");
    }
    dom.graph_ = LatticeGraph(2, full.points(), free_edges);
    const LatticeGraph& g = dom.graph_;
    dom.a_ = a;
    dom.b_ = b;
    dom.in_ba_.assign(nv, 0);
    for (const Point& p : arc) {
        int v = g.index_of(p);
        dom.in_ba_[v] = 1;
        dom.arc_ba_.push_back(v);
    }
    std::sort(dom.arc_ba_.begin(), dom.arc_ba_.end());

    std::map<Key, int> mid_id;
    for (int e = 0; e < g.num_edges(); ++e) {
        Point p = g.point(g.edge(e).u), q = g.point(g.edge(e).v);
        MedialVertex m;
        m.x = p;
        m.y = q;
        m.edge = e;
        mid_id[{p[0] + q[0], p[1] + q[1]}] = static_cast<int>(dom.mv_.size());
        dom.mv_.push_back(m);
    }
    for (const auto& [p, q] : dom.ba_edges_) {
        MedialVertex m;
        m.x = p;
        m.y = q;
        m.primal_boundary = true;
        mid_id[{p[0] + q[0], p[1] + q[1]}] = static_cast<int>(dom.mv_.size());
        dom.mv_.push_back(m);
    }
    for (int i = 0; i < n; ++i) {
        const Outward& o = at(s + i);
        if (i <= j - s) continue;
        MedialVertex m;
        m.x = o.x;
        m.y = add(o.x, unit_step(o.k));
        m.dual_boundary = true;
        mid_id[mid_key(o.x, o.k)] = static_cast<int>(dom.mv_.size());
        dom.mv_.push_back(m);
    }
    auto vertex_at = [&](const Point& x, int k) {
        auto it = mid_id.find(mid_key(x, k));
        return it == mid_id.end() ? -1 : it->second;
    };
    auto is_ba = [&](const Point& x, int k) {
        const Mid* m = kind_of(x, k);
        return m && *m == Mid::ba;
    };

    for (const Point& c : face_set) {
        dom.face_at_[c] = static_cast<int>(dom.faces_.size());
        dom.faces_.push_back({c, fullness[c], {}});
    }

    for (int v = 0; v < nv; ++v) {
        const Point& x = g.point(v);
        for (int k = 0; k < 4; ++k) {
            int t = vertex_at(x, k), h = vertex_at(x, k + 1);
            bool entry = v == a && is_ba(x, k) && h >= 0;
            bool exit = v == b && t >= 0 && is_ba(x, k + 1);
            if (!(t >= 0 && h >= 0) && !entry && !exit) continue;
            int face = dom.face_index(quadrant_corner(x, k));
            if (face < 0) {
                if (entry || exit) throw std::invalid_argument("entry or exit medial edge outside the dual domain");
                continue;
            }
            MedialEdge me;
            me.x = v;
            me.k = k;
            me.tail = t;
            me.head = h;
            me.face = face;
            int id = static_cast<int>(dom.me_.size());
            if (entry) {
                if (dom.e_a_ >= 0) throw std::invalid_argument("ambiguous entry edge e_a");
                dom.e_a_ = id;
            }
            if (exit) {
                if (dom.e_b_ >= 0) throw std::invalid_argument("ambiguous exit edge e_b");
                dom.e_b_ = id;
            }
            dom.edge_at_[{v, k}] = id;
            dom.me_.push_back(me);
        }
    }
    if (dom.e_a_ < 0 || dom.e_b_ < 0) throw std::invalid_argument("domain has no entry or exit medial edge");
    // every turn the loop rule can take must stay on the medial graph
    for (const MedialEdge& me : dom.me_) {
        if (me.head < 0) continue;
        const MedialVertex& m = dom.mv_[me.head];
        Point x = g.point(me.x), y = add(x, unit_step(me.k + 1));
        bool ok = true;
        if (!m.primal_boundary) ok = dom.medial_edge_at(me.x, me.k + 1) >= 0;
        if (!m.dual_boundary && ok) ok = g.index_of(y) >= 0 && dom.medial_edge_at(g.index_of(y), me.k + 3) >= 0;
        if (!ok) throw std::invalid_argument("malformed domain: a loop would leave the medial graph");
    }

    // frame: rotate and scale so that e_b = 1 and medial edges have unit length
    const MedialEdge& eb = dom.me_[dom.e_b_];
    Point d0 = unit_step(eb.k), d1 = unit_step(eb.k + 1);
    cplx ebu = cplx(d1[0] - d0[0], d1[1] - d0[1]) / std::sqrt(2.0);
    dom.rot_ = std::sqrt(2.0) * std::conj(ebu);
    for (auto& m : dom.mv_) m.z = dom.frame(0.5 * (m.x[0] + m.y[0]), 0.5 * (m.x[1] + m.y[1]));
    for (auto& f : dom.faces_) f.z = dom.frame(f.corner[0] + 0.5, f.corner[1] + 0.5);
    for (auto& me : dom.me_) {
        Point u0 = unit_step(me.k), u1 = unit_step(me.k + 1);
        me.dir = dom.rot_ * cplx(u1[0] - u0[0], u1[1] - u0[1]) / 2.0;
    }

    dom.incident_.assign(dom.mv_.size(), {});
    for (int id = 0; id < static_cast<int>(dom.me_.size()); ++id) {
        if (dom.me_[id].tail >= 0) dom.incident_[dom.me_[id].tail].push_back(id);
        if (dom.me_[id].head >= 0) dom.incident_[dom.me_[id].head].push_back(id);
    }
    for (int v = 0; v < static_cast<int>(dom.mv_.size()); ++v) {
        auto leaving = [&](int id) {
            const MedialEdge& me = dom.me_[id];
            double ang = std::arg(me.tail == v ? me.dir : -me.dir);
            return ang < 0 ? ang + 2 * M_PI : ang;
        };
        std::sort(dom.incident_[v].begin(), dom.incident_[v].end(),
                  [&](int p, int q) { return leaving(p) < leaving(q); });
    }
    return dom;
}

DobrushinDomain parse_domain_text(const std::string& text) {
    GraphFile gf = parse_graph_text(text);
    if (!gf.has_a || !gf.has_b) throw std::invalid_argument("domain file needs `a x y` and `b x y` lines");
    LatticeGraph induced = LatticeGraph::induced(2, gf.graph.points());
    if (gf.listed_edges && induced.num_edges() != gf.graph.num_edges())
        throw std::invalid_argument("domain files describe induced subgraphs; listed edges must match");
    int a = induced.index_of(gf.a), b = induced.index_of(gf.b);
    if (a < 0 || b < 0) throw std::invalid_argument("a or b is not a vertex of the domain");
    return medial_domain(induced, a, b);
}

DobrushinDomain load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open domain file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_domain_text(ss.str());
}

DobrushinDomain random_domain(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random_domain needs n >= 2");
    for (std::uint64_t attempt = 0; attempt < 100000; ++attempt) {
        CounterRng rng(seed, attempt);
        std::vector<Point> sites{{0, 0, 0}};
        std::set<Point> have(sites.begin(), sites.end());
        while (static_cast<int>(sites.size()) < n) {
            Point p = add(sites[rng.below(sites.size())], unit_step(static_cast<int>(rng.below(4))));
            if (have.insert(p).second) sites.push_back(p);
        }
        LatticeGraph g = LatticeGraph::induced(2, sites);
        std::vector<int> bnd;
        for (int v = 0; v < g.num_vertices(); ++v)
            for (int k = 0; k < 4; ++k)
                if (g.index_of(add(g.point(v), unit_step(k))) < 0) {
                    bnd.push_back(v);
                    break;
                }
        int a = bnd[rng.below(bnd.size())], b = bnd[rng.below(bnd.size())];
        try {
            return medial_domain(g, a, b);
        } catch (const std::invalid_argument&) {
        }
    }
    throw std::runtime_error("random_domain found no valid domain");
}

}  // namespace critlat
