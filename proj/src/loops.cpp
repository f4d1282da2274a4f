#include "critlat/loops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

#include "critlat/parallel.hpp"

namespace critlat {

namespace {

// successor tables of the loop rule: at the head of edge id the walker turns
// left around the same primal vertex if the crossed primal edge is closed, and
// right around the other endpoint if it is open
struct Step {
    int crossed = -1;  // graph edge at the head; -1 on (ab)* and (ba), -2 at the exit
    bool forced_open = false;
    int next_closed = -1, next_open = -1;
};

std::vector<Step> step_table(const DobrushinDomain& dom) {
    const auto& me = dom.medial_edges();
    const LatticeGraph& g = dom.graph();
    std::vector<Step> st(me.size());
    for (std::size_t id = 0; id < me.size(); ++id) {
        const MedialEdge& m = me[id];
        Step& s = st[id];
        if (m.head < 0) {
            s.crossed = -2;
            continue;
        }
        const MedialVertex& mv = dom.medial_vertices()[m.head];
        s.crossed = mv.edge;
        s.forced_open = mv.primal_boundary;
        if (!mv.primal_boundary) {
            s.next_closed = dom.medial_edge_at(m.x, m.k + 1);
            if (s.next_closed < 0) throw std::invalid_argument("malformed domain: loop leaves the medial graph");
        }
        if (!mv.dual_boundary) {
            Point u = unit_step(m.k + 1);
            const Point& x = g.point(m.x);
            int y = g.index_of({x[0] + u[0], x[1] + u[1], 0});
            s.next_open = y < 0 ? -1 : dom.medial_edge_at(y, m.k + 3);
            if (s.next_open < 0) throw std::invalid_argument("malformed domain: loop leaves the medial graph");
        }
    }
    return st;
}

BoundaryCondition dobrushin_bc(const DobrushinDomain& dom) { return BoundaryCondition::wired_arc(dom.graph(), dom.arc_ba()); }

inline int advance(const Step& s, bool open, int* turn) {
    if (s.forced_open || (s.crossed >= 0 && open)) {
        *turn = -1;
        return s.next_open;
    }
    *turn = 1;
    return s.next_closed;
}

}  // namespace

LoopConfig loop_encode(const PercolationConfig& omega, const DobrushinDomain& dom) {
    const LatticeGraph& g = dom.graph();
    if (omega.size() != g.num_edges()) throw std::invalid_argument("configuration length does not match the domain");
    const auto st = step_table(dom);
    const int ne = static_cast<int>(st.size());
    std::vector<char> used(ne, 0);
    LoopConfig lc;
    int cur = dom.e_a();
    lc.exploration.push_back(cur);
    lc.turns.push_back(0);
    used[cur] = 1;
    while (cur != dom.e_b()) {
        int turn = 0;
        const Step& s = st[cur];
        if (s.crossed == -2) throw std::logic_error("exploration path left the domain before e_b");
        cur = advance(s, s.crossed >= 0 && omega[s.crossed], &turn);
        if (used[cur]) throw std::logic_error("exploration path revisits a medial edge");
        used[cur] = 1;
        lc.exploration.push_back(cur);
        lc.turns.push_back(turn);
    }
    for (int start = 0; start < ne; ++start) {
        if (used[start]) continue;
        std::vector<int> loop;
        int e = start;
        do {
            const Step& s = st[e];
            if (s.crossed == -2 || used[e]) throw std::logic_error("loop is not closed");
            used[e] = 1;
            loop.push_back(e);
            int turn = 0;
            e = advance(s, s.crossed >= 0 && omega[s.crossed], &turn);
        } while (e != start);
        lc.loops.push_back(std::move(loop));
    }
    lc.loop_count = static_cast<int>(lc.loops.size()) + 1;

    int k = cluster_stats(g, omega, dobrushin_bc(dom)).k;
    int want = 2 * k + omega.open_count() - dom.contracted_vertex_count();
    if (lc.loop_count != want)
        throw std::logic_error("loop count " + std::to_string(lc.loop_count) + " differs from 2k + o - v = " +
                               std::to_string(want));
    return lc;
}

int winding_quarters(const LoopConfig& lc, int e, int e2) {
    auto pos = [&](int id) {
        auto it = std::find(lc.exploration.begin(), lc.exploration.end(), id);
        return it == lc.exploration.end() ? -1 : static_cast<int>(it - lc.exploration.begin());
    };
    int i = pos(e), j = pos(e2);
    if (i < 0 || j < 0) return 0;
    int lo = std::min(i, j), hi = std::max(i, j), w = 0;
    for (int t = lo + 1; t <= hi; ++t) w += lc.turns[t];
    return i <= j ? w : -w;
}

double winding(const LoopConfig& lc, int e, int e2) { return winding_quarters(lc, e, e2) * M_PI / 2; }

int turning_quarters(const DobrushinDomain& dom, const std::vector<int>& path, bool closed) {
    const auto& me = dom.medial_edges();
    int total = 0;
    std::size_t n = path.size();
    for (std::size_t i = 1; i < n + (closed ? 1 : 0); ++i) {
        cplx r = me[path[i % n]].dir / me[path[i - 1]].dir;
        if (std::abs(r - cplx(0, 1)) < 1e-9)
            ++total;
        else if (std::abs(r + cplx(0, 1)) < 1e-9)
            --total;
        else
            throw std::invalid_argument("consecutive medial edges must differ by a quarter turn");
    }
    return total;
}

cplx observable_spin(double q) {
    if (!(q > 0)) throw std::invalid_argument("observable spin needs q > 0");
    double s = std::sqrt(q) / 2;
    if (q <= 4) return {2 / M_PI * std::asin(std::min(s, 1.0)), 0.0};
    return {1.0, 2 / M_PI * std::acosh(s)};
}

ObservableField edge_observable(const DobrushinDomain& dom, const RcParams& par) {
    const LatticeGraph& g = dom.graph();
    const int m = g.num_edges();
    if (m > kEnumerationCap)
        throw std::invalid_argument("enumeration cap exceeded: " + std::to_string(m) + " free edges > " +
                                    std::to_string(kEnumerationCap));
    if (!(par.q > 0) || par.p < 0 || par.p > 1) throw std::invalid_argument("need q > 0 and p in [0, 1]");
    const auto st = step_table(dom);
    const int ne = static_cast<int>(st.size());
    ObservableField out;
    out.params = par;
    out.sigma = observable_spin(par.q);

    std::vector<cplx> phase(2 * ne + 1);
    for (int t = -ne; t <= ne; ++t) phase[t + ne] = std::exp(cplx(0, 1) * out.sigma * (t * M_PI / 2));
    std::vector<double> pp(m + 1), pc(m + 1), pq(g.num_vertices() + 1);
    for (int i = 0; i <= m; ++i) {
        pp[i] = std::pow(par.p, i);
        pc[i] = std::pow(1 - par.p, i);
    }
    for (int i = 0; i <= g.num_vertices(); ++i) pq[i] = std::pow(par.q, i);
    int base_k = 0;
    const UnionFind base = base_union_find(g, dobrushin_bc(dom), &base_k);
    const int ea = dom.e_a(), eb = dom.e_b();

    struct Acc {
        std::vector<cplx> F;
        double Z = 0.0;
    };
    auto chunks = chunked_map<Acc>(std::uint64_t{1} << m, [&](std::uint64_t lo, std::uint64_t hi) {
        Acc acc;
        acc.F.assign(ne, 0.0);
        std::vector<int> path, cum;
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            int o = __builtin_popcountll(mask);
            int k = cluster_count_mask(g, mask, base, base_k);
            double w = pp[o] * pc[m - o] * pq[k];
            acc.Z += w;
            if (w == 0.0) continue;
            path.clear();
            cum.clear();
            int cur = ea, total = 0;
            path.push_back(cur);
            cum.push_back(0);
            while (cur != eb) {
                const Step& s = st[cur];
                int turn = 0;
                cur = advance(s, s.crossed >= 0 && ((mask >> s.crossed) & 1), &turn);
                total += turn;
                path.push_back(cur);
                cum.push_back(total);
            }
            for (std::size_t i = 0; i < path.size(); ++i) acc.F[path[i]] += w * phase[total - cum[i] + ne];
        }
        return acc;
    });
    double Z = 0.0;
    out.F.assign(ne, 0.0);
    for (const auto& c : chunks) {
        Z += c.Z;
        for (int i = 0; i < ne; ++i) out.F[i] += c.F[i];
    }
    for (auto& x : out.F) x /= Z;
    return out;
}

std::vector<cplx> vertex_residuals(const ObservableField& F, const DobrushinDomain& dom) {
    const auto& me = dom.medial_edges();
    std::vector<cplx> r(dom.medial_vertices().size(), 0.0);
    const cplx I(0, 1);
    for (int v = 0; v < static_cast<int>(r.size()); ++v) {
        if (dom.degree(v) != 4) continue;
        const auto& inc = dom.incident(v);
        int s = 0;
        while (me[inc[s]].head != v) ++s;
        // e2 is reached from e1 by a left turn, i.e. it follows e1 clockwise
        cplx F1 = F.F[inc[s]], F2 = F.F[inc[(s + 3) % 4]], F3 = F.F[inc[(s + 2) % 4]], F4 = F.F[inc[(s + 1) % 4]];
        r[v] = F1 - F3 - I * F2 + I * F4;
    }
    return r;
}

double contour_check(const ObservableField& F, const DobrushinDomain& dom) {
    double worst = 0.0;
    for (const cplx& x : vertex_residuals(F, dom)) worst = std::max(worst, std::abs(x));
    return worst;
}

double contour_sum(const ObservableField& F, const DobrushinDomain& dom, const std::vector<int>& vertices) {
    auto r = vertex_residuals(F, dom);
    cplx s = 0.0;
    for (int v : vertices) s += r.at(v);
    return std::abs(s);
}

cplx project(cplx e, cplx x) { return 0.5 * (x + std::conj(e) * std::conj(x)); }

double SholoReport::worst() const {
    return std::max({projection, line, line_negative, norm, exit, boundary, cauchy_riemann});
}

SholoReport vertex_observable(ObservableField& F, const DobrushinDomain& dom) {
    if (std::abs(F.params.q - 2.0) > 1e-12) throw std::invalid_argument("vertex observable is defined for q = 2");
    const auto& me = dom.medial_edges();
    const auto& mv = dom.medial_vertices();
    const int nmv = static_cast<int>(mv.size());
    F.f.assign(nmv, 0.0);
    for (int v = 0; v < nmv; ++v) {
        cplx s = 0.0;
        for (int id : dom.incident(v)) s += F.F[id];
        if (dom.degree(v) == 4)
            F.f[v] = 0.5 * s;
        else if (dom.degree(v) == 2)
            F.f[v] = 2.0 / (2.0 + std::sqrt(2.0)) * s;
        else
            throw std::logic_error("medial vertex of degree " + std::to_string(dom.degree(v)));
    }
    SholoReport rep;
    for (std::size_t id = 0; id < me.size(); ++id) {
        const MedialEdge& e = me[id];
        for (int end : {e.tail, e.head})
            if (end >= 0) rep.projection = std::max(rep.projection, std::abs(project(e.dir, F.f[end]) - F.F[id]));
        cplx t = F.F[id] * F.F[id] * e.dir;  // F^2 / conj(e) for |e| = 1
        rep.line = std::max(rep.line, std::abs(t.imag()));
        rep.line_negative = std::max(rep.line_negative, -t.real());
    }
    for (int v = 0; v < nmv; ++v) {
        const auto& inc = dom.incident(v);
        if (dom.degree(v) == 4) {
            double f2 = std::norm(F.f[v]);
            double s13 = std::norm(F.F[inc[0]]) + std::norm(F.F[inc[2]]);
            double s24 = std::norm(F.F[inc[1]]) + std::norm(F.F[inc[3]]);
            rep.norm = std::max({rep.norm, std::abs(s13 - f2), std::abs(s24 - f2)});
        } else {
            cplx nu = me[inc[0]].dir + me[inc[1]].dir;
            cplx t = nu * F.f[v] * F.f[v];
            rep.boundary = std::max({rep.boundary, std::abs(t.imag()), -t.real()});
        }
    }
    const MedialEdge& eb = me[dom.e_b()];
    rep.exit = std::abs(project(eb.dir, F.f[eb.tail]) - 1.0);

    // discrete Cauchy-Riemann around primal vertices and dual faces whose four
    // medial edges are present: (f1 - f3)(z2 - z4) = (f2 - f4)(z1 - z3)
    auto cr = [&](const int ids[4]) {
        cplx f[4], z[4];
        for (int i = 0; i < 4; ++i) {
            f[i] = F.f[ids[i]];
            z[i] = mv[ids[i]].z;
        }
        return std::abs((f[0] - f[2]) * (z[1] - z[3]) - (f[1] - f[3]) * (z[0] - z[2]));
    };
    const LatticeGraph& g = dom.graph();
    for (int x = 0; x < g.num_vertices(); ++x) {
        int ids[4];
        bool ok = true;
        for (int k = 0; k < 4 && ok; ++k) {
            int id = dom.medial_edge_at(x, k);
            ok = id >= 0 && me[id].tail >= 0 && me[id].head >= 0;
            if (ok) ids[k] = me[id].tail;
        }
        if (ok) rep.cauchy_riemann = std::max(rep.cauchy_riemann, cr(ids));
    }
    for (const DualFace& face : dom.faces()) {
        // corners counterclockwise from the lower-left, each with the quadrant facing the centre
        const Point c = face.corner;
        const Point corners[4] = {c, {c[0] + 1, c[1], 0}, {c[0] + 1, c[1] + 1, 0}, {c[0], c[1] + 1, 0}};
        int ids[4];
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
            int x = g.index_of(corners[i]);
            int id = x < 0 ? -1 : dom.medial_edge_at(x, i);
            ok = id >= 0 && me[id].tail >= 0 && me[id].head >= 0;
            if (ok) ids[i] = me[id].tail;
        }
        if (ok) rep.cauchy_riemann = std::max(rep.cauchy_riemann, cr(ids));
    }
    return rep;
}

HField build_H(const ObservableField& F, const DobrushinDomain& dom, HReport* report) {
    const auto& me = dom.medial_edges();
    const LatticeGraph& g = dom.graph();
    const int n = g.num_vertices(), nf = static_cast<int>(dom.faces().size());
    if (F.f.size() != dom.medial_vertices().size()) throw std::invalid_argument("build_H needs the vertex observable");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> H(n + nf, nan);
    // node ids: primal vertices, then faces
    std::vector<std::vector<std::pair<int, double>>> adj(n + nf);
    for (std::size_t id = 0; id < me.size(); ++id) {
        double w = std::norm(F.F[id]);
        adj[me[id].x].push_back({n + me[id].face, -w});
        adj[n + me[id].face].push_back({me[id].x, w});
    }
    H[dom.b()] = 1.0;
    std::deque<int> queue{dom.b()};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (const auto& [w, d] : adj[u])
            if (std::isnan(H[w])) {
                H[w] = H[u] + d;
                queue.push_back(w);
            }
    }
    HField out;
    out.primal.assign(H.begin(), H.begin() + n);
    out.dual.assign(H.begin() + n, H.end());
    if (!report) return out;

    HReport& r = *report;
    r = HReport{};
    for (std::size_t id = 0; id < me.size(); ++id) {
        double gap = std::abs(out.primal[me[id].x] - out.dual[me[id].face] - std::norm(F.F[id]));
        if (std::isnan(gap)) gap = std::numeric_limits<double>::infinity();
        if (gap > r.consistency || r.worst_edge < 0) {
            r.consistency = std::max(r.consistency, gap);
            r.worst_edge = static_cast<int>(id);
        }
    }
    r.anchor = std::abs(out.primal[dom.b()] - 1.0);
    for (int v : dom.arc_ba())
        if (!std::isnan(out.primal[v])) r.arc_ba = std::max(r.arc_ba, std::abs(out.primal[v] - 1.0));
    for (int i = 0; i < nf; ++i)
        if (!dom.faces()[i].full) r.arc_ab = std::max(r.arc_ab, std::abs(out.dual[i]));

    const auto& mv = dom.medial_vertices();
    auto face_of_edge = [&](const Point& p, const Point& q, int side) {
        // side 0: above / right of the edge, 1: below / left
        bool horizontal = p[1] == q[1];
        Point c = p;
        if (side == 1) c = horizontal ? Point{p[0], p[1] - 1, 0} : Point{p[0] - 1, p[1], 0};
        return dom.face_index(c);
    };
    for (int v = 0; v < static_cast<int>(mv.size()); ++v) {
        if (dom.degree(v) != 4) continue;
        const MedialVertex& m = mv[v];
        int x = g.index_of(m.x), y = g.index_of(m.y);
        cplx f2 = F.f[v] * F.f[v];
        cplx zx = dom.frame(m.x[0], m.x[1]), zy = dom.frame(m.y[0], m.y[1]);
        r.image = std::max(r.image, std::abs(out.primal[x] - out.primal[y] - 0.5 * (f2 * (zx - zy)).imag()));
        Point p = std::min(m.x, m.y), q = std::max(m.x, m.y);
        int f1 = face_of_edge(p, q, 0), f0 = face_of_edge(p, q, 1);
        const auto& F1 = dom.faces()[f1];
        const auto& F0 = dom.faces()[f0];
        r.image = std::max(r.image, std::abs(out.dual[f1] - out.dual[f0] - 0.5 * (f2 * (F1.z - F0.z)).imag()));
    }

    r.min_primal_laplacian = std::numeric_limits<double>::infinity();
    r.max_dual_laplacian = -std::numeric_limits<double>::infinity();
    auto mid_vertex = [&](const Point& p, const Point& q) {
        for (int v = 0; v < static_cast<int>(mv.size()); ++v)
            if ((mv[v].x == p && mv[v].y == q) || (mv[v].x == q && mv[v].y == p)) return v;
        return -1;
    };
    for (int x = 0; x < n; ++x) {
        if (g.adjacent(x).size() != 4) continue;
        double lap = 0.0;
        for (const auto& [y, e] : g.adjacent(x)) lap += out.primal[y] - out.primal[x];
        const Point& p = g.point(x);
        int A = mid_vertex(p, {p[0] + 1, p[1], 0}), C = mid_vertex(p, {p[0] - 1, p[1], 0});
        double want = std::norm(F.f[A] - F.f[C]);
        r.laplacian = std::max(r.laplacian, std::abs(lap - want));
        r.min_primal_laplacian = std::min(r.min_primal_laplacian, lap);
        ++r.interior_primal;
    }
    for (int i = 0; i < nf; ++i) {
        const Point c = dom.faces()[i].corner;
        const Point corners[4] = {c, {c[0] + 1, c[1], 0}, {c[0] + 1, c[1] + 1, 0}, {c[0], c[1] + 1, 0}};
        bool ok = true;
        for (int j = 0; j < 4 && ok; ++j) {
            int u = g.index_of(corners[j]), w = g.index_of(corners[(j + 1) % 4]);
            ok = u >= 0 && w >= 0 && g.edge_index(u, w) >= 0;
        }
        const Point nb[4] = {{c[0] + 1, c[1], 0}, {c[0] - 1, c[1], 0}, {c[0], c[1] + 1, 0}, {c[0], c[1] - 1, 0}};
        double lap = 0.0;
        for (int j = 0; j < 4 && ok; ++j) {
            int f = dom.face_index(nb[j]);
            ok = f >= 0;
            if (ok) lap += out.dual[f] - out.dual[i];
        }
        if (!ok) continue;
        int A = mid_vertex(corners[0], corners[1]), C = mid_vertex(corners[3], corners[2]);
        double want = -std::norm(F.f[A] - F.f[C]);
        r.laplacian = std::max(r.laplacian, std::abs(lap - want));
        r.max_dual_laplacian = std::max(r.max_dual_laplacian, lap);
        ++r.interior_dual;
    }
    if (r.interior_primal == 0) r.min_primal_laplacian = 0.0;
    if (r.interior_dual == 0) r.max_dual_laplacian = 0.0;
    return out;
}

}  // namespace critlat
