#include "critlat/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace critlat {

namespace {

Point offset(const Point& p, int axis, int delta) {
    Point q = p;
    q[axis] += delta;
    return q;
}

}  // namespace

LatticeGraph::LatticeGraph(int dim, std::vector<Point> vertices, const std::vector<std::pair<Point, Point>>& edges)
    : dim_(dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
    for (auto& p : vertices)
        for (int i = dim; i < 3; ++i) p[i] = 0;
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    pts_ = std::move(vertices);
    for (int i = 0; i < num_vertices(); ++i) index_[pts_[i]] = i;

    std::set<std::pair<int, int>> es;
    for (const auto& [p, q] : edges) {
        int u = index_of(p), v = index_of(q);
        if (u < 0 || v < 0) throw std::invalid_argument("edge endpoint is not a vertex of the graph");
        int dist = 0;
        for (int i = 0; i < 3; ++i) dist += std::abs(p[i] - q[i]);
        if (dist != 1) throw std::invalid_argument("edge endpoints are not nearest neighbours");
        es.insert({std::min(u, v), std::max(u, v)});
    }
    for (const auto& [u, v] : es) edges_.push_back({u, v});
    adj_.assign(pts_.size(), {});
    for (int e = 0; e < num_edges(); ++e) {
        adj_[edges_[e].u].push_back({edges_[e].v, e});
        adj_[edges_[e].v].push_back({edges_[e].u, e});
    }
    boundary_flag_.assign(pts_.size(), 0);
    for (int v = 0; v < num_vertices(); ++v) {
        if (static_cast<int>(adj_[v].size()) < 2 * dim_) {
            boundary_flag_[v] = 1;
            boundary_.push_back(v);
        }
    }
}

LatticeGraph LatticeGraph::induced(int dim, std::vector<Point> vertices) {
    for (auto& p : vertices)
        for (int i = dim; i < 3; ++i) p[i] = 0;
    std::set<Point> vs(vertices.begin(), vertices.end());
    std::vector<std::pair<Point, Point>> edges;
    for (const auto& p : vs)
        for (int a = 0; a < dim; ++a) {
            Point q = offset(p, a, 1);
            if (vs.count(q)) edges.push_back({p, q});
        }
    return LatticeGraph(dim, std::move(vertices), edges);
}

int LatticeGraph::index_of(const Point& p) const {
    auto it = index_.find(p);
    return it == index_.end() ? -1 : it->second;
}

int LatticeGraph::edge_index(int u, int v) const {
    for (const auto& [w, e] : adj_[u])
        if (w == v) return e;
    return -1;
}

LatticeGraph build_box(int n, int d) {
    if (n < 0) throw std::invalid_argument("box size must be nonnegative");
    if (d != 2 && d != 3) throw std::invalid_argument("box dimension must be 2 or 3");
    std::vector<Point> pts;
    int zr = d == 3 ? n : 0;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y)
            for (int z = -zr; z <= zr; ++z) pts.push_back({x, y, z});
    return LatticeGraph::induced(d, pts);
}

LatticeGraph build_rect(int x0, int y0, int x1, int y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("empty rectangle");
    std::vector<Point> pts;
    for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) pts.push_back({x, y, 0});
    return LatticeGraph::induced(2, pts);
}

BoundaryCondition BoundaryCondition::free_bc(const LatticeGraph&) { return {BcKind::free, {}}; }

BoundaryCondition BoundaryCondition::wired(const LatticeGraph& g) {
    BoundaryCondition bc{BcKind::wired, {}};
    if (!g.boundary().empty()) bc.blocks.push_back(g.boundary());
    return bc;
}

BoundaryCondition BoundaryCondition::custom(const LatticeGraph& g, std::vector<std::vector<int>> blocks) {
    std::vector<char> seen(g.num_vertices(), 0);
    for (const auto& b : blocks)
        for (int v : b) {
            if (v < 0 || v >= g.num_vertices()) throw std::invalid_argument("boundary block names an unknown vertex");
            if (!g.is_boundary(v)) throw std::invalid_argument("boundary block contains an interior vertex");
            if (seen[v]) throw std::invalid_argument("boundary blocks overlap");
            seen[v] = 1;
        }
    return {BcKind::custom, std::move(blocks)};
}

BoundaryCondition BoundaryCondition::wired_arc(const LatticeGraph& g, const std::vector<int>& arc) {
    BoundaryCondition bc = custom(g, {arc});
    bc.kind = BcKind::dobrushin;
    return bc;
}

std::vector<int> BoundaryCondition::block_of(int nv) const {
    std::vector<int> lab(nv, -1);
    for (int i = 0; i < static_cast<int>(blocks.size()); ++i)
        for (int v : blocks[i]) lab[v] = i;
    return lab;
}

PercolationConfig PercolationConfig::from_mask(std::uint64_t mask, int n) {
    PercolationConfig c(n);
    for (int e = 0; e < n; ++e) c.bits[e] = (mask >> e) & 1u;
    return c;
}

std::uint64_t PercolationConfig::mask() const {
    if (bits.size() > 64) throw std::length_error("configuration too long for a 64-bit mask");
    std::uint64_t m = 0;
    for (int e = 0; e < size(); ++e)
        if (bits[e]) m |= std::uint64_t{1} << e;
    return m;
}

int PercolationConfig::open_count() const {
    int c = 0;
    for (auto b : bits) c += b != 0;
    return c;
}

bool PercolationConfig::leq(const PercolationConfig& o) const {
    for (int e = 0; e < size(); ++e)
        if (bits[e] > o.bits[e]) return false;
    return true;
}

UnionFind::UnionFind(int n) { reset(n); }

void UnionFind::reset(int n) {
    parent_.resize(n);
    for (int i = 0; i < n; ++i) parent_[i] = i;
}

int UnionFind::find(int x) {
    int r = x;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[x] != r) {
        int nx = parent_[x];
        parent_[x] = r;
        x = nx;
    }
    return r;
}

bool UnionFind::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b)
        parent_[b] = a;
    else
        parent_[a] = b;
    return true;
}

UnionFind base_union_find(const LatticeGraph& g, const BoundaryCondition& bc, int* count) {
    UnionFind uf(g.num_vertices());
    int k = g.num_vertices();
    for (const auto& block : bc.blocks)
        for (std::size_t i = 1; i < block.size(); ++i)
            if (uf.unite(block[0], block[i])) --k;
    if (count) *count = k;
    return uf;
}

int cluster_count_mask(const LatticeGraph& g, std::uint64_t mask, const UnionFind& base, int base_count) {
    UnionFind uf = base;
    int k = base_count;
    const auto& edges = g.edges();
    while (mask) {
        int e = __builtin_ctzll(mask);
        mask &= mask - 1;
        if (uf.unite(edges[e].u, edges[e].v)) --k;
    }
    return k;
}

ClusterStats cluster_stats(const LatticeGraph& g, const PercolationConfig& w, const BoundaryCondition& bc) {
    if (w.size() != g.num_edges()) throw std::invalid_argument("configuration length does not match edge count");
    int k = 0;
    UnionFind uf = base_union_find(g, bc, &k);
    for (int e = 0; e < g.num_edges(); ++e)
        if (w[e] && uf.unite(g.edge(e).u, g.edge(e).v)) --k;
    ClusterStats s;
    s.k = k;
    s.labels.resize(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) s.labels[v] = uf.find(v);
    return s;
}

bool crossing_detect(const LatticeGraph& g, const PercolationConfig& w, const Rect& r, Direction dir) {
    int n = g.num_vertices();
    UnionFind uf(n + 2);
    const int src = n, dst = n + 1;
    auto inside = [&](const Point& p) { return p[0] >= r.x0 && p[0] <= r.x1 && p[1] >= r.y0 && p[1] <= r.y1; };
    for (int v = 0; v < n; ++v) {
        const Point& p = g.point(v);
        if (!inside(p)) continue;
        int c = dir == Direction::horizontal ? p[0] : p[1];
        int lo = dir == Direction::horizontal ? r.x0 : r.y0;
        int hi = dir == Direction::horizontal ? r.x1 : r.y1;
        if (c == lo) uf.unite(v, src);
        if (c == hi) uf.unite(v, dst);
    }
    for (int e = 0; e < g.num_edges(); ++e) {
        if (!w[e]) continue;
        const Edge& ed = g.edge(e);
        if (inside(g.point(ed.u)) && inside(g.point(ed.v))) uf.unite(ed.u, ed.v);
    }
    return uf.find(src) == uf.find(dst);
}

namespace {

std::pair<Point, Point> dual_edge_of(const Point& p, const Point& q) {
    // p < q lexicographically and they differ in one coordinate by one
    if (q[0] == p[0] + 1) return {{p[0], p[1] - 1, 0}, {p[0], p[1], 0}};
    return {{p[0] - 1, p[1], 0}, {p[0], p[1], 0}};
}

}  // namespace

DualResult dual_graph(const LatticeGraph& g) {
    if (g.dim() != 2) throw std::invalid_argument("dual graph requires a planar (d=2) graph");
    std::vector<Point> pts;
    std::vector<std::pair<Point, Point>> des;
    for (const Edge& e : g.edges()) {
        auto de = dual_edge_of(g.point(e.u), g.point(e.v));
        pts.push_back(de.first);
        pts.push_back(de.second);
        des.push_back(de);
    }
    DualResult r;
    r.graph = LatticeGraph(2, pts, des);
    r.edge_map.resize(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        int a = r.graph.index_of(des[e].first), b = r.graph.index_of(des[e].second);
        r.edge_map[e] = r.graph.edge_index(a, b);
    }
    r.config = PercolationConfig(g.num_edges());
    return r;
}

DualResult dual_map(const LatticeGraph& g, const PercolationConfig& w) {
    if (w.size() != g.num_edges()) throw std::invalid_argument("configuration length does not match edge count");
    DualResult r = dual_graph(g);
    for (int e = 0; e < g.num_edges(); ++e) r.config.bits[r.edge_map[e]] = w[e] ? 0 : 1;
    return r;
}

bool is_connected(const LatticeGraph& g) {
    if (g.num_vertices() == 0) return true;
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [w, e] : g.adjacent(v))
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == g.num_vertices();
}

std::vector<Point> bounded_faces(const LatticeGraph& g) {
    if (g.dim() != 2) throw std::invalid_argument("faces require a planar (d=2) graph");
    if (g.num_vertices() == 0) return {};
    int x0 = g.point(0)[0], x1 = x0, y0 = g.point(0)[1], y1 = y0;
    for (const auto& p : g.points()) {
        x0 = std::min(x0, p[0]);
        x1 = std::max(x1, p[0]);
        y0 = std::min(y0, p[1]);
        y1 = std::max(y1, p[1]);
    }
    // faces indexed by lower-left corner over [x0-1, x1] x [y0-1, y1]
    int W = x1 - x0 + 2, H = y1 - y0 + 2;
    auto fid = [&](int fx, int fy) { return (fx - (x0 - 1)) * H + (fy - (y0 - 1)); };
    auto has_edge = [&](Point p, Point q) {
        int u = g.index_of(p), v = g.index_of(q);
        return u >= 0 && v >= 0 && g.edge_index(u, v) >= 0;
    };
    std::vector<char> reached(static_cast<std::size_t>(W) * H, 0);
    std::deque<std::pair<int, int>> queue{{x0 - 1, y0 - 1}};
    reached[fid(x0 - 1, y0 - 1)] = 1;
    while (!queue.empty()) {
        auto [fx, fy] = queue.front();
        queue.pop_front();
        // crossing each side of face (fx,fy) if that side is not an edge
        const std::array<std::tuple<int, int, Point, Point>, 4> moves{{
            {fx + 1, fy, Point{fx + 1, fy, 0}, Point{fx + 1, fy + 1, 0}},
            {fx - 1, fy, Point{fx, fy, 0}, Point{fx, fy + 1, 0}},
            {fx, fy + 1, Point{fx, fy + 1, 0}, Point{fx + 1, fy + 1, 0}},
            {fx, fy - 1, Point{fx, fy, 0}, Point{fx + 1, fy, 0}},
        }};
        for (const auto& [nx, ny, p, q] : moves) {
            if (nx < x0 - 1 || nx > x1 || ny < y0 - 1 || ny > y1) continue;
            if (reached[fid(nx, ny)] || has_edge(p, q)) continue;
            reached[fid(nx, ny)] = 1;
            queue.push_back({nx, ny});
        }
    }
    std::vector<Point> faces;
    for (int fx = x0 - 1; fx <= x1; ++fx)
        for (int fy = y0 - 1; fy <= y1; ++fy) {
            if (reached[fid(fx, fy)]) continue;
            bool closed = has_edge({fx, fy, 0}, {fx + 1, fy, 0}) && has_edge({fx, fy, 0}, {fx, fy + 1, 0}) &&
                          has_edge({fx + 1, fy, 0}, {fx + 1, fy + 1, 0}) && has_edge({fx, fy + 1, 0}, {fx + 1, fy + 1, 0});
            if (!closed) throw std::invalid_argument("graph encloses a hole: its complement is disconnected");
            faces.push_back({fx, fy, 0});
        }
    return faces;
}

GraphFile parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<Point> pts;
    std::vector<std::pair<Point, Point>> edges;
    GraphFile gf;
    int dim = 2;
    int lineno = 0;
    auto read_point = [&](std::istringstream& ls, int n) {
        Point p{0, 0, 0};
        for (int i = 0; i < n; ++i)
            if (!(ls >> p[i])) throw std::invalid_argument("malformed graph file at line " + std::to_string(lineno));
        return p;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            std::vector<int> xs;
            int x;
            while (ls >> x) xs.push_back(x);
            if (xs.size() < 2 || xs.size() > 3)
                throw std::invalid_argument("malformed graph file at line " + std::to_string(lineno));
            if (xs.size() == 3) dim = 3;
            pts.push_back({xs[0], xs[1], xs.size() == 3 ? xs[2] : 0});
        } else if (tag == "e") {
            Point p = read_point(ls, 2), q = read_point(ls, 2);
            edges.push_back({std::min(p, q), std::max(p, q)});
        } else if (tag == "a") {
            gf.a = read_point(ls, 2);
            gf.has_a = true;
        } else if (tag == "b") {
            gf.b = read_point(ls, 2);
            gf.has_b = true;
        } else {
            throw std::invalid_argument("unknown record '" + tag + "' in graph file at line " + std::to_string(lineno));
        }
    }
    if (pts.empty()) throw std::invalid_argument("graph file lists no vertices");
    gf.listed_edges = !edges.empty();
    gf.graph = gf.listed_edges ? LatticeGraph(dim, pts, edges) : LatticeGraph::induced(dim, pts);
    return gf;
}

GraphFile load_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open graph file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_graph_text(ss.str());
}

std::string write_graph_text(const LatticeGraph& g) {
    std::ostringstream out;
    for (const auto& p : g.points()) {
        out << "v " << p[0] << ' ' << p[1];
        if (g.dim() == 3) out << ' ' << p[2];
        out << '\n';
    }
    for (const auto& e : g.edges()) {
        const auto &p = g.point(e.u), &q = g.point(e.v);
        out << "e " << p[0] << ' ' << p[1] << ' ' << q[0] << ' ' << q[1] << '\n';
    }
    return out.str();
}

LatticeGraph graph_from_spec(const std::string& spec) {
    auto ints = [&](const std::string& s) {
        std::vector<int> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stoi(tok));
            } catch (...) {
                throw std::invalid_argument("malformed graph spec '" + spec + "'");
            }
        }
        return out;
    };
    if (spec.rfind("box:", 0) == 0) {
        auto v = ints(spec.substr(4));
        if (v.size() == 1) return build_box(v[0], 2);
        if (v.size() == 2) return build_box(v[0], v[1]);
        throw std::invalid_argument("malformed graph spec '" + spec + "'");
    }
    if (spec.rfind("rect:", 0) == 0) {
        auto v = ints(spec.substr(5));
        if (v.size() != 4) throw std::invalid_argument("malformed graph spec '" + spec + "'");
        return build_rect(v[0], v[1], v[2], v[3]);
    }
    return load_graph_file(spec).graph;
}

}  // namespace critlat
