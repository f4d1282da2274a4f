#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace critlat {

using Point = std::array<int, 3>;

struct Edge {
    int u;
    int v;
};

// Finite subgraph of Z^d. Vertices are sorted lexicographically by
// coordinate, edges lexicographically by (min endpoint, max endpoint).
class LatticeGraph {
public:
    LatticeGraph() = default;
    LatticeGraph(int dim, std::vector<Point> vertices, const std::vector<std::pair<Point, Point>>& edges);

    static LatticeGraph induced(int dim, std::vector<Point> vertices);

    int dim() const { return dim_; }
    int num_vertices() const { return static_cast<int>(pts_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const Point& point(int i) const { return pts_[i]; }
    const std::vector<Point>& points() const { return pts_; }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    // (neighbor, edge index) pairs
    const std::vector<std::pair<int, int>>& adjacent(int v) const { return adj_[v]; }
    int index_of(const Point& p) const;  // -1 if absent
    int edge_index(int u, int v) const;  // -1 if absent
    bool is_boundary(int v) const { return boundary_flag_[v] != 0; }
    const std::vector<int>& boundary() const { return boundary_; }

private:
    int dim_ = 2;
    std::vector<Point> pts_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    std::map<Point, int> index_;
    std::vector<int> boundary_;
    std::vector<char> boundary_flag_;
};

LatticeGraph build_box(int n, int d);
LatticeGraph build_rect(int x0, int y0, int x1, int y1);

enum class BcKind { free, wired, dobrushin, custom };

struct BoundaryCondition {
    BcKind kind = BcKind::free;
    std::vector<std::vector<int>> blocks;

    static BoundaryCondition free_bc(const LatticeGraph& g);
    static BoundaryCondition wired(const LatticeGraph& g);
    static BoundaryCondition custom(const LatticeGraph& g, std::vector<std::vector<int>> blocks);
    static BoundaryCondition wired_arc(const LatticeGraph& g, const std::vector<int>& arc);
    // one label per vertex: the block id, or -1 when the vertex is alone
    std::vector<int> block_of(int nv) const;
};

struct PercolationConfig {
    std::vector<std::uint8_t> bits;

    PercolationConfig() = default;
    explicit PercolationConfig(int n, bool open = false) : bits(n, open ? 1 : 0) {}
    static PercolationConfig from_mask(std::uint64_t mask, int n);
    std::uint64_t mask() const;
    int size() const { return static_cast<int>(bits.size()); }
    int open_count() const;
    int closed_count() const { return size() - open_count(); }
    bool operator[](int e) const { return bits[e] != 0; }
    bool operator==(const PercolationConfig& o) const { return bits == o.bits; }
    bool leq(const PercolationConfig& o) const;
};

class UnionFind {
public:
    explicit UnionFind(int n = 0);
    void reset(int n);
    int find(int x);
    // the smaller index always becomes the root
    bool unite(int a, int b);
    int size() const { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
};

struct ClusterStats {
    int k = 0;
    std::vector<int> labels;  // smallest vertex index of the cluster
};

ClusterStats cluster_stats(const LatticeGraph& g, const PercolationConfig& w, const BoundaryCondition& bc);
// cluster count only, for enumeration loops; uses a preinitialized union-find
int cluster_count_mask(const LatticeGraph& g, std::uint64_t mask, const UnionFind& base, int base_count);
UnionFind base_union_find(const LatticeGraph& g, const BoundaryCondition& bc, int* count);

struct Rect {
    int x0, y0, x1, y1;
};
enum class Direction { horizontal, vertical };

bool crossing_detect(const LatticeGraph& g, const PercolationConfig& w, const Rect& r, Direction dir);

struct DualResult {
    LatticeGraph graph;
    PercolationConfig config;
    std::vector<int> edge_map;  // primal edge index -> dual edge index
};

// Dual vertex (x + 1/2, y + 1/2) is stored with integer coordinates (x, y).
DualResult dual_map(const LatticeGraph& g, const PercolationConfig& w);
DualResult dual_graph(const LatticeGraph& g);

// Faces of Z^2 fully bordered by edges of g; throws if g encloses a region that is
// not a union of such faces (disconnected complement).
std::vector<Point> bounded_faces(const LatticeGraph& g);
bool is_connected(const LatticeGraph& g);

struct GraphFile {
    LatticeGraph graph;
    bool has_a = false, has_b = false;
    Point a{}, b{};
    bool listed_edges = false;
};

GraphFile parse_graph_text(const std::string& text);
GraphFile load_graph_file(const std::string& path);
std::string write_graph_text(const LatticeGraph& g);
// "box:n", "rect:x0,y0,x1,y1" or a file path
LatticeGraph graph_from_spec(const std::string& spec);

}  // namespace critlat
