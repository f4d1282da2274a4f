#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "critlat/graph.hpp"

namespace critlat {

using cplx = std::complex<double>;

// Unit steps u_0..u_3 = E, N, W, S.
inline Point unit_step(int k) {
    static const int dx[4] = {1, 0, -1, 0}, dy[4] = {0, 1, 0, -1};
    k &= 3;
    return {dx[k], dy[k], 0};
}

struct MedialVertex {
    Point x{}, y{};        // primal endpoints; x in Omega, y possibly outside
    int edge = -1;         // edge of graph() for a free edge, -1 otherwise
    bool dual_boundary = false;    // crosses a dual edge of (ab)*: the walker turns left
    bool primal_boundary = false;  // an edge of (ba), always open: the walker turns right
    cplx z;                // position in the frame where e_b = 1
};

// Medial edge ME(x, k): the quarter turn around primal vertex x from the midpoint
// of (x, x + u_k) to the midpoint of (x, x + u_{k+1}), oriented counterclockwise
// around x.
struct MedialEdge {
    int x = -1;  // primal vertex index
    int k = 0;
    int tail = -1, head = -1;  // medial vertex ids; -1 for the outer end of e_a / e_b
    int face = -1;             // index into faces(): the dual vertex bordered by the edge
    cplx dir;                  // unit direction in the frame where e_b = 1
};

struct DualFace {
    Point corner{};  // lower-left corner; the face centre is corner + (1/2, 1/2)
    bool full = false;
    cplx z;
};

// Dobrushin domain (Omega, a, b). Omega is an induced subgraph of Z^2 with
// connected complement and no diagonal pinches. The arc (ba) is wired and its
// boundary edges removed; graph() holds the remaining (free) edges.
class DobrushinDomain {
public:
    const LatticeGraph& graph() const { return graph_; }
    int a() const { return a_; }
    int b() const { return b_; }
    const std::vector<int>& arc_ba() const { return arc_ba_; }
    bool in_arc_ba(int v) const { return in_ba_[v] != 0; }
    const std::vector<std::pair<Point, Point>>& ba_edges() const { return ba_edges_; }
    const std::vector<MedialVertex>& medial_vertices() const { return mv_; }
    const std::vector<MedialEdge>& medial_edges() const { return me_; }
    const std::vector<DualFace>& faces() const { return faces_; }
    int e_a() const { return e_a_; }
    int e_b() const { return e_b_; }
    // vertices with (ba) contracted to one point
    int contracted_vertex_count() const;
    // medial edges at a medial vertex, counterclockwise by the direction they leave v
    const std::vector<int>& incident(int v) const { return incident_[v]; }
    int degree(int v) const { return static_cast<int>(incident_[v].size()); }
    // -1 if absent
    int medial_edge_at(int x, int k) const;
    int face_index(const Point& corner) const;
    // primal position in the frame where e_b = 1
    cplx frame(double x, double y) const;

    friend DobrushinDomain medial_domain(const LatticeGraph&, int, int);

private:
    LatticeGraph graph_;
    int a_ = -1, b_ = -1;
    std::vector<int> arc_ba_;
    std::vector<char> in_ba_;
    std::vector<std::pair<Point, Point>> ba_edges_;
    std::vector<MedialVertex> mv_;
    std::vector<MedialEdge> me_;
    std::vector<DualFace> faces_;
    std::vector<std::vector<int>> incident_;
    std::map<std::pair<int, int>, int> edge_at_;
    std::map<Point, int> face_at_;
    int e_a_ = -1, e_b_ = -1;
    cplx rot_{1.0, 0.0};
};

// omega: the vertex set is used and its induced edges; a == b is allowed
DobrushinDomain medial_domain(const LatticeGraph& omega, int a, int b);
DobrushinDomain load_domain_file(const std::string& path);
DobrushinDomain parse_domain_text(const std::string& text);

// Grows a random lattice animal of n sites and picks boundary points until a valid
// domain results.
DobrushinDomain random_domain(int n, std::uint64_t seed);

}  // namespace critlat
