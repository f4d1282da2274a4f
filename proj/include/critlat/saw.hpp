#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace critlat {

// Hexagonal lattice with mesh 1, shifted so that the origin is the midpoint a of
// a horizontal edge. A point is stored exactly as (X, Y) with
// z = X / 2 + i (sqrt 3 / 2) Y. Vertices have X = 1 mod 3 (type A, horizontal
// edge to the west) or X = 2 mod 3 (type B, horizontal edge to the east).
struct HexPoint {
    int X = 0, Y = 0;
    auto operator<=>(const HexPoint&) const = default;
};

std::complex<double> hex_position(HexPoint p);
bool hex_is_vertex(HexPoint p);
// neighbours in direction order; the horizontal one first
std::array<HexPoint, 3> hex_neighbors(HexPoint v);
// direction of the step v -> u in units of pi/3, in [0, 6)
int hex_direction(HexPoint v, HexPoint u);

constexpr int kSawCountCap = 24;
constexpr double kSawXc = 0.54119610014619698;  // 1 / sqrt(2 + sqrt 2)

// c_n = walks of n steps from a vertex; b_n = bridges, 0 < Re(g_i) <= Re(g_n)
struct SawCounts {
    std::vector<std::uint64_t> c, b;  // index n = 0..n_max
};
SawCounts saw_counts(int n_max);

enum class MidClass { interior, alpha, beta, epsilon, epsilon_bar };

// Truncated strip S(T, L): vertices with 0 <= X <= 3T and 3|Y| <= 6L + 3 + X.
// Mid-edges are the midpoints of edges with at least one endpoint in S; the
// boundary ones are classified by the direction in which their edge leaves S.
class HexDomain {
public:
    HexDomain(int T, int L);
    int T() const { return T_; }
    int L() const { return L_; }
    const std::vector<HexPoint>& vertices() const { return verts_; }
    // doubled coordinates (X_v + X_u, Y_v + Y_u) of each mid-edge
    const std::vector<HexPoint>& mid_edges() const { return mids_; }
    MidClass mid_class(int m) const { return cls_[m]; }
    int a() const { return a_; }
    int start_vertex() const { return start_; }
    // per vertex and neighbour slot: vertex index or -1 outside S, mid-edge id, direction
    int neighbor(int v, int j) const { return nb_[v][j]; }
    int mid_at(int v, int j) const { return mid_[v][j]; }
    int direction(int v, int j) const { return dir_[v][j]; }

private:
    int T_, L_;
    std::vector<HexPoint> verts_, mids_;
    std::vector<MidClass> cls_;
    std::vector<std::array<int, 3>> nb_, mid_, dir_;
    int a_ = -1, start_ = -1;
};

// exact numbers of walks from a ending in each boundary part, by vertex count |g|
struct StripCounts {
    int T = 0, L = 0;
    std::vector<std::uint64_t> alpha, beta, epsilon, epsilon_bar;  // alpha excludes a
    std::uint64_t walks = 0;                                      // all walks, any end mid-edge
};
StripCounts strip_counts(int T, int L);

struct SawStripQuantities {
    double A = 0.0, B = 0.0, E = 0.0;
    double x = 0.0;
    int max_length = 0;
    std::uint64_t walks = 0;
};
SawStripQuantities strip_quantities(const StripCounts& counts, double x);
SawStripQuantities strip_quantities(int T, int L, double x);

// |cos(3 pi / 8) A + B + cos(pi / 4) E - 1|
double identity_residual(const SawStripQuantities& s);

// walks from a by end mid-edge: (winding in units of pi/3, |g|) -> count
struct WalkTable {
    std::vector<std::map<std::pair<int, int>, std::uint64_t>> by_mid;
};
WalkTable walk_table(const HexDomain& dom);

// F(z) = sum exp(-i sigma W(a, z)) x^|g|
std::vector<std::complex<double>> saw_observable(const HexDomain& dom, const WalkTable& t, double x, double sigma);
// max over vertices of |(p - v) F(p) + (q - v) F(q) + (r - v) F(r)|
double saw_vertex_relation(const HexDomain& dom, const std::vector<std::complex<double>>& F);
double saw_vertex_relation(const HexDomain& dom, double x, double sigma);

}  // namespace critlat
