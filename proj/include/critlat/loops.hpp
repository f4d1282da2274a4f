#pragma once

#include <complex>
#include <vector>

#include "critlat/domain.hpp"
#include "critlat/oracle.hpp"

namespace critlat {

struct LoopConfig {
    std::vector<std::vector<int>> loops;  // closed medial cycles, as medial edge ids
    std::vector<int> exploration;         // e_a ... e_b
    std::vector<int> turns;               // turns[i]: +1 left / -1 right on entering exploration[i]; turns[0] = 0
    int loop_count = 0;                   // closed loops + 1
};

// omega is indexed by the edges of dom.graph(). Checks the loop identity
// loop_count = 2k + o - v and throws std::logic_error if it fails.
LoopConfig loop_encode(const PercolationConfig& omega, const DobrushinDomain& dom);

// signed number of quarter turns along gamma from e to e2 (negative if e2 comes
// first); 0 when either edge is off gamma
int winding_quarters(const LoopConfig& lc, int e, int e2);
double winding(const LoopConfig& lc, int e, int e2);
// total quarter turns along a medial path, read off the edge directions; a closed
// path includes the turn back onto its first edge
int turning_quarters(const DobrushinDomain& dom, const std::vector<int>& path, bool closed);

// solution of sin(sigma pi / 2) = sqrt(q) / 2; 1 + i R branch for q > 4
cplx observable_spin(double q);

struct ObservableField {
    std::vector<cplx> F;  // per medial edge
    std::vector<cplx> f;  // per medial vertex, filled by vertex_observable
    cplx sigma;
    RcParams params;
};

// exact enumeration over the free edges of dom
ObservableField edge_observable(const DobrushinDomain& dom, const RcParams& params);

// F(e1) - F(e3) - i F(e2) + i F(e4) with e1, e3 the incoming edges and e2 the
// edge a left turn from e1 leaves through (clockwise order of directions around
// the vertex); one value per medial vertex of degree 4, 0 elsewhere
std::vector<cplx> vertex_residuals(const ObservableField& F, const DobrushinDomain& dom);
double contour_check(const ObservableField& F, const DobrushinDomain& dom);
// |sum of residuals| over a set of medial vertices
double contour_sum(const ObservableField& F, const DobrushinDomain& dom, const std::vector<int>& vertices);

// P_e[x] = (x + conj(e) conj(x)) / 2
cplx project(cplx e, cplx x);

struct SholoReport {
    double projection = 0.0;    // max |P_e[f(u)] - F(e)| over edges e = uv
    double line = 0.0;          // max |Im(F(e)^2 / conj(e))|
    double line_negative = 0.0; // max(0, -Re(F(e)^2 / conj(e)))
    double norm = 0.0;          // max deviation in |F1|^2 + |F3|^2 = |f|^2 = |F2|^2 + |F4|^2
    double exit = 0.0;          // |P_{e_b}[f(b)] - 1|
    double boundary = 0.0;      // max |Im(nu_v f(v)^2)| + max(0, -Re(nu_v f(v)^2))
    double cauchy_riemann = 0.0; // around faces with four medial vertices
    double worst() const;
};

// q = 2 only; fills F.f and reports the s-holomorphicity checks
SholoReport vertex_observable(ObservableField& F, const DobrushinDomain& dom);

struct HField {
    std::vector<double> primal;  // per vertex of dom.graph()
    std::vector<double> dual;    // per dom.faces()
};

struct HReport {
    double consistency = 0.0;  // max over medial edges of |H(x) - H(y) - |F(e)|^2|
    int worst_edge = -1;
    double anchor = 0.0;       // |H(b) - 1|
    double arc_ba = 0.0;       // max |H - 1| on (ba)
    double arc_ab = 0.0;       // max |H| on faces of (ab)*
    double image = 0.0;        // increments across medial vertices vs Im[f^2 (x - x')] / 2
    double laplacian = 0.0;    // max |Delta H -/+ |A - C|^2| on interior faces
    double min_primal_laplacian = 0.0;
    double max_dual_laplacian = 0.0;
    int interior_primal = 0, interior_dual = 0;
};

// needs F.f from vertex_observable
HField build_H(const ObservableField& F, const DobrushinDomain& dom, HReport* report = nullptr);

}  // namespace critlat
