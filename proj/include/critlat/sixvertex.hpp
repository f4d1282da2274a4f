#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace critlat {

// Six-vertex model with a = b = 1 on the M x 2N periodic square grid that is the
// medial lattice of the torus T(M, N), written in the coordinates u = x1 + x2,
// v = x1 - x2. Rows of 2N vertical arrows (1 = pointing to +u, "north-east")
// are the time slices; the horizontal arrows of a row are periodic.
//
// At a vertex with bottom arrow b, top t, left l, right r (horizontal 1 = +v)
// the ice rule reads b + l = t + r; the weight is c when b != t, else 1.
//
// Worked N = 1 example, bit j = column j: s = (b0, b1) = (1, 0), t = (0, 1).
// Column 0 forces l0 = 0 and r0 = 1; column 1 then has l = 1 and
// r = 0 + 1 - 1 = 0 = l0, which closes the row. Both vertical arrows flip, so
// V[s][t] = c^2. For s = t = (1, 0) both l0 = 0 and l0 = 1 close: V[s][s] = 2.
// N = 2, s = (1, 1, 0, 0), t = (0, 1, 1, 0): l0 = 1 dies in column 0 (r = 2);
// l0 = 0 gives r = 1, 1, 0, 0 with flips in columns 0 and 2, so V[s][t] = c^2.
// No twist is applied when the row closes; the traces then match brute force.
double vertex_weight(int b, int l, int t, int r, double c);
double six_vertex_c(double q);  // sqrt(2 + sqrt q)

constexpr int kTransferMaxN = 7;

class TransferMatrix {
public:
    TransferMatrix(int N, double c);
    int N() const { return N_; }
    int width() const { return 2 * N_; }
    double c() const { return c_; }
    std::uint32_t dimension() const { return 1u << (2 * N_); }
    // V[s][t]: weight of the row of vertices between bottom arrows s and top arrows t
    double entry(std::uint32_t s, std::uint32_t t) const;
    // out[t] = sum_s in[s] V[s][t], matrix-free
    void apply(const std::vector<double>& in, std::vector<double>& out) const;
    std::vector<std::uint32_t> sector_states(int arrows) const;
    Eigen::MatrixXd block(int arrows) const;
    Eigen::MatrixXd dense() const;  // N <= 4

private:
    int N_;
    double c_;
};

// sum over all ice-rule arrow configurations by depth-first search over the
// edges; sector >= 0 restricts to configurations with that many +u arrows per row
double brute_force_Z(int N, int M, double c, int sector = -1);

struct SectorTraces {
    double Z = 0.0;
    double Z_tilde = 0.0;  // |arrows| = N - 1
    double Z_bar = 0.0;    // |arrows| = N + 1
    std::vector<double> by_sector;  // tr of the block power, per arrow number
};
SectorTraces sector_traces(int N, int M, double c);

// -(1/M) log(Z_tilde / Z) from the block spectra; M = 0 gives the M -> infinity
// limit log(Lambda_N / Lambda_{N-1}) of the leading eigenvalues
double spectral_rate(int N, int M, double c);
// largest eigenvalue modulus of a sector block
double leading_eigenvalue(const TransferMatrix& V, int arrows);

// lambda + 2 sum_k (-1)^k tanh(k lambda) / k with cosh(lambda) = sqrt(q) / 2.
// Evaluated as 2 log(theta3 / theta2) at nome exp(-2 lambda), or through the
// modular transform 2 log(theta3 / theta4) at nome exp(-pi^2 / (2 lambda)).
double closed_form_rate(double q);
// the regrouped series lambda - 2 log 2 + 4 sum_j (-1)^(j+1) log(1 + e^(-2 j lambda))
double closed_form_rate_series(double q);
double rate_lambda(double q);

// ---------------------------------------------------------------------------
// random-cluster model on the torus T(M, N)

struct TorusConfig {
    int clusters = 0;
    int noncontractible = 0;   // k_nc
    bool dual_all_contractible = false;  // s
    int primal_u_winding = 0;  // clusters whose cycles wind in the u direction
    int dual_u_winding = 0;
    int loops = 0;
    std::vector<int> loop_u;   // u-winding of each non-contractible loop
    bool in_A() const { return primal_u_winding == 1 && dual_u_winding == 1; }
};

class Torus {
public:
    Torus(int N, int M);
    int N() const { return N_; }
    int M() const { return M_; }
    int num_vertices() const { return N_ * M_; }
    int num_edges() const { return 2 * N_ * M_; }
    // edge e = 2 * vertex + (dv == +1 ? 0 : 1), from (u, v) to (u + 1, v + dv)
    TorusConfig analyse(std::uint64_t open_mask, bool reverse_order = false) const;

private:
    int N_, M_;
};

struct Rc6vReport {
    int N = 0, M = 0;
    double q = 0.0, p = 0.0, c = 0.0;
    double Z6v = 0.0, Z6v_loops = 0.0;
    std::vector<double> sectors, sectors_loops;
    double air_spread = 0.0;        // relative spread of sqrt(q)^(l + 2s) / w_RC
    double phi_A = 0.0;
    double stated_rhs = 0.0;         // q (Z~/Z) phi[(4/q)^k_nc]
    double stated_gap = 0.0;         // |phi_A - stated_rhs| / stated_rhs
    double exact_lhs = 0.0;         // phi[N_{-2} q^(1 - l0/2)]
    double exact_rhs = 0.0;         // q (Z~/Z) phi[(4/q)^(l0/2) q^(-s)]
    double exact_gap = 0.0;
    bool homology_consistent = true;
    std::uint64_t configurations = 0;
};

constexpr int kTorusEdgeCap = 24;
Rc6vReport rc6v_verify(int N, int M, double q);

}  // namespace critlat
