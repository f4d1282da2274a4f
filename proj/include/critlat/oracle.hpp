#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "critlat/graph.hpp"
#include "critlat/parallel.hpp"

namespace critlat {

constexpr int kEnumerationCap = 26;
constexpr int kDirectWeightEdges = 20;  // log-domain weights above this size
constexpr int kEventClassMaxEdges = 8;

struct RcParams {
    double p = 0.5;
    double q = 1.0;
};

double p_self_dual(double q);
double p_dual(double p, double q);
double beta_from_p(double p, int q);
double p_from_beta(double beta, int q);

void check_enumerable(const LatticeGraph& g);

// Weight p^o (1-p)^c q^k up to the factor exp(-shift); direct products for small
// graphs, log domain otherwise.
struct RcWeight {
    RcWeight(int num_edges, int num_vertices, RcParams params);
    double operator()(int open, int clusters) const;
    double log_shift() const { return shift_; }

private:
    int ne_;
    RcParams par_;
    bool direct_;
    double lp_, lq_, lq1_, shift_ = 0.0;
};

struct RcDistribution {
    std::vector<double> prob;  // indexed by edge bitmask
    double z = 0.0;            // partition function
    double log_z = 0.0;
};

RcDistribution rc_distribution(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc);
double rc_conditional(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, int e,
                      const PercolationConfig& psi);

// Sum over configurations of phi(omega) * f(omega) for nout functions at once.
// fn(mask, uf, acc) adds f(omega) into acc[0..nout); uf holds the clusters of omega.
template <class Fn>
std::vector<double> rc_expectations(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, int nout,
                                    Fn fn) {
    check_enumerable(g);
    const int ne = g.num_edges();
    int base_count = 0;
    UnionFind base = base_union_find(g, bc, &base_count);
    RcWeight weight(ne, g.num_vertices(), params);
    const auto& edges = g.edges();
    auto parts = chunked_map<std::vector<double>>(std::uint64_t{1} << ne, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<double> acc(nout + 1, 0.0), tmp(nout);
        for (std::uint64_t m = lo; m < hi; ++m) {
            UnionFind uf = base;
            int k = base_count;
            std::uint64_t mm = m;
            while (mm) {
                int e = __builtin_ctzll(mm);
                mm &= mm - 1;
                if (uf.unite(edges[e].u, edges[e].v)) --k;
            }
            double w = weight(__builtin_popcountll(m), k);
            if (w == 0.0) continue;
            std::fill(tmp.begin(), tmp.end(), 0.0);
            fn(m, uf, tmp.data());
            for (int i = 0; i < nout; ++i) acc[i] += w * tmp[i];
            acc[nout] += w;
        }
        return acc;
    });
    std::vector<double> tot(nout + 1, 0.0);
    for (const auto& p : parts)
        for (int i = 0; i <= nout; ++i) tot[i] += p[i];
    std::vector<double> out(nout);
    for (int i = 0; i < nout; ++i) out[i] = tot[i] / tot[nout];
    return out;
}

// matrix of phi[x <-> y] (row-major, |V| x |V|)
std::vector<double> connection_matrix(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc);
// phi[x <-> dG] under the given boundary condition
std::vector<double> boundary_connection(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc);

struct Simplex {
    int q = 2;
    std::vector<std::vector<double>> vecs;  // q unit vectors in R^{q-1}
    double dot(int a, int b) const;
};
Simplex make_simplex(int q);

enum class PottsBc { free, monochromatic };

struct PottsParams {
    double beta = 0.0;
    int q = 2;
};

void check_spin_enumerable(int num_spins, int q);
// mu[sigma_x . sigma_y] for all pairs (row-major)
std::vector<double> potts_pair_table(const LatticeGraph& g, PottsParams params, PottsBc bc);
// mu^b[sigma_x . b] for every vertex (b is spin 0)
std::vector<double> potts_magnetization(const LatticeGraph& g, PottsParams params);
// pair form when |A| = 2, Ising product form otherwise (q = 2 only)
double potts_correlation(const LatticeGraph& g, PottsParams params, PottsBc bc, const std::vector<int>& A);
// Ising correlations mu^f[sigma_A] for a list of vertex sets, one enumeration
std::vector<double> ising_correlations(const LatticeGraph& g, double beta, const std::vector<std::vector<int>>& sets);

struct EsReport {
    bool pass = true;
    double max_dev_free = 0.0;
    double max_dev_wired = 0.0;
    double max_dev_even = 0.0;  // q = 2 product form
    int worst_x = -1, worst_y = -1;
    double beta = 0.0;
    int pairs_checked = 0;
};
EsReport verify_es_coupling(const LatticeGraph& g, double p, int q, double tol = 1e-10);

struct DualityReport {
    bool pass = true;
    double p_star = 0.0;
    double max_dev = 0.0;
    double z_rel_dev = 0.0;
    int configs = 0;
};
DualityReport verify_duality(const LatticeGraph& g, double p, double q, double tol = 1e-10);

// Increasing events: cylinders {F open} and unions of two cylinders, over |E| <= 8.
struct EventClass {
    int ne = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> events;  // (F, G); G == F for a cylinder
    explicit EventClass(int num_edges);
    bool contains(std::size_t i, std::uint32_t mask) const;
    std::string describe(std::size_t i) const;
};

struct FkgReport {
    bool pass = true;
    double worst_cov = 0.0;
    std::size_t worst_a = 0, worst_b = 0;
    std::size_t pairs = 0;
    std::size_t events = 0;
};
FkgReport fkg_verify(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, double tol = 1e-12);

struct MonReport {
    bool pass = true;
    double worst = 0.0;  // most negative phi_{p'}[A] - phi_p[A]
    std::size_t checks = 0;
};
MonReport mon_check(const LatticeGraph& g, double p, double p2, double q, const BoundaryCondition& bc,
                    double tol = 1e-12);
// phi^0[A] <= phi^xi[A] <= phi^1[A] over every partition xi of the boundary
MonReport cbc_check(const LatticeGraph& g, RcParams params, double tol = 1e-12, std::size_t max_partitions = 5000);

struct FkgWitness {
    bool found = false;
    std::string graph_name;
    LatticeGraph graph;
    std::string event_a, event_b;
    double cov = 0.0;
    double pa = 0.0, pb = 0.0, pab = 0.0;
};
FkgWitness fkg_search(double p, double q, double tol = 1e-12);

struct NamedGraph {
    std::string name;
    LatticeGraph graph;
};
// small subgraphs of Z^2 ordered by edge count
std::vector<NamedGraph> small_graph_catalog();

struct PhiSResult {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = true;
    int samples = 0;
};
PhiSResult phi_S(const std::vector<Point>& S, int dim, double p, int mc_samples = 20000, std::uint64_t seed = 1);

}  // namespace critlat
