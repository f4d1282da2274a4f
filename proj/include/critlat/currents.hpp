#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlat/graph.hpp"

namespace critlat {

constexpr int kCurrentMaxEdges = 22;
constexpr int kDefaultNmax = 8;

// sources (odd total incidence) of an integer edge function
std::vector<int> current_sources(const LatticeGraph& g, const std::vector<int>& n);
double current_weight(const std::vector<int>& n, double beta);

std::uint64_t vertex_mask(const LatticeGraph& g, const std::vector<int>& A);
std::vector<int> odd_vertices(const LatticeGraph& g, std::uint64_t edge_mask);

// edge masks eta with boundary exactly A
std::vector<std::uint64_t> even_subgraphs(const LatticeGraph& g, const std::vector<int>& A);

// ratio of tanh-weighted even-subgraph sums; |A| odd gives 0 and sets *warning
double hte_correlation(const LatticeGraph& g, double beta, const std::vector<int>& A, std::string* warning = nullptr);

struct Bounded {
    double value = 0.0;
    double tail_bound = 0.0;  // a-priori bound on |value - untruncated value|
};

// sum over currents with sources A divided by the sum over sourceless currents,
// every entry <= nmax
Bounded current_correlation(const LatticeGraph& g, double beta, const std::vector<int>& A, int nmax = kDefaultNmax);

// every cluster of omega meets A an even number of times
bool even_intersection(const LatticeGraph& g, std::uint64_t mask, std::uint64_t amask);

// Sum of w(n1) w(n2) over pairs with sources (A, B) grouped by the trace of n1 + n2.
// nmax <= 0 sums all currents exactly through parity classes; otherwise every
// entry of n1 and n2 is bounded by nmax.
std::vector<double> double_current_traces(const LatticeGraph& g, double beta, const std::vector<int>& A,
                                          const std::vector<int>& B, int nmax = 0);

// P^B[event], event given on the trace mask
Bounded double_current_event(const LatticeGraph& g, const std::vector<int>& B, double beta,
                             const std::function<bool(std::uint64_t)>& event, int nmax = 0);

struct SwitchingReport {
    double lhs = 0.0, rhs = 0.0;
    double gap = 0.0;
    double tail_bound = 0.0;
    std::int64_t terms = 0;
    std::string mode;  // "trace" or "full"
    bool pass = true;
};

// F on traces, exact sums over all currents
SwitchingReport verify_switching(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B,
                                 const std::function<double(std::uint64_t)>& F, double beta, double tol = 1e-8);
// F on n1 + n2, pairs enumerated explicitly with (n1 + n2)_e <= nmax on every edge;
// f_sup bounds |F| for the tail estimate
SwitchingReport verify_switching_full(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B,
                                      const std::function<double(const std::vector<int>&)>& F, double beta,
                                      int nmax = kDefaultNmax, double tol = 1e-8, double f_sup = 1.0);

// gaps of verify_switching_full for nmax = 1..nmax, and whether they are nonincreasing
// up to rounding
struct ConvergenceReport {
    std::vector<double> gaps, tail_bounds;
    bool nonincreasing = true;
};
ConvergenceReport switching_convergence(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B,
                                        const std::function<double(const std::vector<int>&)>& F, double beta,
                                        int nmax = kDefaultNmax);

struct SquareIdentityReport {
    double correlation = 0.0;  // mu[sigma_A] by spin enumeration
    double event_prob = 0.0;   // P^empty[F_A]
    double gap = 0.0;
    bool pass = true;
};
SquareIdentityReport square_identity(const LatticeGraph& g, double beta, const std::vector<int>& A,
                                     double tol = 1e-8);

struct U4Report {
    double u4 = 0.0;
    double formula = 0.0;  // -2 mu[s1 s2 s3 s4] P^{x1..x4}[all connected]
    double gap = 0.0;
    bool pass = true;
};
U4Report u4_check(const LatticeGraph& g, double beta, const std::vector<int>& xs, double tol = 1e-12);

class SeparationError : public std::invalid_argument {
public:
    SeparationError(const std::string& msg, std::vector<int> path) : std::invalid_argument(msg), path(std::move(path)) {}
    std::vector<int> path;  // vertices of a path avoiding S
};

struct SimonReport {
    double lhs = 0.0, rhs = 0.0;
    bool pass = true;
    bool equality = false;  // |lhs - rhs| <= 1e-12
};
SimonReport simon_check(const LatticeGraph& g, double beta, const std::vector<int>& S, int x, int z,
                        double tol = 1e-12);

}  // namespace critlat
