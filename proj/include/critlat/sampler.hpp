#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "critlat/graph.hpp"
#include "critlat/oracle.hpp"

namespace critlat {

constexpr int kCftpMaxLog2 = 22;

// Connectivity queries on the graph with boundary blocks contracted.
class ContractedGraph {
public:
    ContractedGraph(const LatticeGraph& g, const BoundaryCondition& bc);
    // are the endpoints of edge e joined by open edges other than e?
    bool connected_off(const PercolationConfig& w, int e) const;
    int node_of(int v) const { return node_[v]; }
    int num_nodes() const { return static_cast<int>(adj_.size()); }

private:
    std::vector<int> node_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    std::vector<Edge> edge_nodes_;
    mutable std::vector<std::uint32_t> mark_;
    mutable std::vector<int> q0_, q1_;
    mutable std::uint32_t stamp_ = 0;
};

struct ChainState {
    PercolationConfig config;
    std::uint64_t stream = 0;
    std::uint64_t step = 0;
};

class HeatBath {
public:
    HeatBath(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc);
    // new value of edge e given the uniform variate u
    bool decide(const PercolationConfig& w, int e, double u) const;
    double threshold_connected() const { return t_conn_; }
    double threshold_disconnected() const { return t_disc_; }
    const LatticeGraph& graph() const { return *g_; }
    RcParams params() const { return par_; }

private:
    const LatticeGraph* g_;
    RcParams par_;
    ContractedGraph cg_;
    double t_conn_, t_disc_;
};

ChainState heatbath_step(const ChainState& s, int e, double u, const HeatBath& hb);

struct CftpResult {
    PercolationConfig config;
    std::int64_t horizon = 0;       // sweeps into the past at coalescence
    std::int64_t sweeps_run = 0;    // total sweeps over all attempts
    std::int64_t monotone_violations = 0;
};

// Exact sample from the random-cluster measure (q >= 1). The variate for
// edge e in the sweep started at time -s is uniform_at(seed, e, s).
CftpResult cftp_sample(const HeatBath& hb, std::uint64_t seed, int max_log2 = kCftpMaxLog2);
CftpResult cftp_sample(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, std::uint64_t seed,
                       int max_log2 = kCftpMaxLog2);

// Non-exact fallback for q < 1: plain heat-bath after a declared burn-in.
PercolationConfig heatbath_chain_sample(const HeatBath& hb, std::uint64_t seed, int burn_in_sweeps);

enum class SpinBc { free, monochromatic };

std::vector<int> es_forward(const LatticeGraph& g, const PercolationConfig& w, int q, SpinBc bc, std::uint64_t seed);
PercolationConfig es_reverse(const LatticeGraph& g, const std::vector<int>& spins, double p, std::uint64_t seed);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    bool exact_sampler = true;
};

Estimate estimate_from(const std::vector<double>& xs, std::uint64_t seed);

// Samples are independent CFTP draws keyed by derive_seed(seed, i).
Estimate mc_estimate(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, std::int64_t n_samples,
                     std::uint64_t seed, const std::function<double(const PercolationConfig&)>& f,
                     int burn_in_sweeps = 0);

// several functionals of the same samples
std::vector<Estimate> mc_estimates(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   const std::vector<std::function<double(const PercolationConfig&)>>& fs,
                                   int burn_in_sweeps = 0);

// floor-rounded rectangle [0, rho n] x [0, n]
Rect crossing_rect(int n, double rho);
// rectangle [0, n] x [0, n-1]
Rect square_crossing_rect(int n);

Estimate crossing_mc(const LatticeGraph& g, const Rect& r, RcParams params, const BoundaryCondition& bc,
                     std::int64_t n_samples, std::uint64_t seed);
// horizontal crossing of r, sampled on the graph r itself with free or wired bc
Estimate crossing_mc(const Rect& r, RcParams params, BcKind bc, std::int64_t n_samples, std::uint64_t seed);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};
// bins with expected count below min_expected are pooled
ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                         double min_expected = 5.0);

}  // namespace critlat
