#pragma once

// Test-side oracles written independently of the library's enumeration code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "critlat/graph.hpp"

namespace support {

using namespace critlat;

// flood-fill cluster count with bc blocks glued through a virtual vertex each
inline int flood_clusters(const LatticeGraph& g, const PercolationConfig& w, const BoundaryCondition& bc) {
    const int n = g.num_vertices();
    const int nb = static_cast<int>(bc.blocks.size());
    std::vector<std::vector<int>> adj(n + nb);
    for (int e = 0; e < g.num_edges(); ++e)
        if (w[e]) {
            adj[g.edge(e).u].push_back(g.edge(e).v);
            adj[g.edge(e).v].push_back(g.edge(e).u);
        }
    for (int b = 0; b < nb; ++b)
        for (int v : bc.blocks[b]) {
            adj[n + b].push_back(v);
            adj[v].push_back(n + b);
        }
    std::vector<char> seen(n + nb, 0);
    int k = 0;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++k;
        std::vector<int> st{s};
        seen[s] = 1;
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (int y : adj[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    st.push_back(y);
                }
        }
    }
    return k;
}

inline PercolationConfig random_config(int ne, std::mt19937_64& rng, double p = 0.5) {
    std::bernoulli_distribution d(p);
    PercolationConfig w(ne);
    for (auto& b : w.bits) b = d(rng);
    return w;
}

// normalized FK law, one entry per edge mask, from flood-fill cluster counts
inline std::vector<double> fk_law(const LatticeGraph& g, double p, double q, const BoundaryCondition& bc) {
    const int ne = g.num_edges();
    std::vector<double> w(std::size_t{1} << ne);
    double z = 0.0;
    for (std::uint64_t m = 0; m < w.size(); ++m) {
        PercolationConfig c = PercolationConfig::from_mask(m, ne);
        int o = c.open_count();
        w[m] = std::pow(p, o) * std::pow(1 - p, ne - o) * std::pow(q, flood_clusters(g, c, bc));
        z += w[m];
    }
    for (double& x : w) x /= z;
    return w;
}

// Potts expectation with Kronecker Hamiltonian exp(beta * sum delta); spins with
// fixed >= 0 are pinned to that color
inline double potts_delta_expect(const LatticeGraph& g, double beta, int q, const std::vector<int>& fixed,
                                 const std::function<double(const std::vector<int>&)>& f) {
    const int n = g.num_vertices();
    std::vector<int> s(n, 0), free_idx;
    for (int v = 0; v < n; ++v) {
        if (fixed[v] >= 0)
            s[v] = fixed[v];
        else
            free_idx.push_back(v);
    }
    double num = 0.0, den = 0.0;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < free_idx.size(); ++i) total *= q;
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint64_t x = c;
        for (int v : free_idx) {
            s[v] = static_cast<int>(x % q);
            x /= q;
        }
        int agree = 0;
        for (const Edge& e : g.edges()) agree += s[e.u] == s[e.v];
        double w = std::exp(beta * agree);
        num += w * f(s);
        den += w;
    }
    return num / den;
}

inline std::string fixture_path(const std::string& name) { return std::string(CRITLAT_FIXTURES) + "/" + name; }

}  // namespace support
