#include "critlat/sampler.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "critlat/rng.hpp"

namespace critlat {

ContractedGraph::ContractedGraph(const LatticeGraph& g, const BoundaryCondition& bc) {
    const int n = g.num_vertices();
    auto block = bc.block_of(n);
    node_.assign(n, -1);
    std::vector<int> block_node(bc.blocks.size(), -1);
    int next = 0;
    for (int v = 0; v < n; ++v) {
        if (block[v] >= 0) {
            if (block_node[block[v]] < 0) block_node[block[v]] = next++;
            node_[v] = block_node[block[v]];
        } else {
            node_[v] = next++;
        }
    }
    adj_.assign(next, {});
    edge_nodes_.resize(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        int a = node_[g.edge(e).u], b = node_[g.edge(e).v];
        edge_nodes_[e] = {a, b};
        if (a == b) continue;
        adj_[a].push_back({b, e});
        adj_[b].push_back({a, e});
    }
    mark_.assign(next, 0);
}

bool ContractedGraph::connected_off(const PercolationConfig& w, int e) const {
    int a = edge_nodes_[e].u, b = edge_nodes_[e].v;
    if (a == b) return true;
    // bidirectional search; marks 2*stamp (from a) and 2*stamp+1 (from b)
    if (stamp_ >= 0x7fffffffu) {
        std::fill(mark_.begin(), mark_.end(), 0);
        stamp_ = 0;
    }
    ++stamp_;
    const std::uint32_t ma = 2 * stamp_, mb = 2 * stamp_ + 1;
    q0_.assign(1, a);
    q1_.assign(1, b);
    mark_[a] = ma;
    mark_[b] = mb;
    std::size_t h0 = 0, h1 = 0;
    while (h0 < q0_.size() && h1 < q1_.size()) {
        bool from_a = (q0_.size() - h0) <= (q1_.size() - h1);
        auto& q = from_a ? q0_ : q1_;
        std::size_t& h = from_a ? h0 : h1;
        const std::uint32_t mine = from_a ? ma : mb, other = from_a ? mb : ma;
        int x = q[h++];
        for (auto [y, f] : adj_[x]) {
            if (f == e || !w.bits[f]) continue;
            if (mark_[y] == other) return true;
            if (mark_[y] != mine) {
                mark_[y] = mine;
                q.push_back(y);
            }
        }
    }
    return false;
}

HeatBath::HeatBath(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc)
    : g_(&g), par_(params), cg_(g, bc) {
    if (params.p < 0.0 || params.p > 1.0) throw std::invalid_argument("edge weight p must lie in [0,1]");
    if (!(params.q > 0.0)) throw std::invalid_argument("cluster weight q must be positive");
    t_conn_ = 1.0 - params.p;
    double denom = params.p + params.q * (1.0 - params.p);
    t_disc_ = denom > 0.0 ? params.q * (1.0 - params.p) / denom : 0.0;
}

bool HeatBath::decide(const PercolationConfig& w, int e, double u) const {
    double lo = std::min(t_conn_, t_disc_), hi = std::max(t_conn_, t_disc_);
    if (u >= hi) return true;
    if (u < lo) return false;
    return u >= (cg_.connected_off(w, e) ? t_conn_ : t_disc_);
}

ChainState heatbath_step(const ChainState& s, int e, double u, const HeatBath& hb) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("uniform variate must lie in [0,1)");
    ChainState t = s;
    t.config.bits[e] = hb.decide(s.config, e, u) ? 1 : 0;
    ++t.step;
    return t;
}

CftpResult cftp_sample(const HeatBath& hb, std::uint64_t seed, int max_log2) {
    if (hb.params().q < 1.0) throw std::invalid_argument("coupling from the past needs q >= 1 (monotone dynamics)");
    const int ne = hb.graph().num_edges();
    CftpResult r;
    PercolationConfig top(ne, true), bot(ne, false);
    for (int lg = 1; lg <= max_log2; ++lg) {
        const std::int64_t T = std::int64_t{1} << lg;
        std::fill(top.bits.begin(), top.bits.end(), 1);
        std::fill(bot.bits.begin(), bot.bits.end(), 0);
        for (std::int64_t s = T; s >= 1; --s) {
            for (int e = 0; e < ne; ++e) {
                double u = uniform_at(seed, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(s));
                top.bits[e] = hb.decide(top, e, u);
                bot.bits[e] = hb.decide(bot, e, u);
                if (bot.bits[e] > top.bits[e]) ++r.monotone_violations;
            }
        }
        r.sweeps_run += T;
        if (top == bot) {
            r.config = bot;
            r.horizon = T;
            return r;
        }
    }
    throw std::runtime_error("coupling from the past did not coalesce within 2^" + std::to_string(max_log2) +
                             " sweeps");
}

CftpResult cftp_sample(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, std::uint64_t seed,
                       int max_log2) {
    HeatBath hb(g, params, bc);
    return cftp_sample(hb, seed, max_log2);
}

PercolationConfig heatbath_chain_sample(const HeatBath& hb, std::uint64_t seed, int burn_in_sweeps) {
    const int ne = hb.graph().num_edges();
    PercolationConfig w(ne, false);
    for (int s = 0; s < burn_in_sweeps; ++s)
        for (int e = 0; e < ne; ++e)
            w.bits[e] = hb.decide(w, e, uniform_at(seed, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(s)));
    return w;
}

std::vector<int> es_forward(const LatticeGraph& g, const PercolationConfig& w, int q, SpinBc bc, std::uint64_t seed) {
    if (q < 2) throw std::invalid_argument("Edwards-Sokal transfer needs an integer q >= 2");
    BoundaryCondition fk = bc == SpinBc::monochromatic ? BoundaryCondition::wired(g) : BoundaryCondition::free_bc(g);
    ClusterStats cs = cluster_stats(g, w, fk);
    CounterRng rng(seed, 1);
    const int n = g.num_vertices();
    std::vector<int> color(n, -1), spins(n);
    if (bc == SpinBc::monochromatic)
        for (int v : g.boundary()) color[cs.labels[v]] = 0;
    for (int v = 0; v < n; ++v) {
        int root = cs.labels[v];
        if (color[root] < 0) color[root] = static_cast<int>(rng.below(q));
        spins[v] = color[root];
    }
    return spins;
}

PercolationConfig es_reverse(const LatticeGraph& g, const std::vector<int>& spins, double p, std::uint64_t seed) {
    CounterRng rng(seed, 2);
    PercolationConfig w(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        double u = rng.uniform();
        w.bits[e] = spins[g.edge(e).u] == spins[g.edge(e).v] && u < p;
    }
    return w;
}

Estimate estimate_from(const std::vector<double>& xs, std::uint64_t seed) {
    Estimate est;
    est.seed = seed;
    est.n_samples = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return est;
    double s = 0.0;
    for (double x : xs) s += x;
    est.mean = s / xs.size();
    if (xs.size() > 1) {
        double v = 0.0;
        for (double x : xs) v += (x - est.mean) * (x - est.mean);
        v /= (xs.size() - 1);
        est.std_error = std::sqrt(v / xs.size());
    }
    return est;
}

std::vector<Estimate> mc_estimates(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   const std::vector<std::function<double(const PercolationConfig&)>>& fs,
                                   int burn_in_sweeps) {
    const bool exact = params.q >= 1.0;
    const std::size_t nf = fs.size();
    auto parts = chunked_map<std::vector<std::vector<double>>>(
        static_cast<std::uint64_t>(n_samples), [&](std::uint64_t lo, std::uint64_t hi) {
            HeatBath hb(g, params, bc);
            std::vector<std::vector<double>> vals(nf);
            for (std::uint64_t i = lo; i < hi; ++i) {
                std::uint64_t si = derive_seed(seed, i);
                PercolationConfig w = exact ? cftp_sample(hb, si).config
                                            : heatbath_chain_sample(hb, si, std::max(burn_in_sweeps, 1));
                for (std::size_t k = 0; k < nf; ++k) vals[k].push_back(fs[k](w));
            }
            return vals;
        });
    std::vector<Estimate> out;
    for (std::size_t k = 0; k < nf; ++k) {
        std::vector<double> all;
        for (const auto& p : parts) all.insert(all.end(), p[k].begin(), p[k].end());
        Estimate e = estimate_from(all, seed);
        e.exact_sampler = exact;
        out.push_back(e);
    }
    return out;
}

Estimate mc_estimate(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, std::int64_t n_samples,
                     std::uint64_t seed, const std::function<double(const PercolationConfig&)>& f, int burn_in_sweeps) {
    return mc_estimates(g, params, bc, n_samples, seed, {f}, burn_in_sweeps)[0];
}

Rect crossing_rect(int n, double rho) {
    return {0, 0, static_cast<int>(std::floor(rho * n)), n};
}

Rect square_crossing_rect(int n) { return {0, 0, n, n - 1}; }

Estimate crossing_mc(const LatticeGraph& g, const Rect& r, RcParams params, const BoundaryCondition& bc,
                     std::int64_t n_samples, std::uint64_t seed) {
    for (const Point& c : {Point{r.x0, r.y0, 0}, Point{r.x1, r.y1, 0}})
        if (g.index_of(c) < 0) throw std::invalid_argument("crossing rectangle does not fit inside the graph");
    return mc_estimate(g, params, bc, n_samples, seed, [&](const PercolationConfig& w) {
        return crossing_detect(g, w, r, Direction::horizontal) ? 1.0 : 0.0;
    });
}

Estimate crossing_mc(const Rect& r, RcParams params, BcKind bc, std::int64_t n_samples, std::uint64_t seed) {
    LatticeGraph g = build_rect(r.x0, r.y0, r.x1, r.y1);
    BoundaryCondition b = bc == BcKind::wired ? BoundaryCondition::wired(g) : BoundaryCondition::free_bc(g);
    return crossing_mc(g, r, params, b, n_samples, seed);
}

ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs, double min_expected) {
    if (observed.size() != probs.size()) throw std::invalid_argument("observed and expected bins differ in size");
    double n = 0.0;
    for (double o : observed) n += o;
    ChiSquare r;
    std::vector<std::pair<double, double>> bins;  // (observed, expected)
    double pool_o = 0.0, pool_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = probs[i] * n;
        if (e == 0.0 && observed[i] > 0.0) {
            r.statistic = INFINITY;
            r.p_value = 0.0;
            r.dof = 1;
            return r;
        }
        if (e < min_expected) {
            pool_o += observed[i];
            pool_e += e;
        } else {
            bins.push_back({observed[i], e});
        }
    }
    if (pool_e > 0.0) {
        if (pool_e >= min_expected || bins.empty()) {
            bins.push_back({pool_o, pool_e});
        } else {
            auto it = std::min_element(bins.begin(), bins.end(),
                                       [](const auto& x, const auto& y) { return x.second < y.second; });
            it->first += pool_o;
            it->second += pool_e;
        }
    }
    for (auto [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
    r.dof = std::max(static_cast<int>(bins.size()) - 1, 1);
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

}  // namespace critlat
