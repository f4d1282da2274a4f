#include "critlat/currents.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "critlat/oracle.hpp"

namespace critlat {

namespace {

void check_current_size(const LatticeGraph& g) {
    if (g.num_edges() > kCurrentMaxEdges)
        throw std::invalid_argument("current enumeration is limited to " + std::to_string(kCurrentMaxEdges) +
                                    " edges (graph has " + std::to_string(g.num_edges()) + ")");
    if (g.num_vertices() > 64) throw std::invalid_argument("current enumeration is limited to 64 vertices");
}

std::vector<std::uint64_t> edge_ends(const LatticeGraph& g) {
    std::vector<std::uint64_t> ends(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e)
        ends[e] = (std::uint64_t{1} << g.edge(e).u) ^ (std::uint64_t{1} << g.edge(e).v);
    return ends;
}

// number of subgraphs with boundary `target`, by edge count
std::vector<double> boundary_histogram(const LatticeGraph& g, std::uint64_t target) {
    std::vector<double> cnt(g.num_edges() + 1, 0.0);
    auto ends = edge_ends(g);
    const int ne = g.num_edges();
    std::uint64_t mask = 0, bnd = 0;
    if (target == 0) cnt[0] += 1.0;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << ne); ++i) {
        int b = __builtin_ctzll(i);
        mask ^= std::uint64_t{1} << b;
        bnd ^= ends[b];
        if (bnd == target) cnt[__builtin_popcountll(mask)] += 1.0;
    }
    return cnt;
}

// sum over subgraphs with boundary `target` of odd^|eta| even^(|E|-|eta|)
double class_sum(const std::vector<double>& hist, double w_odd, double w_even) {
    const int ne = static_cast<int>(hist.size()) - 1;
    double s = 0.0;
    for (int k = 0; k <= ne; ++k)
        if (hist[k] != 0.0) s += hist[k] * std::pow(w_odd, k) * std::pow(w_even, ne - k);
    return s;
}

struct ClassWeights {
    double c0, c1;  // sums of beta^k/k! over even / odd k
};

ClassWeights class_weights(double beta, int nmax) {
    if (nmax <= 0) return {std::cosh(beta), std::sinh(beta)};
    ClassWeights w{0.0, 0.0};
    double term = 1.0;
    for (int k = 0; k <= nmax; ++k) {
        if (k > 0) term *= beta / k;
        (k % 2 ? w.c1 : w.c0) += term;
    }
    return w;
}

// e^{x} - s^{n} for s = truncated exponential series, n copies; computed stably
double tail_mass(double beta_total_exponent, double log_ratio_times_n) {
    return std::exp(beta_total_exponent) * -std::expm1(log_ratio_times_n);
}

std::uint64_t symmetric_difference(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B) {
    return vertex_mask(g, A) ^ vertex_mask(g, B);
}

}  // namespace

std::vector<int> current_sources(const LatticeGraph& g, const std::vector<int>& n) {
    if (static_cast<int>(n.size()) != g.num_edges()) throw std::invalid_argument("current length differs from |E|");
    std::vector<int> deg(g.num_vertices(), 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        if (n[e] < 0) throw std::invalid_argument("current values must be nonnegative");
        deg[g.edge(e).u] += n[e];
        deg[g.edge(e).v] += n[e];
    }
    std::vector<int> out;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (deg[v] % 2) out.push_back(v);
    return out;
}

double current_weight(const std::vector<int>& n, double beta) {
    double w = 1.0;
    for (int k : n) w *= std::pow(beta, k) / std::tgamma(k + 1.0);
    return w;
}

std::uint64_t vertex_mask(const LatticeGraph& g, const std::vector<int>& A) {
    if (g.num_vertices() > 64) throw std::invalid_argument("vertex masks are limited to 64 vertices");
    std::uint64_t m = 0;
    for (int v : A) {
        if (v < 0 || v >= g.num_vertices()) throw std::invalid_argument("source vertex out of range");
        m ^= std::uint64_t{1} << v;
    }
    return m;
}

std::vector<int> odd_vertices(const LatticeGraph& g, std::uint64_t edge_mask) {
    std::uint64_t b = 0;
    for (int e = 0; e < g.num_edges(); ++e)
        if (edge_mask >> e & 1) b ^= (std::uint64_t{1} << g.edge(e).u) ^ (std::uint64_t{1} << g.edge(e).v);
    std::vector<int> out;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (b >> v & 1) out.push_back(v);
    return out;
}

std::vector<std::uint64_t> even_subgraphs(const LatticeGraph& g, const std::vector<int>& A) {
    check_enumerable(g);
    if (g.num_vertices() > 64) throw std::invalid_argument("vertex masks are limited to 64 vertices");
    std::uint64_t target = vertex_mask(g, A);
    auto ends = edge_ends(g);
    std::vector<std::uint64_t> out;
    std::uint64_t mask = 0, bnd = 0;
    if (target == 0) out.push_back(0);
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << g.num_edges()); ++i) {
        int b = __builtin_ctzll(i);
        mask ^= std::uint64_t{1} << b;
        bnd ^= ends[b];
        if (bnd == target) out.push_back(mask);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double hte_correlation(const LatticeGraph& g, double beta, const std::vector<int>& A, std::string* warning) {
    check_enumerable(g);
    std::uint64_t target = vertex_mask(g, A);
    if (__builtin_popcountll(target) % 2) {
        if (warning) *warning = "odd source set: correlation vanishes by spin-flip symmetry";
        return 0.0;
    }
    double t = std::tanh(beta);
    return class_sum(boundary_histogram(g, target), t, 1.0) / class_sum(boundary_histogram(g, 0), t, 1.0);
}

Bounded current_correlation(const LatticeGraph& g, double beta, const std::vector<int>& A, int nmax) {
    check_current_size(g);
    if (nmax < 1) throw std::invalid_argument("current truncation nmax must be >= 1");
    ClassWeights w = class_weights(beta, nmax);
    double num = class_sum(boundary_histogram(g, vertex_mask(g, A)), w.c1, w.c0);
    double den = class_sum(boundary_histogram(g, 0), w.c1, w.c0);
    const int ne = g.num_edges();
    double tau = tail_mass(beta * ne, ne * std::log((w.c0 + w.c1) / std::exp(beta)));
    return {num / den, 2.0 * tau / den};
}

bool even_intersection(const LatticeGraph& g, std::uint64_t mask, std::uint64_t amask) {
    UnionFind uf(g.num_vertices());
    for (int e = 0; e < g.num_edges(); ++e)
        if (mask >> e & 1) uf.unite(g.edge(e).u, g.edge(e).v);
    std::vector<int> parity(g.num_vertices(), 0);
    for (int v = 0; v < g.num_vertices(); ++v)
        if (amask >> v & 1) parity[uf.find(v)] ^= 1;
    return std::none_of(parity.begin(), parity.end(), [](int p) { return p != 0; });
}

std::vector<double> double_current_traces(const LatticeGraph& g, double beta, const std::vector<int>& A,
                                          const std::vector<int>& B, int nmax) {
    check_current_size(g);
    const int ne = g.num_edges();
    ClassWeights c = class_weights(beta, nmax);
    const double w00 = c.c0 * c.c0 - 1.0, w10 = c.c0 * c.c1, w11 = c.c1 * c.c1;
    auto s1 = even_subgraphs(g, A), s2 = even_subgraphs(g, B);
    std::vector<double> t(std::size_t{1} << ne, 0.0);
    for (std::uint64_t a : s1)
        for (std::uint64_t b : s2)
            t[a | b] += std::pow(w11, __builtin_popcountll(a & b)) * std::pow(w10, __builtin_popcountll(a ^ b));
    // edges of the trace carrying even values in both currents
    for (int e = 0; e < ne; ++e) {
        const std::uint64_t bit = std::uint64_t{1} << e;
        for (std::uint64_t m = 0; m < t.size(); ++m)
            if (m & bit) t[m] += w00 * t[m ^ bit];
    }
    return t;
}

Bounded double_current_event(const LatticeGraph& g, const std::vector<int>& B, double beta,
                             const std::function<bool(std::uint64_t)>& event, int nmax) {
    auto t = double_current_traces(g, beta, B, {}, nmax);
    double num = 0.0, den = 0.0;
    for (std::uint64_t m = 0; m < t.size(); ++m) {
        den += t[m];
        if (t[m] != 0.0 && event(m)) num += t[m];
    }
    if (!(den > 0.0)) throw std::invalid_argument("no current pair has the requested sources at this beta");
    Bounded r{num / den, 0.0};
    if (nmax > 0) {
        ClassWeights c = class_weights(beta, nmax);
        const int ne = g.num_edges();
        double tau = tail_mass(2 * beta * ne, 2 * ne * std::log((c.c0 + c.c1) / std::exp(beta)));
        r.tail_bound = 2.0 * tau / den;
    }
    return r;
}

SwitchingReport verify_switching(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B,
                                 const std::function<double(std::uint64_t)>& F, double beta, double tol) {
    const std::uint64_t bmask = vertex_mask(g, B);
    const std::uint64_t sd = symmetric_difference(g, A, B);
    std::vector<int> adb;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (sd >> v & 1) adb.push_back(v);
    auto left = double_current_traces(g, beta, A, B, 0);
    auto right = double_current_traces(g, beta, adb, {}, 0);
    SwitchingReport r;
    r.mode = "trace";
    for (std::uint64_t m = 0; m < left.size(); ++m) {
        if (left[m] == 0.0 && right[m] == 0.0) continue;
        double f = F(m);
        r.lhs += f * left[m];
        if (right[m] != 0.0 && even_intersection(g, m, bmask)) r.rhs += f * right[m];
        ++r.terms;
    }
    r.gap = std::abs(r.lhs - r.rhs);
    r.pass = r.gap <= tol * std::max(1.0, std::abs(r.lhs));
    return r;
}

SwitchingReport verify_switching_full(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B,
                                      const std::function<double(const std::vector<int>&)>& F, double beta, int nmax,
                                      double tol, double f_sup) {
    check_current_size(g);
    if (nmax < 1) throw std::invalid_argument("current truncation nmax must be >= 1");
    const int ne = g.num_edges();
    double cost = std::pow((nmax + 1.0) * (nmax + 2.0) / 2.0, ne);
    if (cost > 2e8)
        throw std::invalid_argument("full-value switching enumeration too large (" + std::to_string(cost) +
                                    " current pairs); use the trace mode");
    const std::uint64_t amask = vertex_mask(g, A), bmask = vertex_mask(g, B), sd = amask ^ bmask;
    auto ends = edge_ends(g);
    std::vector<std::vector<double>> binom(nmax + 1, std::vector<double>(nmax + 1, 0.0));
    for (int n = 0; n <= nmax; ++n) {
        binom[n][0] = 1.0;
        for (int k = 1; k <= n; ++k) binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
    }
    std::vector<double> wk(nmax + 1, 1.0);
    for (int k = 1; k <= nmax; ++k) wk[k] = wk[k - 1] * beta / k;

    SwitchingReport r;
    r.mode = "full";
    std::vector<int> m(ne, 0), n(ne, 0);
    for (;;) {
        std::uint64_t mpar = 0, trace = 0;
        double wm = 1.0;
        for (int e = 0; e < ne; ++e) {
            wm *= wk[m[e]];
            if (m[e] % 2) mpar ^= ends[e];
            if (m[e] > 0) trace |= std::uint64_t{1} << e;
        }
        if (mpar == sd) {
            const bool fb = even_intersection(g, trace, bmask);
            double left = 0.0, right = 0.0;
            std::fill(n.begin(), n.end(), 0);
            for (;;) {
                std::uint64_t npar = 0;
                double c = 1.0;
                for (int e = 0; e < ne; ++e) {
                    c *= binom[m[e]][n[e]];
                    if (n[e] % 2) npar ^= ends[e];
                }
                // first current sources npar, second current sources npar ^ mpar
                if (npar == amask && (npar ^ mpar) == bmask) left += c;
                if (fb && npar == sd && (npar ^ mpar) == 0) right += c;
                ++r.terms;
                int e = 0;
                while (e < ne && n[e] == m[e]) n[e++] = 0;
                if (e == ne) break;
                ++n[e];
            }
            if (left != 0.0 || right != 0.0) {
                double f = F(m);
                r.lhs += f * wm * left;
                r.rhs += f * wm * right;
            }
        }
        int e = 0;
        while (e < ne && m[e] == nmax) m[e++] = 0;
        if (e == ne) break;
        ++m[e];
    }
    double s2 = 0.0, term = 1.0;
    for (int k = 0; k <= nmax; ++k) {
        if (k > 0) term *= 2 * beta / k;
        s2 += term;
    }
    r.tail_bound = f_sup * tail_mass(2 * beta * ne, ne * std::log(s2 / std::exp(2 * beta)));
    r.gap = std::abs(r.lhs - r.rhs);
    r.pass = r.gap <= tol * std::max(1.0, std::abs(r.lhs));
    return r;
}

ConvergenceReport switching_convergence(const LatticeGraph& g, const std::vector<int>& A, const std::vector<int>& B,
                                        const std::function<double(const std::vector<int>&)>& F, double beta,
                                        int nmax) {
    ConvergenceReport c;
    for (int k = 1; k <= nmax; ++k) {
        SwitchingReport r = verify_switching_full(g, A, B, F, beta, k);
        double floor = 1e-13 * std::max(1.0, std::abs(r.lhs));
        if (!c.gaps.empty() && r.gap > std::max(c.gaps.back(), floor)) c.nonincreasing = false;
        c.gaps.push_back(r.gap);
        c.tail_bounds.push_back(r.tail_bound);
    }
    return c;
}

SquareIdentityReport square_identity(const LatticeGraph& g, double beta, const std::vector<int>& A, double tol) {
    SquareIdentityReport r;
    r.correlation = ising_correlations(g, beta, {A})[0];
    const std::uint64_t amask = vertex_mask(g, A);
    r.event_prob =
        double_current_event(g, {}, beta, [&](std::uint64_t m) { return even_intersection(g, m, amask); }).value;
    r.gap = std::abs(r.correlation * r.correlation - r.event_prob);
    r.pass = r.gap <= tol;
    return r;
}

U4Report u4_check(const LatticeGraph& g, double beta, const std::vector<int>& xs, double tol) {
    if (xs.size() != 4) throw std::invalid_argument("U4 needs four vertices");
    const int a = xs[0], b = xs[1], c = xs[2], d = xs[3];
    auto mu = ising_correlations(g, beta, {{a, b, c, d}, {a, b}, {c, d}, {a, c}, {b, d}, {a, d}, {b, c}});
    U4Report r;
    r.u4 = mu[0] - mu[1] * mu[2] - mu[3] * mu[4] - mu[5] * mu[6];
    if (mu[0] == 0.0) {
        r.gap = std::abs(r.u4);
        r.pass = r.u4 <= tol;
        return r;
    }
    double p = double_current_event(g, xs, beta, [&](std::uint64_t m) {
                   UnionFind uf(g.num_vertices());
                   for (int e = 0; e < g.num_edges(); ++e)
                       if (m >> e & 1) uf.unite(g.edge(e).u, g.edge(e).v);
                   int root = uf.find(a);
                   return uf.find(b) == root && uf.find(c) == root && uf.find(d) == root;
               }).value;
    r.formula = -2.0 * mu[0] * p;
    r.gap = std::abs(r.u4 - r.formula);
    r.pass = r.u4 <= tol && r.gap <= 1e-10;
    return r;
}

SimonReport simon_check(const LatticeGraph& g, double beta, const std::vector<int>& S, int x, int z, double tol) {
    std::vector<char> blocked(g.num_vertices(), 0);
    for (int s : S) blocked.at(s) = 1;
    if (!blocked[x] && !blocked[z]) {
        std::vector<int> prev(g.num_vertices(), -2);
        std::deque<int> q{x};
        prev[x] = -1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            if (v == z) {
                std::vector<int> path;
                for (int u = z; u != -1; u = prev[u]) path.push_back(u);
                std::reverse(path.begin(), path.end());
                std::string msg = "S does not separate the two vertices; path:";
                for (int u : path) {
                    const Point& p = g.point(u);
                    msg += " (" + std::to_string(p[0]) + "," + std::to_string(p[1]) + ")";
                }
                throw SeparationError(msg, path);
            }
            for (auto [y, e] : g.adjacent(v)) {
                (void)e;
                if (!blocked[y] && prev[y] == -2) {
                    prev[y] = v;
                    q.push_back(y);
                }
            }
        }
    }
    std::vector<std::vector<int>> sets{{x, z}};
    for (int y : S) {
        sets.push_back({x, y});
        sets.push_back({y, z});
    }
    auto mu = ising_correlations(g, beta, sets);
    SimonReport r;
    r.lhs = mu[0];
    for (std::size_t i = 0; i < S.size(); ++i) r.rhs += mu[1 + 2 * i] * mu[2 + 2 * i];
    r.pass = r.lhs <= r.rhs + tol;
    r.equality = std::abs(r.lhs - r.rhs) <= 1e-12;
    return r;
}

}  // namespace critlat
