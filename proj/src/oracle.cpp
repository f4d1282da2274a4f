#include "critlat/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "critlat/rng.hpp"

namespace critlat {

double p_self_dual(double q) { return std::sqrt(q) / (1.0 + std::sqrt(q)); }

double p_dual(double p, double q) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("dual edge weight needs 0 < p < 1");
    // p*/(1-p*) = q(1-p)/p
    double r = q * (1.0 - p) / p;
    return r / (1.0 + r);
}

double beta_from_p(double p, int q) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("beta(p) needs 0 <= p < 1");
    return -(static_cast<double>(q) - 1.0) / q * std::log1p(-p);
}

double p_from_beta(double beta, int q) { return -std::expm1(-beta * q / (q - 1.0)); }

void check_enumerable(const LatticeGraph& g) {
    if (g.num_edges() > kEnumerationCap)
        throw std::length_error("graph has " + std::to_string(g.num_edges()) + " edges; exact enumeration is capped at " +
                                std::to_string(kEnumerationCap) + " edges (use the sampler)");
}

RcWeight::RcWeight(int num_edges, int num_vertices, RcParams params)
    : ne_(num_edges), par_(params), direct_(num_edges <= kDirectWeightEdges) {
    if (params.p < 0.0 || params.p > 1.0) throw std::invalid_argument("edge weight p must lie in [0,1]");
    if (!(params.q > 0.0)) throw std::invalid_argument("cluster weight q must be positive");
    lp_ = std::log(params.p);
    lq1_ = std::log1p(-params.p);
    lq_ = std::log(params.q);
    if (!direct_) shift_ = (params.q > 1.0 ? num_vertices : 1) * lq_;
}

double RcWeight::operator()(int open, int clusters) const {
    int closed = ne_ - open;
    if (direct_) return std::pow(par_.p, open) * std::pow(1.0 - par_.p, closed) * std::pow(par_.q, clusters);
    if ((open > 0 && par_.p == 0.0) || (closed > 0 && par_.p == 1.0)) return 0.0;
    double lw = (open ? open * lp_ : 0.0) + (closed ? closed * lq1_ : 0.0) + clusters * lq_;
    return std::exp(lw - shift_);
}

RcDistribution rc_distribution(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc) {
    check_enumerable(g);
    const int ne = g.num_edges();
    int base_count = 0;
    UnionFind base = base_union_find(g, bc, &base_count);
    RcWeight weight(ne, g.num_vertices(), params);
    RcDistribution d;
    const std::uint64_t n = std::uint64_t{1} << ne;
    d.prob.assign(n, 0.0);
    auto parts = chunked_map<double>(n, [&](std::uint64_t lo, std::uint64_t hi) {
        double s = 0.0;
        for (std::uint64_t m = lo; m < hi; ++m) {
            double w = weight(__builtin_popcountll(m), cluster_count_mask(g, m, base, base_count));
            d.prob[m] = w;
            s += w;
        }
        return s;
    });
    double z = 0.0;
    for (double s : parts) z += s;
    if (!(z > 0.0)) throw std::runtime_error("random-cluster partition function vanished");
    for (double& p : d.prob) p /= z;
    d.log_z = std::log(z) + weight.log_shift();
    d.z = std::exp(d.log_z);
    return d;
}

double rc_conditional(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, int e,
                      const PercolationConfig& psi) {
    if (e < 0 || e >= g.num_edges()) throw std::invalid_argument("edge index out of range");
    PercolationConfig w = psi;
    w.bits[e] = 0;
    ClusterStats s = cluster_stats(g, w, bc);
    const Edge& ed = g.edge(e);
    if (s.labels[ed.u] == s.labels[ed.v]) return params.p;
    return params.p / (params.p + params.q * (1.0 - params.p));
}

std::vector<double> connection_matrix(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc) {
    const int n = g.num_vertices();
    auto out = rc_expectations(g, params, bc, n * n, [&](std::uint64_t, UnionFind& uf, double* acc) {
        std::vector<int> r(n);
        for (int v = 0; v < n; ++v) r[v] = uf.find(v);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (r[x] == r[y]) acc[x * n + y] = 1.0;
    });
    return out;
}

std::vector<double> boundary_connection(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc) {
    const int n = g.num_vertices();
    return rc_expectations(g, params, bc, n, [&](std::uint64_t, UnionFind& uf, double* acc) {
        std::vector<char> touched(n, 0);
        for (int v : g.boundary()) touched[uf.find(v)] = 1;
        for (int x = 0; x < n; ++x)
            if (touched[uf.find(x)]) acc[x] = 1.0;
    });
}

double Simplex::dot(int a, int b) const { return a == b ? 1.0 : -1.0 / (q - 1); }

Simplex make_simplex(int q) {
    if (q < 2) throw std::invalid_argument("Potts model needs q >= 2");
    Simplex s;
    s.q = q;
    const double scale = std::sqrt(static_cast<double>(q) / (q - 1));
    std::vector<std::vector<double>> raw(q, std::vector<double>(q));
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) raw[i][j] = ((i == j) - 1.0 / q) * scale;
    // orthonormal basis of the sum-zero hyperplane, starting from raw[0]
    std::vector<std::vector<double>> basis;
    for (int i = 0; i < q && static_cast<int>(basis.size()) < q - 1; ++i) {
        std::vector<double> v = raw[i];
        for (const auto& b : basis) {
            double d = 0.0;
            for (int j = 0; j < q; ++j) d += v[j] * b[j];
            for (int j = 0; j < q; ++j) v[j] -= d * b[j];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm < 1e-9) continue;
        for (double& x : v) x /= nrm;
        basis.push_back(v);
    }
    s.vecs.assign(q, std::vector<double>(q - 1));
    for (int i = 0; i < q; ++i)
        for (int k = 0; k < q - 1; ++k) {
            double d = 0.0;
            for (int j = 0; j < q; ++j) d += raw[i][j] * basis[k][j];
            s.vecs[i][k] = d;
        }
    return s;
}

void check_spin_enumerable(int num_spins, int q) {
    if (num_spins * std::log2(static_cast<double>(q)) > kEnumerationCap + 1e-9)
        throw std::length_error("spin enumeration of " + std::to_string(q) + "^" + std::to_string(num_spins) +
                                " states exceeds the cap of 2^" + std::to_string(kEnumerationCap));
}

namespace {

// Visits every spin configuration with its (unnormalized) Gibbs weight.
// Vertices flagged in `fixed` carry spin 0.
template <class Fn>
double potts_visit(const LatticeGraph& g, PottsParams par, const std::vector<char>& fixed, Fn fn) {
    const int n = g.num_vertices();
    std::vector<int> freev;
    for (int v = 0; v < n; ++v)
        if (!fixed[v]) freev.push_back(v);
    check_spin_enumerable(static_cast<int>(freev.size()), par.q);
    const double same = 1.0, diff = -1.0 / (par.q - 1);
    std::vector<int> spin(n, 0);
    double total = 0.0;
    const int ne = g.num_edges();
    for (;;) {
        double h = 0.0;
        for (const Edge& e : g.edges()) h += spin[e.u] == spin[e.v] ? same : diff;
        double w = std::exp(par.beta * (h - ne));
        total += w;
        fn(spin, w);
        std::size_t i = 0;
        for (; i < freev.size(); ++i) {
            if (++spin[freev[i]] < par.q) break;
            spin[freev[i]] = 0;
        }
        if (i == freev.size()) break;
    }
    return total;
}

}  // namespace

std::vector<double> potts_pair_table(const LatticeGraph& g, PottsParams par, PottsBc bc) {
    const int n = g.num_vertices();
    std::vector<char> fixed(n, 0);
    if (bc == PottsBc::monochromatic)
        for (int v : g.boundary()) fixed[v] = 1;
    Simplex s = make_simplex(par.q);
    std::vector<double> acc(static_cast<std::size_t>(n) * n, 0.0);
    double z = potts_visit(g, par, fixed, [&](const std::vector<int>& sp, double w) {
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) acc[x * n + y] += w * s.dot(sp[x], sp[y]);
    });
    for (double& a : acc) a /= z;
    return acc;
}

std::vector<double> potts_magnetization(const LatticeGraph& g, PottsParams par) {
    const int n = g.num_vertices();
    std::vector<char> fixed(n, 0);
    for (int v : g.boundary()) fixed[v] = 1;
    Simplex s = make_simplex(par.q);
    std::vector<double> acc(n, 0.0);
    double z = potts_visit(g, par, fixed, [&](const std::vector<int>& sp, double w) {
        for (int x = 0; x < n; ++x) acc[x] += w * s.dot(sp[x], 0);
    });
    for (double& a : acc) a /= z;
    return acc;
}

std::vector<double> ising_correlations(const LatticeGraph& g, double beta, const std::vector<std::vector<int>>& sets) {
    const int n = g.num_vertices();
    std::vector<char> fixed(n, 0);
    std::vector<double> acc(sets.size(), 0.0);
    double z = potts_visit(g, {beta, 2}, fixed, [&](const std::vector<int>& sp, double w) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
            int par = 0;
            for (int x : sets[i]) par ^= sp[x];
            acc[i] += par ? -w : w;
        }
    });
    for (double& a : acc) a /= z;
    return acc;
}

double potts_correlation(const LatticeGraph& g, PottsParams par, PottsBc bc, const std::vector<int>& A) {
    for (int x : A)
        if (x < 0 || x >= g.num_vertices()) throw std::invalid_argument("vertex index out of range");
    if (A.size() == 2) {
        const int n = g.num_vertices();
        std::vector<char> fixed(n, 0);
        if (bc == PottsBc::monochromatic)
            for (int v : g.boundary()) fixed[v] = 1;
        Simplex s = make_simplex(par.q);
        double acc = 0.0;
        double z = potts_visit(g, par, fixed, [&](const std::vector<int>& sp, double w) { acc += w * s.dot(sp[A[0]], sp[A[1]]); });
        return acc / z;
    }
    if (par.q != 2) throw std::invalid_argument("product correlations sigma_A need q = 2");
    if (bc != PottsBc::free) throw std::invalid_argument("product correlations are implemented for free boundary");
    return ising_correlations(g, par.beta, {A})[0];
}

namespace {

std::vector<std::vector<int>> even_vertex_sets(int n, int max_size, std::size_t max_count) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (out.size() >= max_count) return;
        if (!cur.empty() && cur.size() % 2 == 0) out.push_back(cur);
        if (static_cast<int>(cur.size()) == max_size) return;
        for (int v = start; v < n; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

}  // namespace

EsReport verify_es_coupling(const LatticeGraph& g, double p, int q, double tol) {
    EsReport r;
    r.beta = beta_from_p(p, q);
    const int n = g.num_vertices();
    RcParams rp{p, static_cast<double>(q)};
    auto spin = potts_pair_table(g, {r.beta, q}, PottsBc::free);
    auto conn = connection_matrix(g, rp, BoundaryCondition::free_bc(g));
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            double d = std::abs(spin[x * n + y] - conn[x * n + y]);
            ++r.pairs_checked;
            if (d > r.max_dev_free) {
                r.max_dev_free = d;
                r.worst_x = x;
                r.worst_y = y;
            }
        }
    auto mag = potts_magnetization(g, {r.beta, q});
    auto bconn = boundary_connection(g, rp, BoundaryCondition::wired(g));
    for (int x = 0; x < n; ++x) r.max_dev_wired = std::max(r.max_dev_wired, std::abs(mag[x] - bconn[x]));
    if (q == 2) {
        auto sets = even_vertex_sets(n, 4, 400);
        auto corr = ising_correlations(g, r.beta, sets);
        auto ev = rc_expectations(g, rp, BoundaryCondition::free_bc(g), static_cast<int>(sets.size()),
                                  [&](std::uint64_t, UnionFind& uf, double* acc) {
                                      std::vector<int> parity(n, 0);
                                      for (std::size_t i = 0; i < sets.size(); ++i) {
                                          for (int x : sets[i]) parity[uf.find(x)] ^= 1;
                                          bool even = true;
                                          for (int x : sets[i]) {
                                              if (parity[uf.find(x)]) even = false;
                                          }
                                          for (int x : sets[i]) parity[uf.find(x)] = 0;
                                          if (even) acc[i] = 1.0;
                                      }
                                  });
        for (std::size_t i = 0; i < sets.size(); ++i) r.max_dev_even = std::max(r.max_dev_even, std::abs(corr[i] - ev[i]));
    }
    r.pass = r.max_dev_free <= tol && r.max_dev_wired <= tol && r.max_dev_even <= tol;
    return r;
}

DualityReport verify_duality(const LatticeGraph& g, double p, double q, double tol) {
    if (g.dim() != 2) throw std::invalid_argument("duality requires a planar (d=2) graph");
    if (!is_connected(g)) throw std::invalid_argument("duality requires a connected graph");
    bounded_faces(g);
    DualityReport r;
    r.p_star = p_dual(p, q);
    DualResult dual = dual_graph(g);
    const int ne = g.num_edges();
    auto prim = rc_distribution(g, {p, q}, BoundaryCondition::free_bc(g));
    auto dua = rc_distribution(dual.graph, {r.p_star, q}, BoundaryCondition::wired(dual.graph));
    const std::uint64_t n = std::uint64_t{1} << ne;
    for (std::uint64_t m = 0; m < n; ++m) {
        std::uint64_t md = 0;
        for (int e = 0; e < ne; ++e)
            if (!((m >> e) & 1u)) md |= std::uint64_t{1} << dual.edge_map[e];
        r.max_dev = std::max(r.max_dev, std::abs(prim.prob[m] - dua.prob[md]));
    }
    r.configs = static_cast<int>(n);
    const double v = ne - g.num_vertices() + 1;
    double lhs = dua.log_z;
    double rhs = prim.log_z + v * std::log(q) - ne * std::log(p) + ne * std::log1p(-r.p_star);
    r.z_rel_dev = std::abs(std::expm1(lhs - rhs));
    r.pass = r.max_dev <= tol && r.z_rel_dev <= tol;
    return r;
}

EventClass::EventClass(int num_edges) : ne(num_edges) {
    if (num_edges > kEventClassMaxEdges)
        throw std::length_error("event-class scans are limited to " + std::to_string(kEventClassMaxEdges) + " edges");
    const std::uint32_t n = 1u << num_edges;
    for (std::uint32_t f = 0; f < n; ++f) events.push_back({f, f});
    for (std::uint32_t f = 0; f < n; ++f)
        for (std::uint32_t h = f + 1; h < n; ++h)
            if ((f & h) != f && (f & h) != h) events.push_back({f, h});
}

bool EventClass::contains(std::size_t i, std::uint32_t mask) const {
    auto [f, h] = events[i];
    return (mask & f) == f || (mask & h) == h;
}

std::string EventClass::describe(std::size_t i) const {
    auto cyl = [&](std::uint32_t f) {
        std::ostringstream o;
        o << "{";
        bool first = true;
        for (int e = 0; e < ne; ++e)
            if ((f >> e) & 1u) {
                o << (first ? "" : ",") << e;
                first = false;
            }
        o << "} open";
        return o.str();
    };
    auto [f, h] = events[i];
    if (f == h) return cyl(f);
    return cyl(f) + " or " + cyl(h);
}

namespace {

// zeta[F] = sum over masks containing F of vals[mask]
void superset_zeta(std::vector<double>& z, int ne) {
    const std::uint32_t n = 1u << ne;
    for (int b = 0; b < ne; ++b)
        for (std::uint32_t m = 0; m < n; ++m)
            if (!((m >> b) & 1u)) z[m] += z[m | (1u << b)];
}

double event_prob(const std::vector<double>& zeta, std::pair<std::uint32_t, std::uint32_t> ev) {
    auto [f, h] = ev;
    if (f == h) return zeta[f];
    return zeta[f] + zeta[h] - zeta[f | h];
}

std::vector<double> zeta_of(const RcDistribution& d, int ne) {
    std::vector<double> z = d.prob;
    superset_zeta(z, ne);
    return z;
}

}  // namespace

FkgReport fkg_verify(const LatticeGraph& g, RcParams params, const BoundaryCondition& bc, double tol) {
    const int ne = g.num_edges();
    EventClass cls(ne);
    auto dist = rc_distribution(g, params, bc);
    auto zall = zeta_of(dist, ne);
    const std::size_t ne_ev = cls.events.size();
    std::vector<double> pev(ne_ev);
    for (std::size_t i = 0; i < ne_ev; ++i) pev[i] = event_prob(zall, cls.events[i]);
    FkgReport r;
    r.events = ne_ev;
    r.worst_cov = std::numeric_limits<double>::infinity();
    const std::uint32_t n = 1u << ne;
    std::vector<double> za(n);
    for (std::size_t i = 0; i < ne_ev; ++i) {
        for (std::uint32_t m = 0; m < n; ++m) za[m] = cls.contains(i, m) ? dist.prob[m] : 0.0;
        superset_zeta(za, ne);
        const double pa = pev[i];
        for (std::size_t j = i; j < ne_ev; ++j) {
            double cov = event_prob(za, cls.events[j]) - pa * pev[j];
            if (cov < r.worst_cov) {
                r.worst_cov = cov;
                r.worst_a = i;
                r.worst_b = j;
            }
        }
        r.pairs += ne_ev - i;
    }
    r.pass = r.worst_cov >= -tol;
    return r;
}

MonReport mon_check(const LatticeGraph& g, double p, double p2, double q, const BoundaryCondition& bc, double tol) {
    if (p2 < p) std::swap(p, p2);
    const int ne = g.num_edges();
    EventClass cls(ne);
    auto z1 = zeta_of(rc_distribution(g, {p, q}, bc), ne);
    auto z2 = zeta_of(rc_distribution(g, {p2, q}, bc), ne);
    MonReport r;
    r.worst = std::numeric_limits<double>::infinity();
    for (const auto& ev : cls.events) {
        r.worst = std::min(r.worst, event_prob(z2, ev) - event_prob(z1, ev));
        ++r.checks;
    }
    r.pass = r.worst >= -tol;
    return r;
}

MonReport cbc_check(const LatticeGraph& g, RcParams params, double tol, std::size_t max_partitions) {
    const int ne = g.num_edges();
    EventClass cls(ne);
    auto zf = zeta_of(rc_distribution(g, params, BoundaryCondition::free_bc(g)), ne);
    auto zw = zeta_of(rc_distribution(g, params, BoundaryCondition::wired(g)), ne);
    const auto& bd = g.boundary();
    const int nb = static_cast<int>(bd.size());
    MonReport r;
    r.worst = std::numeric_limits<double>::infinity();
    // restricted growth strings enumerate set partitions of the boundary
    std::vector<int> rg(nb, 0), mx(nb, 0);
    std::size_t count = 0;
    for (;;) {
        int nblocks = nb ? *std::max_element(rg.begin(), rg.end()) + 1 : 0;
        std::vector<std::vector<int>> blocks(nblocks);
        for (int i = 0; i < nb; ++i) blocks[rg[i]].push_back(bd[i]);
        std::vector<std::vector<int>> nontrivial;
        for (auto& b : blocks)
            if (b.size() > 1) nontrivial.push_back(b);
        auto zx = zeta_of(rc_distribution(g, params, BoundaryCondition::custom(g, nontrivial)), ne);
        for (const auto& ev : cls.events) {
            double px = event_prob(zx, ev);
            r.worst = std::min({r.worst, px - event_prob(zf, ev), event_prob(zw, ev) - px});
            r.checks += 2;
        }
        if (++count >= max_partitions) break;
        int i = nb - 1;
        while (i > 0 && rg[i] == mx[i - 1] + 1) --i;
        if (i <= 0) break;
        ++rg[i];
        mx[i] = std::max(mx[i - 1], rg[i]);
        for (int j = i + 1; j < nb; ++j) {
            rg[j] = 0;
            mx[j] = mx[i];
        }
    }
    r.pass = r.worst >= -tol;
    return r;
}

std::vector<NamedGraph> small_graph_catalog() {
    auto mk = [](const std::string& name, std::vector<std::pair<Point, Point>> es) {
        std::vector<Point> pts;
        for (auto& [a, b] : es) {
            pts.push_back(a);
            pts.push_back(b);
        }
        return NamedGraph{name, LatticeGraph(2, pts, es)};
    };
    auto P = [](int x, int y) { return Point{x, y, 0}; };
    return {
        mk("edge", {{P(0, 0), P(1, 0)}}),
        mk("path2", {{P(0, 0), P(1, 0)}, {P(1, 0), P(2, 0)}}),
        mk("corner2", {{P(0, 0), P(1, 0)}, {P(1, 0), P(1, 1)}}),
        mk("path3", {{P(0, 0), P(1, 0)}, {P(1, 0), P(2, 0)}, {P(2, 0), P(3, 0)}}),
        mk("star3", {{P(0, 0), P(1, 0)}, {P(0, 0), P(-1, 0)}, {P(0, 0), P(0, 1)}}),
        mk("square", {{P(0, 0), P(1, 0)}, {P(1, 0), P(1, 1)}, {P(0, 1), P(1, 1)}, {P(0, 0), P(0, 1)}}),
        mk("star4", {{P(0, 0), P(1, 0)}, {P(0, 0), P(-1, 0)}, {P(0, 0), P(0, 1)}, {P(0, 0), P(0, -1)}}),
        mk("square_tail",
           {{P(0, 0), P(1, 0)}, {P(1, 0), P(1, 1)}, {P(0, 1), P(1, 1)}, {P(0, 0), P(0, 1)}, {P(1, 0), P(2, 0)}}),
        {"ladder2", build_rect(0, 0, 2, 1)},
        mk("ladder2_tail", {{P(0, 0), P(1, 0)},
                            {P(1, 0), P(2, 0)},
                            {P(0, 1), P(1, 1)},
                            {P(1, 1), P(2, 1)},
                            {P(0, 0), P(0, 1)},
                            {P(1, 0), P(1, 1)},
                            {P(2, 0), P(2, 1)},
                            {P(2, 0), P(3, 0)}}),
    };
}

FkgWitness fkg_search(double p, double q, double tol) {
    FkgWitness w;
    for (const auto& ng : small_graph_catalog()) {
        const int ne = ng.graph.num_edges();
        if (ne > kEventClassMaxEdges) continue;
        EventClass cls(ne);
        auto dist = rc_distribution(ng.graph, {p, q}, BoundaryCondition::free_bc(ng.graph));
        auto zall = zeta_of(dist, ne);
        const std::uint32_t n = 1u << ne;
        std::vector<double> za(n);
        for (std::size_t i = 0; i < cls.events.size(); ++i) {
            for (std::uint32_t m = 0; m < n; ++m) za[m] = cls.contains(i, m) ? dist.prob[m] : 0.0;
            superset_zeta(za, ne);
            double pa = event_prob(zall, cls.events[i]);
            for (std::size_t j = 0; j < cls.events.size(); ++j) {
                double pb = event_prob(zall, cls.events[j]);
                double pab = event_prob(za, cls.events[j]);
                if (pab - pa * pb < -tol) {
                    w.found = true;
                    w.graph_name = ng.name;
                    w.graph = ng.graph;
                    w.event_a = cls.describe(i);
                    w.event_b = cls.describe(j);
                    w.cov = pab - pa * pb;
                    w.pa = pa;
                    w.pb = pb;
                    w.pab = pab;
                    return w;
                }
            }
        }
    }
    return w;
}

PhiSResult phi_S(const std::vector<Point>& S, int dim, double p, int mc_samples, std::uint64_t seed) {
    LatticeGraph g = LatticeGraph::induced(dim, S);
    int origin = g.index_of({0, 0, 0});
    if (origin < 0) throw std::invalid_argument("the set S must contain the origin");
    // boundary edges: one entry per inner endpoint
    std::vector<int> delta;
    for (int v = 0; v < g.num_vertices(); ++v)
        for (int a = 0; a < dim; ++a)
            for (int s : {-1, 1}) {
                Point q = g.point(v);
                q[a] += s;
                if (g.index_of(q) < 0) delta.push_back(v);
            }
    PhiSResult r;
    if (g.num_edges() <= kEnumerationCap) {
        auto conn = rc_expectations(g, {p, 1.0}, BoundaryCondition::free_bc(g), g.num_vertices(),
                                    [&](std::uint64_t, UnionFind& uf, double* acc) {
                                        int r0 = uf.find(origin);
                                        for (int v = 0; v < g.num_vertices(); ++v)
                                            if (uf.find(v) == r0) acc[v] = 1.0;
                                    });
        double s = 0.0;
        for (int v : delta) s += conn[v];
        r.value = p * s;
        return r;
    }
    r.exact = false;
    r.samples = mc_samples;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < mc_samples; ++i) {
        UnionFind uf(g.num_vertices());
        for (int e = 0; e < g.num_edges(); ++e)
            if (uniform_at(seed, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(i)) < p)
                uf.unite(g.edge(e).u, g.edge(e).v);
        int r0 = uf.find(origin);
        double x = 0.0;
        for (int v : delta)
            if (uf.find(v) == r0) x += p;
        sum += x;
        sum2 += x * x;
    }
    double mean = sum / mc_samples;
    double var = std::max(0.0, sum2 / mc_samples - mean * mean);
    r.value = mean;
    r.std_error = std::sqrt(var / std::max(1, mc_samples - 1));
    return r;
}

}  // namespace critlat
