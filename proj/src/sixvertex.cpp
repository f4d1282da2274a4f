#include "critlat/sixvertex.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "critlat/oracle.hpp"

namespace critlat {

double vertex_weight(int b, int l, int t, int r, double c) {
    if (b + l != t + r) return 0.0;
    return b != t ? c : 1.0;
}

double six_vertex_c(double q) { return std::sqrt(2.0 + std::sqrt(q)); }

TransferMatrix::TransferMatrix(int N, double c) : N_(N), c_(c) {
    if (N < 1 || N > kTransferMaxN)
        throw std::invalid_argument("transfer matrix needs 1 <= N <= " + std::to_string(kTransferMaxN));
}

double TransferMatrix::entry(std::uint32_t s, std::uint32_t t) const {
    const int w = width();
    double total = 0.0;
    for (int l0 = 0; l0 < 2; ++l0) {
        int l = l0;
        double prod = 1.0;
        for (int j = 0; j < w && prod != 0.0; ++j) {
            int b = (s >> j) & 1, tt = (t >> j) & 1;
            int r = b + l - tt;
            if (r < 0 || r > 1) {
                prod = 0.0;
                break;
            }
            prod *= vertex_weight(b, l, tt, r, c_);
            l = r;
        }
        if (prod != 0.0 && l == l0) total += prod;
    }
    return total;
}

void TransferMatrix::apply(const std::vector<double>& in, std::vector<double>& out) const {
    const int w = width();
    const std::uint32_t dim = dimension();
    out.assign(dim, 0.0);
    std::vector<double> a[2], nxt[2];
    for (int l0 = 0; l0 < 2; ++l0) {
        a[l0] = in;
        a[1 - l0].assign(dim, 0.0);
        // bits below j already hold top arrows, bits from j on still the bottom ones
        for (int j = 0; j < w; ++j) {
            nxt[0].assign(dim, 0.0);
            nxt[1].assign(dim, 0.0);
            const std::uint32_t bit = 1u << j;
            for (int l = 0; l < 2; ++l)
                for (std::uint32_t x = 0; x < dim; ++x) {
                    double v = a[l][x];
                    if (v == 0.0) continue;
                    int b = (x & bit) ? 1 : 0;
                    for (int t = 0; t < 2; ++t) {
                        int r = b + l - t;
                        if (r < 0 || r > 1) continue;
                        std::uint32_t y = t ? (x | bit) : (x & ~bit);
                        nxt[r][y] += v * (b != t ? c_ : 1.0);
                    }
                }
            std::swap(a[0], nxt[0]);
            std::swap(a[1], nxt[1]);
        }
        for (std::uint32_t x = 0; x < dim; ++x) out[x] += a[l0][x];
    }
}

std::vector<std::uint32_t> TransferMatrix::sector_states(int arrows) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < dimension(); ++s)
        if (__builtin_popcount(s) == arrows) out.push_back(s);
    return out;
}

Eigen::MatrixXd TransferMatrix::block(int arrows) const {
    auto states = sector_states(arrows);
    const int n = static_cast<int>(states.size());
    Eigen::MatrixXd B(n, n);
    std::vector<double> e(dimension(), 0.0), out;
    for (int i = 0; i < n; ++i) {
        e[states[i]] = 1.0;
        apply(e, out);
        e[states[i]] = 0.0;
        for (int k = 0; k < n; ++k) B(i, k) = out[states[k]];
    }
    return B;
}

Eigen::MatrixXd TransferMatrix::dense() const {
    if (N_ > 4) throw std::invalid_argument("dense transfer matrix only for N <= 4");
    const int n = static_cast<int>(dimension());
    Eigen::MatrixXd V(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) V(s, t) = entry(s, t);
    return V;
}

// ---------------------------------------------------------------------------

namespace {

// Vertices (k, j), k < M rows, j < 2N columns. Vertical edge (k, j) sits above
// vertex (k, j) (so below vertex (k + 1, j)); horizontal edge (k, j) sits to its right.
struct IceSearch {
    int M, W;
    double c;
    int sector;
    std::vector<int> vert, horiz;  // -1 unset
    double total = 0.0;

    int& V(int k, int j) { return vert[((k % M + M) % M) * W + (j % W + W) % W]; }
    int& H(int k, int j) { return horiz[((k % M + M) % M) * W + (j % W + W) % W]; }

    // weight of vertex (k, j) or -1 if some arrow is still unset
    double weight(int k, int j) {
        int b = V(k - 1, j), t = V(k, j), l = H(k, j - 1), r = H(k, j);
        if (b < 0 || t < 0 || l < 0 || r < 0) return -1.0;
        return vertex_weight(b, l, t, r, c);
    }

    // edges in order: for each vertex (k, j) row-major, its top then right edge
    void go(int idx, double w) {
        if (idx == 2 * M * W) {
            if (sector >= 0) {
                int up = 0;
                for (int j = 0; j < W; ++j) up += V(0, j);
                if (up != sector) return;
            }
            total += w;
            return;
        }
        int cell = idx / 2, k = cell / W, j = cell % W;
        int& slot = (idx % 2 == 0) ? V(k, j) : H(k, j);
        for (int a = 0; a < 2; ++a) {
            slot = a;
            // vertices whose four arrows may have just become complete
            double ww = w;
            bool dead = false;
            const int cand[3][2] = {{k, j}, {k + 1, j}, {k, j + 1}};
            for (const auto& cv : cand) {
                int kk = cv[0], jj = cv[1];
                // only score a vertex once: when its last edge in the order is set
                int last = -1;
                auto order = [&](int ek, int ej, int kind) {
                    ek = (ek % M + M) % M;
                    ej = (ej % W + W) % W;
                    return 2 * (ek * W + ej) + kind;
                };
                last = std::max({order(kk - 1, jj, 0), order(kk, jj, 0), order(kk, jj - 1, 1), order(kk, jj, 1)});
                if (last != idx) continue;
                double vw = weight(kk, jj);
                if (vw == 0.0) {
                    dead = true;
                    break;
                }
                ww *= vw;
            }
            if (!dead) go(idx + 1, ww);
        }
        slot = -1;
    }
};

}  // namespace

double brute_force_Z(int N, int M, double c, int sector) {
    if (N < 1 || M < 1) throw std::invalid_argument("brute force needs N, M >= 1");
    if (4 * N * M > 48) throw std::invalid_argument("brute force limited to 4NM <= 48 edges");
    IceSearch s{M, 2 * N, c, sector, std::vector<int>(2 * N * M, -1), std::vector<int>(2 * N * M, -1)};
    s.go(0, 1.0);
    return s.total;
}

SectorTraces sector_traces(int N, int M, double c) {
    if (M < 1) throw std::invalid_argument("sector traces need M >= 1");
    TransferMatrix V(N, c);
    SectorTraces out;
    out.by_sector.assign(2 * N + 1, 0.0);
    for (int k = 0; k <= 2 * N; ++k) {
        Eigen::MatrixXd B = V.block(k);
        Eigen::MatrixXd P = B;
        for (int i = 1; i < M; ++i) P = P * B;
        out.by_sector[k] = P.trace();
        out.Z += out.by_sector[k];
    }
    out.Z_tilde = out.by_sector[N - 1];
    out.Z_bar = out.by_sector[N + 1];
    return out;
}

double leading_eigenvalue(const TransferMatrix& V, int arrows) {
    Eigen::MatrixXd B = V.block(arrows);
    Eigen::EigenSolver<Eigen::MatrixXd> es(B, false);
    double best = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
    return best;
}

double spectral_rate(int N, int M, double c) {
    if (N < 1) throw std::invalid_argument("spectral rate needs N >= 1");
    TransferMatrix V(N, c);
    std::vector<Eigen::VectorXcd> spectra;
    double top = 0.0;
    for (int k = 0; k <= 2 * N; ++k) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(V.block(k), false);
        spectra.push_back(es.eigenvalues());
        for (int i = 0; i < spectra.back().size(); ++i) top = std::max(top, std::abs(spectra.back()[i]));
    }
    if (M == 0) {
        double sub = 0.0;
        for (int i = 0; i < spectra[N - 1].size(); ++i) sub = std::max(sub, std::abs(spectra[N - 1][i]));
        return std::log(top / sub);
    }
    double z = 0.0, zt = 0.0;
    for (int k = 0; k <= 2 * N; ++k)
        for (int i = 0; i < spectra[k].size(); ++i) {
            double term = std::pow(spectra[k][i] / top, M).real();
            z += term;
            if (k == N - 1) zt += term;
        }
    return -std::log(zt / z) / M;
}

double rate_lambda(double q) {
    if (!(q > 4.0)) throw std::invalid_argument("closed-form rate needs q > 4 (lambda undefined otherwise)");
    return std::acosh(std::sqrt(q) / 2.0);
}

double closed_form_rate(double q) {
    const double lam = rate_lambda(q);
    if (lam < M_PI / 2) {
        // modular side: nome y = exp(-pi^2 / (2 lambda)) <= exp(-pi)
        const double y = std::exp(-M_PI * M_PI / (2 * lam));
        double s3 = 0.0, s4 = 0.0;
        for (int n = 1; n < 64; ++n) {
            double t = std::pow(y, static_cast<double>(n) * n);
            if (t == 0.0) break;
            s3 += t;
            s4 += (n % 2 ? -t : t);
        }
        return 2.0 * (std::log1p(2 * s3) - std::log1p(2 * s4));
    }
    const double x = std::exp(-2 * lam);
    double s3 = 0.0, s2 = 0.0;
    for (int n = 0; n < 64; ++n) {
        double t2 = std::pow(x, static_cast<double>(n) * (n + 1));
        double t3 = n ? std::pow(x, static_cast<double>(n) * n) : 0.0;
        s2 += t2;
        s3 += t3;
        if (t2 == 0.0) break;
    }
    // theta2 = 2 x^(1/4) s2, theta3 = 1 + 2 s3
    return 2.0 * (std::log1p(2 * s3) - std::log(2 * s2) + lam / 2);
}

double closed_form_rate_series(double q) {
    const double lam = rate_lambda(q);
    double sum = 0.0;
    for (int j = 1; j < 1 << 20; ++j) {
        double term = std::log1p(std::exp(-2.0 * j * lam));
        sum += (j % 2 ? 4.0 : -4.0) * term;
        // alternating with decreasing terms: the remainder is below the next term
        if (4.0 * std::log1p(std::exp(-2.0 * (j + 1) * lam)) < 1e-17) break;
    }
    return lam - 2 * std::log(2.0) + sum;
}

// ---------------------------------------------------------------------------
// torus

Torus::Torus(int N, int M) : N_(N), M_(M) {
    if (N < 1 || M < 1) throw std::invalid_argument("torus needs N, M >= 1");
    if (N % 2 || M % 2) throw std::invalid_argument("the torus correspondence needs N and M even");
}

namespace {

struct Lift {
    int du = 0, dv = 0;
};

// clusters of a graph on the torus, with the winding vectors of their cycles
struct WindingClusters {
    int count = 0, noncontractible = 0, u_winding = 0;
};

WindingClusters winding_clusters(int n, const std::vector<std::array<int, 4>>& edges, int M, int W, bool reverse) {
    // edges: {a, b, du, dv}: b's lift = a's lift + (du, dv)
    std::vector<std::vector<std::array<int, 3>>> adj(n);
    for (const auto& e : edges) {
        adj[e[0]].push_back({e[1], e[2], e[3]});
        adj[e[1]].push_back({e[0], -e[2], -e[3]});
    }
    if (reverse)
        for (auto& a : adj) std::reverse(a.begin(), a.end());
    std::vector<char> seen(n, 0);
    std::vector<Lift> lift(n);
    WindingClusters out;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (reverse) std::reverse(order.begin(), order.end());
    for (int s : order) {
        if (seen[s]) continue;
        ++out.count;
        bool nc = false, uw = false;
        seen[s] = 1;
        lift[s] = {};
        std::vector<int> st{s};
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (const auto& [y, du, dv] : adj[x]) {
                Lift ly{lift[x].du + du, lift[x].dv + dv};
                if (!seen[y]) {
                    seen[y] = 1;
                    lift[y] = ly;
                    st.push_back(y);
                } else {
                    int wu = ly.du - lift[y].du, wv = ly.dv - lift[y].dv;
                    if (wu % M || wv % W) throw std::logic_error("torus lift is inconsistent");
                    if (wu || wv) nc = true;
                    if (wu) uw = true;
                }
            }
        }
        out.noncontractible += nc;
        out.u_winding += uw;
    }
    return out;
}

}  // namespace

TorusConfig Torus::analyse(std::uint64_t open_mask, bool reverse_order) const {
    const int M = M_, W = 2 * N_;
    auto idx = [&](int u, int v) {
        u = ((u % M) + M) % M;
        v = ((v % W) + W) % W;
        return u * N_ + v / 2;
    };
    std::vector<std::array<int, 4>> pe, de;
    for (int u = 0; u < M; ++u)
        for (int i = 0; i < N_; ++i) {
            int v = 2 * i + (u % 2);
            for (int k = 0; k < 2; ++k) {
                int e = 2 * idx(u, v) + k;
                int dv = k == 0 ? 1 : -1;
                if ((open_mask >> e) & 1) {
                    pe.push_back({idx(u, v), idx(u + 1, v + dv), 1, dv});
                } else if (dv == 1) {
                    de.push_back({idx(u + 1, v), idx(u, v + 1), -1, 1});
                } else {
                    de.push_back({idx(u, v - 1), idx(u + 1, v), 1, 1});
                }
            }
        }
    TorusConfig out;
    WindingClusters pc = winding_clusters(num_vertices(), pe, M, W, reverse_order);
    WindingClusters dc = winding_clusters(num_vertices(), de, M, W, reverse_order);
    out.clusters = pc.count;
    out.noncontractible = pc.noncontractible;
    out.dual_all_contractible = dc.noncontractible == 0;
    out.primal_u_winding = pc.u_winding;
    out.dual_u_winding = dc.u_winding;

    // Medial lattice: vertices at (mu + 1/2, mv + 1/2); edge h(mu, mv) goes +u to
    // (mu + 1, mv), edge v(mu, mv) goes +v. End 0 is the tail, end 1 the head.
    const int nme = 2 * M * W;
    auto hid = [&](int a, int b) { return ((a % M + M) % M) * W + (b % W + W) % W; };
    auto vid = [&](int a, int b) { return M * W + hid(a, b); };
    std::vector<int> pair(2 * nme, -1);
    auto link = [&](int x, int y) {
        pair[x] = y;
        pair[y] = x;
    };
    for (int u = 0; u < M; ++u)
        for (int i = 0; i < N_; ++i) {
            int v = 2 * i + (u % 2);
            for (int k = 0; k < 2; ++k) {
                int e = 2 * idx(u, v) + k;
                bool open = (open_mask >> e) & 1;
                int dv = k == 0 ? 1 : -1;
                int mu = u, mv = dv == 1 ? v : v - 1;
                int Uo = 2 * hid(mu, mv), Ui = 2 * hid(mu - 1, mv) + 1;
                int Vo = 2 * vid(mu, mv), Vi = 2 * vid(mu, mv - 1) + 1;
                // an open edge separates the strands on its two sides
                if ((dv == 1) == open) {
                    link(Uo, Vi);
                    link(Ui, Vo);
                } else {
                    link(Uo, Vo);
                    link(Ui, Vi);
                }
            }
        }
    std::vector<char> used(nme, 0);
    for (int s = 0; s < nme; ++s) {
        if (used[s]) continue;
        ++out.loops;
        int cur = s, end = 1;
        long du = 0, dv = 0;
        while (true) {
            used[cur] = 1;
            int sgn = end == 1 ? 1 : -1;
            if (cur < M * W) du += sgn;
            else dv += sgn;
            int nx = pair[2 * cur + end];
            cur = nx / 2;
            end = 1 - nx % 2;
            if (cur == s && end == 1) break;
        }
        if (du % M || dv % W) throw std::logic_error("medial loop does not close on the torus");
        if (du || dv) out.loop_u.push_back(static_cast<int>(du / M));
    }
    return out;
}

Rc6vReport rc6v_verify(int N, int M, double q) {
    Torus torus(N, M);
    if (torus.num_edges() > kTorusEdgeCap)
        throw std::invalid_argument("torus has " + std::to_string(torus.num_edges()) + " edges, above the enumeration cap " +
                                    std::to_string(kTorusEdgeCap));
    if (!(q > 0)) throw std::invalid_argument("q must be positive");
    Rc6vReport rep;
    rep.N = N;
    rep.M = M;
    rep.q = q;
    rep.p = p_self_dual(q);
    rep.c = six_vertex_c(q);
    const int ne = torus.num_edges();
    const double sq = std::sqrt(q), p = rep.p;
    const std::uint64_t total = std::uint64_t{1} << ne;
    rep.configurations = total;

    SectorTraces tr = sector_traces(N, M, rep.c);
    rep.Z6v = tr.Z;
    rep.sectors = tr.by_sector;
    rep.sectors_loops.assign(2 * N + 1, 0.0);

    double zrc = 0.0, a = 0.0, knc = 0.0, ex_l = 0.0, ex_r = 0.0;
    double air_min = INFINITY, air_max = 0.0;
    for (std::uint64_t m = 0; m < total; ++m) {
        TorusConfig t = torus.analyse(m);
        TorusConfig t2 = torus.analyse(m, true);
        if (t.noncontractible != t2.noncontractible || t.primal_u_winding != t2.primal_u_winding ||
            t.dual_u_winding != t2.dual_u_winding || t.dual_all_contractible != t2.dual_all_contractible)
            rep.homology_consistent = false;
        int o = __builtin_popcountll(m);
        double w = std::pow(p, o) * std::pow(1 - p, ne - o) * std::pow(q, t.clusters);
        zrc += w;
        const int l0 = static_cast<int>(t.loop_u.size());
        const int s = t.dual_all_contractible ? 1 : 0;
        double air = std::pow(sq, t.loops + 2 * s) / w;
        air_min = std::min(air_min, air);
        air_max = std::max(air_max, air);
        // orientations of the non-contractible loops by net +u crossings
        std::vector<double> ways(4 * N + 1, 0.0);  // index: sum + 2N
        ways[2 * N] = 1.0;
        for (int uw : t.loop_u) {
            std::vector<double> nx(ways.size(), 0.0);
            for (int i = 0; i < static_cast<int>(ways.size()); ++i) {
                if (ways[i] == 0.0) continue;
                for (int sg : {1, -1}) {
                    int j = i + sg * uw;
                    if (j < 0 || j >= static_cast<int>(ways.size()))
                        throw std::logic_error("loop winding exceeds the row width");
                    nx[j] += ways[i];
                }
            }
            ways = std::move(nx);
        }
        double contract = std::pow(sq, t.loops - l0);
        for (int k = 0; k <= 2 * N; ++k) rep.sectors_loops[k] += ways[2 * k] * contract;
        rep.Z6v_loops += std::pow(2.0, l0) * contract;
        if (t.in_A()) a += w;
        knc += w * std::pow(4.0 / q, t.noncontractible);
        double n_minus2 = ways[2 * N - 2];
        ex_l += w * n_minus2 * std::pow(q, 1.0 - l0 / 2.0);
        ex_r += w * std::pow(4.0 / q, l0 / 2.0) * std::pow(q, -s);
    }
    rep.air_spread = (air_max - air_min) / air_max;
    const double ratio = tr.Z_tilde / tr.Z;
    rep.phi_A = a / zrc;
    rep.stated_rhs = q * ratio * knc / zrc;
    rep.stated_gap = std::abs(rep.phi_A - rep.stated_rhs) / rep.stated_rhs;
    rep.exact_lhs = ex_l / zrc;
    rep.exact_rhs = q * ratio * ex_r / zrc;
    rep.exact_gap = std::abs(rep.exact_lhs - rep.exact_rhs) / rep.exact_rhs;
    return rep;
}

}  // namespace critlat
