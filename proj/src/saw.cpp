#include "critlat/saw.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "critlat/parallel.hpp"

namespace critlat {

namespace {

int floor_mod(int a, int m) { return ((a % m) + m) % m; }

bool is_type_a(HexPoint p) { return floor_mod(p.X, 3) == 1 && floor_mod((p.X - 1) / 3 + p.Y, 2) == 0; }

const int kStepX[6] = {2, 1, -1, -2, -1, 1};
const int kStepY[6] = {0, 1, 1, 0, -1, -1};

}  // namespace

std::complex<double> hex_position(HexPoint p) { return {p.X / 2.0, std::sqrt(3.0) / 2.0 * p.Y}; }

bool hex_is_vertex(HexPoint p) { return is_type_a(p) || is_type_a({p.X - 1, p.Y - 1}); }

std::array<HexPoint, 3> hex_neighbors(HexPoint v) {
    if (is_type_a(v)) return {HexPoint{v.X - 2, v.Y}, HexPoint{v.X + 1, v.Y + 1}, HexPoint{v.X + 1, v.Y - 1}};
    if (!hex_is_vertex(v)) throw std::invalid_argument("not a vertex of the hexagonal lattice");
    return {HexPoint{v.X + 2, v.Y}, HexPoint{v.X - 1, v.Y + 1}, HexPoint{v.X - 1, v.Y - 1}};
}

int hex_direction(HexPoint v, HexPoint u) {
    for (int d = 0; d < 6; ++d)
        if (u.X - v.X == kStepX[d] && u.Y - v.Y == kStepY[d]) return d;
    throw std::invalid_argument("points are not adjacent");
}

// ---------------------------------------------------------------------------
// whole-lattice counts

namespace {

struct LatticeWalker {
    int n_max, off, width;
    std::vector<char> seen;
    std::vector<std::uint64_t> c, b;
    int x0 = 0;

    explicit LatticeWalker(int n) : n_max(n), off(2 * n + 4), width(4 * n + 9), seen(width * width, 0), c(n + 1, 0), b(n + 1, 0) {}
    char& at(HexPoint p) { return seen[(p.X + off) * width + (p.Y + off)]; }

    void walk(HexPoint v, int n, bool bridge, int max_x) {
        ++c[n];
        if (bridge && v.X >= max_x) ++b[n];
        if (n == n_max) return;
        at(v) = 1;
        for (HexPoint u : hex_neighbors(v)) {
            if (at(u)) continue;
            bool br = bridge && u.X > x0;
            walk(u, n + 1, br, std::max(max_x, u.X));
        }
        at(v) = 0;
    }
};

}  // namespace

SawCounts saw_counts(int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
    if (n_max > kSawCountCap)
        throw std::invalid_argument("n_max " + std::to_string(n_max) + " exceeds the enumeration cap " +
                                    std::to_string(kSawCountCap));
    LatticeWalker w(n_max);
    HexPoint start{-1, 0};  // horizontal edge to the east
    w.x0 = start.X;
    w.walk(start, 0, true, start.X);
    return {w.c, w.b};
}

// ---------------------------------------------------------------------------
// strip

HexDomain::HexDomain(int T, int L) : T_(T), L_(L) {
    if (T < 0 || L < 0) throw std::invalid_argument("T and L must be nonnegative");
    auto inside = [&](HexPoint p) { return 0 <= p.X && p.X <= 3 * T && 3 * std::abs(p.Y) <= 6 * L + 3 + p.X; };
    const int ymax = 2 * L + T + 2;
    std::map<HexPoint, int> vid;
    for (int X = 0; X <= 3 * T; ++X)
        for (int Y = -ymax; Y <= ymax; ++Y) {
            HexPoint p{X, Y};
            if (hex_is_vertex(p) && inside(p)) {
                vid[p] = static_cast<int>(verts_.size());
                verts_.push_back(p);
            }
        }
    std::map<HexPoint, int> mid_id;
    auto add_mid = [&](HexPoint m, MidClass c) {
        auto [it, fresh] = mid_id.emplace(m, static_cast<int>(mids_.size()));
        if (fresh) {
            mids_.push_back(m);
            cls_.push_back(c);
        }
        return it->second;
    };
    a_ = add_mid({0, 0}, MidClass::alpha);
    const int n = static_cast<int>(verts_.size());
    nb_.resize(n);
    mid_.resize(n);
    dir_.resize(n);
    for (int v = 0; v < n; ++v) {
        auto nbs = hex_neighbors(verts_[v]);
        for (int j = 0; j < 3; ++j) {
            HexPoint u = nbs[j];
            int d = hex_direction(verts_[v], u);
            auto it = vid.find(u);
            MidClass c = MidClass::interior;
            if (it == vid.end()) {
                // leaving S: west, east, north-west or south-west
                if (d == 3) c = MidClass::alpha;
                else if (d == 0) c = MidClass::beta;
                else if (d == 2) c = MidClass::epsilon;
                else if (d == 4) c = MidClass::epsilon_bar;
                else throw std::logic_error("strip boundary edge in an unexpected direction");
            }
            nb_[v][j] = it == vid.end() ? -1 : it->second;
            mid_[v][j] = add_mid({verts_[v].X + u.X, verts_[v].Y + u.Y}, c);
            dir_[v][j] = d;
        }
    }
    if (T > 0) start_ = vid.at({1, 0});
}

namespace {

struct StripTally {
    std::array<std::vector<std::uint64_t>, 4> cnt;  // alpha, beta, epsilon, epsilon_bar
    std::uint64_t walks = 0;
};

struct StripWalker : StripTally {
    const HexDomain& dom;
    std::vector<char> seen;
    std::vector<std::array<int, 3>> nb, slot;  // slot: class index, -1 interior, -2 the mid-edge a

    explicit StripWalker(const HexDomain& d) : dom(d), seen(d.vertices().size(), 0) {
        const int n = static_cast<int>(d.vertices().size());
        for (auto& c : cnt) c.assign(n + 2, 0);
        nb.resize(n);
        slot.resize(n);
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < 3; ++j) {
                nb[v][j] = d.neighbor(v, j);
                int m = d.mid_at(v, j);
                slot[v][j] = m == d.a() ? -2 : static_cast<int>(d.mid_class(m)) - 1;
            }
    }

    // v has just been entered as the k-th vertex; prev is the vertex before it or -1
    void visit(int v, int k, int prev) {
        seen[v] = 1;
        for (int j = 0; j < 3; ++j) {
            int u = nb[v][j];
            if (u == prev && u >= 0) continue;
            if (slot[v][j] == -2) continue;
            ++walks;
            if (slot[v][j] >= 0) ++cnt[slot[v][j]][k];
        }
    }
    void dfs(int v, int k, int prev) {
        visit(v, k, prev);
        for (int j = 0; j < 3; ++j) {
            int u = nb[v][j];
            if (u >= 0 && !seen[u]) dfs(u, k + 1, v);
        }
        seen[v] = 0;
    }
};

}  // namespace

StripCounts strip_counts(int T, int L) {
    HexDomain dom(T, L);
    StripCounts out;
    out.T = T;
    out.L = L;
    const std::size_t len = dom.vertices().size() + 2;
    out.alpha.assign(len, 0);
    out.beta.assign(len, 0);
    out.epsilon.assign(len, 0);
    out.epsilon_bar.assign(len, 0);
    out.walks = 1;  // the empty walk at a
    if (T == 0) {
        out.beta[0] = 1;  // a is also the right boundary
        return out;
    }
    // Walks leaving the first vertex upwards; the rest follow by reflection in the real axis.
    const int v0 = dom.start_vertex();
    int up = -1;
    for (int j = 0; j < 3; ++j)
        if (dom.direction(v0, j) == 1) up = dom.neighbor(v0, j);
    StripWalker probe(dom);
    probe.visit(v0, 1, -1);
    std::uint64_t first_walks = probe.walks;  // walks ending next to v0
    for (int c = 0; c < 4; ++c)
        if (probe.cnt[c][1]) throw std::logic_error("first vertex touches the strip boundary");

    std::vector<std::vector<int>> prefixes;
    if (up >= 0) {
        // expand a frontier of paths v0, up, ... so that the subtrees can run in parallel
        StripWalker head(dom);
        std::vector<std::vector<int>> frontier{{v0, up}};
        while (frontier.size() < 512) {
            std::vector<std::vector<int>> next;
            bool grew = false;
            for (const auto& path : frontier) {
                std::fill(head.seen.begin(), head.seen.end(), 0);
                for (int v : path) head.seen[v] = 1;
                int v = path.back();
                for (int j = 0; j < 3; ++j) {
                    int u = dom.neighbor(v, j);
                    if (u >= 0 && !head.seen[u]) {
                        next.push_back(path);
                        next.back().push_back(u);
                        grew = true;
                    }
                }
            }
            if (!grew) break;
            // paths that stop growing still contribute their end events; visit them here
            for (const auto& path : frontier) {
                std::fill(head.seen.begin(), head.seen.end(), 0);
                for (std::size_t i = 0; i + 1 < path.size(); ++i) head.seen[path[i]] = 1;
                head.visit(path.back(), static_cast<int>(path.size()), path[path.size() - 2]);
            }
            frontier = std::move(next);
        }
        prefixes = std::move(frontier);
        auto parts = chunked_map<StripTally>(prefixes.size(), [&](std::uint64_t lo, std::uint64_t hi) {
            StripWalker w(dom);
            for (std::uint64_t i = lo; i < hi; ++i) {
                const auto& path = prefixes[i];
                std::fill(w.seen.begin(), w.seen.end(), 0);
                for (std::size_t s = 0; s + 1 < path.size(); ++s) w.seen[path[s]] = 1;
                w.dfs(path.back(), static_cast<int>(path.size()), path[path.size() - 2]);
            }
            return static_cast<StripTally>(w);
        });
        parts.push_back(static_cast<StripTally>(head));
        std::array<std::vector<std::uint64_t>, 4> tot;
        for (auto& t : tot) t.assign(len, 0);
        std::uint64_t up_walks = 0;
        for (const auto& p : parts) {
            up_walks += p.walks;
            for (int c = 0; c < 4; ++c)
                for (std::size_t k = 0; k < len; ++k) tot[c][k] += p.cnt[c][k];
        }
        for (std::size_t k = 0; k < len; ++k) {
            out.alpha[k] = 2 * tot[0][k];
            out.beta[k] = 2 * tot[1][k];
            out.epsilon[k] = out.epsilon_bar[k] = tot[2][k] + tot[3][k];
        }
        out.walks += 2 * up_walks;
    }
    out.walks += first_walks;
    return out;
}

SawStripQuantities strip_quantities(const StripCounts& counts, double x) {
    SawStripQuantities s;
    s.x = x;
    s.walks = counts.walks;
    for (std::size_t k = 0; k < counts.alpha.size(); ++k) {
        double w = std::pow(x, static_cast<double>(k));
        s.A += w * static_cast<double>(counts.alpha[k]);
        s.B += w * static_cast<double>(counts.beta[k]);
        s.E += w * static_cast<double>(counts.epsilon[k] + counts.epsilon_bar[k]);
        if (counts.alpha[k] || counts.beta[k] || counts.epsilon[k] || counts.epsilon_bar[k])
            s.max_length = static_cast<int>(k);
    }
    return s;
}

SawStripQuantities strip_quantities(int T, int L, double x) { return strip_quantities(strip_counts(T, L), x); }

double identity_residual(const SawStripQuantities& s) {
    return std::abs(std::cos(3 * M_PI / 8) * s.A + s.B + std::cos(M_PI / 4) * s.E - 1.0);
}

// ---------------------------------------------------------------------------
// observable

namespace {

struct TableWalker {
    const HexDomain& dom;
    WalkTable& t;
    std::vector<char> seen;

    void dfs(int v, int k, int prev, int dir_in, int wind) {
        seen[v] = 1;
        for (int j = 0; j < 3; ++j) {
            int u = dom.neighbor(v, j);
            if (u == prev && u >= 0) continue;
            int m = dom.mid_at(v, j);
            if (m == dom.a()) continue;
            int turn = floor_mod(dom.direction(v, j) - dir_in, 6) == 1 ? 1 : -1;
            ++t.by_mid[m][{wind + turn, k}];
            if (u >= 0 && !seen[u]) dfs(u, k + 1, v, dom.direction(v, j), wind + turn);
        }
        seen[v] = 0;
    }
};

}  // namespace

WalkTable walk_table(const HexDomain& dom) {
    WalkTable t;
    t.by_mid.resize(dom.mid_edges().size());
    t.by_mid[dom.a()][{0, 0}] = 1;
    if (dom.start_vertex() < 0) return t;
    TableWalker w{dom, t, std::vector<char>(dom.vertices().size(), 0)};
    w.dfs(dom.start_vertex(), 1, -1, 0, 0);
    return t;
}

std::vector<std::complex<double>> saw_observable(const HexDomain& dom, const WalkTable& t, double x, double sigma) {
    std::vector<std::complex<double>> F(dom.mid_edges().size(), 0.0);
    for (std::size_t m = 0; m < F.size(); ++m)
        for (const auto& [key, n] : t.by_mid[m]) {
            auto [w, k] = key;
            F[m] += static_cast<double>(n) * std::pow(x, k) * std::exp(std::complex<double>(0, -sigma * M_PI / 3 * w));
        }
    return F;
}

double saw_vertex_relation(const HexDomain& dom, const std::vector<std::complex<double>>& F) {
    double worst = 0.0;
    for (int v = 0; v < static_cast<int>(dom.vertices().size()); ++v) {
        std::complex<double> s = 0.0;
        auto pv = hex_position(dom.vertices()[v]);
        for (int j = 0; j < 3; ++j) {
            HexPoint m = dom.mid_edges()[dom.mid_at(v, j)];
            s += (hex_position(m) / 2.0 - pv) * F[dom.mid_at(v, j)];
        }
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

double saw_vertex_relation(const HexDomain& dom, double x, double sigma) {
    return saw_vertex_relation(dom, saw_observable(dom, walk_table(dom), x, sigma));
}

}  // namespace critlat
