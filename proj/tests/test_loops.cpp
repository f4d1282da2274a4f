#include <doctest.h>

#include <random>

#include "critlat/loops.hpp"
#include "critlat/rng.hpp"
#include "support.hpp"

using namespace critlat;

namespace {

DobrushinDomain domain(const std::string& name) { return load_domain_file(support::fixture_path("domains/" + name)); }

const char* kDomains[] = {"square.txt", "rect.txt", "lshape.txt", "degenerate.txt"};

std::vector<int> edges_at(const DobrushinDomain& d, const std::vector<std::pair<Point, int>>& seq) {
    std::vector<int> out;
    for (const auto& [p, k] : seq) out.push_back(d.medial_edge_at(d.graph().index_of(p), k));
    return out;
}

// F by direct summation over the flood-fill FK law, one loop decomposition per configuration
std::vector<cplx> observable_oracle(const DobrushinDomain& d, double p, double q) {
    const LatticeGraph& g = d.graph();
    auto law = support::fk_law(g, p, q, BoundaryCondition::wired_arc(g, d.arc_ba()));
    cplx sigma = observable_spin(q);
    std::vector<cplx> F(d.medial_edges().size(), 0.0);
    for (std::size_t m = 0; m < law.size(); ++m) {
        LoopConfig lc = loop_encode(PercolationConfig::from_mask(m, g.num_edges()), d);
        for (int e : lc.exploration) F[e] += law[m] * std::exp(cplx(0, 1) * sigma * winding(lc, e, d.e_b()));
    }
    return F;
}

}  // namespace

TEST_CASE("medial construction on the unit square") {
    DobrushinDomain d = domain("square.txt");
    const LatticeGraph& g = d.graph();
    CHECK(g.num_edges() == 3);
    CHECK(d.ba_edges().size() == 1);
    CHECK(d.arc_ba().size() == 2);
    CHECK(d.medial_vertices().size() == 8);
    CHECK(d.medial_edges().size() == 12);
    CHECK(d.contracted_vertex_count() == 3);
    CHECK(d.e_a() == d.medial_edge_at(g.index_of({1, 0, 0}), 0));
    CHECK(d.e_b() == d.medial_edge_at(g.index_of({0, 0, 0}), 1));
    CHECK(std::abs(d.medial_edges()[d.e_b()].dir - 1.0) < 1e-15);
    CHECK(d.medial_edges()[d.e_a()].tail == -1);
    CHECK(d.medial_edges()[d.e_b()].head == -1);
    for (const auto& e : d.medial_edges()) {
        cplx z = e.dir;
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-14);
        CHECK(std::min(std::abs(z.real()), std::abs(z.imag())) < 1e-14);
    }
}

TEST_CASE("degenerate domain enters and exits around the origin") {
    DobrushinDomain d = domain("degenerate.txt");
    const LatticeGraph& g = d.graph();
    int o = g.index_of({0, 0, 0});
    CHECK(d.a() == o);
    CHECK(d.b() == o);
    CHECK(d.arc_ba() == std::vector<int>{o});
    // north-west and south-east quarter turns around 0
    CHECK(d.e_a() == d.medial_edge_at(o, 1));
    CHECK(d.e_b() == d.medial_edge_at(o, 3));
}

TEST_CASE("medial degrees") {
    for (const char* name : kDomains) {
        DobrushinDomain d = domain(name);
        for (int v = 0; v < static_cast<int>(d.medial_vertices().size()); ++v) {
            CHECK((d.degree(v) == 2 || d.degree(v) == 4));
            if (d.medial_vertices()[v].edge >= 0 && !d.medial_vertices()[v].primal_boundary) {
                // a free edge away from the boundary crosses four medial edges
                const auto& m = d.medial_vertices()[v];
                bool interior = !d.graph().is_boundary(d.graph().index_of(m.x)) &&
                                !d.graph().is_boundary(d.graph().index_of(m.y));
                if (interior) CHECK(d.degree(v) == 4);
            }
        }
    }
    for (std::uint64_t s = 0; s < 40; ++s) {
        DobrushinDomain d = random_domain(20, s);
        for (int v = 0; v < static_cast<int>(d.medial_vertices().size()); ++v) {
            // (ba) midpoints between two faces outside the dual domain are isolated
            if (d.medial_vertices()[v].primal_boundary && d.degree(v) == 0) continue;
            CHECK((d.degree(v) == 2 || d.degree(v) == 4));
        }
    }
}

TEST_CASE("malformed domains are rejected") {
    std::vector<Point> ring;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            if (x != 1 || y != 1) ring.push_back({x, y, 0});
    LatticeGraph r = LatticeGraph::induced(2, ring);
    CHECK_THROWS_WITH(medial_domain(r, 0, 1), doctest::Contains("not connected"));

    LatticeGraph kiss = LatticeGraph::induced(2, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {2, 1, 0}, {0, 2, 0}, {2, 2, 0}, {1, 3, 0}, {0, 3, 0}});
    CHECK_THROWS_WITH(medial_domain(kiss, 0, 1), doctest::Contains("pinched"));

    // (ba) running all the way around a unit face
    LatticeGraph sq = LatticeGraph::induced(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 0, 0}});
    CHECK_THROWS_WITH(medial_domain(sq, sq.index_of({1, 0, 0}), sq.index_of({2, 0, 0})), doctest::Contains("cycle"));
    CHECK_THROWS(parse_domain_text("v 0 0\nv 1 0\n"));
}

TEST_CASE("hand-traced loops on the unit square") {
    DobrushinDomain d = domain("square.txt");
    const int ne = d.graph().num_edges();
    // edges: 0 left, 1 top, 2 right
    LoopConfig closed = loop_encode(PercolationConfig(ne), d);
    CHECK(closed.exploration == edges_at(d, {{{1, 0, 0}, 0}, {{1, 0, 0}, 1}, {{0, 0, 0}, 0}, {{0, 0, 0}, 1}}));
    CHECK(closed.turns == std::vector<int>{0, 1, -1, 1});
    REQUIRE(closed.loops.size() == 2);
    CHECK(closed.loops[0].size() == 4);
    CHECK(closed.loops[1].size() == 4);
    CHECK(closed.loop_count == 3);

    LoopConfig open = loop_encode(PercolationConfig(ne, true), d);
    CHECK(open.exploration == edges_at(d, {{{1, 0, 0}, 0},
                                           {{1, 1, 0}, 3},
                                           {{1, 1, 0}, 0},
                                           {{1, 1, 0}, 1},
                                           {{0, 1, 0}, 0},
                                           {{0, 1, 0}, 1},
                                           {{0, 1, 0}, 2},
                                           {{0, 0, 0}, 1}}));
    REQUIRE(open.loops.size() == 1);
    auto loop = open.loops[0];
    auto want = edges_at(d, {{{1, 0, 0}, 1}, {{0, 0, 0}, 0}, {{0, 1, 0}, 3}, {{1, 1, 0}, 2}});
    std::rotate(loop.begin(), std::find(loop.begin(), loop.end(), want[0]), loop.end());
    CHECK(loop == want);
    CHECK(open.loop_count == 2);
    CHECK(winding_quarters(open, d.e_a(), d.e_b()) == 1);
    CHECK(winding_quarters(closed, d.e_a(), d.e_b()) == 1);
}

TEST_CASE("loop count identity") {
    for (const char* name : kDomains) {
        DobrushinDomain d = domain(name);
        const int ne = d.graph().num_edges(), v = d.contracted_vertex_count();
        CHECK(loop_encode(PercolationConfig(ne), d).loop_count == v);
        CHECK(loop_encode(PercolationConfig(ne, true), d).loop_count == 2 + ne - v);
    }
    std::mt19937_64 rng(4);
    for (std::uint64_t s = 0; s < 300; ++s) {
        DobrushinDomain d = random_domain(2 + static_cast<int>(s % 30), s);
        PercolationConfig w = support::random_config(d.graph().num_edges(), rng, 0.5);
        LoopConfig lc;
        CHECK_NOTHROW(lc = loop_encode(w, d));
        // loops and exploration use every medial edge exactly once
        std::vector<int> seen(d.medial_edges().size(), 0);
        for (int e : lc.exploration) ++seen[e];
        for (const auto& l : lc.loops)
            for (int e : l) ++seen[e];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
}

TEST_CASE("winding") {
    DobrushinDomain d = domain("rect.txt");
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        LoopConfig lc = loop_encode(support::random_config(d.graph().num_edges(), rng, 0.5), d);
        CHECK(winding(lc, d.e_b(), d.e_b()) == 0.0);
        CHECK(winding_quarters(lc, d.e_a(), d.e_b()) == turning_quarters(d, lc.exploration, false));
        for (const auto& l : lc.loops) CHECK(std::abs(turning_quarters(d, l, true)) == 4);
        int mid = lc.exploration[lc.exploration.size() / 2];
        CHECK(winding_quarters(lc, d.e_a(), mid) + winding_quarters(lc, mid, d.e_b()) ==
              winding_quarters(lc, d.e_a(), d.e_b()));
        CHECK(winding_quarters(lc, mid, d.e_a()) == -winding_quarters(lc, d.e_a(), mid));
    }
    // off gamma
    LoopConfig lc = loop_encode(PercolationConfig(d.graph().num_edges()), d);
    REQUIRE_FALSE(lc.loops.empty());
    CHECK(winding(lc, lc.loops[0][0], d.e_b()) == 0.0);
}

TEST_CASE("boundary windings on the degenerate domain") {
    DobrushinDomain d = domain("degenerate.txt");
    const int ne = d.graph().num_edges();
    std::vector<int> seen(d.medial_edges().size(), 99);
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int t = 0; t < 3000; ++t) {
        LoopConfig lc = loop_encode(support::random_config(ne, rng, 0.5), d);
        for (int e : lc.exploration) {
            const MedialEdge& me = d.medial_edges()[e];
            if (d.faces()[me.face].full) continue;
            int w = winding_quarters(lc, e, d.e_b());
            // along the boundary the winding is read off the direction alone
            CHECK(std::abs(std::exp(cplx(0, M_PI / 2 * w)) * me.dir - 1.0) < 1e-12);
            if (seen[e] == 99) seen[e] = w;
            CHECK(seen[e] == w);
            ++checked;
        }
    }
    CHECK(checked > 0);
    CHECK(seen[d.e_a()] == 2);
    CHECK(seen[d.e_b()] == 0);
}

TEST_CASE("observable spin") {
    for (double q : {0.5, 1.0, 2.0, 3.0, 4.0, 9.0}) {
        cplx s = observable_spin(q);
        CHECK(std::abs(std::sin(s * M_PI / 2.0) - std::sqrt(q) / 2) < 1e-12);
        if (q <= 4) CHECK(s.imag() == 0.0);
        if (q > 4) CHECK(s.real() == 1.0);
    }
    CHECK(observable_spin(2.0).real() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("loop weights reproduce the FK law") {
    for (const char* name : {"square.txt", "rect.txt"}) {
        DobrushinDomain d = domain(name);
        const LatticeGraph& g = d.graph();
        for (double q : {0.7, 2.0, 5.0}) {
            double p = 0.4, x = p / (std::sqrt(q) * (1 - p));
            auto law = support::fk_law(g, p, q, BoundaryCondition::wired_arc(g, d.arc_ba()));
            std::vector<double> loopw(law.size());
            double z = 0.0;
            for (std::size_t m = 0; m < law.size(); ++m) {
                PercolationConfig w = PercolationConfig::from_mask(m, g.num_edges());
                loopw[m] = std::pow(x, w.open_count()) * std::pow(std::sqrt(q), loop_encode(w, d).loop_count);
                z += loopw[m];
            }
            for (std::size_t m = 0; m < law.size(); ++m) CHECK(loopw[m] / z == doctest::Approx(law[m]).epsilon(1e-12));
        }
    }
}

TEST_CASE("edge observable matches a direct summation") {
    for (const char* name : {"square.txt", "lshape.txt", "rect.txt"}) {
        DobrushinDomain d = domain(name);
        for (double q : {0.5, 2.0, 9.0})
            for (double p : {p_self_dual(q), 0.3}) {
                ObservableField F = edge_observable(d, {p, q});
                auto want = observable_oracle(d, p, q);
                for (std::size_t e = 0; e < want.size(); ++e) CHECK(std::abs(F.F[e] - want[e]) < 1e-12);
                CHECK(std::abs(F.F[d.e_b()] - 1.0) < 1e-12);
            }
    }
    DobrushinDomain d = domain("degenerate.txt");
    for (double q : {1.0, 2.0, 3.0}) {
        ObservableField F = edge_observable(d, {p_self_dual(q), q});
        CHECK(std::abs(F.F[d.e_a()] + F.F[d.e_b()] - (1.0 + std::exp(cplx(0, M_PI) * F.sigma))) < 1e-12);
    }
}

TEST_CASE("vanishing discrete contour integrals at p_c") {
    for (const char* name : kDomains) {
        DobrushinDomain d = domain(name);
        std::vector<int> inner;
        for (int v = 0; v < static_cast<int>(d.medial_vertices().size()); ++v)
            if (d.degree(v) == 4) inner.push_back(v);
        for (double q : {0.5, 1.0, 2.0, 3.0, 4.0, 9.0}) {
            ObservableField F = edge_observable(d, {p_self_dual(q), q});
            CHECK(contour_check(F, d) <= 1e-10);
            CHECK(contour_sum(F, d, inner) <= 1e-9);
            ObservableField off = edge_observable(d, {p_self_dual(q) + 0.1, q});
            if (q != 4.0)
                CHECK(contour_check(off, d) > 1e-4);
            else
                CHECK(contour_check(off, d) <= 1e-10);  // sigma = 1: holds for every p
        }
    }
}

TEST_CASE("q = 2 vertex observable is s-holomorphic") {
    for (const char* name : kDomains) {
        DobrushinDomain d = domain(name);
        ObservableField F = edge_observable(d, {p_self_dual(2.0), 2.0});
        SholoReport r = vertex_observable(F, d);
        CHECK(r.projection <= 1e-10);
        CHECK(r.line <= 1e-10);
        CHECK(r.line_negative <= 1e-10);
        CHECK(r.norm <= 1e-10);
        CHECK(r.exit <= 1e-10);
        CHECK(r.boundary <= 1e-10);
        CHECK(r.cauchy_riemann <= 1e-9);
    }
    DobrushinDomain d = domain("square.txt");
    ObservableField F3 = edge_observable(d, {p_self_dual(3.0), 3.0});
    CHECK_THROWS(vertex_observable(F3, d));
}

TEST_CASE("H function") {
    for (const char* name : kDomains) {
        DobrushinDomain d = domain(name);
        ObservableField F = edge_observable(d, {p_self_dual(2.0), 2.0});
        vertex_observable(F, d);
        HReport r;
        HField H = build_H(F, d, &r);
        CHECK(H.primal[d.b()] == 1.0);
        CHECK(r.consistency <= 1e-10);
        CHECK(r.arc_ba <= 1e-10);
        CHECK(r.arc_ab <= 1e-10);
        CHECK(r.image <= 1e-10);
        CHECK(r.laplacian <= 1e-10);
        CHECK(r.min_primal_laplacian >= -1e-10);
        CHECK(r.max_dual_laplacian <= 1e-10);
    }
    DobrushinDomain d = domain("degenerate.txt");
    ObservableField F = edge_observable(d, {p_self_dual(2.0), 2.0});
    vertex_observable(F, d);
    HReport r;
    build_H(F, d, &r);
    CHECK(r.interior_primal > 0);
    CHECK(r.interior_dual > 0);
    ObservableField bare = edge_observable(d, {p_self_dual(2.0), 2.0});
    CHECK_THROWS(build_H(bare, d));
}
