#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "critlat/graph.hpp"
#include "support.hpp"

using namespace critlat;

namespace {

bool dfs_crossing(const LatticeGraph& g, const PercolationConfig& w, const Rect& r, bool horizontal) {
    auto inside = [&](const Point& p) { return p[0] >= r.x0 && p[0] <= r.x1 && p[1] >= r.y0 && p[1] <= r.y1; };
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<int> st;
    for (int v = 0; v < g.num_vertices(); ++v) {
        const Point& p = g.point(v);
        if (inside(p) && (horizontal ? p[0] == r.x0 : p[1] == r.y0)) {
            seen[v] = 1;
            st.push_back(v);
        }
    }
    while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        const Point& p = g.point(x);
        if (horizontal ? p[0] == r.x1 : p[1] == r.y1) return true;
        for (auto [y, e] : g.adjacent(x))
            if (w[e] && !seen[y] && inside(g.point(y))) {
                seen[y] = 1;
                st.push_back(y);
            }
    }
    return false;
}

}  // namespace

TEST_CASE("box sizes") {
    CHECK(build_box(0, 2).num_vertices() == 1);
    CHECK(build_box(0, 2).num_edges() == 0);
    LatticeGraph b1 = build_box(1, 2);
    CHECK(b1.num_vertices() == 9);
    CHECK(b1.num_edges() == 12);
    CHECK(b1.boundary().size() == 8);
    CHECK(build_box(2, 2).num_vertices() == 25);
    CHECK(build_box(2, 2).num_edges() == 40);
    LatticeGraph b3 = build_box(1, 3);
    CHECK(b3.num_vertices() == 27);
    CHECK(b3.num_edges() == 54);
    CHECK(b3.boundary().size() == 26);
}

TEST_CASE("edge indexing is lexicographic") {
    LatticeGraph g = build_box(2, 2);
    for (int e = 1; e < g.num_edges(); ++e) {
        auto a = std::make_pair(g.edge(e - 1).u, g.edge(e - 1).v);
        auto b = std::make_pair(g.edge(e).u, g.edge(e).v);
        CHECK(a < b);
        CHECK(g.edge(e).u < g.edge(e).v);
    }
    for (int v = 1; v < g.num_vertices(); ++v) CHECK(g.point(v - 1) < g.point(v));
}

TEST_CASE("cluster counts") {
    LatticeGraph g = build_box(1, 2);
    PercolationConfig closed(g.num_edges()), open(g.num_edges(), true);
    CHECK(cluster_stats(g, closed, BoundaryCondition::free_bc(g)).k == 9);
    CHECK(cluster_stats(g, closed, BoundaryCondition::wired(g)).k == 2);
    CHECK(cluster_stats(g, open, BoundaryCondition::free_bc(g)).k == 1);
    CHECK(cluster_stats(g, open, BoundaryCondition::wired(g)).k == 1);
}

TEST_CASE("cluster counts agree with flood fill and obey bc ordering") {
    std::mt19937_64 rng(11);
    LatticeGraph g = build_box(2, 2);
    const auto& bd = g.boundary();
    std::vector<std::vector<int>> blocks{{bd[0], bd[3], bd[5]}, {bd[7], bd[10]}};
    BoundaryCondition bf = BoundaryCondition::free_bc(g), bw = BoundaryCondition::wired(g),
                      bx = BoundaryCondition::custom(g, blocks);
    for (int t = 0; t < 300; ++t) {
        PercolationConfig w = support::random_config(g.num_edges(), rng, 0.4);
        int kf = cluster_stats(g, w, bf).k, kw = cluster_stats(g, w, bw).k, kx = cluster_stats(g, w, bx).k;
        CHECK(kf == support::flood_clusters(g, w, bf));
        CHECK(kw == support::flood_clusters(g, w, bw));
        CHECK(kx == support::flood_clusters(g, w, bx));
        CHECK(kw <= kx);
        CHECK(kx <= kf);
        CHECK(kf - kw <= static_cast<int>(bd.size()) - 1);
        auto labels = cluster_stats(g, w, bf).labels;
        for (int e = 0; e < g.num_edges(); ++e)
            if (w[e]) CHECK(labels[g.edge(e).u] == labels[g.edge(e).v]);
        for (int v = 0; v < g.num_vertices(); ++v) CHECK(labels[v] <= v);
    }
}

TEST_CASE("boundary condition validation") {
    LatticeGraph g = build_box(1, 2);
    int center = g.index_of({0, 0, 0});
    CHECK_THROWS(BoundaryCondition::custom(g, {{center}}));
    int b0 = g.boundary()[0];
    CHECK_THROWS(BoundaryCondition::custom(g, {{b0}, {b0}}));
}

TEST_CASE("crossing detection") {
    LatticeGraph g = build_rect(0, 0, 3, 2);
    Rect r{0, 0, 3, 2};
    CHECK(crossing_detect(g, PercolationConfig(g.num_edges(), true), r, Direction::horizontal));
    CHECK_FALSE(crossing_detect(g, PercolationConfig(g.num_edges()), r, Direction::horizontal));

    // a single bent left-right path
    std::vector<std::pair<Point, Point>> path{{{0, 0, 0}, {1, 0, 0}}, {{1, 0, 0}, {1, 1, 0}}, {{1, 1, 0}, {2, 1, 0}},
                                              {{2, 1, 0}, {2, 2, 0}}, {{2, 2, 0}, {3, 2, 0}}};
    PercolationConfig w(g.num_edges());
    for (auto& [a, b] : path) w.bits[g.edge_index(g.index_of(a), g.index_of(b))] = 1;
    CHECK(crossing_detect(g, w, r, Direction::horizontal));
    CHECK(crossing_detect(g, w, r, Direction::vertical));  // the staircase also spans y = 0..2
    for (auto& [a, b] : path) {
        PercolationConfig w2 = w;
        w2.bits[g.edge_index(g.index_of(a), g.index_of(b))] = 0;
        CHECK_FALSE(crossing_detect(g, w2, r, Direction::horizontal));
    }

    std::mt19937_64 rng(5);
    LatticeGraph big = build_box(3, 2);
    Rect sub{-2, -1, 2, 3};
    for (int t = 0; t < 300; ++t) {
        PercolationConfig x = support::random_config(big.num_edges(), rng);
        CHECK(crossing_detect(big, x, sub, Direction::horizontal) == dfs_crossing(big, x, sub, true));
        CHECK(crossing_detect(big, x, sub, Direction::vertical) == dfs_crossing(big, x, sub, false));
    }
}

TEST_CASE("dual map") {
    LatticeGraph sq = build_rect(0, 0, 1, 1);
    DualResult d = dual_map(sq, PercolationConfig(sq.num_edges(), true));
    CHECK(d.graph.num_edges() == 4);
    CHECK(d.config.open_count() == 0);

    std::mt19937_64 rng(3);
    LatticeGraph g = build_box(2, 2);
    for (int t = 0; t < 50; ++t) {
        PercolationConfig w = support::random_config(g.num_edges(), rng);
        DualResult dr = dual_map(g, w);
        CHECK(dr.graph.num_edges() == g.num_edges());
        CHECK(w.open_count() + dr.config.open_count() == g.num_edges());
        // each dual edge crosses its primal edge at the shared midpoint
        for (int e = 0; e < g.num_edges(); ++e) {
            const Edge& pe = g.edge(e);
            const Edge& de = dr.graph.edge(dr.edge_map[e]);
            double mx = (g.point(pe.u)[0] + g.point(pe.v)[0]) / 2.0, my = (g.point(pe.u)[1] + g.point(pe.v)[1]) / 2.0;
            double dx = (dr.graph.point(de.u)[0] + dr.graph.point(de.v)[0]) / 2.0 + 0.5;
            double dy = (dr.graph.point(de.u)[1] + dr.graph.point(de.v)[1]) / 2.0 + 0.5;
            CHECK(mx == dx);
            CHECK(my == dy);
            CHECK(w[e] != dr.config[dr.edge_map[e]]);
        }
    }
    CHECK_THROWS(dual_map(build_box(1, 3), PercolationConfig(54)));
}

TEST_CASE("dual map is an involution up to relabeling") {
    std::mt19937_64 rng(8);
    LatticeGraph g = build_box(2, 2);
    PercolationConfig w = support::random_config(g.num_edges(), rng);
    DualResult d1 = dual_map(g, w);
    DualResult d2 = dual_map(d1.graph, d1.config);
    // dual of the dual is the graph shifted by (-1,-1) on the edges that survive
    for (int e = 0; e < g.num_edges(); ++e) {
        int de = d1.edge_map[e];
        if (de < 0) continue;
        int dde = d2.edge_map[de];
        if (dde < 0) continue;
        const Edge& x = g.edge(e);
        const Edge& y = d2.graph.edge(dde);
        Point pu = d2.graph.point(y.u), pv = d2.graph.point(y.v);
        std::set<Point> got{{pu[0] + 1, pu[1] + 1, 0}, {pv[0] + 1, pv[1] + 1, 0}};
        std::set<Point> want{g.point(x.u), g.point(x.v)};
        CHECK(got == want);
        CHECK(d2.config[dde] == w[e]);
    }
}

TEST_CASE("crossing duality on R_n") {
    for (int n = 1; n <= 3; ++n) {
        LatticeGraph g = build_rect(0, 0, n, n - 1);
        Rect r{0, 0, n, n - 1};
        Rect rs{0, -1, n - 1, n - 1};
        const int ne = g.num_edges();
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << ne); ++m) {
            PercolationConfig w = PercolationConfig::from_mask(m, ne);
            DualResult d = dual_map(g, w);
            bool h = crossing_detect(g, w, r, Direction::horizontal);
            bool v = crossing_detect(d.graph, d.config, rs, Direction::vertical);
            REQUIRE(h != v);
        }
    }
}

TEST_CASE("graph file round trip") {
    LatticeGraph g = build_rect(0, 0, 2, 1);
    GraphFile f = parse_graph_text(write_graph_text(g));
    CHECK(f.graph.points() == g.points());
    CHECK(f.graph.num_edges() == g.num_edges());
    GraphFile d = parse_graph_text("# domain\nv 0 0\nv 1 0\nv 0 1\nv 1 1\na 0 0\nb 1 0\n");
    CHECK(d.has_a);
    CHECK(d.has_b);
    CHECK(d.graph.num_edges() == 4);
    GraphFile e = parse_graph_text("v 0 0\nv 1 0\nv 0 1\nv 1 1\ne 0 0 1 0\n");
    CHECK(e.graph.num_edges() == 1);
    CHECK_THROWS(parse_graph_text("e 0 0 2 0\n"));
    CHECK(graph_from_spec("box:2").num_edges() == 40);
    CHECK(graph_from_spec("rect:0,0,3,1").num_vertices() == 8);
}

TEST_CASE("bounded faces") {
    CHECK(bounded_faces(build_rect(0, 0, 2, 2)).size() == 4);
    // ring of eight vertices around a missing center encloses a hole
    std::vector<Point> ring;
    for (int x = 0; x <= 2; ++x)
        for (int y = 0; y <= 2; ++y)
            if (x != 1 || y != 1) ring.push_back({x, y, 0});
    CHECK_THROWS(bounded_faces(LatticeGraph::induced(2, ring)));
}
