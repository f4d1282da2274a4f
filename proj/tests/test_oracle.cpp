#include <doctest.h>

#include <random>

#include "critlat/oracle.hpp"
#include "support.hpp"

using namespace critlat;

namespace {

LatticeGraph fixture(const std::string& name) { return load_graph_file(support::fixture_path("graphs/" + name)).graph; }

LatticeGraph single_edge() { return LatticeGraph::induced(2, {{0, 0, 0}, {1, 0, 0}}); }

}  // namespace

TEST_CASE("self-dual point and dual parameter") {
    for (double q : {0.5, 1.0, 2.0, 3.0, 4.0, 9.0, 25.0}) {
        double psd = p_self_dual(q);
        CHECK(psd == doctest::Approx(std::sqrt(q) / (1 + std::sqrt(q))).epsilon(1e-15));
        CHECK(std::abs(p_dual(psd, q) - psd) <= 1e-15);
        double p = 0.37;
        CHECK(p_dual(p_dual(p, q), q) == doctest::Approx(p).epsilon(1e-14));
        double ps = p_dual(p, q);
        CHECK(p * ps / ((1 - p) * (1 - ps)) == doctest::Approx(q).epsilon(1e-13));
    }
    CHECK(p_dual(0.5, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS(p_dual(0.0, 2.0));
    CHECK(p_from_beta(beta_from_p(0.3, 3), 3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(beta_from_p(0.5, 2) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("rc_distribution matches flood-fill enumeration") {
    for (const char* name : {"square.txt", "lshape.txt", "box1.txt"}) {
        LatticeGraph g = fixture(name);
        const auto& bd = g.boundary();
        std::vector<BoundaryCondition> bcs{BoundaryCondition::free_bc(g), BoundaryCondition::wired(g),
                                           BoundaryCondition::custom(g, {{bd[0], bd[2]}})};
        for (const auto& bc : bcs)
            for (double q : {0.5, 1.0, 2.0, 3.3}) {
                auto got = rc_distribution(g, {0.41, q}, bc);
                auto want = support::fk_law(g, 0.41, q, bc);
                double sum = 0.0, dev = 0.0;
                for (std::size_t m = 0; m < want.size(); ++m) {
                    sum += got.prob[m];
                    dev = std::max(dev, std::abs(got.prob[m] - want[m]));
                }
                CHECK(dev <= 1e-13);
                CHECK(std::abs(sum - 1.0) <= 1e-12);
                CHECK(got.z > 0.0);
            }
    }
}

TEST_CASE("rc_distribution special cases") {
    LatticeGraph e = single_edge();
    for (double q : {0.5, 2.0, 4.0}) {
        auto d = rc_distribution(e, {0.3, q}, BoundaryCondition::free_bc(e));
        CHECK(d.prob[1] == doctest::Approx(0.3 / (0.3 + 0.7 * q)).epsilon(1e-14));
    }
    LatticeGraph g = fixture("lshape.txt");
    auto prod = rc_distribution(g, {0.3, 1.0}, BoundaryCondition::wired(g));
    for (std::size_t m = 0; m < prod.prob.size(); ++m) {
        int o = __builtin_popcountll(m);
        CHECK(prod.prob[m] == doctest::Approx(std::pow(0.3, o) * std::pow(0.7, g.num_edges() - o)).epsilon(1e-12));
    }
    auto full = rc_distribution(g, {1.0, 2.0}, BoundaryCondition::free_bc(g));
    CHECK(full.prob.back() == doctest::Approx(1.0));
}

TEST_CASE("enumeration cap") {
    LatticeGraph big = build_rect(0, 0, 4, 3);  // 31 edges
    REQUIRE(big.num_edges() > kEnumerationCap);
    try {
        rc_distribution(big, {0.5, 2.0}, BoundaryCondition::free_bc(big));
        FAIL("expected refusal");
    } catch (const std::exception& ex) {
        CHECK(std::string(ex.what()).find(std::to_string(kEnumerationCap)) != std::string::npos);
    }
}

TEST_CASE("log-domain weights agree with direct products") {
    RcParams par{0.37, 2.6};
    RcWeight direct(10, 8, par), logd(24, 16, par);
    double r1 = direct(3, 4) / direct(5, 2);
    double want = std::pow(0.37 / 0.63, -2) * std::pow(2.6, 2);
    CHECK(r1 == doctest::Approx(want).epsilon(1e-13));
    double r2 = logd(3, 4) / logd(5, 2);
    CHECK(r2 == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("conditional edge law") {
    LatticeGraph g = fixture("box1.txt");
    auto bc = BoundaryCondition::wired(g);
    RcParams par{0.5, 2.0};
    auto law = support::fk_law(g, par.p, par.q, bc);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 40; ++t) {
        int e = static_cast<int>(rng() % g.num_edges());
        PercolationConfig psi = support::random_config(g.num_edges(), rng, 0.3);
        psi.bits[e] = 0;
        std::uint64_t m0 = psi.mask(), m1 = m0 | (std::uint64_t{1} << e);
        double want = law[m1] / (law[m0] + law[m1]);
        double got = rc_conditional(g, par, bc, e, psi);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK((got == doctest::Approx(0.5) || got == doctest::Approx(1.0 / 3.0)));
    }
    PercolationConfig none(g.num_edges());
    int center_edge = g.edge_index(g.index_of({0, 0, 0}), g.index_of({1, 0, 0}));
    CHECK(rc_conditional(g, par, BoundaryCondition::free_bc(g), center_edge, none) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(rc_conditional(g, {0.3, 1.0}, bc, center_edge, none) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("simplex embedding") {
    for (int q = 2; q <= 6; ++q) {
        Simplex s = make_simplex(q);
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
                CHECK(s.dot(a, b) == doctest::Approx(a == b ? 1.0 : -1.0 / (q - 1)).epsilon(1e-12));
    }
}

TEST_CASE("Potts tables against Kronecker-form enumeration") {
    LatticeGraph g = fixture("square.txt");
    for (int q : {2, 3, 4}) {
        double beta = 0.7;
        // exp(beta * a.b) equals exp(beta * q/(q-1) * delta) up to a constant
        double bdelta = beta * q / (q - 1.0);
        auto table = potts_pair_table(g, {beta, q}, PottsBc::free);
        std::vector<int> none(g.num_vertices(), -1);
        for (int x = 0; x < g.num_vertices(); ++x)
            for (int y = 0; y < g.num_vertices(); ++y) {
                double want = support::potts_delta_expect(g, bdelta, q, none, [&](const std::vector<int>& s) {
                    return s[x] == s[y] ? 1.0 : -1.0 / (q - 1);
                });
                CHECK(table[x * g.num_vertices() + y] == doctest::Approx(want).epsilon(1e-12));
            }
    }
    LatticeGraph b = fixture("box1.txt");
    std::vector<int> pinned(b.num_vertices(), -1);
    for (int v : b.boundary()) pinned[v] = 0;
    auto mag = potts_magnetization(b, {0.4, 3});
    int c = b.index_of({0, 0, 0});
    double want = support::potts_delta_expect(b, 0.4 * 1.5, 3, pinned,
                                              [&](const std::vector<int>& s) { return s[c] == 0 ? 1.0 : -0.5; });
    CHECK(mag[c] == doctest::Approx(want).epsilon(1e-12));
    for (int v : b.boundary()) CHECK(mag[v] == doctest::Approx(1.0));
}

TEST_CASE("Ising correlations") {
    LatticeGraph e = single_edge();
    CHECK(potts_correlation(e, {0.8, 2}, PottsBc::free, {0, 1}) == doctest::Approx(std::tanh(0.8)).epsilon(1e-14));
    LatticeGraph g = fixture("lshape.txt");
    CHECK(std::abs(potts_correlation(g, {0.0, 3}, PottsBc::free, {0, 5})) <= 1e-15);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ub(0.05, 1.2);
    std::vector<int> none(g.num_vertices(), -1);
    for (int t = 0; t < 5; ++t) {
        double beta = ub(rng);
        std::vector<std::vector<int>> sets{{0, 3}, {1, 2, 4, 7}, {0, 3, 1, 2, 4, 7}, {2, 5}, {6, 7}};
        auto corr = ising_correlations(g, beta, sets);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            double want = support::potts_delta_expect(g, 2 * beta, 2, none, [&](const std::vector<int>& s) {
                double prod = 1.0;
                for (int v : sets[i]) prod *= s[v] == 0 ? 1.0 : -1.0;
                return prod;
            });
            CHECK(corr[i] == doctest::Approx(want).epsilon(1e-12));
            CHECK(corr[i] >= -1e-15);
        }
        // second Griffiths inequality, A = {0,3}, B = {1,2,4,7}
        CHECK(corr[2] >= corr[0] * corr[1] - 1e-15);
    }
}

TEST_CASE("Edwards-Sokal coupling identities") {
    for (const char* name : {"square.txt", "ladder.txt", "lshape.txt", "box1.txt"}) {
        LatticeGraph g = fixture(name);
        for (int q : {2, 3, 4})
            for (double p : {0.2, 0.5, p_self_dual(q)}) {
                EsReport r = verify_es_coupling(g, p, q, 1e-10);
                CHECK(r.pass);
                CHECK(r.max_dev_free <= 1e-10);
                CHECK(r.max_dev_wired <= 1e-10);
            }
    }
    // direct comparison on the 4-cycle at q = 3, p = 0.4
    LatticeGraph g = fixture("square.txt");
    auto conn = connection_matrix(g, {0.4, 3.0}, BoundaryCondition::free_bc(g));
    auto law = support::fk_law(g, 0.4, 3.0, BoundaryCondition::free_bc(g));
    double want = 0.0;
    for (std::size_t m = 0; m < law.size(); ++m) {
        PercolationConfig w = PercolationConfig::from_mask(m, g.num_edges());
        if (cluster_stats(g, w, BoundaryCondition::free_bc(g)).labels[3] == 0) want += law[m];
    }
    CHECK(conn[3] == doctest::Approx(want).epsilon(1e-13));
    auto pairs = potts_pair_table(g, {beta_from_p(0.4, 3), 3}, PottsBc::free);
    CHECK(pairs[3] == doctest::Approx(want).epsilon(1e-12));
    auto zero = potts_pair_table(g, {beta_from_p(0.0, 3), 3}, PottsBc::free);
    CHECK(std::abs(zero[1]) <= 1e-15);
}

TEST_CASE("planar duality") {
    for (const char* name : {"square.txt", "ladder.txt", "lshape.txt", "box1.txt"}) {
        LatticeGraph g = fixture(name);
        for (double q : {0.5, 1.0, 2.0, 3.0})
            for (double p : {0.3, p_self_dual(q)}) {
                DualityReport r = verify_duality(g, p, q);
                CHECK(r.pass);
                CHECK(r.max_dev <= 1e-10);
                CHECK(r.z_rel_dev <= 1e-10);
                CHECK(r.configs == (1 << g.num_edges()));
            }
    }
    DualityReport r = verify_duality(fixture("square.txt"), 0.5, 2.0);
    CHECK(r.p_star == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("FKG, monotonicity and comparison of boundary conditions") {
    LatticeGraph sq = fixture("square.txt");
    auto r1 = fkg_verify(sq, {0.5, 1.0}, BoundaryCondition::free_bc(sq));
    CHECK(r1.pass);
    for (const char* name : {"square.txt", "ladder.txt"}) {
        LatticeGraph g = fixture(name);
        for (double q : {1.0, 2.0, 4.0}) {
            CHECK(fkg_verify(g, {0.45, q}, BoundaryCondition::free_bc(g)).pass);
            CHECK(mon_check(g, 0.3, 0.6, q, BoundaryCondition::free_bc(g)).pass);
            CHECK(cbc_check(g, {0.45, q}).pass);
        }
    }
    // independent: disjoint edges are uncorrelated under q = 1
    auto law = support::fk_law(sq, 0.5, 1.0, BoundaryCondition::free_bc(sq));
    double pa = 0, pb = 0, pab = 0;
    for (std::size_t m = 0; m < law.size(); ++m) {
        pa += (m & 1) ? law[m] : 0;
        pb += (m & 8) ? law[m] : 0;
        pab += ((m & 1) && (m & 8)) ? law[m] : 0;
    }
    CHECK(std::abs(pab - pa * pb) <= 1e-15);
}

TEST_CASE("FKG fails below q = 1") {
    FkgWitness w = fkg_search(0.5, 0.5);
    REQUIRE(w.found);
    CHECK(w.graph.num_edges() <= 4);
    CHECK(w.cov < 0.0);
    CHECK(w.pab - w.pa * w.pb == doctest::Approx(w.cov));
    // the two-edge version of the witness recomputed from scratch
    auto law = support::fk_law(w.graph, 0.5, 0.5, BoundaryCondition::free_bc(w.graph));
    double pa = 0, pb = 0, pab = 0;
    for (std::size_t m = 0; m < law.size(); ++m) {
        pa += (m & 1) ? law[m] : 0;
        pb += (m & 2) ? law[m] : 0;
        pab += ((m & 1) && (m & 2)) ? law[m] : 0;
    }
    CHECK(pab - pa * pb < 0.0);
}

TEST_CASE("phi_S") {
    CHECK(phi_S({{0, 0, 0}}, 2, 0.3).value == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(phi_S({{0, 0, 0}}, 3, 0.3).value == doctest::Approx(1.8).epsilon(1e-15));
    std::vector<Point> box;
    for (int x = -1; x <= 1; ++x)
        for (int y = -1; y <= 1; ++y) box.push_back({x, y, 0});
    CHECK(phi_S(box, 2, 0.0).value == 0.0);
    // Lambda_1: p * sum over the 12 boundary-leaving edges of P[0 <-> x inside S]
    LatticeGraph g = LatticeGraph::induced(2, box);
    int o = g.index_of({0, 0, 0});
    double want = 0.0;
    for (std::uint64_t m = 0; m < (1u << 12); ++m) {
        PercolationConfig w = PercolationConfig::from_mask(m, 12);
        double pr = std::pow(0.3, w.open_count()) * std::pow(0.7, 12 - w.open_count());
        auto lab = cluster_stats(g, w, BoundaryCondition::free_bc(g)).labels;
        for (int v : g.boundary()) {
            const Point& pt = g.point(v);
            int out = (std::abs(pt[0]) == 1) + (std::abs(pt[1]) == 1);
            if (lab[v] == lab[o]) want += 0.3 * pr * out;
        }
    }
    PhiSResult r = phi_S(box, 2, 0.3);
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(want).epsilon(1e-13));
}
