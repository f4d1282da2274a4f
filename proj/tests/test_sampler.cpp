#include <doctest.h>

#include <random>

#include "critlat/oracle.hpp"
#include "critlat/rng.hpp"
#include "critlat/sampler.hpp"
#include "support.hpp"

using namespace critlat;

namespace {

LatticeGraph fixture(const std::string& name) { return load_graph_file(support::fixture_path("graphs/" + name)).graph; }

std::vector<double> histogram(const std::vector<PercolationConfig>& xs, int ne) {
    std::vector<double> h(std::size_t{1} << ne, 0.0);
    for (const auto& x : xs) h[x.mask()] += 1.0;
    return h;
}

}  // namespace

TEST_CASE("heat-bath thresholds") {
    LatticeGraph g = fixture("square.txt");
    auto bc = BoundaryCondition::free_bc(g);
    HeatBath indep(g, {0.3, 1.0}, bc);
    PercolationConfig w(g.num_edges());
    CHECK_FALSE(indep.decide(w, 0, 0.69));
    CHECK(indep.decide(w, 0, 0.70));

    HeatBath hb(g, {0.5, 2.0}, bc);
    CHECK(hb.threshold_connected() == doctest::Approx(0.5));
    CHECK(hb.threshold_disconnected() == doctest::Approx(2.0 / 3.0));
    // edge 0 has its endpoints joined by the other three edges
    PercolationConfig ring(g.num_edges(), true);
    CHECK(hb.decide(ring, 0, 0.55));
    PercolationConfig bare(g.num_edges());
    CHECK_FALSE(hb.decide(bare, 0, 0.55));

    ChainState s{bare, 0, 0};
    ChainState t = heatbath_step(s, 2, 0.9, hb);
    CHECK(t.config[2]);
    CHECK(t.step == 1);
    for (int e = 0; e < g.num_edges(); ++e)
        if (e != 2) CHECK(t.config[e] == s.config[e]);
    CHECK_THROWS(heatbath_step(s, 2, 1.0, hb));
}

TEST_CASE("heat-bath rule matches the enumerated conditional") {
    LatticeGraph g = fixture("box1.txt");
    std::mt19937_64 rng(2);
    for (auto bc : {BoundaryCondition::free_bc(g), BoundaryCondition::wired(g)}) {
        RcParams par{0.45, 2.5};
        HeatBath hb(g, par, bc);
        for (int t = 0; t < 60; ++t) {
            PercolationConfig w = support::random_config(g.num_edges(), rng, 0.4);
            int e = static_cast<int>(rng() % g.num_edges());
            double p_open = rc_conditional(g, par, bc, e, w);
            CHECK_FALSE(hb.decide(w, e, std::nextafter(1.0 - p_open, 0.0)));
            CHECK(hb.decide(w, e, 1.0 - p_open + 1e-12));
        }
    }
}

TEST_CASE("shared variates preserve order for q >= 1") {
    LatticeGraph g = build_box(3, 2);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    HeatBath hb(g, {0.55, 3.0}, BoundaryCondition::wired(g));
    PercolationConfig lo = support::random_config(g.num_edges(), rng, 0.3), hi = lo;
    for (int e = 0; e < g.num_edges(); ++e) hi.bits[e] |= U(rng) < 0.5;
    for (int step = 0; step < 20000; ++step) {
        int e = static_cast<int>(rng() % g.num_edges());
        double u = U(rng);
        lo.bits[e] = hb.decide(lo, e, u);
        hi.bits[e] = hb.decide(hi, e, u);
        REQUIRE(lo.leq(hi));
    }
}

TEST_CASE("CFTP on a single edge") {
    LatticeGraph g = LatticeGraph::induced(2, {{0, 0, 0}, {1, 0, 0}});
    HeatBath hb(g, {0.5, 2.0}, BoundaryCondition::free_bc(g));
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) xs.push_back(cftp_sample(hb, derive_seed(21, i)).config[0]);
    Estimate e = estimate_from(xs, 21);
    CHECK(std::abs(e.mean - 1.0 / 3.0) <= 4 * e.std_error);
}

TEST_CASE("CFTP matches the enumerated law on the 4-cycle") {
    LatticeGraph g = fixture("square.txt");
    for (double q : {1.0, 2.0, 2.5}) {
        RcParams par{0.5, q};
        auto bc = BoundaryCondition::free_bc(g);
        HeatBath hb(g, par, bc);
        std::vector<PercolationConfig> xs;
        std::int64_t viol = 0;
        for (int i = 0; i < 20000; ++i) {
            CftpResult r = cftp_sample(hb, derive_seed(33, i));
            viol += r.monotone_violations;
            xs.push_back(r.config);
        }
        CHECK(viol == 0);
        ChiSquare cs = chi_square_gof(histogram(xs, g.num_edges()), support::fk_law(g, par.p, q, bc));
        CHECK(cs.p_value > 1e-3);
    }
}

TEST_CASE("CFTP preconditions and failure reporting") {
    LatticeGraph g = fixture("square.txt");
    CHECK_THROWS(cftp_sample(g, {0.5, 0.5}, BoundaryCondition::free_bc(g), 1));
    LatticeGraph big = build_box(6, 2);
    try {
        cftp_sample(big, {p_self_dual(2.0), 2.0}, BoundaryCondition::wired(big), 1, 1);
        FAIL("expected non-coalescence");
    } catch (const std::runtime_error& ex) {
        CHECK(std::string(ex.what()).find("2^1") != std::string::npos);
    }
}

TEST_CASE("CFTP output is monotone in p and reproducible") {
    LatticeGraph g = build_box(3, 2);
    auto bc = BoundaryCondition::free_bc(g);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CftpResult a = cftp_sample(g, {0.4, 2.0}, bc, seed);
        CftpResult b = cftp_sample(g, {0.6, 2.0}, bc, seed);
        CHECK(a.config.leq(b.config));
        CHECK(cftp_sample(g, {0.4, 2.0}, bc, seed).config == a.config);
        CHECK(a.monotone_violations == 0);
    }
}

TEST_CASE("Edwards-Sokal transfer") {
    LatticeGraph g = build_box(2, 2);
    auto s = es_forward(g, PercolationConfig(g.num_edges(), true), 3, SpinBc::free, 4);
    for (int x : s) CHECK(x == s[0]);
    auto m = es_forward(g, PercolationConfig(g.num_edges()), 3, SpinBc::monochromatic, 4);
    for (int v : g.boundary()) CHECK(m[v] == 0);
    CHECK_THROWS(es_forward(g, PercolationConfig(g.num_edges()), 1, SpinBc::free, 1));

    // no open edges, free bc: iid uniform spins
    std::vector<double> counts(4, 0.0);
    for (int i = 0; i < 4000; ++i)
        for (int x : es_forward(g, PercolationConfig(g.num_edges()), 4, SpinBc::free, derive_seed(5, i))) counts[x] += 1;
    CHECK(chi_square_gof(counts, {0.25, 0.25, 0.25, 0.25}).p_value > 1e-3);

    std::vector<int> split(g.num_vertices(), 0);
    split[0] = 1;
    PercolationConfig r = es_reverse(g, split, 1.0, 9);
    for (int e = 0; e < g.num_edges(); ++e) CHECK(r[e] == (split[g.edge(e).u] == split[g.edge(e).v]));
}

TEST_CASE("Edwards-Sokal round trip is stationary for the free measure") {
    LatticeGraph g = fixture("square.txt");
    auto bc = BoundaryCondition::free_bc(g);
    HeatBath hb(g, {0.5, 2.0}, bc);
    std::vector<PercolationConfig> xs;
    for (int i = 0; i < 20000; ++i) {
        PercolationConfig w = cftp_sample(hb, derive_seed(44, i)).config;
        auto spins = es_forward(g, w, 2, SpinBc::free, derive_seed(45, i));
        xs.push_back(es_reverse(g, spins, 0.5, derive_seed(46, i)));
    }
    CHECK(chi_square_gof(histogram(xs, g.num_edges()), support::fk_law(g, 0.5, 2.0, bc)).p_value > 1e-3);
}

TEST_CASE("estimators") {
    LatticeGraph g = fixture("square.txt");
    auto bc = BoundaryCondition::free_bc(g);
    Estimate one = mc_estimate(g, {0.5, 2.0}, bc, 500, 3, [](const PercolationConfig&) { return 1.0; });
    CHECK(one.mean == 1.0);
    CHECK(one.std_error == 0.0);
    CHECK(one.n_samples == 500);
    CHECK(one.seed == 3);

    auto law = support::fk_law(g, 0.5, 2.0, bc);
    double p0 = 0.0;
    for (std::size_t m = 0; m < law.size(); ++m) p0 += (m & 1) ? law[m] : 0.0;
    Estimate e0 = mc_estimate(g, {0.5, 2.0}, bc, 20000, 8, [](const PercolationConfig& w) { return w[0] ? 1.0 : 0.0; });
    CHECK(std::abs(e0.mean - p0) <= 4 * e0.std_error);

    Estimate again = mc_estimate(g, {0.5, 2.0}, bc, 20000, 8, [](const PercolationConfig& w) { return w[0] ? 1.0 : 0.0; });
    CHECK(again.mean == e0.mean);

    Estimate chain = mc_estimate(g, {0.5, 0.5}, bc, 200, 8, [](const PercolationConfig& w) { return w[0] ? 1.0 : 0.0; }, 50);
    CHECK_FALSE(chain.exact_sampler);
}

TEST_CASE("connection to the boundary decays below the self-dual point") {
    std::vector<double> means;
    for (int n : {4, 6, 8}) {
        LatticeGraph g = build_box(n, 2);
        int o = g.index_of({0, 0, 0});
        int b = g.boundary()[0];
        auto bc = BoundaryCondition::wired(g);
        Estimate e = mc_estimate(g, {0.4, 2.0}, bc, 3000, 12, [&](const PercolationConfig& w) {
            auto lab = cluster_stats(g, w, bc).labels;
            return lab[o] == lab[b] ? 1.0 : 0.0;
        });
        means.push_back(e.mean);
    }
    CHECK(means[0] > means[1]);
    CHECK(means[1] > means[2]);
}

TEST_CASE("Bernoulli crossing of R_3") {
    Estimate e = crossing_mc(square_crossing_rect(3), {0.5, 1.0}, BcKind::free, 20000, 2);
    CHECK(std::abs(e.mean - 0.5) <= 4 * e.std_error);
    CHECK(crossing_rect(5, 1.5).x1 == 7);
    CHECK_THROWS(crossing_mc(build_box(1, 2), Rect{0, 0, 4, 4}, {0.5, 1.0},
                             BoundaryCondition::free_bc(build_box(1, 2)), 10, 1));
}

TEST_CASE("chi-square helper") {
    ChiSquare exact = chi_square_gof({25, 25, 50}, {0.25, 0.25, 0.5});
    CHECK(exact.statistic == 0.0);
    CHECK(exact.p_value == doctest::Approx(1.0));
    ChiSquare off = chi_square_gof({90, 10}, {0.5, 0.5});
    CHECK(off.p_value < 1e-10);
    // sparse bins are pooled
    ChiSquare pooled = chi_square_gof({50, 48, 1, 1}, {0.49, 0.49, 0.01, 0.01});
    CHECK(pooled.dof == 1);
    CHECK(chi_square_gof({1, 0}, {1.0, 0.0}).p_value == 1.0);
    CHECK(chi_square_gof({0, 1}, {1.0, 0.0}).p_value == 0.0);
}
