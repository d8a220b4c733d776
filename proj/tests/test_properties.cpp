// Randomized invariants. Every case draws from a fixed seed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chatq/allocation.hpp"
#include "chatq/chatnet.hpp"
#include "chatq/specfile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace chatq;

namespace {

std::mt19937_64 rng_for(int id) { return std::mt19937_64(1000 + id); }

double uniform(std::mt19937_64& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }

} // namespace

TEST_CASE("water-filling is feasible and locally optimal") {
    auto r = rng_for(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + r() % 6;
        std::vector<double> w(n), beta(n), alpha(n);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = uniform(r, 0.1, 1.0);
            beta[i] = std::exp(uniform(r, -8.0, 2.0));
            alpha[i] = uniform(r, 0.2, 3.0);
        }
        const double C = uniform(r, 0.0, 20.0);
        const auto a = waterfill_kkt(w, beta, alpha, C);
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(a.shares[i] >= 0.0);
            used += w[i] * a.shares[i];
        }
        CHECK(used == doctest::Approx(C).epsilon(1e-9));
        // moving cost between two links never helps
        for (int k = 0; k < 10 && n > 1; ++k) {
            const std::size_t i = r() % n;
            const std::size_t j = (i + 1 + r() % (n - 1)) % n;
            const double d = std::min(a.shares[i] * w[i], 0.05);
            if (d <= 0.0) {
                continue;
            }
            auto b = a.shares;
            b[i] -= d / w[i];
            b[j] += d / w[j];
            CHECK(allocation_objective(w, beta, alpha, b) >= a.objective * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("companding quantizers are regular and cover the support") {
    auto r = rng_for(2);
    const PointDensity dummy;
    for (int trial = 0; trial < 60; ++trial) {
        const double a = uniform(r, 0.0, 3.0);
        std::vector<Interval> zones;
        if (trial % 2) {
            const double lo = uniform(r, 0.0, 0.6);
            zones.push_back({lo, lo + uniform(r, 0.05, 0.3)});
        }
        const PointDensity lambda({0.0, 1.0}, [a](double x) { return 0.1 + std::pow(x, a); }, zones);
        const std::size_t K = zones.size() + 2 + r() % 40;
        const auto q = build_fixed_rate_quantizer(lambda, K, zones);
        REQUIRE(q.size() == K);
        CHECK(q.boundaries().front() == 0.0);
        CHECK(q.boundaries().back() == 1.0);
        for (std::size_t k = 0; k < K; ++k) {
            CHECK(q.codeword(k) >= q.boundaries()[k]);
            CHECK(q.codeword(k) <= q.boundaries()[k + 1]);
            const double mid = q.cell(k).midpoint();
            CHECK(q.quantize(mid) == k);
        }
        const auto p = cell_probabilities(q, Pdf{});
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
        CHECK(q.dont_care_indices().size() == zones.size());
    }
}

TEST_CASE("compressor inverse is a right inverse") {
    auto r = rng_for(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = uniform(r, 0.0, 4.0);
        const PointDensity lambda({0.0, 1.0}, [a](double x) { return 0.05 + std::pow(x, a); });
        const Compressor c(lambda);
        double prev = -1.0;
        for (double x = 0.0; x <= 1.0; x += 0.01) {
            const double u = c(x);
            CHECK(u >= prev);
            prev = u;
        }
        for (int k = 0; k < 20; ++k) {
            const double u = uniform(r, 0.0, 1.0);
            CHECK(c(c.inverse(u)) == doctest::Approx(u).epsilon(1e-10));
        }
    }
}

TEST_CASE("message probabilities and total expectation") {
    auto r = rng_for(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + static_cast<int>(r() % 9);
        const int n = 2 + static_cast<int>(r() % static_cast<unsigned>(N - 1));
        const std::size_t K = 1 + r() % 6;
        std::vector<double> t{0.0};
        for (std::size_t k = 1; k < K; ++k) {
            t.push_back(uniform(r, 0.0, 1.0));
        }
        t.push_back(1.0);
        std::sort(t.begin(), t.end());
        const auto p = serial_max_message_distribution(n, t);
        CHECK(std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0) == doctest::Approx(1.0));
        const double x = uniform(r, 0.0, 1.0);
        double sum = 0.0;
        for (std::size_t k = 1; k <= K; ++k) {
            if (p(k) > 0.0) {
                sum += p(k) * max_conditional_sensitivity(n, N, t[k - 1], t[k]).gamma_sq(x);
            }
        }
        CHECK(sum == doctest::Approx(max_sensitivity(N).gamma_sq(x)).epsilon(1e-10));
    }
}

TEST_CASE("serial chat messages never decrease along the chain") {
    auto r = rng_for(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + static_cast<int>(r() % 7);
        const auto spec = serial_max_network(N, uniform_partition(1 + r() % 8), 0.0, Regime::fixed_rate, 4.0 * N);
        std::vector<double> x(static_cast<std::size_t>(N));
        for (auto& v : x) {
            v = uniform(r, 0.0, 1.0);
        }
        const auto s = serial_max_chat_round(spec, x);
        for (std::size_t e = 1; e < s.messages.size(); ++e) {
            CHECK(s.messages[e] >= s.messages[e - 1]);
        }
        for (int n = 2; n <= N; ++n) {
            const double m = *std::max_element(x.begin(), x.begin() + (n - 1));
            const auto& iv = s.intervals[static_cast<std::size_t>(n - 1)];
            CHECK(m > iv.lo - 1e-15);
            CHECK(m <= iv.hi);
        }
    }
}

TEST_CASE("random specs survive the text round trip") {
    auto r = rng_for(6);
    for (int trial = 0; trial < 50; ++trial) {
        const int N = 1 + static_cast<int>(r() % 8);
        std::vector<double> t{0.0};
        const std::size_t K = 1 + r() % 4;
        for (std::size_t k = 1; k < K; ++k) {
            t.push_back(uniform(r, 0.0, 1.0));
        }
        t.push_back(1.0);
        std::sort(t.begin(), t.end());
        auto spec = serial_max_network(N, t, uniform(r, 0.0, 1.0),
                                       trial % 2 ? Regime::fixed_rate : Regime::entropy_constrained,
                                       uniform(r, 1.0, 40.0), trial % 3 ? Pdf{} : Pdf::power(uniform(r, 0.0, 2.0)));
        const auto text = write_spec(spec);
        const auto back = parse_spec(text);
        CHECK(write_spec(back) == text);
        CHECK(back.sensors == spec.sensors);
        CHECK(back.budget == spec.budget);
        REQUIRE(back.graph.edges.size() == spec.graph.edges.size());
        for (std::size_t e = 0; e < back.graph.edges.size(); ++e) {
            CHECK(back.graph.edges[e].partition == spec.graph.edges[e].partition);
            CHECK(back.graph.edges[e].cost == spec.graph.edges[e].cost);
        }
    }
}

TEST_CASE("random DAG schedules in topological order validate") {
    auto r = rng_for(7);
    for (int trial = 0; trial < 100; ++trial) {
        ChatGraph g;
        g.nodes = 2 + static_cast<int>(r() % 6);
        // edges only from lower to higher sensor ids; at most one per pair
        for (int a = 1; a <= g.nodes; ++a) {
            for (int b = a + 1; b <= g.nodes; ++b) {
                if (r() % 3 == 0) {
                    g.edges.push_back({a, b, {0.0, 1.0}, 0.0});
                }
            }
        }
        Schedule s(g.edges.size());
        std::iota(s.begin(), s.end(), std::size_t{0});
        std::stable_sort(s.begin(), s.end(), [&](std::size_t x, std::size_t y) {
            return g.edges[x].from < g.edges[y].from;
        });
        CHECK(validate_identifiable(g, s).ok());
        if (g.edges.size() >= 2) {
            std::reverse(s.begin(), s.end());
            const auto rep = validate_identifiable(g, s);
            const bool chained = std::any_of(g.edges.begin(), g.edges.end(), [&](const ChatEdge& e) {
                return std::any_of(g.edges.begin(), g.edges.end(), [&](const ChatEdge& f) { return f.to == e.from; });
            });
            CHECK(rep.has(Condition::C2) == chained);
        }
    }
}
