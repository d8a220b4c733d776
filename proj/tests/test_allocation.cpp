#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chatq/allocation.hpp"
#include "chatq/errors.hpp"

#include <cmath>
#include <limits>

using namespace chatq;

namespace {

// Exhaustive search over b_1 on a grid for two links; b_2 takes the rest.
std::pair<double, double> grid_two(const std::vector<double>& w, const std::vector<double>& beta,
                                   const std::vector<double>& alpha, double C, double step) {
    double best = std::numeric_limits<double>::infinity();
    double best_b1 = 0.0;
    for (double b1 = 0.0; b1 <= C / w[0] + 1e-12; b1 += step) {
        const double b2 = (C - w[0] * b1) / w[1];
        if (b2 < 0.0) {
            continue;
        }
        const double v =
            w[0] * beta[0] * std::exp2(-2.0 * b1 / alpha[0]) + w[1] * beta[1] * std::exp2(-2.0 * b2 / alpha[1]);
        if (v < best) {
            best = v;
            best_b1 = b1;
        }
    }
    return {best_b1, best};
}

} // namespace

TEST_CASE("interior two-link allocation") {
    const std::vector<double> beta{1.0, 4.0};
    const std::vector<double> alpha{1.0, 1.0};
    const auto kkt = waterfill_kkt(beta, alpha, 2.0);
    CHECK(kkt.shares[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(kkt.shares[1] == doctest::Approx(1.5).epsilon(1e-9));
    const auto cf = closed_form_allocation(beta, alpha, 2.0);
    REQUIRE(cf);
    CHECK(cf->shares[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cf->shares[1] == doctest::Approx(1.5).epsilon(1e-12));
    const auto [b1, v] = grid_two({1.0, 1.0}, beta, alpha, 2.0, 1e-3);
    CHECK(b1 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(kkt.objective <= v + 1e-12);
}

TEST_CASE("water level excludes a negligible link") {
    const std::vector<double> beta{1.0, 1e-6};
    const std::vector<double> alpha{1.0, 1.0};
    const auto kkt = waterfill_kkt(beta, alpha, 1.0);
    CHECK(kkt.shares[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(kkt.shares[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(closed_form_allocation(beta, alpha, 1.0));
    const auto [b1, v] = grid_two({1.0, 1.0}, beta, alpha, 1.0, 1e-3);
    CHECK(b1 == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(kkt.objective <= v + 1e-12);
}

TEST_CASE("unequal costs per bit") {
    const std::vector<double> beta{1.0, 1.0};
    const std::vector<double> alpha{1.0, 2.0};
    const auto kkt = waterfill_kkt(beta, alpha, 3.0);
    const auto [b1, v] = grid_two({1.0, 1.0}, beta, alpha, 3.0, 1e-4);
    CHECK(kkt.shares[0] == doctest::Approx(b1).epsilon(1e-3));
    CHECK(kkt.shares[0] + kkt.shares[1] == doctest::Approx(3.0));
    CHECK(kkt.rates[1] == doctest::Approx(kkt.shares[1] / 2.0));
    CHECK(kkt.objective <= v + 1e-9);
}

TEST_CASE("message-weighted allocation against a weighted grid") {
    // Sensor 1: β = 1. Sensor 2: messages with probability 1/2 each, β = 1, 4.
    const std::vector<std::vector<double>> betas{{1.0}, {1.0, 4.0}};
    const std::vector<std::vector<double>> alphas{{1.0}, {1.0, 1.0}};
    const std::vector<std::vector<double>> probs{{1.0}, {0.5, 0.5}};
    const auto r = probabilistic_allocation(betas, alphas, probs, 3.0);
    double best = std::numeric_limits<double>::infinity();
    double best_b[3] = {0, 0, 0};
    const double step = 5e-3;
    for (double a = 0.0; a <= 3.0; a += step) {
        for (double b = 0.0; a + 0.5 * b <= 3.0 + 1e-12; b += step) {
            const double c = (3.0 - a - 0.5 * b) / 0.5;
            const double v = std::exp2(-2.0 * a) + 0.5 * std::exp2(-2.0 * b) + 0.5 * 4.0 * std::exp2(-2.0 * c);
            if (v < best) {
                best = v;
                best_b[0] = a;
                best_b[1] = b;
                best_b[2] = c;
            }
        }
    }
    CHECK(r.shares[0][0] == doctest::Approx(best_b[0]).epsilon(1e-2));
    CHECK(std::abs(r.shares[1][0] - best_b[1]) < 1e-2);
    CHECK(std::abs(r.shares[1][1] - best_b[2]) < 2e-2);
    CHECK(r.objective <= best + 1e-9);
    CHECK(r.shares[0][0] + 0.5 * r.shares[1][0] + 0.5 * r.shares[1][1] == doctest::Approx(3.0));
}

TEST_CASE("weighted closed form equals weighted water-filling when interior") {
    const std::vector<double> w{0.3, 0.7, 1.0};
    const std::vector<double> beta{2.0, 1.0, 0.5};
    const std::vector<double> alpha{1.0, 0.5, 2.0};
    const auto cf = closed_form_allocation(w, beta, alpha, 6.0);
    REQUIRE(cf);
    const auto kkt = waterfill_kkt(w, beta, alpha, 6.0);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(cf->shares[i] == doctest::Approx(kkt.shares[i]).epsilon(1e-6));
    }
}

TEST_CASE("chatting cost is taken from the budget") {
    const auto base = serial_max_network(4, {0.0, 1.0}, 1.0, Regime::fixed_rate, 16.0);
    for (int rc = 0; rc <= 4; ++rc) {
        const auto spec = with_chat_rate(base, rc);
        const auto a = allocate_network(spec);
        CHECK(a.chat_cost == doctest::Approx(3.0 * rc));
        CHECK(a.fusion_budget == doctest::Approx(16.0 - 3.0 * rc));
    }
    CHECK_THROWS_AS(with_chat_rate(base, 1.5), DomainError);
    CHECK_THROWS_AS(allocate_network(with_chat_rate(base, 6)), InfeasibleError);
}

TEST_CASE("cheap chatting helps, expensive chatting hurts") {
    const std::vector<double> grid{0, 1, 2, 3, 4};
    const auto cheap = chat_budget_search(serial_max_network(4, {0.0, 1.0}, 0.01, Regime::fixed_rate, 16.0), 16.0, grid);
    CHECK(cheap.chat_rate > 0.0);
    const auto dear = chat_budget_search(serial_max_network(4, {0.0, 1.0}, 1.0, Regime::fixed_rate, 16.0), 16.0, grid);
    CHECK(dear.candidates.back().predicted > dear.candidates.front().predicted);
    CHECK(cheap.candidates.front().predicted ==
          doctest::Approx(closed_form_max_nochat(4, 16.0, Regime::fixed_rate)).epsilon(1e-9));
}

TEST_CASE("no-chat allocation is equal") {
    for (auto regime : {Regime::fixed_rate, Regime::entropy_constrained}) {
        const auto a = allocate_network(serial_max_network(5, {0.0, 1.0}, 0.0, regime, 25.0));
        for (const auto& l : a.links) {
            CHECK(l.share == doctest::Approx(5.0).epsilon(1e-9));
        }
        CHECK(a.predicted == doctest::Approx(closed_form_max_nochat(5, 25.0, regime)).epsilon(1e-8));
    }
}

TEST_CASE("fixed user rates are honoured") {
    auto spec = serial_max_network(3, uniform_partition(2), 0.0, Regime::fixed_rate, 12.0);
    spec.rates = std::vector<double>{3.0, 4.0, 5.0};
    const auto a = allocate_network(spec);
    CHECK(a.sensor_rates == std::vector<double>{3.0, 4.0, 5.0});
}

TEST_CASE("integer codebook rounding stays within budget") {
    const std::vector<double> rates{3.7, 4.2, 4.1};
    const std::vector<double> alphas{1.0, 1.0, 1.0};
    const std::vector<std::size_t> min_sizes{1, 2, 2};
    auto d = [](std::size_t, std::size_t K) { return 1.0 / (12.0 * K * K); };
    const auto K = round_codebook_sizes(rates, alphas, 12.0, min_sizes, d);
    double cost = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) {
        cost += std::log2(static_cast<double>(K[i]));
        CHECK(K[i] >= min_sizes[i]);
    }
    CHECK(cost <= 12.0 + 1e-12);
    CHECK(K == std::vector<std::size_t>{13, 18, 17});
}

TEST_CASE("allocation csv") {
    const auto a = allocate_network(serial_max_network(2, uniform_partition(2), 0.0, Regime::entropy_constrained, 8.0));
    const auto csv = a.to_csv();
    CHECK(csv.rfind("link,message,alpha,b,rate\n", 0) == 0);
    CHECK(a.links.size() == 3);
}
