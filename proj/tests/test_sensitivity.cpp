#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chatq/errors.hpp"
#include "chatq/sensitivity.hpp"

#include <algorithm>
#include <cmath>

using namespace chatq;

TEST_CASE("max sensitivity x^{N-1}") {
    CHECK(max_sensitivity(4).gamma_sq(0.5) == doctest::Approx(0.125));
    CHECK(max_sensitivity(2).gamma_sq(0.25) == doctest::Approx(0.25));
    CHECK(max_sensitivity(1).gamma_sq(0.3) == 1.0);
    CHECK(max_sensitivity(3).gamma_sq(1.5) == 0.0);
}

TEST_CASE("general source uses the cdf") {
    // F(x) = x^2 for f = 2x
    CHECK(max_sensitivity(3, Pdf::power(1.0)).gamma_sq(0.5) == doctest::Approx(std::pow(0.25, 2.0)));
}

TEST_CASE("conditional sensitivity of the serial max network") {
    const auto low = max_conditional_sensitivity(2, 2, 0.0, 0.5);
    CHECK(low.gamma_sq(0.25) == doctest::Approx(0.5));
    CHECK(low.gamma_sq(0.75) == doctest::Approx(1.0));
    const auto high = max_conditional_sensitivity(2, 2, 0.5, 1.0);
    CHECK(high.gamma_sq(0.3) == 0.0);
    CHECK(high.gamma_sq(0.75) == doctest::Approx(0.5));
    REQUIRE(high.zero_zones().size() == 1);
    CHECK(high.zero_zones()[0] == Interval{0.0, 0.5});
    // n = 3, N = 4, message 2 of 2 at x = 0.8: ((0.64 - 0.25) / 0.75) * 0.8
    CHECK(max_conditional_sensitivity(3, 4, 0.5, 1.0).gamma_sq(0.8) == doctest::Approx(0.39 / 0.75 * 0.8));
}

TEST_CASE("conditional sensitivity domain errors") {
    CHECK_THROWS_AS(max_conditional_sensitivity(1, 2, 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(max_conditional_sensitivity(2, 2, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(max_conditional_sensitivity(2, 3, 0.7, 0.2), DomainError);
}

TEST_CASE("message distributions") {
    const auto three = serial_max_message_distribution(3, uniform_partition(2));
    CHECK(three(1) == doctest::Approx(0.25));
    CHECK(three(2) == doctest::Approx(0.75));
    const auto four = serial_max_message_distribution(4, uniform_partition(4));
    CHECK(four(4) == doctest::Approx(37.0 / 64.0));
    double s = 0.0;
    for (double p : four.probabilities) {
        s += p;
    }
    CHECK(s == doctest::Approx(1.0));
    CHECK(uniform_partition(4) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("total expectation over messages gives the unconditional profile") {
    for (int N : {2, 4, 6}) {
        for (int n = 2; n <= N; ++n) {
            for (std::size_t K : {2u, 3u, 4u}) {
                const auto t = uniform_partition(K);
                const auto p = serial_max_message_distribution(n, t);
                for (double x : {0.05, 0.3, 0.5, 0.61, 0.99}) {
                    double sum = 0.0;
                    for (std::size_t k = 1; k <= K; ++k) {
                        sum += p(k) * max_conditional_sensitivity(n, N, t[k - 1], t[k]).gamma_sq(x);
                    }
                    CHECK(sum == doctest::Approx(max_sensitivity(N).gamma_sq(x)).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("Monte Carlo sensitivity of the mean is 1/N^2") {
    const int N = 2;
    auto partial = [N](std::span<const double>) { return 1.0 / N; };
    auto sampler = [](std::mt19937_64& rng, std::span<double> x) {
        for (auto& v : x) {
            v = open_uniform(rng);
        }
    };
    const std::vector<double> grid{0.1, 0.5, 0.9};
    const auto mc = sensitivity_monte_carlo(partial, sampler, N, 1, grid, 100, 1);
    for (double e : mc.estimate) {
        CHECK(e == doctest::Approx(0.25));
    }
}

TEST_CASE("Monte Carlo sensitivity of the max tracks x^{N-1}") {
    const int N = 3;
    auto partial = [](std::span<const double> x) {
        return x[1] >= *std::max_element(x.begin(), x.end()) ? 1.0 : 0.0;
    };
    auto sampler = [](std::mt19937_64& rng, std::span<double> x) {
        for (auto& v : x) {
            v = open_uniform(rng);
        }
    };
    const std::vector<double> grid{0.2, 0.5, 0.8};
    const auto mc = sensitivity_monte_carlo(partial, sampler, N, 2, grid, 20000, 11);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = grid[i] * grid[i];
        const double se = std::sqrt(p * (1.0 - p) / 20000.0);
        CHECK(std::abs(mc.estimate[i] - p) < 5.0 * se);
        CHECK(mc.std_error[i] == doctest::Approx(se).epsilon(0.05));
    }
    const auto profile = mc.profile({0.0, 1.0});
    CHECK(profile.gamma_sq(0.5) == doctest::Approx(mc.estimate[1]));
}
