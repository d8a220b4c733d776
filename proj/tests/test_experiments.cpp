#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chatq/errors.hpp"
#include "chatq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace chatq;

TEST_CASE("R_c = 0 row is the no-chat closed form") {
    for (auto regime : {Regime::fixed_rate, Regime::entropy_constrained}) {
        RateSweep s;
        s.regime = regime;
        const auto t = sweep_chatting_rate(s);
        CHECK(t.number(0, "predicted") == doctest::Approx(closed_form_max_nochat(4, 16.0, regime)).epsilon(1e-9));
    }
}

TEST_CASE("fixed-rate chatting helps when cheap and hurts when dear") {
    RateSweep cheap;
    cheap.chat_cost = 0.0;
    const auto a = sweep_chatting_rate(cheap);
    CHECK(a.number(3, "predicted") < a.number(0, "predicted"));
    RateSweep dear;
    dear.chat_cost = 1.0;
    dear.chat_rates = {0, 1, 2, 3, 4};
    const auto b = sweep_chatting_rate(dear);
    CHECK(b.number(4, "predicted") > b.number(0, "predicted"));
    CHECK(b.number(0, "best") == 1.0);
}

TEST_CASE("infeasible rows are kept and marked") {
    RateSweep s;
    s.chat_cost = 2.0;
    s.chat_rates = {0, 1, 3};
    const auto t = sweep_chatting_rate(s);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.number(2, "feasible") == 0.0);
    CHECK(std::isnan(t.number(2, "predicted")));
}

TEST_CASE("rows without integer codebooks keep the asymptotic prediction") {
    RateSweep s;
    s.chat_cost = 1.0;
    s.chat_rates = {5};
    const auto t = sweep_chatting_rate(s);
    CHECK(t.number(0, "feasible") == 1.0);
    CHECK(std::isfinite(t.number(0, "predicted")));
    CHECK(std::isnan(t.number(0, "finite_prediction")));
}

TEST_CASE("p1 = 1/2 equals one-bit uniform chatting") {
    for (auto regime : {Regime::fixed_rate, Regime::entropy_constrained}) {
        RateSweep s;
        s.chat_cost = 0.0;
        s.regime = regime;
        const double rc1 = sweep_chatting_rate(s).number(1, "predicted");
        CHECK(partition_distortion(4, 16.0, 0.5, regime) == doctest::Approx(rc1).epsilon(1e-12));
    }
    CHECK_THROWS_AS(partition_distortion(4, 16.0, 1.0, Regime::fixed_rate), DomainError);
}

TEST_CASE("partition sweep columns") {
    PartitionSweep p;
    p.sensors = {2, 3};
    p.boundaries = {0.2, 0.5};
    const auto t = sweep_partition(p);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.number(0, "nochat") == doctest::Approx(closed_form_max_nochat(2, 8.0, Regime::fixed_rate)));
    CHECK(t.number(1, "ratio") == doctest::Approx(t.number(1, "predicted") / t.number(1, "nochat")));
    CHECK(t.number(1, "improvement") == doctest::Approx(1.0 / t.number(1, "ratio")));
}

TEST_CASE("scenario ladder baseline") {
    ScenarioParams sp;
    sp.grid_step = 0.05;
    const auto t = run_scenarios(sp);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.number(0, "distortion") == doctest::Approx(closed_form_max_nochat(5, 25.0, Regime::fixed_rate)));
    CHECK(t.number(1, "improvement") > 1.0);
    CHECK(t.number(3, "improvement") >= t.number(2, "improvement"));
}

TEST_CASE("allocation report") {
    const auto t = allocation_report(10, 50.0, 3.0, 0.0);
    std::set<std::string> sensor1_fr;
    std::set<std::string> sensor1_ec;
    double lo_fr = 1e9, hi_fr = -1e9, lo_ec = 1e9, hi_ec = -1e9;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const double rate = t.number(r, "rate");
        if (row[0] == "fixed-rate") {
            lo_fr = std::min(lo_fr, rate);
            hi_fr = std::max(hi_fr, rate);
            if (row[1] == "1") {
                sensor1_fr.insert(row[2]);
            }
        } else {
            lo_ec = std::min(lo_ec, rate);
            hi_ec = std::max(hi_ec, rate);
            if (row[1] == "1") {
                sensor1_ec.insert(row[2]);
            }
        }
    }
    CHECK(sensor1_fr.size() == 1);
    CHECK(sensor1_ec.size() == 1);
    CHECK(hi_ec - lo_ec > hi_fr - lo_fr);
    const auto flat = allocation_report(4, 16.0, 0.0, 0.0);
    for (std::size_t r = 0; r < flat.rows.size(); ++r) {
        CHECK(flat.number(r, "b") == doctest::Approx(4.0).epsilon(1e-9));
    }
}

TEST_CASE("design prediction uses the integer codebooks") {
    const auto spec = serial_max_network(4, uniform_partition(2), 0.01, Regime::fixed_rate, 16.0);
    const auto d = design_network(spec);
    double cost = spec.chat_cost();
    for (const auto& sizes : d.codebook_sizes) {
        cost += std::log2(static_cast<double>(sizes.front()));
    }
    CHECK(cost <= 16.0 + 1e-9);
    CHECK(d.predicted >= d.allocation.predicted);
    CHECK(d.banks.size() == 4);
    const auto ec = design_network(serial_max_network(3, uniform_partition(2), 0.0, Regime::entropy_constrained, 12.0));
    CHECK(ec.codebook_sizes[2].size() == 2);
    CHECK(ec.predicted == doctest::Approx(ec.allocation.predicted).epsilon(1e-9));
}

TEST_CASE("reruns give identical tables") {
    RateSweep s;
    s.trials = 3000;
    s.seed = 5;
    CHECK(sweep_chatting_rate(s).to_csv() == sweep_chatting_rate(s).to_csv());
}
