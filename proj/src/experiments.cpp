#include "chatq/experiments.hpp"

#include "chatq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>

namespace chatq {

namespace {

std::size_t min_codebook(const ConditionalDesign& d) {
    return d.dont_care.size() + d.density.granular_components().size();
}

void append(Table& into, const Table& from) {
    if (into.columns.empty()) {
        into.columns = from.columns;
    }
    for (const auto& r : from.rows) {
        into.add_row(r);
    }
}

std::vector<double> default_boundaries() {
    std::vector<double> p;
    for (int i = 1; i <= 99; ++i) {
        p.push_back(static_cast<double>(i) / 100.0);
    }
    return p;
}

} // namespace

NetworkDesign design_network(const ChatNetworkSpec& spec, CodewordPlacement placement, bool build_banks) {
    NetworkDesign out;
    out.spec = spec;
    out.designs = network_designs(spec);
    out.allocation = allocate_network(spec, out.designs, spec.budget);
    const auto N = static_cast<std::size_t>(spec.sensors);

    if (spec.regime == Regime::fixed_rate) {
        std::vector<std::vector<double>> ratio(N);
        std::vector<std::size_t> min_sizes(N, 1);
        for (std::size_t n = 0; n < N; ++n) {
            for (const auto& d : out.designs[n]) {
                ratio[n].push_back(sensitivity_ratio_moment(d.sensitivity, d.density, spec.source));
                min_sizes[n] = std::max(min_sizes[n], min_codebook(d));
            }
        }
        auto distortion = [&](std::size_t n, std::size_t K) {
            double d = 0.0;
            for (std::size_t m = 0; m < out.designs[n].size(); ++m) {
                const double g = static_cast<double>(K) - static_cast<double>(out.designs[n][m].dont_care.size());
                d += out.designs[n][m].probability * ratio[n][m] / (12.0 * g * g);
            }
            return d;
        };
        const double budget = spec.rates ? std::numeric_limits<double>::infinity() : out.allocation.fusion_budget;
        const auto K = round_codebook_sizes(out.allocation.sensor_rates, spec.fusion_costs, budget, min_sizes, distortion);
        std::vector<double> rates(N);
        for (std::size_t n = 0; n < N; ++n) {
            out.codebook_sizes.emplace_back(out.designs[n].size(), K[n]);
            rates[n] = std::log2(static_cast<double>(K[n]));
        }
        out.predicted = hr_fmse_fixed_rate_chat(spec.source, out.designs, rates).total;
    } else {
        std::vector<std::vector<double>> rates(N);
        for (std::size_t n = 0; n < N; ++n) {
            std::vector<std::size_t> sizes;
            for (std::size_t m = 0; m < out.designs[n].size(); ++m) {
                const auto& d = out.designs[n][m];
                const auto c = entropy_constants(d, spec.source);
                const double R = std::max(out.allocation.message_rates[n][m], c.indicator);
                rates[n].push_back(R);
                sizes.push_back(std::max(min_codebook(d), entropy_codebook_size(c, R, d.dont_care.size())));
            }
            out.codebook_sizes.push_back(std::move(sizes));
        }
        out.predicted = hr_fmse_entropy_chat(spec.source, out.designs, rates).total;
    }
    if (build_banks) {
        for (std::size_t n = 0; n < N; ++n) {
            out.banks.push_back(conditional_quantizer_bank(out.designs[n], out.codebook_sizes[n], placement));
        }
    }
    return out;
}

SimulationResult simulate_network(const NetworkDesign& design, const SimulationOptions& options) {
    if (design.banks.empty()) {
        throw ConfigError("design has no quantizer banks");
    }
    auto result = run_simulation(design.spec, design.banks, options);
    result.predicted_fmse = design.predicted;
    return result;
}

Table sweep_chatting_rate(const RateSweep& sweep) {
    Table t;
    t.columns = {"N",         "alpha_c",   "R_c",       "chat_cost", "fusion_budget", "feasible",
                 "predicted", "finite_prediction", "empirical", "std_error", "best"};
    const double C = sweep.budget_per_sensor * sweep.sensors;
    const Pdf uniform;
    const auto base = serial_max_network(sweep.sensors, {0.0, 1.0}, sweep.chat_cost, sweep.regime, C, uniform);
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t best_row = 0;
    for (double rc : sweep.chat_rates) {
        const auto spec = with_chat_rate(base, rc);
        std::vector<std::string> row{format_int(sweep.sensors), format_real(sweep.chat_cost), format_real(rc),
                                     format_real(spec.chat_cost()), format_real(C - spec.chat_cost())};
        std::optional<NetworkAllocation> feasible;
        if (C - spec.chat_cost() > 0.0) {
            try {
                feasible = allocate_network(spec);
            } catch (const InfeasibleError&) {
            }
        }
        if (!feasible) {
            row.insert(row.end(), {"0", "nan", "nan", "nan", "nan", "0"});
            t.add_row(row);
            continue;
        }
        const auto& alloc = *feasible;
        double finite = std::numeric_limits<double>::quiet_NaN();
        double empirical = std::numeric_limits<double>::quiet_NaN();
        double se = std::numeric_limits<double>::quiet_NaN();
        // The asymptotic allocation can fit where integer codebooks do not.
        std::optional<NetworkDesign> design;
        const bool simulate = sweep.trials > 0 && sweep.regime == Regime::fixed_rate;
        try {
            design = design_network(spec, CodewordPlacement::midpoint, simulate);
            finite = design->predicted;
        } catch (const InfeasibleError&) {
        }
        if (simulate && design) {
            SimulationOptions opt;
            opt.trials = sweep.trials;
            opt.seed = sweep.seed;
            opt.workers = sweep.workers;
            opt.decoder = sweep.decoder;
            const auto sim = simulate_network(*design, opt);
            empirical = sim.fmse;
            se = sim.std_error;
        }
        row.insert(row.end(), {"1", format_real(alloc.predicted), format_real(finite), format_real(empirical),
                               format_real(se), "0"});
        if (alloc.predicted < best_value) {
            best_value = alloc.predicted;
            best_row = t.rows.size();
        }
        t.add_row(row);
    }
    if (std::isfinite(best_value)) {
        t.rows[best_row].back() = "1";
    }
    return t;
}

double partition_distortion(int N, double budget, double p1, Regime regime) {
    if (!(p1 > 0.0 && p1 < 1.0)) {
        throw DomainError("partition boundary must lie in (0, 1)");
    }
    const auto spec = serial_max_network(N, {0.0, p1, 1.0}, 0.0, regime, budget);
    return allocate_network(spec).predicted;
}

Table sweep_partition(const PartitionSweep& sweep) {
    Table t;
    t.columns = {"N", "p1", "predicted", "nochat", "ratio", "improvement"};
    const auto boundaries = sweep.boundaries.empty() ? default_boundaries() : sweep.boundaries;
    for (int N : sweep.sensors) {
        const double C = sweep.budget_per_sensor * N;
        const double nochat = allocate_network(serial_max_network(N, {0.0, 1.0}, 0.0, sweep.regime, C)).predicted;
        for (double p1 : boundaries) {
            const double d = partition_distortion(N, C, p1, sweep.regime);
            t.add_row({format_int(N), format_real(p1), format_real(d), format_real(nochat), format_real(d / nochat),
                       format_real(nochat / d)});
        }
    }
    return t;
}

Table run_scenarios(const ScenarioParams& params) {
    Table t;
    t.columns = {"regime", "scenario", "description", "p1", "distortion", "improvement"};
    const int N = params.sensors;
    const double C = params.budget;
    const std::string regime = to_string(params.regime);

    const double nochat = allocate_network(serial_max_network(N, {0.0, 1.0}, 0.0, params.regime, C)).predicted;
    t.add_row({regime, "0", "no chatting", "nan", format_real(nochat), "1"});

    auto equal = serial_max_network(N, {0.0, 0.5, 1.0}, 0.0, params.regime, C);
    equal.rates = std::vector<double>(static_cast<std::size_t>(N), C / N);
    const double s1 = allocate_network(equal).predicted;
    t.add_row({regime, "1", "equal rates with uniform chatting", "0.5", format_real(s1), format_real(nochat / s1)});

    const double s2 = partition_distortion(N, C, 0.5, params.regime);
    t.add_row({regime, "2", "rate allocation with uniform chatting", "0.5", format_real(s2), format_real(nochat / s2)});

    double s3 = std::numeric_limits<double>::infinity();
    double best_p1 = 0.5;
    const auto steps = static_cast<int>(std::round(1.0 / params.grid_step));
    for (int i = 1; i < steps; ++i) {
        const double p1 = i * params.grid_step;
        const double d = partition_distortion(N, C, p1, params.regime);
        if (d < s3) {
            s3 = d;
            best_p1 = p1;
        }
    }
    t.add_row({regime, "3", "rate allocation with optimized chatting", format_real(best_p1), format_real(s3),
               format_real(nochat / s3)});
    return t;
}

Table allocation_report(int N, double C, double chat_rate, double chat_cost) {
    Table t;
    t.columns = {"regime", "sensor", "message", "probability", "b", "rate"};
    for (Regime r : {Regime::fixed_rate, Regime::entropy_constrained}) {
        const auto spec = with_chat_rate(serial_max_network(N, {0.0, 1.0}, chat_cost, r, C), chat_rate);
        const auto alloc = allocate_network(spec);
        for (const auto& l : alloc.links) {
            t.add_row({to_string(r), format_int(l.sensor), format_int(l.message), format_real(l.probability),
                       format_real(l.share), format_real(l.rate)});
        }
    }
    return t;
}

std::vector<std::string> write_figure_tables(const std::string& dir, std::size_t trials, std::uint64_t seed,
                                             unsigned workers) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto save = [&](const std::string& name, Table t, const std::string& what) {
        t.comments.insert(t.comments.begin(), what);
        const std::string path = (fs::path(dir) / name).string();
        write_text_file(path, t.to_csv());
        written.push_back(path);
    };

    Table fig3 = allocation_report(10, 50.0, 3.0, 0.0);
    save("fig3.csv", fig3, "cost allocation, max network, N=10, C=5N, R_c=3, alpha_c=0, alpha_n=1");

    const std::vector<double> rc{0, 1, 2, 3, 4, 5};
    for (Regime r : {Regime::fixed_rate, Regime::entropy_constrained}) {
        Table by_n;
        for (int N : {2, 4, 6, 8, 10}) {
            RateSweep s;
            s.sensors = N;
            s.chat_cost = 0.01;
            s.regime = r;
            s.chat_rates = rc;
            s.trials = trials;
            s.seed = seed;
            s.workers = workers;
            append(by_n, sweep_chatting_rate(s));
        }
        save(r == Regime::fixed_rate ? "fig5a.csv" : "fig5b.csv", by_n,
             "fMSE vs chatting rate, " + to_string(r) + ", C=4N, alpha_c=0.01, alpha_n=1");

        Table by_cost;
        for (double ac : {0.0, 0.01, 0.1, 0.5, 1.0}) {
            RateSweep s;
            s.sensors = 4;
            s.chat_cost = ac;
            s.regime = r;
            s.chat_rates = rc;
            s.trials = trials;
            s.seed = seed;
            s.workers = workers;
            append(by_cost, sweep_chatting_rate(s));
        }
        save(r == Regime::fixed_rate ? "fig5c.csv" : "fig5d.csv", by_cost,
             "fMSE vs chatting rate, " + to_string(r) + ", N=4, C=4N, alpha_n=1");

        PartitionSweep p;
        p.regime = r;
        save(r == Regime::fixed_rate ? "fig6a.csv" : "fig6b.csv", sweep_partition(p),
             "distortion vs partition boundary p1, " + to_string(r) + ", R_c=1, alpha_c=0, C=4N");
    }

    Table fig7;
    for (Regime r : {Regime::fixed_rate, Regime::entropy_constrained}) {
        ScenarioParams sp;
        sp.regime = r;
        append(fig7, run_scenarios(sp));
    }
    save("fig7.csv", fig7, "scenario ladder, N=5, C=5N, R_c=1, alpha_c=0");
    return written;
}

} // namespace chatq
