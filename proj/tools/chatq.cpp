// chatq: design, analyze and simulate chatting quantizer networks.
//
// Exit codes: 0 success, 1 validation failure, 2 usage or spec-file error,
// 3 the computation itself failed (infeasible budget, bad profile, ...).

#include "chatq/errors.hpp"
#include "chatq/experiments.hpp"
#include "chatq/specfile.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace chatq;

namespace {

struct Flags {
    std::string spec_path;
    std::string out;
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    std::string decoder = "conditional-expectation";
    std::string placement = "midpoint";
    std::string regime;
    unsigned workers = 1;
};

std::optional<Regime> parse_regime(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s == "fixed-rate" || s == "fixed") {
        return Regime::fixed_rate;
    }
    if (s == "entropy-constrained" || s == "entropy") {
        return Regime::entropy_constrained;
    }
    throw CLI::ValidationError("--regime", "expected fixed-rate or entropy-constrained");
}

Decoder parse_decoder(const std::string& s) {
    if (s == "plug-in") {
        return Decoder::plug_in;
    }
    if (s == "conditional-expectation") {
        return Decoder::conditional_expectation;
    }
    throw CLI::ValidationError("--decoder", "expected plug-in or conditional-expectation");
}

CodewordPlacement parse_placement(const std::string& s) {
    if (s == "midpoint") {
        return CodewordPlacement::midpoint;
    }
    if (s == "literal") {
        return CodewordPlacement::literal;
    }
    throw CLI::ValidationError("--placement", "expected midpoint or literal");
}

// Spec file values, with --regime taking precedence.
ChatNetworkSpec load(const Flags& f) {
    auto spec = load_spec(f.spec_path);
    if (auto r = parse_regime(f.regime)) {
        spec.regime = *r;
    }
    return spec;
}

void emit(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(f.out, text);
    }
}

std::string run_design(const Flags& f) {
    const auto design = design_network(load(f), parse_placement(f.placement));
    std::ostringstream out;
    out << "# spec " << spec_hash(design.spec) << ", " << to_string(design.spec.regime) << '\n';
    for (std::size_t n = 0; n < design.banks.size(); ++n) {
        for (std::size_t m = 0; m < design.banks[n].size(); ++m) {
            out << "sensor " << n + 1 << " message " << m + 1 << " K " << design.banks[n][m].size() << '\n';
            out << design.banks[n][m].serialize();
        }
    }
    return out.str();
}

std::string run_predict(const Flags& f) {
    const auto spec = load(f);
    const auto designs = network_designs(spec);
    const auto alloc = allocate_network(spec, designs, spec.budget);
    const auto report = spec.regime == Regime::fixed_rate
                            ? hr_fmse_fixed_rate_chat(spec.source, designs, alloc.sensor_rates)
                            : hr_fmse_entropy_chat(spec.source, designs, alloc.message_rates);
    std::ostringstream out;
    out << "# " << to_string(spec.regime) << ", total = " << format_real(report.total) << '\n';
    out << report.to_csv();
    return out.str();
}

std::string run_allocate(const Flags& f) {
    const auto alloc = allocate_network(load(f));
    std::ostringstream out;
    out << "# " << to_string(alloc.regime) << ", chat cost = " << format_real(alloc.chat_cost)
        << ", fusion budget = " << format_real(alloc.fusion_budget) << ", predicted = " << format_real(alloc.predicted)
        << '\n';
    out << alloc.to_csv();
    return out.str();
}

std::string run_simulate(const Flags& f) {
    const auto spec = load(f);
    const auto design = design_network(spec, parse_placement(f.placement));
    SimulationOptions opt;
    opt.trials = f.trials;
    opt.seed = f.seed;
    opt.decoder = parse_decoder(f.decoder);
    opt.workers = f.workers;
    const auto r = simulate_network(design, opt);
    Table t;
    t.comments = {"spec " + spec_hash(spec) + ", " + to_string(spec.regime)};
    t.columns = {"metric", "value"};
    t.add_row({"trials", format_int(static_cast<long long>(r.trials))});
    t.add_row({"seed", std::to_string(f.seed)});
    t.add_row({"decoder", to_string(r.decoder)});
    t.add_row({"fmse", format_real(r.fmse)});
    t.add_row({"std_error", format_real(r.std_error)});
    t.add_row({"fmse_plug_in", format_real(r.fmse_plug_in)});
    t.add_row({"fmse_conditional", format_real(r.fmse_conditional)});
    t.add_row({"predicted", format_real(r.predicted_fmse)});
    t.add_row({"replay_mismatches", format_int(static_cast<long long>(r.replay_mismatches))});
    for (std::size_t n = 0; n < r.rates.size(); ++n) {
        t.add_row({"rate_" + std::to_string(n + 1), format_real(r.rates[n])});
    }
    return t.to_csv();
}

int run_validate(const Flags& f) {
    const auto spec = load_spec(f.spec_path);
    const auto report = validate_identifiable(spec.graph, spec.schedule);
    emit(f, report.to_text());
    return report.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design, analyze and simulate chatting quantizer networks computing the max."};
    app.require_subcommand(1);
    Flags f;

    auto add_spec = [&](CLI::App* sub) {
        sub->add_option("spec", f.spec_path, "Network spec file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out,-o", f.out, "Write the output here instead of stdout");
        sub->add_option("--regime", f.regime, "Override the spec file regime: fixed-rate | entropy-constrained");
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
        sub->add_option("--decoder", f.decoder, "plug-in | conditional-expectation")->capture_default_str();
        sub->add_option("--workers", f.workers, "Worker threads; results do not depend on it")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    auto add_placement = [&](CLI::App* sub) {
        sub->add_option("--placement", f.placement, "Codewords: midpoint | literal")->capture_default_str();
    };

    auto* design = app.add_subcommand("design", "Emit the quantizer banks of a spec");
    add_spec(design);
    add_placement(design);
    auto* predict = app.add_subcommand("predict", "High-resolution distortion report at the optimal allocation");
    add_spec(predict);
    auto* allocate = app.add_subcommand("allocate", "Cost allocation report");
    add_spec(allocate);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo fMSE of the designed network");
    add_spec(simulate);
    add_sim(simulate);
    add_placement(simulate);
    auto* validate = app.add_subcommand("validate", "Codebook identifiability check (exit 1 on failure)");
    validate->add_option("spec", f.spec_path, "Network spec file")->required()->check(CLI::ExistingFile);
    validate->add_option("--out,-o", f.out, "Write the report here instead of stdout");

    RateSweep rs;
    std::string rs_regime = "fixed-rate";
    auto* sweep_rc = app.add_subcommand("sweep-rc", "Chatting-rate sweep of the serial max network");
    sweep_rc->add_option("--sensors,-N", rs.sensors, "Sensor count")->capture_default_str();
    sweep_rc->add_option("--budget-per-sensor", rs.budget_per_sensor, "C / N")->capture_default_str();
    sweep_rc->add_option("--chat-cost", rs.chat_cost, "Cost per chatted bit")->capture_default_str();
    sweep_rc->add_option("--chat-rates", rs.chat_rates, "Integer chatting rates")->capture_default_str();
    sweep_rc->add_option("--regime", rs_regime, "fixed-rate | entropy-constrained")->capture_default_str();
    sweep_rc->add_option("--trials", rs.trials, "Trials per point (0: prediction only)")->capture_default_str();
    sweep_rc->add_option("--seed", rs.seed, "64-bit seed")->capture_default_str();
    sweep_rc->add_option("--workers", rs.workers, "Worker threads")->capture_default_str();
    std::string rs_decoder = "plug-in";
    sweep_rc->add_option("--decoder", rs_decoder, "plug-in | conditional-expectation")->capture_default_str();
    sweep_rc->add_option("--out,-o", f.out, "Write the CSV here instead of stdout");

    PartitionSweep ps;
    std::string ps_regime = "fixed-rate";
    auto* sweep_p1 = app.add_subcommand("sweep-p1", "Partition-boundary sweep with free one-bit chatting");
    sweep_p1->add_option("--sensors,-N", ps.sensors, "Sensor counts")->capture_default_str();
    sweep_p1->add_option("--p1", ps.boundaries, "Boundaries in (0, 1); default 0.01 ... 0.99");
    sweep_p1->add_option("--budget-per-sensor", ps.budget_per_sensor, "C / N")->capture_default_str();
    sweep_p1->add_option("--regime", ps_regime, "fixed-rate | entropy-constrained")->capture_default_str();
    sweep_p1->add_option("--out,-o", f.out, "Write the CSV here instead of stdout");

    ScenarioParams sp;
    std::string sp_regime;
    auto* scenarios = app.add_subcommand("scenarios", "Scenario ladder (both regimes unless --regime)");
    scenarios->add_option("--sensors,-N", sp.sensors, "Sensor count")->capture_default_str();
    scenarios->add_option("--budget", sp.budget, "Total budget C")->capture_default_str();
    scenarios->add_option("--regime", sp_regime, "fixed-rate | entropy-constrained");
    scenarios->add_option("--out,-o", f.out, "Write the CSV here instead of stdout");

    std::string fig_dir = "figures";
    std::size_t fig_trials = 0;
    auto* figures = app.add_subcommand("figures", "Write every figure table into a directory");
    figures->add_option("dir", fig_dir, "Output directory")->capture_default_str();
    figures->add_option("--trials", fig_trials, "Trials per simulated sweep point (0: none)")->capture_default_str();
    figures->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
    figures->add_option("--workers", f.workers, "Worker threads")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*design) {
            emit(f, run_design(f));
        } else if (*predict) {
            emit(f, run_predict(f));
        } else if (*allocate) {
            emit(f, run_allocate(f));
        } else if (*simulate) {
            emit(f, run_simulate(f));
        } else if (*validate) {
            return run_validate(f);
        } else if (*sweep_rc) {
            rs.regime = *parse_regime(rs_regime);
            rs.decoder = parse_decoder(rs_decoder);
            emit(f, sweep_chatting_rate(rs).to_csv());
        } else if (*sweep_p1) {
            ps.regime = *parse_regime(ps_regime);
            emit(f, sweep_partition(ps).to_csv());
        } else if (*scenarios) {
            Table all;
            std::vector<Regime> regimes{Regime::fixed_rate, Regime::entropy_constrained};
            if (auto r = parse_regime(sp_regime)) {
                regimes = {*r};
            }
            for (Regime r : regimes) {
                sp.regime = r;
                const auto t = run_scenarios(sp);
                all.columns = t.columns;
                for (const auto& row : t.rows) {
                    all.add_row(row);
                }
            }
            emit(f, all.to_csv());
        } else if (*figures) {
            for (const auto& path : write_figure_tables(fig_dir, fig_trials, f.seed, f.workers)) {
                std::cout << path << '\n';
            }
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "chatq: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "chatq: " << f.spec_path << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "chatq: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
