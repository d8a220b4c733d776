#include "chatq/specfile.hpp"

#include "chatq/errors.hpp"
#include "chatq/sensitivity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace chatq {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s, char extra = ' ') {
    std::string copy = s;
    std::replace(copy.begin(), copy.end(), extra, ' ');
    std::replace(copy.begin(), copy.end(), '\t', ' ');
    std::istringstream in(copy);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

struct Entry {
    std::size_t line;
    std::string key;
    std::string value;
};

double real(const Entry& e, const std::string& token) {
    double v = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
        throw ParseError(e.line, e.key, "'" + token + "' is not a finite number");
    }
    return v;
}

long integer(const Entry& e, const std::string& token) {
    long v = 0;
    const auto* last = token.data() + token.size();
    const auto res = std::from_chars(token.data(), last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ParseError(e.line, e.key, "'" + token + "' is not an integer");
    }
    return v;
}

std::vector<double> reals(const Entry& e, const std::string& text, char sep = ' ') {
    std::vector<double> out;
    for (const auto& w : words(text, sep)) {
        out.push_back(real(e, w));
    }
    return out;
}

void check_partition(const Entry& e, const std::vector<double>& t) {
    if (t.size() < 2) {
        throw ParseError(e.line, e.key, "a partition needs at least two boundaries");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            throw ParseError(e.line, e.key, "partition boundaries must be strictly increasing");
        }
    }
}

Pdf parse_source(const Entry& e) {
    const auto w = words(e.value);
    if (w.empty()) {
        throw ParseError(e.line, e.key, "missing source description");
    }
    try {
        if (w[0] == "uniform") {
            if (w.size() == 1) {
                return Pdf::uniform();
            }
            if (w.size() != 3) {
                throw ParseError(e.line, e.key, "expected 'uniform lo hi'");
            }
            return Pdf::uniform(real(e, w[1]), real(e, w[2]));
        }
        if (w[0] == "power") {
            if (w.size() != 2) {
                throw ParseError(e.line, e.key, "expected 'power a'");
            }
            return Pdf::power(real(e, w[1]));
        }
        if (w[0] == "grid") {
            std::vector<double> grid;
            std::vector<double> values;
            for (std::size_t i = 1; i < w.size(); ++i) {
                const auto colon = w[i].find(':');
                if (colon == std::string::npos) {
                    throw ParseError(e.line, e.key, "grid entries are x:density");
                }
                grid.push_back(real(e, w[i].substr(0, colon)));
                values.push_back(real(e, w[i].substr(colon + 1)));
            }
            return Pdf::gridded(GriddedFunction(grid, values));
        }
    } catch (const DomainError& err) {
        throw ParseError(e.line, e.key, err.what());
    }
    throw ParseError(e.line, e.key, "unknown source '" + w[0] + "'");
}

ChatEdge parse_edge(const Entry& e, double default_cost) {
    const auto w = words(e.value);
    if (w.size() < 2) {
        throw ParseError(e.line, e.key, "expected 'from to [cells=K] [cost=a] [partition=t0,...]'");
    }
    ChatEdge edge;
    edge.from = static_cast<int>(integer(e, w[0]));
    edge.to = static_cast<int>(integer(e, w[1]));
    edge.cost = default_cost;
    long cells = -1;
    bool have_partition = false;
    for (std::size_t i = 2; i < w.size(); ++i) {
        const auto eq = w[i].find('=');
        if (eq == std::string::npos) {
            throw ParseError(e.line, e.key, "edge attribute '" + w[i] + "' needs name=value");
        }
        const std::string name = w[i].substr(0, eq);
        const std::string value = w[i].substr(eq + 1);
        if (name == "cells") {
            cells = integer(e, value);
        } else if (name == "cost") {
            edge.cost = real(e, value);
        } else if (name == "partition") {
            edge.partition = reals(e, value, ',');
            check_partition(e, edge.partition);
            have_partition = true;
        } else {
            throw ParseError(e.line, e.key, "unknown edge attribute '" + name + "'");
        }
    }
    if (edge.cost < 0.0) {
        throw ParseError(e.line, e.key, "chatting cost must be nonnegative");
    }
    if (!have_partition) {
        if (cells < 1) {
            throw ParseError(e.line, e.key, "edge needs cells=K or partition=...");
        }
        edge.partition = uniform_partition(static_cast<std::size_t>(cells));
    } else if (cells >= 0 && static_cast<std::size_t>(cells) != edge.cells()) {
        throw ParseError(e.line, e.key, "cells does not match the partition");
    }
    return edge;
}

} // namespace

ChatNetworkSpec parse_spec(const std::string& text) {
    std::map<std::string, Entry> single;
    std::vector<Entry> edges;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    static const std::vector<std::string> known{"n",         "computation", "regime", "source",   "budget",
                                                "fusion_cost", "topology",  "chat_rate", "partition", "chat_cost",
                                                "schedule",  "rates"};
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, line, "expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        Entry entry{line_no, key, trim(line.substr(eq + 1))};
        if (key == "edge") {
            edges.push_back(entry);
            continue;
        }
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ParseError(line_no, key, "unknown key");
        }
        if (single.count(key)) {
            throw ParseError(line_no, key, "duplicate key (first on line " + std::to_string(single[key].line) + ")");
        }
        single[key] = entry;
    }

    auto find = [&](const std::string& k) -> const Entry* {
        const auto it = single.find(k);
        return it == single.end() ? nullptr : &it->second;
    };

    const Entry* n_entry = find("n");
    if (!n_entry) {
        throw ParseError(line_no, "N", "missing required key");
    }
    const long N = integer(*n_entry, n_entry->value);
    if (N < 1) {
        throw ParseError(n_entry->line, n_entry->key, "need at least one sensor");
    }

    if (const Entry* e = find("computation"); e && e->value != "max") {
        throw ParseError(e->line, e->key, "unsupported computation '" + e->value + "' (only max)");
    }
    Regime regime = Regime::fixed_rate;
    if (const Entry* e = find("regime")) {
        if (e->value == "fixed-rate" || e->value == "fixed") {
            regime = Regime::fixed_rate;
        } else if (e->value == "entropy-constrained" || e->value == "entropy") {
            regime = Regime::entropy_constrained;
        } else {
            throw ParseError(e->line, e->key, "regime must be fixed-rate or entropy-constrained");
        }
    }
    Pdf source;
    if (const Entry* e = find("source")) {
        source = parse_source(*e);
    }
    double budget = 0.0;
    if (const Entry* e = find("budget")) {
        budget = real(*e, e->value);
        if (budget < 0.0) {
            throw ParseError(e->line, e->key, "budget must be nonnegative");
        }
    }
    double chat_cost = 0.0;
    if (const Entry* e = find("chat_cost")) {
        chat_cost = real(*e, e->value);
        if (chat_cost < 0.0) {
            throw ParseError(e->line, e->key, "chatting cost must be nonnegative");
        }
    }

    std::string topology = edges.empty() ? "serial" : "custom";
    if (const Entry* e = find("topology")) {
        topology = e->value;
        if (topology != "serial" && topology != "custom") {
            throw ParseError(e->line, e->key, "topology must be serial or custom");
        }
        if (topology == "serial" && !edges.empty()) {
            throw ParseError(edges.front().line, "edge", "edge lines need topology = custom");
        }
    }

    ChatNetworkSpec spec;
    if (topology == "serial") {
        std::vector<double> partition{source.support().lo, source.support().hi};
        const Entry* pe = find("partition");
        const Entry* re = find("chat_rate");
        if (pe && re) {
            throw ParseError(pe->line, pe->key, "give either partition or chat_rate, not both");
        }
        if (pe) {
            partition = reals(*pe, pe->value);
            check_partition(*pe, partition);
        } else if (re) {
            const double R = real(*re, re->value);
            if (R < 0.0 || R > 20.0 || std::floor(R) != R) {
                throw ParseError(re->line, re->key, "chat_rate must be an integer number of bits in [0, 20]");
            }
            partition = uniform_partition(std::size_t{1} << static_cast<unsigned>(R));
        }
        spec = serial_max_network(static_cast<int>(N), partition, chat_cost, regime, budget, source);
    } else {
        if (find("partition") || find("chat_rate")) {
            const Entry* e = find("partition") ? find("partition") : find("chat_rate");
            throw ParseError(e->line, e->key, "custom topologies take partitions on edge lines");
        }
        spec.sensors = static_cast<int>(N);
        spec.source = source;
        spec.regime = regime;
        spec.budget = budget;
        spec.graph.nodes = static_cast<int>(N);
        spec.fusion_costs.assign(static_cast<std::size_t>(N), 1.0);
        for (const auto& e : edges) {
            spec.graph.edges.push_back(parse_edge(e, chat_cost));
        }
        if (const Entry* e = find("schedule")) {
            for (const auto& w : words(e->value)) {
                const long idx = integer(*e, w);
                if (idx < 0) {
                    throw ParseError(e->line, e->key, "schedule entries are edge indices >= 0");
                }
                spec.schedule.push_back(static_cast<std::size_t>(idx));
            }
        } else {
            for (std::size_t i = 0; i < spec.graph.edges.size(); ++i) {
                spec.schedule.push_back(i);
            }
        }
    }
    if (topology == "serial") {
        if (const Entry* e = find("schedule")) {
            throw ParseError(e->line, e->key, "serial topologies use the chain schedule");
        }
    }

    if (const Entry* e = find("fusion_cost")) {
        const auto costs = reals(*e, e->value);
        if (costs.size() != 1 && costs.size() != static_cast<std::size_t>(N)) {
            throw ParseError(e->line, e->key, "give one cost or one per sensor");
        }
        for (double c : costs) {
            if (!(c > 0.0)) {
                throw ParseError(e->line, e->key, "fusion link costs must be positive");
            }
        }
        spec.fusion_costs =
            costs.size() == 1 ? std::vector<double>(static_cast<std::size_t>(N), costs[0]) : costs;
    }
    if (const Entry* e = find("rates")) {
        const auto rates = reals(*e, e->value);
        if (rates.size() != static_cast<std::size_t>(N)) {
            throw ParseError(e->line, e->key, "give one rate per sensor");
        }
        for (double r : rates) {
            if (r < 0.0) {
                throw ParseError(e->line, e->key, "rates must be nonnegative");
            }
        }
        spec.rates = rates;
    }
    return spec;
}

ChatNetworkSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open spec file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_spec(text.str());
}

std::string write_spec(const ChatNetworkSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "N = " << spec.sensors << '\n';
    out << "computation = " << to_string(spec.computation) << '\n';
    out << "regime = " << to_string(spec.regime) << '\n';
    out << "source = " << spec.source.describe() << '\n';
    out << "budget = " << spec.budget << '\n';
    out << "fusion_cost =";
    for (double c : spec.fusion_costs) {
        out << ' ' << c;
    }
    out << '\n';
    out << "topology = custom\n";
    for (const auto& e : spec.graph.edges) {
        out << "edge = " << e.from << ' ' << e.to << " cost=" << e.cost << " partition=";
        for (std::size_t i = 0; i < e.partition.size(); ++i) {
            out << (i ? "," : "") << e.partition[i];
        }
        out << '\n';
    }
    if (!spec.schedule.empty()) {
        out << "schedule =";
        for (auto s : spec.schedule) {
            out << ' ' << s;
        }
        out << '\n';
    }
    if (spec.rates) {
        out << "rates =";
        for (double r : *spec.rates) {
            out << ' ' << r;
        }
        out << '\n';
    }
    return out.str();
}

std::string spec_hash(const ChatNetworkSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : write_spec(spec)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

} // namespace chatq
