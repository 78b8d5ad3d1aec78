#include "otkg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/csv.hpp"
#include "otkg/error.hpp"

namespace otkg {

using nlohmann::json;

namespace {

bool uses_protocol(const Node& node, const std::string& protocol) {
    auto it = node.props.find("protocols");
    if (it == node.props.end()) return false;
    try {
        for (const auto& p : json::parse(it->second)) {
            if (p.get<std::string>() == protocol) return true;
        }
    } catch (const json::exception&) {
        return false;
    }
    return false;
}

std::vector<std::string> string_or_list(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    const auto& v = j.at(key);
    if (v.is_string()) return {v.get<std::string>()};
    return v.get<std::vector<std::string>>();
}

Selector selector_from_json(const json& j) {
    Selector s;
    s.ids = string_or_list(j, "ids");
    s.assetClasses = string_or_list(j, "assetClass");
    if (j.contains("zone")) s.zone = j.at("zone").get<std::string>();
    if (j.contains("protocol")) s.protocol = j.at("protocol").get<std::string>();
    return s;
}

SuiteAggregate aggregate_of(Configuration config, const std::vector<PropagationReport>& rows) {
    SuiteAggregate a;
    a.config = config;
    double sum = 0.0;
    double scenario_sum = 0.0;
    for (const auto& r : rows) {
        if (r.config != config) continue;
        for (auto h : r.hopSamples) {
            sum += static_cast<double>(h);
            ++a.samples;
        }
        if (r.paths > 0) {
            scenario_sum += r.avgHops;
            ++a.scenariosWithPaths;
        }
    }
    if (a.samples > 0) a.meanHops = sum / static_cast<double>(a.samples);
    if (a.scenariosWithPaths > 0) a.scenarioMeanHops = scenario_sum / a.scenariosWithPaths;
    if (a.samples > 1) {
        double ss = 0.0;
        for (const auto& r : rows) {
            if (r.config != config) continue;
            for (auto h : r.hopSamples) ss += (h - a.meanHops) * (h - a.meanHops);
        }
        a.sdHops = std::sqrt(ss / static_cast<double>(a.samples - 1));
    }
    const double half = a.samples > 0 ? 1.96 * a.sdHops / std::sqrt(static_cast<double>(a.samples))
                                      : 0.0;
    a.ci95Low = a.meanHops - half;
    a.ci95High = a.meanHops + half;
    return a;
}

}  // namespace

std::vector<NodeIndex> resolve(const KnowledgeGraph& graph, const Selector& selector,
                               std::string_view what) {
    std::vector<NodeIndex> out;
    if (!selector.empty()) {
        for (NodeIndex n : graph.nodes_of_kind(NodeKind::Product)) {
            const Node& node = graph.node(n);
            if (!selector.ids.empty() &&
                std::find(selector.ids.begin(), selector.ids.end(), node.id) == selector.ids.end()) {
                continue;
            }
            if (!selector.assetClasses.empty()) {
                auto it = node.props.find("assetClass");
                if (it == node.props.end() ||
                    std::find(selector.assetClasses.begin(), selector.assetClasses.end(),
                              it->second) == selector.assetClasses.end()) {
                    continue;
                }
            }
            if (selector.zone && node.zone != selector.zone) continue;
            if (selector.protocol && !uses_protocol(node, *selector.protocol)) continue;
            out.push_back(n);
        }
    }
    if (out.empty()) {
        fail(ErrorCode::SelectorEmpty, std::string(what) + " selector matches no product");
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Scenario> scenarios_from_json(const json& j) {
    std::vector<Scenario> out;
    try {
        const json& list = j.is_array() ? j : j.at("scenarios");
        std::set<std::string> ids;
        for (const auto& s : list) {
            Scenario sc;
            sc.id = s.at("id").get<std::string>();
            sc.name = s.value("name", sc.id);
            sc.source = selector_from_json(s.at("source"));
            sc.target = selector_from_json(s.at("target"));
            sc.k = s.value("k", sc.k);
            if (s.contains("policy")) {
                const auto text = s.at("policy").get<std::string>();
                auto p = parse_weight_policy(text);
                if (!p) fail(ErrorCode::BadEnum, "scenario " + sc.id + ": unknown policy '" + text + "'");
                sc.policy = *p;
            }
            if (sc.k == 0) fail(ErrorCode::InvalidConfig, "scenario " + sc.id + ": k must be >= 1");
            if (!ids.insert(sc.id).second) {
                fail(ErrorCode::InvalidConfig, "duplicate scenario id '" + sc.id + "'");
            }
            out.push_back(std::move(sc));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, std::string("scenario catalog: ") + e.what());
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    try {
        return scenarios_from_json(json::parse(in));
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
}

const GraphView& ConfigViews::get(Configuration c) const {
    switch (c) {
        case Configuration::Original: return original;
        case Configuration::Enriched: return enriched;
        case Configuration::Controlled: return controlled;
    }
    return original;
}

ConfigViews project_all(const KnowledgeGraph& graph, double prune_threshold) {
    return ConfigViews{project_view(graph, Configuration::Original, prune_threshold),
                       project_view(graph, Configuration::Enriched, prune_threshold),
                       project_view(graph, Configuration::Controlled, prune_threshold)};
}

std::vector<PropagationReport> run_scenario(const ConfigViews& views, const Scenario& scenario,
                                            std::span<const Configuration> configs) {
    const KnowledgeGraph& graph = views.original.graph();
    const auto sources = resolve(graph, scenario.source, scenario.id + " source");
    const auto targets = resolve(graph, scenario.target, scenario.id + " target");
    std::vector<PropagationReport> out;
    for (Configuration config : configs) {
        const GraphView& view = views.get(config);
        PropagationReport r;
        r.scenarioId = scenario.id;
        r.name = scenario.name;
        r.config = config;
        r.targets = targets.size();
        std::set<NodeIndex> reached;
        for (NodeIndex s : sources) {
            for (NodeIndex t : targets) {
                if (s == t) continue;
                for (const auto& p : yen_k_shortest(view, s, t, scenario.k, scenario.policy)) {
                    r.hopSamples.push_back(p.hopCount);
                    reached.insert(t);
                }
            }
        }
        r.paths = r.hopSamples.size();
        r.affected = reached.size();
        if (r.paths > 0) {
            double sum = 0.0;
            for (auto h : r.hopSamples) sum += static_cast<double>(h);
            r.avgHops = sum / static_cast<double>(r.paths);
            r.minHops = *std::min_element(r.hopSamples.begin(), r.hopSamples.end());
            r.maxHops = *std::max_element(r.hopSamples.begin(), r.hopSamples.end());
        }
        out.push_back(std::move(r));
    }
    return out;
}

const SuiteAggregate& SuiteReport::aggregate(Configuration c) const {
    for (const auto& a : aggregates) {
        if (a.config == c) return a;
    }
    fail(ErrorCode::BadValue, fmt::format("suite has no {} rows", to_string(c)));
}

SuiteReport run_suite(const ConfigViews& views, const std::vector<Scenario>& scenarios,
                      std::span<const Configuration> configs) {
    SuiteReport report;
    report.configs.assign(configs.begin(), configs.end());
    for (const auto& s : scenarios) {
        for (auto& r : run_scenario(views, s, configs)) report.rows.push_back(std::move(r));
    }
    for (Configuration c : configs) report.aggregates.push_back(aggregate_of(c, report.rows));
    return report;
}

void write_propagation_csv(std::ostream& out, const SuiteReport& report) {
    out << kPropagationColumns << '\n';
    for (const auto& r : report.rows) {
        csv::write_row(out, {r.scenarioId, r.name, std::string(to_string(r.config)),
                             fmt::format("{:.2f}", r.avgHops), std::to_string(r.minHops),
                             std::to_string(r.maxHops), std::to_string(r.affected)});
    }
}

void write_aggregate_csv(std::ostream& out, const SuiteReport& report) {
    out << kAggregateColumns << '\n';
    for (const auto& a : report.aggregates) {
        csv::write_row(out, {std::string(to_string(a.config)), std::to_string(a.samples),
                             format_number(a.meanHops), format_number(a.sdHops),
                             format_number(a.ci95Low), format_number(a.ci95High),
                             format_number(a.scenarioMeanHops),
                             std::to_string(a.scenariosWithPaths)});
    }
}

namespace {
template <typename Get>
void write_plot(std::ostream& out, const SuiteReport& report, Get get) {
    std::vector<std::string> row{"scenario"};
    for (Configuration c : report.configs) row.emplace_back(to_string(c));
    csv::write_row(out, row);
    const std::size_t width = report.configs.size();
    for (std::size_t i = 0; width > 0 && i + width <= report.rows.size(); i += width) {
        row.assign(1, report.rows[i].scenarioId);
        for (std::size_t j = 0; j < width; ++j) row.push_back(get(report.rows[i + j]));
        csv::write_row(out, row);
    }
}
}  // namespace

void write_hops_plot_csv(std::ostream& out, const SuiteReport& report) {
    write_plot(out, report, [](const PropagationReport& r) { return format_number(r.avgHops); });
}

void write_affected_plot_csv(std::ostream& out, const SuiteReport& report) {
    write_plot(out, report,
               [](const PropagationReport& r) { return std::to_string(r.affected); });
}

json to_json(const SuiteReport& report) {
    json j;
    j["rows"] = json::array();
    for (const auto& r : report.rows) {
        j["rows"].push_back({{"scenario", r.scenarioId},
                             {"name", r.name},
                             {"config", std::string(to_string(r.config))},
                             {"avgHops", r.avgHops},
                             {"minHops", r.minHops},
                             {"maxHops", r.maxHops},
                             {"affected", r.affected},
                             {"paths", r.paths},
                             {"targets", r.targets}});
    }
    j["aggregates"] = json::array();
    for (const auto& a : report.aggregates) {
        j["aggregates"].push_back({{"config", std::string(to_string(a.config))},
                                   {"samples", a.samples},
                                   {"meanHops", a.meanHops},
                                   {"sdHops", a.sdHops},
                                   {"ci95Low", a.ci95Low},
                                   {"ci95High", a.ci95High},
                                   {"scenarioMeanHops", a.scenarioMeanHops},
                                   {"scenariosWithPaths", a.scenariosWithPaths}});
    }
    return j;
}

std::vector<CentralityRow> centrality_delta(const GraphView& before, const GraphView& after) {
    if (&before.graph() != &after.graph()) {
        fail(ErrorCode::BadValue, "centrality_delta views must share one graph");
    }
    std::vector<CentralityRow> rows;
    const auto members = before.members();
    if (members.empty()) return rows;
    const auto pr0 = pagerank(before);
    const auto pr1 = pagerank(after);
    const auto bt0 = betweenness(before);
    const auto bt1 = betweenness(after);
    for (std::size_t i = 0; i < members.size(); ++i) {
        CentralityRow r;
        r.node = before.graph().node(members[i]).id;
        r.pageRankBefore = pr0[i];
        r.pageRankAfter = pr1[i];
        r.pageRankDelta = pr1[i] - pr0[i];
        r.betweennessBefore = bt0[i];
        r.betweennessAfter = bt1[i];
        r.betweennessDelta = bt1[i] - bt0[i];
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const CentralityRow& a, const CentralityRow& b) {
        const double da = std::abs(a.pageRankDelta);
        const double db = std::abs(b.pageRankDelta);
        if (da != db) return da > db;
        return a.node < b.node;
    });
    return rows;
}

void write_centrality_csv(std::ostream& out, const std::vector<CentralityRow>& rows) {
    out << kCentralityColumns << '\n';
    for (const auto& r : rows) {
        csv::write_row(out, {r.node, format_number(r.pageRankBefore), format_number(r.pageRankAfter),
                             format_number(r.pageRankDelta), format_number(r.betweennessBefore),
                             format_number(r.betweennessAfter), format_number(r.betweennessDelta)});
    }
}

json to_json(const std::vector<CentralityRow>& rows) {
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"node", r.node},
                     {"pageRankBefore", r.pageRankBefore},
                     {"pageRankAfter", r.pageRankAfter},
                     {"pageRankDelta", r.pageRankDelta},
                     {"betweennessBefore", r.betweennessBefore},
                     {"betweennessAfter", r.betweennessAfter},
                     {"betweennessDelta", r.betweennessDelta}});
    }
    return j;
}

}  // namespace otkg
