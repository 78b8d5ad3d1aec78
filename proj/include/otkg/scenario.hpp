#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otkg/analytics.hpp"
#include "otkg/graph.hpp"

namespace otkg {

/// Products matching every given criterion. An empty selector matches nothing.
struct Selector {
    std::vector<std::string> ids;
    std::vector<std::string> assetClasses;
    std::optional<std::string> zone;
    std::optional<std::string> protocol;

    bool empty() const noexcept {
        return ids.empty() && assetClasses.empty() && !zone && !protocol;
    }
};

/// Sorted products; throws SelectorEmpty when nothing matches.
std::vector<NodeIndex> resolve(const KnowledgeGraph& graph, const Selector& selector,
                               std::string_view what);

struct Scenario {
    std::string id;
    std::string name;
    Selector source;
    Selector target;
    std::size_t k = 20;
    WeightPolicy policy = WeightPolicy::Hop;
};

std::vector<Scenario> scenarios_from_json(const nlohmann::json& j);
std::vector<Scenario> load_scenarios(const std::string& path);

/// The three projections of one annotated graph.
struct ConfigViews {
    GraphView original;
    GraphView enriched;
    GraphView controlled;

    const GraphView& get(Configuration c) const;
};

ConfigViews project_all(const KnowledgeGraph& graph, double prune_threshold = kDefaultPruneThreshold);

struct PropagationReport {
    std::string scenarioId;
    std::string name;
    Configuration config = Configuration::Original;
    double avgHops = 0.0;
    std::size_t minHops = 0;
    std::size_t maxHops = 0;
    std::size_t affected = 0;
    std::size_t paths = 0;
    std::size_t targets = 0;
    /// Hop count of every returned path (not serialized).
    std::vector<std::size_t> hopSamples;
};

/// One report per configuration. Source/target pairs with the same product
/// are skipped; routes that do not exist only show up in `affected`.
std::vector<PropagationReport> run_scenario(const ConfigViews& views, const Scenario& scenario,
                                            std::span<const Configuration> configs = kAllConfigurations);

struct SuiteAggregate {
    Configuration config = Configuration::Original;
    std::size_t samples = 0;
    double meanHops = 0.0;
    double sdHops = 0.0;
    double ci95Low = 0.0;
    double ci95High = 0.0;
    /// Mean of per-scenario avgHops over scenarios with at least one path.
    double scenarioMeanHops = 0.0;
    std::size_t scenariosWithPaths = 0;
};

struct SuiteReport {
    std::vector<PropagationReport> rows;
    std::vector<Configuration> configs;
    std::vector<SuiteAggregate> aggregates;  // one per entry of configs

    const SuiteAggregate& aggregate(Configuration c) const;
};

SuiteReport run_suite(const ConfigViews& views, const std::vector<Scenario>& scenarios,
                      std::span<const Configuration> configs = kAllConfigurations);

inline constexpr std::string_view kPropagationColumns =
    "scenario,name,config,avgHops,minHops,maxHops,affected";
inline constexpr std::string_view kAggregateColumns =
    "config,samples,meanHops,sdHops,ci95Low,ci95High,scenarioMeanHops,scenariosWithPaths";

void write_propagation_csv(std::ostream& out, const SuiteReport& report);
void write_aggregate_csv(std::ostream& out, const SuiteReport& report);
/// Per-scenario values one column per configuration (hop and reach bar charts).
void write_hops_plot_csv(std::ostream& out, const SuiteReport& report);
void write_affected_plot_csv(std::ostream& out, const SuiteReport& report);
nlohmann::json to_json(const SuiteReport& report);

struct CentralityRow {
    std::string node;
    double pageRankBefore = 0.0;
    double pageRankAfter = 0.0;
    double pageRankDelta = 0.0;
    double betweennessBefore = 0.0;
    double betweennessAfter = 0.0;
    double betweennessDelta = 0.0;
};

/// Both views must come from the same graph. Rows by |ΔPageRank| desc, then id.
std::vector<CentralityRow> centrality_delta(const GraphView& before, const GraphView& after);

inline constexpr std::string_view kCentralityColumns =
    "node,pageRankBefore,pageRankAfter,pageRankDelta,betweennessBefore,betweennessAfter,"
    "betweennessDelta";
void write_centrality_csv(std::ostream& out, const std::vector<CentralityRow>& rows);
nlohmann::json to_json(const std::vector<CentralityRow>& rows);

}  // namespace otkg
