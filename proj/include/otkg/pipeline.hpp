#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otkg/diagnostics.hpp"
#include "otkg/enrichment.hpp"
#include "otkg/graph.hpp"
#include "otkg/ingestion.hpp"
#include "otkg/logsynth.hpp"
#include "otkg/risk.hpp"
#include "otkg/scenario.hpp"

namespace otkg {

enum class Stage { Build, SynthLogs, Annotate, Enrich, Controls, Simulate, Report, Export };
std::string_view to_string(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view text) noexcept;

/// Dataset paths are resolved against the directory holding the config file.
struct RunConfig {
    std::filesystem::path nodes;
    std::filesystem::path relations;
    std::filesystem::path advisories;
    std::filesystem::path testbed;
    std::filesystem::path scenarios;
    std::optional<std::filesystem::path> predictions;
    std::optional<std::filesystem::path> riskConfig;
    std::optional<std::filesystem::path> synthProfile;
    /// Recorded logs used instead of synthesized ones (both or neither).
    std::optional<std::filesystem::path> baselineLogs;
    std::optional<std::filesystem::path> securedLogs;
    std::string controlProfile = "default";
    std::uint64_t seed = 42;
    std::optional<Convention> convention;
    std::filesystem::path output = "out";
    FastRpOptions fastrp;
    std::size_t knnTopK = 5;
    std::size_t interproductTop = 10;
    bool weightedCommunities = false;

    /// Throws IoFailure naming the first missing path, InvalidConfig otherwise.
    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base);
RunConfig load_run_config(const std::string& path);

/// In-memory pipeline. Each step runs whatever earlier steps it needs, so any
/// stage can be reproduced from the inputs alone.
class Pipeline {
public:
    explicit Pipeline(RunConfig config);

    void build();
    void synthesize();
    void annotate();
    void enrich();
    void controls();

    const RunConfig& config() const noexcept { return config_; }
    const RiskConfig& risk_config() const noexcept { return risk_; }
    const TestbedSpec& testbed() const noexcept { return testbed_; }
    const KnowledgeGraph& graph() const noexcept { return graph_; }
    const Diagnostics& diagnostics() const noexcept { return diag_; }
    const std::vector<std::string>& build_warnings() const noexcept { return build_warnings_; }
    const std::vector<LogRecord>& baseline_logs() const noexcept { return baseline_; }
    const std::vector<LogRecord>& secured_logs() const noexcept { return secured_; }
    const std::vector<PossibleLink>& possible_links() const noexcept { return links_; }
    const ControlApplicationReport& control_report() const noexcept { return control_report_; }
    std::size_t annotated_edges() const noexcept { return annotated_; }

    /// Views of the current graph (controls() must have run for Controlled to be populated).
    ConfigViews views() const;
    std::vector<Scenario> scenarios() const;

private:
    RunConfig config_;
    RiskConfig risk_;
    TestbedSpec testbed_;
    KnowledgeGraph graph_;
    Diagnostics diag_;
    std::vector<std::string> build_warnings_;
    std::vector<LogRecord> baseline_;
    std::vector<LogRecord> secured_;
    std::vector<PossibleLink> links_;
    ControlApplicationReport control_report_;
    std::size_t annotated_ = 0;
    bool built_ = false;
    bool synthesized_ = false;
    bool annotated_done_ = false;
    bool enriched_ = false;
    bool controlled_ = false;
};

/// Completed stages recorded in <out>/state.json.
class StageState {
public:
    static StageState load(const std::filesystem::path& out_dir);
    void save(const std::filesystem::path& out_dir) const;

    bool done(Stage s) const;
    /// Throws StageOrder("<stage> stage required") when `s` has not run.
    void require(Stage s) const;
    void mark(Stage s);
    void reset() { stages_.clear(); }

private:
    std::vector<Stage> stages_;
};

/// Stages that must have completed before `stage` may run.
std::vector<Stage> prerequisites(Stage stage, const RunConfig& config,
                                 std::optional<Configuration> view = std::nullopt);

inline constexpr int kReportSchemaVersion = 1;

enum class ReportTable { Propagation, Interproduct, Centrality, Communities, Residual };
std::string_view to_string(ReportTable t) noexcept;
std::optional<ReportTable> parse_report_table(std::string_view text) noexcept;
inline constexpr ReportTable kAllReportTables[] = {ReportTable::Propagation, ReportTable::Interproduct,
                                                   ReportTable::Centrality, ReportTable::Communities,
                                                   ReportTable::Residual};

// Stage artifact writers. Output is byte-stable for equal inputs.
void write_build_outputs(const Pipeline& p, const std::filesystem::path& out);
void write_synth_outputs(const Pipeline& p, const std::filesystem::path& out);
void write_annotate_outputs(const Pipeline& p, const std::filesystem::path& out);
void write_enrich_outputs(const Pipeline& p, const std::filesystem::path& out, bool embeddings = false);
void write_controls_outputs(const Pipeline& p, const std::filesystem::path& out);
SuiteReport write_simulate_outputs(const Pipeline& p, const std::filesystem::path& out,
                                   std::span<const Configuration> configs = kAllConfigurations);
/// Writes reports/<table>.csv and .json; returns the CSV text of the last table.
std::string write_report_outputs(const Pipeline& p, const std::filesystem::path& out,
                                 std::span<const ReportTable> tables, std::size_t top);
std::filesystem::path write_export(const Pipeline& p, const std::filesystem::path& out,
                                   Configuration view, ExportFormat format);

/// Every stage, every report and every export into `out`.
void run_all(const RunConfig& config, const std::filesystem::path& out);

}  // namespace otkg
