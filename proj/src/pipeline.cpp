#include "otkg/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/analytics.hpp"
#include "otkg/csv.hpp"
#include "otkg/error.hpp"

namespace otkg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kStageNames[] = {"build",    "synth-logs", "annotate", "enrich",
                                            "controls", "simulate",   "report",   "export"};
constexpr std::string_view kTableNames[] = {"propagation", "interproduct", "centrality",
                                            "communities", "residual"};

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) fail(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

template <class F>
std::string capture(F&& f) {
    std::ostringstream out;
    f(out);
    return out.str();
}

fs::path resolve_path(const json& j, const char* key, const fs::path& base) {
    fs::path p(j.at(key).get<std::string>());
    return p.is_absolute() ? p : base / p;
}

std::optional<fs::path> optional_path(const json& j, const char* key, const fs::path& base) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return resolve_path(j, key, base);
}

void check_exists(const fs::path& p) {
    if (!fs::is_regular_file(p)) fail(ErrorCode::IoFailure, "missing input file '" + p.string() + "'");
}

json risk_json(const std::optional<RiskAttributes>& r) {
    if (!r) return nullptr;
    return json{{"controlStrength", r->controlStrength},
                {"pExploit", r->pExploit},
                {"attackCost", r->attackCost},
                {"riskWeight", r->riskWeight}};
}

}  // namespace

std::string_view to_string(Stage s) noexcept { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> parse_stage(std::string_view text) noexcept {
    for (std::size_t i = 0; i < std::size(kStageNames); ++i) {
        if (kStageNames[i] == text) return static_cast<Stage>(i);
    }
    return std::nullopt;
}

std::string_view to_string(ReportTable t) noexcept { return kTableNames[static_cast<std::size_t>(t)]; }

std::optional<ReportTable> parse_report_table(std::string_view text) noexcept {
    for (std::size_t i = 0; i < std::size(kTableNames); ++i) {
        if (kTableNames[i] == text) return static_cast<ReportTable>(i);
    }
    if (text == "community") return ReportTable::Communities;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Run configuration

void RunConfig::validate() const {
    for (const auto* p : {&nodes, &relations, &advisories, &testbed, &scenarios}) check_exists(*p);
    for (const auto* p : {&predictions, &riskConfig, &synthProfile, &baselineLogs, &securedLogs}) {
        if (*p) check_exists(**p);
    }
    if (baselineLogs.has_value() != securedLogs.has_value()) {
        fail(ErrorCode::InvalidConfig, "baselineLogs and securedLogs must be given together");
    }
    if (fastrp.dim == 0 || fastrp.iterationWeights.empty()) {
        fail(ErrorCode::InvalidConfig, "fastrp needs dim >= 1 and at least one iteration weight");
    }
    if (knnTopK == 0) fail(ErrorCode::InvalidConfig, "knnTopK must be >= 1");
}

RunConfig run_config_from_json(const json& j, const fs::path& base) {
    RunConfig c;
    try {
        c.nodes = resolve_path(j, "nodes", base);
        c.relations = resolve_path(j, "relations", base);
        c.advisories = resolve_path(j, "advisories", base);
        c.testbed = resolve_path(j, "testbed", base);
        c.scenarios = resolve_path(j, "scenarios", base);
        c.predictions = optional_path(j, "predictions", base);
        c.riskConfig = optional_path(j, "riskConfig", base);
        c.synthProfile = optional_path(j, "synthProfile", base);
        c.baselineLogs = optional_path(j, "baselineLogs", base);
        c.securedLogs = optional_path(j, "securedLogs", base);
        c.controlProfile = j.value("controlProfile", c.controlProfile);
        c.seed = j.value("seed", c.seed);
        if (j.contains("convention")) {
            const auto text = j.at("convention").get<std::string>();
            c.convention = parse_convention(text);
            if (!c.convention) fail(ErrorCode::BadEnum, "unknown convention '" + text + "'");
        }
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
        if (j.contains("fastrp")) {
            const auto& f = j.at("fastrp");
            c.fastrp.dim = f.value("dim", c.fastrp.dim);
            c.fastrp.iterationWeights = f.value("iterationWeights", c.fastrp.iterationWeights);
            c.fastrp.includeTaxonomy = f.value("includeTaxonomy", c.fastrp.includeTaxonomy);
        }
        c.knnTopK = j.value("knnTopK", c.knnTopK);
        c.interproductTop = j.value("interproductTop", c.interproductTop);
        c.weightedCommunities = j.value("weightedCommunities", c.weightedCommunities);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, std::string("run config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open run config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    return run_config_from_json(j, fs::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.riskConfig) risk_ = load_risk_config(config_.riskConfig->string());
    if (config_.convention) risk_.convention = *config_.convention;
    config_.fastrp.seed = config_.seed;
}

void Pipeline::build() {
    if (built_) return;
    testbed_ = load_testbed(config_.testbed.string());
    add_testbed_products(graph_, testbed_, risk_.criticalityDefaults, risk_.fallbackCriticality);
    Ingestor ingestor(graph_, &diag_);
    ingestor.load_nodes(config_.nodes.string());
    ingestor.load_relations(config_.relations.string());
    if (!ingestor.filtered_ids().empty()) {
        diag_.warn(fmt::format("{} rejected/resolved vulnerabilities dropped, {} relations skipped",
                               ingestor.filtered_ids().size(), ingestor.skipped_relations()));
    }
    build_dataflow_edges(graph_, testbed_);
    const auto advisories = load_advisories(config_.advisories.string());
    link_products(graph_, testbed_, advisories, CpeIndex::build(ingestor.vulnerabilities()), &diag_);
    if (config_.predictions) {
        const auto rows = load_predictions(config_.predictions->string());
        import_predictions(graph_, rows, risk_.minPredictionConfidence);
    }
    graph_.finalize();
    for (const auto& v : audit_hierarchy(graph_)) {
        diag_.warn(fmt::format("taxonomy edge {} -> {} ({}) skips a level", v.src, v.dst,
                               to_string(v.kind)));
    }
    build_warnings_ = diag_.warnings;
    built_ = true;
}

void Pipeline::synthesize() {
    if (synthesized_) return;
    build();
    if (config_.baselineLogs) {
        baseline_ = load_logs(config_.baselineLogs->string());
        secured_ = load_logs(config_.securedLogs->string());
    } else {
        SynthProfile profile;
        if (config_.synthProfile) profile = load_synth_profile(config_.synthProfile->string());
        profile.seed = config_.seed;
        baseline_ = generate(testbed_, profile);
        secured_ = generate_secured(testbed_, profile, testbed_.control_profile(config_.controlProfile));
    }
    synthesized_ = true;
}

void Pipeline::annotate() {
    if (annotated_done_) return;
    synthesize();
    annotated_ = otkg::annotate(graph_, LogIndex(baseline_), risk_, &diag_);
    if (!all_communication_edges_annotated(graph_)) {
        fail(ErrorCode::InvariantViolation, "communication edge left without risk attributes");
    }
    annotated_done_ = true;
}

void Pipeline::enrich() {
    if (enriched_) return;
    annotate();
    const GraphView original = project_view(graph_, Configuration::Original, risk_.pruneThreshold);
    const auto embedding = fastrp_embed(original, config_.fastrp);
    links_ = knn_possible_links(embedding, original, config_.knnTopK);
    add_possible_links(graph_, links_);
    otkg::annotate(graph_, LogIndex(baseline_), risk_, &diag_);
    if (!all_communication_edges_annotated(graph_)) {
        fail(ErrorCode::InvariantViolation, "possible link left without risk attributes");
    }
    enriched_ = true;
}

void Pipeline::controls() {
    if (controlled_) return;
    enrich();
    control_report_ = apply_controls(graph_, testbed_.control_profile(config_.controlProfile),
                                     LogIndex(baseline_), LogIndex(secured_), risk_, &diag_);
    const GraphView controlled = project_view(graph_, Configuration::Controlled, risk_.pruneThreshold);
    for (EdgeIndex e : controlled.active_edges()) {
        const auto& r = graph_.edge(e).risk;
        if (!r || r->riskWeight < risk_.pruneThreshold) {
            fail(ErrorCode::InvariantViolation, "controlled view holds a sub-threshold edge");
        }
    }
    controlled_ = true;
}

ConfigViews Pipeline::views() const { return project_all(graph_, risk_.pruneThreshold); }

std::vector<Scenario> Pipeline::scenarios() const { return load_scenarios(config_.scenarios.string()); }

// ---------------------------------------------------------------------------
// Stage bookkeeping

StageState StageState::load(const fs::path& out_dir) {
    StageState s;
    std::ifstream in(out_dir / "state.json", std::ios::binary);
    if (!in) return s;
    try {
        const json j = json::parse(in);
        for (const auto& name : j.at("completed")) {
            if (auto st = parse_stage(name.get<std::string>())) s.mark(*st);
        }
    } catch (const json::exception&) {
        fail(ErrorCode::InvalidConfig, "corrupt state file in '" + out_dir.string() + "'");
    }
    return s;
}

void StageState::save(const fs::path& out_dir) const {
    json names = json::array();
    for (Stage s : stages_) names.push_back(std::string(to_string(s)));
    write_json(out_dir / "state.json", json{{"completed", names}});
}

bool StageState::done(Stage s) const {
    return std::find(stages_.begin(), stages_.end(), s) != stages_.end();
}

void StageState::require(Stage s) const {
    if (!done(s)) fail(ErrorCode::StageOrder, fmt::format("{} stage required", to_string(s)));
}

void StageState::mark(Stage s) {
    if (done(s)) return;
    stages_.push_back(s);
    std::sort(stages_.begin(), stages_.end());
}

std::vector<Stage> prerequisites(Stage stage, const RunConfig& config,
                                 std::optional<Configuration> view) {
    const bool recorded_logs = config.baselineLogs.has_value();
    switch (stage) {
        case Stage::Build: return {};
        case Stage::SynthLogs: return {Stage::Build};
        case Stage::Annotate:
            if (recorded_logs) return {Stage::Build};
            return {Stage::Build, Stage::SynthLogs};
        case Stage::Enrich: return {Stage::Annotate};
        case Stage::Controls: return {Stage::Enrich};
        case Stage::Simulate:
        case Stage::Export:
            if (!view) return {stage == Stage::Export ? Stage::Build : Stage::Controls};
            switch (*view) {
                case Configuration::Original: return {Stage::Annotate};
                case Configuration::Enriched: return {Stage::Enrich};
                case Configuration::Controlled: return {Stage::Controls};
            }
            return {};
        case Stage::Report: return {Stage::Controls};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Artifacts

void write_build_outputs(const Pipeline& p, const fs::path& out) {
    const auto counts = count_by_kind(p.graph());
    json warnings = p.build_warnings();
    write_json(out / "graph-summary.json",
               json{{"schemaVersion", kReportSchemaVersion},
                    {"testbed", p.testbed().name},
                    {"nodeCount", p.graph().node_count()},
                    {"edgeCount", p.graph().edge_count()},
                    {"nodes", counts.nodes},
                    {"edges", counts.edges},
                    {"warnings", warnings}});
}

void write_synth_outputs(const Pipeline& p, const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out / "logs", ec);
    write_logs((out / "logs" / "baseline.csv").string(), p.baseline_logs());
    write_logs((out / "logs" / "secured.csv").string(), p.secured_logs());
}

void write_annotate_outputs(const Pipeline& p, const fs::path& out) {
    const GraphView view = project_view(p.graph(), Configuration::Original, p.risk_config().pruneThreshold);
    write_text(out / "annotated-edges.csv",
               capture([&](std::ostream& o) { export_view(view, ExportFormat::EdgeCsv, o); }));
    write_json(out / "annotate-summary.json",
               json{{"schemaVersion", kReportSchemaVersion},
                    {"annotatedEdges", p.annotated_edges()},
                    {"convention", std::string(to_string(p.risk_config().convention))},
                    {"baselineRecords", p.baseline_logs().size()}});
}

void write_enrich_outputs(const Pipeline& p, const fs::path& out, bool embeddings) {
    const KnowledgeGraph& g = p.graph();
    std::ostringstream csv_out;
    csv_out << "src,dst,similarity,riskWeight,pExploit,attackCost\n";
    json links = json::array();
    for (const auto& l : p.possible_links()) {
        const auto e = g.find_edge(l.src, l.dst, EdgeKind::HasPossibleCommunication);
        const auto& r = e ? g.edge(*e).risk : std::optional<RiskAttributes>{};
        csv::write_row(csv_out, {g.node(l.src).id, g.node(l.dst).id, format_number(l.similarity),
                                 r ? format_number(r->riskWeight) : "",
                                 r ? format_number(r->pExploit) : "",
                                 r ? format_number(r->attackCost) : ""});
        links.push_back(json{{"src", g.node(l.src).id},
                             {"dst", g.node(l.dst).id},
                             {"similarity", l.similarity},
                             {"risk", risk_json(r)}});
    }
    write_text(out / "possible-links.csv", csv_out.str());
    write_json(out / "enrich-summary.json",
               json{{"schemaVersion", kReportSchemaVersion},
                    {"dim", p.config().fastrp.dim},
                    {"iterationWeights", p.config().fastrp.iterationWeights},
                    {"seed", p.config().fastrp.seed},
                    {"topK", p.config().knnTopK},
                    {"links", links}});
    if (embeddings) {
        const GraphView view = project_view(g, Configuration::Original, p.risk_config().pruneThreshold);
        const auto emb = fastrp_embed(view, p.config().fastrp);
        write_text(out / "embeddings.csv",
                   capture([&](std::ostream& o) { write_embedding_csv(o, g, emb); }));
    }
}

void write_controls_outputs(const Pipeline& p, const fs::path& out) {
    const GraphView view = project_view(p.graph(), Configuration::Controlled, p.risk_config().pruneThreshold);
    write_text(out / "controlled-edges.csv",
               capture([&](std::ostream& o) { export_view(view, ExportFormat::EdgeCsv, o); }));
    const ControlProfile profile = p.testbed().control_profile(p.config().controlProfile);
    write_json(out / "controls-summary.json",
               json{{"schemaVersion", kReportSchemaVersion},
                    {"profile", p.config().controlProfile},
                    {"controls", to_json(profile)},
                    {"edgesRecomputed", p.control_report().edgesRecomputed},
                    {"edgesPruned", p.control_report().edgesPruned},
                    {"activeEdges", view.active_edges().size()},
                    {"securedRecords", p.secured_logs().size()}});
}

SuiteReport write_simulate_outputs(const Pipeline& p, const fs::path& out,
                                   std::span<const Configuration> configs) {
    const ConfigViews views = p.views();
    SuiteReport suite = run_suite(views, p.scenarios(), configs);
    write_text(out / "propagation.csv",
               capture([&](std::ostream& o) { write_propagation_csv(o, suite); }));
    write_text(out / "propagation-aggregate.csv",
               capture([&](std::ostream& o) { write_aggregate_csv(o, suite); }));
    json j = to_json(suite);
    j["schemaVersion"] = kReportSchemaVersion;
    write_json(out / "propagation.json", j);
    return suite;
}

std::string write_report_outputs(const Pipeline& p, const fs::path& out,
                                 std::span<const ReportTable> tables, std::size_t top) {
    const ConfigViews views = p.views();
    const fs::path dir = out / "reports";
    std::string last;
    const auto emit = [&](std::string_view name, const std::string& csv_text, json j) {
        write_text(dir / fmt::format("{}.csv", name), csv_text);
        write_json(dir / fmt::format("{}.json", name),
                   json{{"schemaVersion", kReportSchemaVersion}, {"rows", std::move(j)}});
        last = csv_text;
    };
    const json manifest{{"schemaVersion", kReportSchemaVersion},
                        {"tables",
                         {{"propagation", kPropagationColumns},
                          {"interproduct", kInterproductColumns},
                          {"centrality", kCentralityColumns},
                          {"communities", kCommunityColumns},
                          {"residual", kResidualColumns},
                          {"plot-hops", "scenario,Original,Enriched,Controlled"},
                          {"plot-affected", "scenario,Original,Enriched,Controlled"},
                          {"mean-ci", kAggregateColumns}}}};
    for (ReportTable t : tables) {
        switch (t) {
            case ReportTable::Propagation: {
                const SuiteReport suite = run_suite(views, p.scenarios());
                write_text(dir / "plot-hops.csv",
                           capture([&](std::ostream& o) { write_hops_plot_csv(o, suite); }));
                write_text(dir / "plot-affected.csv",
                           capture([&](std::ostream& o) { write_affected_plot_csv(o, suite); }));
                write_text(dir / "mean-ci.csv",
                           capture([&](std::ostream& o) { write_aggregate_csv(o, suite); }));
                json j = to_json(suite);
                emit("propagation",
                     capture([&](std::ostream& o) { write_propagation_csv(o, suite); }), j.at("rows"));
                break;
            }
            case ReportTable::Interproduct: {
                const auto rows = rank_interproduct_risk(views.original, top);
                emit("interproduct",
                     capture([&](std::ostream& o) { write_interproduct_csv(o, rows); }), to_json(rows));
                break;
            }
            case ReportTable::Centrality: {
                const auto rows = centrality_delta(views.original, views.enriched);
                emit("centrality",
                     capture([&](std::ostream& o) { write_centrality_csv(o, rows); }), to_json(rows));
                break;
            }
            case ReportTable::Communities: {
                const auto report = louvain(views.enriched, p.config().weightedCommunities, p.config().seed);
                emit("communities",
                     capture([&](std::ostream& o) { write_community_csv(o, views.enriched, report); }),
                     to_json(views.enriched, report));
                break;
            }
            case ReportTable::Residual: {
                const auto rows = residual_risk_report(views.original, views.enriched, views.controlled);
                emit("residual",
                     capture([&](std::ostream& o) { write_residual_csv(o, rows); }), to_json(rows));
                break;
            }
        }
    }
    write_json(dir / "manifest.json", manifest);
    return last;
}

fs::path write_export(const Pipeline& p, const fs::path& out, Configuration view, ExportFormat format) {
    const GraphView v = project_view(p.graph(), view, p.risk_config().pruneThreshold);
    const char* ext = format == ExportFormat::Dot ? "dot" : format == ExportFormat::GraphMl ? "graphml" : "csv";
    const fs::path path = out / "exports" / fmt::format("{}.{}", to_string(view), ext);
    write_text(path, capture([&](std::ostream& o) { export_view(v, format, o); }));
    return path;
}

void run_all(const RunConfig& config, const fs::path& out) {
    Pipeline p(config);
    p.controls();
    write_build_outputs(p, out);
    write_synth_outputs(p, out);
    write_annotate_outputs(p, out);
    write_enrich_outputs(p, out);
    write_controls_outputs(p, out);
    write_simulate_outputs(p, out);
    write_report_outputs(p, out, kAllReportTables, config.interproductTop);
    for (Configuration c : kAllConfigurations) {
        for (ExportFormat f : {ExportFormat::Dot, ExportFormat::GraphMl, ExportFormat::EdgeCsv}) {
            write_export(p, out, c, f);
        }
    }
    StageState state;
    for (std::size_t i = 0; i < std::size(kStageNames); ++i) state.mark(static_cast<Stage>(i));
    state.save(out);
}

}  // namespace otkg
