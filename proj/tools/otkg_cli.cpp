#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "otkg/error.hpp"
#include "otkg/pipeline.hpp"

namespace fs = std::filesystem;
using namespace otkg;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStage = 3;
constexpr int kExitInvariant = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::StageOrder: return kExitStage;
        case ErrorCode::InvariantViolation:
        case ErrorCode::GraphNotFinalized: return kExitInvariant;
        default: return kExitInput;
    }
}

struct Globals {
    std::string config = "data/fixture/run-config.json";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> convention;
    std::optional<std::string> out;
};

RunConfig load_config(const Globals& g) {
    RunConfig c = load_run_config(g.config);
    if (g.seed) c.seed = *g.seed;
    if (g.convention) {
        c.convention = parse_convention(*g.convention);
        if (!c.convention) fail(ErrorCode::BadEnum, "unknown convention '" + *g.convention + "'");
    }
    if (g.out) c.output = *g.out;
    return c;
}

void require_all(const StageState& state, Stage stage, const RunConfig& c,
                 std::optional<Configuration> view = std::nullopt) {
    for (Stage s : prerequisites(stage, c, view)) state.require(s);
}

Configuration parse_view(const std::string& text) {
    auto c = parse_configuration(text);
    if (!c) fail(ErrorCode::BadEnum, "unknown configuration '" + text + "'");
    return *c;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OT security knowledge graph: build, risk annotation, enrichment and attack propagation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "Run config JSON")->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for log synthesis, embeddings and Louvain");
    app.add_option("--convention", g.convention, "Control-strength convention")
        ->check(CLI::IsMember({"literal", "complement"}));
    app.add_option("--out", g.out, "Output directory");

    auto* build = app.add_subcommand("build", "Ingest datasets and the testbed into the graph");
    bool validate_only = false;
    build->add_flag("--validate-only", validate_only, "Check inputs without writing anything");

    auto* synth = app.add_subcommand("synth-logs", "Generate baseline and secured logs");
    auto* annotate = app.add_subcommand("annotate", "Compute edge risk attributes");
    auto* enrich = app.add_subcommand("enrich", "Infer possible links with FastRP + KNN");
    bool dump_embeddings = false;
    enrich->add_flag("--embeddings", dump_embeddings, "Also write embeddings.csv");
    auto* controls = app.add_subcommand("controls", "Apply the control profile and prune");

    auto* simulate = app.add_subcommand("simulate", "Run the scenario catalog");
    std::vector<std::string> sim_configs;
    simulate->add_option("--config", sim_configs, "Configuration(s) to simulate (default all)")
        ->check(CLI::IsMember({"Original", "Enriched", "Controlled"}));

    auto* report = app.add_subcommand("report", "Write report tables");
    std::vector<std::string> tables;
    std::optional<std::size_t> top;
    report->add_option("--table", tables, "propagation|interproduct|centrality|communities|residual")
        ->check(CLI::IsMember({"propagation", "interproduct", "centrality", "communities", "community",
                               "residual"}));
    report->add_option("--top", top, "Rows in the interproduct table");

    auto* exporter = app.add_subcommand("export", "Export a configuration view");
    std::string format = "dot";
    std::string view = "Original";
    exporter->add_option("--format", format, "dot|graphml|csv")
        ->check(CLI::IsMember({"dot", "graphml", "csv"}))
        ->capture_default_str();
    exporter->add_option("--view", view, "Original|Enriched|Controlled")
        ->check(CLI::IsMember({"Original", "Enriched", "Controlled"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        const RunConfig config = load_config(g);
        const fs::path out = config.output;
        StageState state = StageState::load(out);
        Pipeline p(config);

        if (build->parsed()) {
            p.build();
            print_warnings(p.build_warnings());
            if (validate_only) {
                std::cout << fmt::format("valid: {} nodes, {} edges\n", p.graph().node_count(),
                                         p.graph().edge_count());
                return 0;
            }
            write_build_outputs(p, out);
            state.reset();
            state.mark(Stage::Build);
            std::cout << fmt::format("graph: {} nodes, {} edges\n", p.graph().node_count(),
                                     p.graph().edge_count());
        } else if (synth->parsed()) {
            require_all(state, Stage::SynthLogs, config);
            p.synthesize();
            write_synth_outputs(p, out);
            state.mark(Stage::SynthLogs);
            std::cout << fmt::format("logs: {} baseline, {} secured records\n", p.baseline_logs().size(),
                                     p.secured_logs().size());
        } else if (annotate->parsed()) {
            require_all(state, Stage::Annotate, config);
            p.annotate();
            write_annotate_outputs(p, out);
            state.mark(Stage::Annotate);
            std::cout << fmt::format("annotated {} edges\n", p.annotated_edges());
        } else if (enrich->parsed()) {
            require_all(state, Stage::Enrich, config);
            p.enrich();
            write_enrich_outputs(p, out, dump_embeddings);
            state.mark(Stage::Enrich);
            std::cout << fmt::format("possible links: {}\n", p.possible_links().size());
        } else if (controls->parsed()) {
            require_all(state, Stage::Controls, config);
            p.controls();
            write_controls_outputs(p, out);
            state.mark(Stage::Controls);
            std::cout << fmt::format("controlled edges: {} recomputed, {} pruned\n",
                                     p.control_report().edgesRecomputed, p.control_report().edgesPruned);
        } else if (simulate->parsed()) {
            std::vector<Configuration> configs;
            for (const auto& c : sim_configs) configs.push_back(parse_view(c));
            if (configs.empty()) configs.assign(std::begin(kAllConfigurations), std::end(kAllConfigurations));
            for (Configuration c : configs) require_all(state, Stage::Simulate, config, c);
            if (std::find(configs.begin(), configs.end(), Configuration::Controlled) != configs.end()) {
                p.controls();
            } else if (std::find(configs.begin(), configs.end(), Configuration::Enriched) != configs.end()) {
                p.enrich();
            } else {
                p.annotate();
            }
            const SuiteReport suite = write_simulate_outputs(p, out, configs);
            state.mark(Stage::Simulate);
            for (const auto& a : suite.aggregates) {
                std::cout << fmt::format("{}: mean hops {:.3f} (95% CI {:.3f}..{:.3f}, n={})\n",
                                         to_string(a.config), a.meanHops, a.ci95Low, a.ci95High, a.samples);
            }
        } else if (report->parsed()) {
            require_all(state, Stage::Report, config);
            std::vector<ReportTable> selected;
            for (const auto& t : tables) selected.push_back(*parse_report_table(t));
            if (selected.empty()) selected.assign(std::begin(kAllReportTables), std::end(kAllReportTables));
            p.controls();
            const std::string text =
                write_report_outputs(p, out, selected, top.value_or(config.interproductTop));
            state.mark(Stage::Report);
            if (selected.size() == 1) std::cout << text;
        } else if (exporter->parsed()) {
            const Configuration v = parse_view(view);
            require_all(state, Stage::Export, config, v);
            switch (v) {
                case Configuration::Original: p.annotate(); break;
                case Configuration::Enriched: p.enrich(); break;
                case Configuration::Controlled: p.controls(); break;
            }
            const auto fmt_enum = parse_export_format(format);
            if (!fmt_enum) fail(ErrorCode::BadEnum, "unknown export format '" + format + "'");
            const fs::path path = write_export(p, out, v, *fmt_enum);
            state.mark(Stage::Export);
            std::cout << path.string() << "\n";
        }
        state.save(out);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
}
