#include "otkg/risk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/csv.hpp"
#include "otkg/error.hpp"

namespace otkg {

using nlohmann::json;

namespace {

constexpr std::string_view kAuthNames[] = {"Anonymous", "Password", "Certificate"};
constexpr std::string_view kSecurityNames[] = {"None", "Sign", "SignAndEncrypt"};
constexpr std::string_view kEventNames[] = {"Read",    "Write",           "FailedWrite",
                                            "AuditWrite", "Session",     "ConfigCheckPass",
                                            "ConfigCheckFail"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::string_view (&names)[N]) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) {
            return static_cast<Enum>(i);
        }
    }
    return std::nullopt;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void check_unit(double v, std::string_view what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorCode::InvalidConfig, fmt::format("{} = {} must lie in [0,1]", what, v));
    }
}

ControlFactors factors_from_json(const json& j, std::string_view what) {
    ControlFactors f{j.at("a").get<double>(), j.at("c").get<double>(), j.at("e").get<double>(),
                     j.at("h").get<double>()};
    for (double v : {f.a, f.c, f.e, f.h}) {
        check_unit(v, what);
    }
    return f;
}

json factors_to_json(const ControlFactors& f) {
    return {{"a", f.a}, {"c", f.c}, {"e", f.e}, {"h", f.h}};
}

}  // namespace

std::string_view to_string(AuthMode m) noexcept { return kAuthNames[static_cast<int>(m)]; }
std::string_view to_string(SecurityMode m) noexcept { return kSecurityNames[static_cast<int>(m)]; }
std::string_view to_string(LogEvent e) noexcept { return kEventNames[static_cast<int>(e)]; }
std::optional<AuthMode> parse_auth_mode(std::string_view text) noexcept {
    return lookup<AuthMode>(text, kAuthNames);
}
std::optional<SecurityMode> parse_security_mode(std::string_view text) noexcept {
    return lookup<SecurityMode>(text, kSecurityNames);
}
std::optional<LogEvent> parse_log_event(std::string_view text) noexcept {
    return lookup<LogEvent>(text, kEventNames);
}

std::string_view to_string(Convention c) noexcept {
    return c == Convention::Literal ? "literal" : "complement";
}

std::optional<Convention> parse_convention(std::string_view text) noexcept {
    if (text == "literal" || text == "Literal") return Convention::Literal;
    if (text == "complement" || text == "Complement") return Convention::Complement;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Log I/O

std::vector<LogRecord> read_logs(std::istream& in, std::string_view source) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        fail(ErrorCode::MissingColumn, std::string(source) + ": empty file, expected header");
    }
    const csv::Header header(fields);
    const std::size_t cols[] = {
        header.require("timestamp", source), header.require("src", source),
        header.require("dst", source),       header.require("protocol", source),
        header.require("authMode", source),  header.require("securityMode", source),
        header.require("event", source),     header.require("clientIp", source)};
    const std::size_t width = *std::max_element(std::begin(cols), std::end(cols)) + 1;

    std::vector<LogRecord> out;
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields.front().empty()) {
            continue;
        }
        const std::string ctx = fmt::format("{}:{}", source, reader.line());
        if (fields.size() < width) {
            fail(ErrorCode::MissingColumn, ctx + ": row has too few fields");
        }
        LogRecord r;
        const std::string& ts = fields[cols[0]];
        auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), r.timestamp);
        if (ec != std::errc{} || ptr != ts.data() + ts.size()) {
            fail(ErrorCode::BadValue, ctx + ": timestamp '" + ts + "' is not an integer");
        }
        if (r.timestamp < last) {
            fail(ErrorCode::BadValue, ctx + ": timestamps must be non-decreasing");
        }
        last = r.timestamp;
        r.src = fields[cols[1]];
        r.dst = fields[cols[2]];
        r.protocol = fields[cols[3]];
        auto auth = parse_auth_mode(fields[cols[4]]);
        auto sec = parse_security_mode(fields[cols[5]]);
        auto ev = parse_log_event(fields[cols[6]]);
        if (!auth) fail(ErrorCode::BadEnum, ctx + ": unknown authMode '" + fields[cols[4]] + "'");
        if (!sec) fail(ErrorCode::BadEnum, ctx + ": unknown securityMode '" + fields[cols[5]] + "'");
        if (!ev) fail(ErrorCode::BadEnum, ctx + ": unknown event '" + fields[cols[6]] + "'");
        r.authMode = *auth;
        r.securityMode = *sec;
        r.event = *ev;
        r.clientIp = fields[cols[7]];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<LogRecord> load_logs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    return read_logs(in, path);
}

void write_logs(std::ostream& out, std::span<const LogRecord> records) {
    out << kLogCsvHeader << '\n';
    for (const auto& r : records) {
        csv::write_row(out, {std::to_string(r.timestamp), r.src, r.dst, r.protocol,
                             std::string(to_string(r.authMode)),
                             std::string(to_string(r.securityMode)),
                             std::string(to_string(r.event)), r.clientIp});
    }
}

void write_logs(const std::string& path, std::span<const LogRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::IoFailure, "cannot write '" + path + "'");
    }
    write_logs(out, records);
}

// ---------------------------------------------------------------------------
// Statistics

void LogStats::add(const LogRecord& r) {
    switch (r.event) {
        case LogEvent::Session:
            ++sessions;
            anonymous += r.authMode == AuthMode::Anonymous;
            certificate += r.authMode == AuthMode::Certificate;
            insecureMode += r.securityMode == SecurityMode::None;
            misconfigured += r.securityMode == SecurityMode::Sign;
            clientIps.insert(r.clientIp);
            break;
        case LogEvent::FailedWrite: ++failedWrites; break;
        case LogEvent::AuditWrite: ++auditWrites; break;
        case LogEvent::ConfigCheckPass: ++configChecks; break;
        case LogEvent::ConfigCheckFail:
            ++configChecks;
            ++configFailures;
            break;
        case LogEvent::Read:
        case LogEvent::Write: break;
    }
}

void LogStats::merge(const LogStats& o) {
    sessions += o.sessions;
    anonymous += o.anonymous;
    certificate += o.certificate;
    insecureMode += o.insecureMode;
    misconfigured += o.misconfigured;
    failedWrites += o.failedWrites;
    auditWrites += o.auditWrites;
    configChecks += o.configChecks;
    configFailures += o.configFailures;
    clientIps.insert(o.clientIps.begin(), o.clientIps.end());
}

LogIndex::LogIndex(std::span<const LogRecord> records) : records_(records.size()) {
    for (const auto& r : records) {
        flows_[{r.src, r.dst}].add(r);
    }
}

const LogStats* LogIndex::flow(std::string_view src, std::string_view dst) const {
    auto it = flows_.find(std::pair<std::string, std::string>(src, dst));
    return it == flows_.end() ? nullptr : &it->second;
}

LogStats LogIndex::touching(std::string_view a, std::string_view b) const {
    LogStats pooled;
    for (const auto& [key, stats] : flows_) {
        if (key.first == a || key.second == a || key.first == b || key.second == b) {
            pooled.merge(stats);
        }
    }
    return pooled;
}

// ---------------------------------------------------------------------------
// Configuration

const ControlFactors& RiskConfig::zone_default(const std::optional<std::string>& zone) const {
    if (zone) {
        if (auto it = zoneDefaults.find(*zone); it != zoneDefaults.end()) {
            return it->second;
        }
    }
    return fallbackZoneDefault;
}

RiskConfig risk_config_from_json(const json& j) {
    RiskConfig cfg;
    try {
        if (j.contains("convention")) {
            const auto text = j.at("convention").get<std::string>();
            auto c = parse_convention(text);
            if (!c) {
                fail(ErrorCode::InvalidConfig, "unknown convention '" + text + "'");
            }
            cfg.convention = *c;
        }
        if (j.contains("coefficients")) {
            const auto& k = j.at("coefficients");
            auto& c = cfg.coefficients;
            c.accessInsecure = k.value("accessInsecure", c.accessInsecure);
            c.accessClientIp = k.value("accessClientIp", c.accessClientIp);
            c.hygieneCert = k.value("hygieneCert", c.hygieneCert);
            c.exploitFailedWrite = k.value("exploitFailedWrite", c.exploitFailedWrite);
            c.exploitAuditWrite = k.value("exploitAuditWrite", c.exploitAuditWrite);
            c.exploitAccess = k.value("exploitAccess", c.exploitAccess);
            c.hardening = k.value("hardening", c.hardening);
            for (double v : {c.accessInsecure, c.accessClientIp, c.hygieneCert, c.exploitFailedWrite,
                             c.exploitAuditWrite, c.exploitAccess, c.hardening}) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    fail(ErrorCode::InvalidConfig, "weakness coefficients must be >= 0");
                }
            }
        }
        if (j.contains("accessComplexityCost")) {
            const auto& t = j.at("accessComplexityCost");
            for (int i = 0; i < 2; ++i) {
                const auto name = std::string(to_string(static_cast<AccessComplexity>(i)));
                cfg.accessComplexityCost[i] = t.value(name, cfg.accessComplexityCost[i]);
            }
        }
        if (j.contains("attackVectorCost")) {
            const auto& t = j.at("attackVectorCost");
            for (int i = 0; i < 4; ++i) {
                const auto name = std::string(to_string(static_cast<AttackVector>(i)));
                cfg.attackVectorCost[i] = t.value(name, cfg.attackVectorCost[i]);
            }
        }
        for (double v : cfg.accessComplexityCost) {
            if (!(v >= 0.0)) fail(ErrorCode::InvalidConfig, "accessComplexityCost must be >= 0");
        }
        for (double v : cfg.attackVectorCost) {
            if (!(v >= 0.0)) fail(ErrorCode::InvalidConfig, "attackVectorCost must be >= 0");
        }
        if (j.contains("criticalityDefaults")) {
            cfg.criticalityDefaults = j.at("criticalityDefaults").get<std::map<std::string, int>>();
        }
        cfg.fallbackCriticality = j.value("fallbackCriticality", cfg.fallbackCriticality);
        for (const auto& [cls, v] : cfg.criticalityDefaults) {
            if (v < 0 || v > 10) {
                fail(ErrorCode::InvalidConfig,
                     fmt::format("criticality default for '{}' = {} outside [0,10]", cls, v));
            }
        }
        if (cfg.fallbackCriticality < 0 || cfg.fallbackCriticality > 10) {
            fail(ErrorCode::InvalidConfig, "fallbackCriticality outside [0,10]");
        }
        if (j.contains("zoneDefaults")) {
            cfg.zoneDefaults.clear();
            for (const auto& [zone, f] : j.at("zoneDefaults").items()) {
                cfg.zoneDefaults[zone] = factors_from_json(f, "zoneDefaults." + zone);
            }
        }
        if (j.contains("fallbackZoneDefault")) {
            cfg.fallbackZoneDefault = factors_from_json(j.at("fallbackZoneDefault"),
                                                        "fallbackZoneDefault");
        }
        cfg.pruneThreshold = j.value("pruneThreshold", cfg.pruneThreshold);
        check_unit(cfg.pruneThreshold, "pruneThreshold");
        cfg.minPredictionConfidence = j.value("minPredictionConfidence", cfg.minPredictionConfidence);
        check_unit(cfg.minPredictionConfidence, "minPredictionConfidence");
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, std::string("risk config: ") + e.what());
    }
    return cfg;
}

RiskConfig load_risk_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    try {
        return risk_config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
}

json to_json(const RiskConfig& cfg) {
    const auto& c = cfg.coefficients;
    json j;
    j["convention"] = std::string(to_string(cfg.convention));
    j["coefficients"] = {{"accessInsecure", c.accessInsecure},
                         {"accessClientIp", c.accessClientIp},
                         {"hygieneCert", c.hygieneCert},
                         {"exploitFailedWrite", c.exploitFailedWrite},
                         {"exploitAuditWrite", c.exploitAuditWrite},
                         {"exploitAccess", c.exploitAccess},
                         {"hardening", c.hardening}};
    j["accessComplexityCost"] = {{"Low", cfg.accessComplexityCost[0]},
                                 {"High", cfg.accessComplexityCost[1]}};
    j["attackVectorCost"] = {{"Network", cfg.attackVectorCost[0]},
                             {"Adjacent", cfg.attackVectorCost[1]},
                             {"Local", cfg.attackVectorCost[2]},
                             {"Physical", cfg.attackVectorCost[3]}};
    j["criticalityDefaults"] = cfg.criticalityDefaults;
    j["fallbackCriticality"] = cfg.fallbackCriticality;
    j["zoneDefaults"] = json::object();
    for (const auto& [zone, f] : cfg.zoneDefaults) {
        j["zoneDefaults"][zone] = factors_to_json(f);
    }
    j["fallbackZoneDefault"] = factors_to_json(cfg.fallbackZoneDefault);
    j["pruneThreshold"] = cfg.pruneThreshold;
    j["minPredictionConfidence"] = cfg.minPredictionConfidence;
    return j;
}

// ---------------------------------------------------------------------------
// Formulas

ControlFactors componentwise_min(const ControlFactors& x, const ControlFactors& y) noexcept {
    return {std::min(x.a, y.a), std::min(x.c, y.c), std::min(x.e, y.e), std::min(x.h, y.h)};
}

ControlFactors derive_factors(const LogStats& s, const WeaknessCoefficients& k) {
    if (s.sessions == 0) {
        fail(ErrorCode::NoLogsForPair, "no sessions to derive factors from");
    }
    const double n = static_cast<double>(s.sessions);
    const double anon = s.anonymous / n;
    const double insecure = s.insecureMode / n;
    const double cert = s.certificate / n;
    const double misconfig = s.misconfigured / n;
    const double failed = s.failedWrites / n;
    const double audit = s.auditWrites / n;
    const double fail_check =
        s.configChecks == 0 ? 0.0 : static_cast<double>(s.configFailures) / s.configChecks;
    const double ips = static_cast<double>(s.clientIps.size());

    ControlFactors f;
    f.a = std::min(1.0, anon + k.accessInsecure * insecure + k.accessClientIp * ips);
    f.c = std::min(1.0, misconfig + k.hygieneCert * (1.0 - cert) + fail_check);
    f.e = std::min(1.0, k.exploitFailedWrite * failed + k.exploitAuditWrite * audit +
                            k.exploitAccess * f.a);
    f.h = std::min(1.0, k.hardening * ((1.0 - cert) + insecure + fail_check));
    return f;
}

ControlFactors derive_factors(std::span<const LogRecord> logs,
                              const std::pair<std::string, std::string>& pair,
                              const WeaknessCoefficients& k) {
    LogStats stats;
    for (const auto& r : logs) {
        if (r.src == pair.first && r.dst == pair.second) {
            stats.add(r);
        }
    }
    if (stats.sessions == 0) {
        fail(ErrorCode::NoLogsForPair,
             fmt::format("no session records for {} -> {}", pair.first, pair.second));
    }
    return derive_factors(stats, k);
}

double control_strength(const ControlFactors& f, Convention convention) {
    if (convention == Convention::Literal) {
        return clamp01(f.a * f.c * f.e * f.h);
    }
    return clamp01((1.0 - f.a) * (1.0 - f.c) * (1.0 - f.e) * (1.0 - f.h));
}

double aggregate_epss(std::span<const double> epss) {
    double survive = 1.0;
    for (double e : epss) {
        survive *= 1.0 - e;
    }
    return 1.0 - survive;
}

double p_exploit(std::span<const double> epss, double cs) {
    return clamp01(aggregate_epss(epss) * (1.0 - cs));
}

double attack_cost(const CvssSummary& cvss, double epss, const RiskConfig& config) {
    return cvss.baseScore / 10.0 +
           config.accessComplexityCost[static_cast<std::size_t>(cvss.accessComplexity)] +
           config.attackVectorCost[static_cast<std::size_t>(cvss.attackVector)] + epss;
}

double risk_weight(double p, int criticality) { return p * criticality / 10.0; }

// ---------------------------------------------------------------------------
// Annotation

VulnerabilityInputs vulnerability_inputs(const KnowledgeGraph& graph, NodeIndex target,
                                         const RiskConfig& config) {
    VulnerabilityInputs in;
    for (EdgeIndex e : graph.out_edges(target, EdgeKind::HasVulnerability)) {
        const Node& v = graph.node(graph.edge(e).dst);
        const VulnScores s = vuln_scores(v);
        in.epss.push_back(s.epss);
        in.costs.push_back(attack_cost(s.cvss, s.epss, config));
    }
    return in;
}

RiskAttributes compute_risk(const VulnerabilityInputs& vulns, double cs, int criticality) {
    RiskAttributes r;
    r.controlStrength = cs;
    r.pExploit = p_exploit(vulns.epss, cs);
    if (!vulns.costs.empty()) {
        double sum = 0.0;
        for (double c : vulns.costs) {
            sum += c;
        }
        r.attackCost = sum / static_cast<double>(vulns.costs.size());
    }
    r.riskWeight = risk_weight(r.pExploit, criticality);
    return r;
}

std::optional<ControlFactors> edge_factors(const KnowledgeGraph& graph, const Edge& edge,
                                           const LogIndex& logs, const RiskConfig& config) {
    const std::string& src = graph.node(edge.src).id;
    const std::string& dst = graph.node(edge.dst).id;
    bool observed = edge.kind == EdgeKind::CommunicatesWith;
    if (edge.kind == EdgeKind::ControlledCommunicatesWith) {
        auto it = edge.props.find("origin");
        observed = it == edge.props.end() || it->second != "possible";
    } else if (edge.kind != EdgeKind::HasPossibleCommunication && !observed) {
        return std::nullopt;
    }
    if (observed) {
        const LogStats* s = logs.flow(src, dst);
        if (!s || s->sessions == 0) {
            return std::nullopt;
        }
        return derive_factors(*s, config.coefficients);
    }
    const LogStats pooled = logs.touching(src, dst);
    if (pooled.sessions == 0) {
        return std::nullopt;
    }
    return derive_factors(pooled, config.coefficients);
}

std::size_t annotate(KnowledgeGraph& graph, const LogIndex& logs, const RiskConfig& config,
                     Diagnostics* diag) {
    std::size_t count = 0;
    for (EdgeIndex i = 0; i < graph.edge_count(); ++i) {
        const Edge& e = graph.edge(i);
        if (e.kind != EdgeKind::CommunicatesWith && e.kind != EdgeKind::HasPossibleCommunication) {
            continue;
        }
        const Node& dst = graph.node(e.dst);
        auto factors = edge_factors(graph, e, logs, config);
        if (!factors) {
            if (diag) {
                diag->warn(fmt::format("{} -> {}: no logs, using zone defaults",
                                       graph.node(e.src).id, dst.id));
            }
            factors = config.zone_default(dst.zone);
        }
        const auto vulns = vulnerability_inputs(graph, e.dst, config);
        if (vulns.epss.empty() && diag) {
            diag->warn(fmt::format("{} -> {}: target has no CVEs", graph.node(e.src).id, dst.id));
        }
        graph.set_risk(i, compute_risk(vulns, control_strength(*factors, config.convention),
                                       dst.criticality));
        ++count;
    }
    return count;
}

ControlApplicationReport apply_controls(KnowledgeGraph& graph, const ControlProfile& profile,
                                        const LogIndex& baseline, const LogIndex& secured,
                                        const RiskConfig& config, Diagnostics* diag) {
    struct Mirror {
        NodeIndex src;
        NodeIndex dst;
        Properties props;
        RiskAttributes risk;
    };
    std::vector<Mirror> mirrors;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;

    for (EdgeIndex i = 0; i < graph.edge_count(); ++i) {
        const Edge& e = graph.edge(i);
        if (e.kind != EdgeKind::CommunicatesWith && e.kind != EdgeKind::HasPossibleCommunication) {
            continue;
        }
        if (secured.empty() && !baseline.empty()) {
            fail(ErrorCode::MissingSecuredLogs, "apply_controls: secured log set is empty");
        }
        if (!seen.emplace(e.src.value, e.dst.value).second) {
            continue;
        }
        const Node& s = graph.node(e.src);
        const Node& d = graph.node(e.dst);
        Properties props;
        if (auto it = e.props.find("protocol"); it != e.props.end()) {
            props["protocol"] = it->second;
        }
        props["origin"] = e.kind == EdgeKind::CommunicatesWith ? "observed" : "possible";

        double cs = 1.0;
        if (!profile.blocks(s.id, s.zone.value_or(""), d.id, d.zone.value_or(""))) {
            const ControlFactors base =
                edge_factors(graph, e, baseline, config).value_or(config.zone_default(d.zone));
            auto after = edge_factors(graph, e, secured, config);
            if (!after) {
                if (diag && !baseline.empty()) {
                    diag->warn(fmt::format("{} -> {}: no secured logs, keeping baseline factors",
                                           s.id, d.id));
                }
                after = base;
            }
            cs = control_strength(componentwise_min(base, *after), config.convention);
        }
        mirrors.push_back(Mirror{e.src, e.dst, std::move(props),
                                 compute_risk(vulnerability_inputs(graph, e.dst, config), cs,
                                              d.criticality)});
    }

    ControlApplicationReport report;
    for (auto& m : mirrors) {
        const bool pruned = m.risk.riskWeight < config.pruneThreshold;
        graph.upsert_edge(Edge{m.src, m.dst, EdgeKind::ControlledCommunicatesWith, m.risk,
                               std::move(m.props)});
        ++report.edgesRecomputed;
        report.edgesPruned += pruned;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Paths and exposure

double path_probability(const KnowledgeGraph& graph, std::span<const EdgeIndex> edges) {
    if (edges.empty()) {
        return 1.0;
    }
    const auto pexp = [&](const Edge& e) {
        if (!e.risk) {
            fail(ErrorCode::InvariantViolation, "path edge without risk attributes");
        }
        return e.risk->pExploit;
    };
    const Edge& first = graph.edge(edges[0]);
    double p = pexp(first);
    NodeIndex cur = first.dst;
    if (edges.size() > 1) {
        const Edge& second = graph.edge(edges[1]);
        if (second.src != first.dst && second.dst != first.dst) {
            cur = first.src;
        }
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        const Edge& e = graph.edge(edges[i]);
        if (e.src == cur) {
            cur = e.dst;
        } else if (e.dst == cur) {
            cur = e.src;
        } else {
            fail(ErrorCode::DiscontiguousPath,
                 fmt::format("edge {} does not continue the path at '{}'", i, graph.node(cur).id));
        }
        p *= pexp(e);
    }
    return p;
}

double exposure(const GraphView& view, NodeIndex v) {
    if (!view.graph().contains(v)) {
        fail(ErrorCode::UnknownNode, fmt::format("node index {} not in graph", v.value));
    }
    double sum = 0.0;
    for (const Adjacent& adj : view.adjacent(v)) {
        const Edge& e = view.graph().edge(adj.edge);
        if (e.dst == v && e.risk) {
            sum += e.risk->riskWeight;
        }
    }
    return sum;
}

}  // namespace otkg
