#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otkg/controls.hpp"
#include "otkg/diagnostics.hpp"
#include "otkg/graph.hpp"
#include "otkg/ingestion.hpp"

namespace otkg {

// ---------------------------------------------------------------------------
// Operational logs

enum class AuthMode : std::uint8_t { Anonymous, Password, Certificate };
enum class SecurityMode : std::uint8_t { None, Sign, SignAndEncrypt };
enum class LogEvent : std::uint8_t {
    Read,
    Write,
    FailedWrite,
    AuditWrite,
    Session,
    ConfigCheckPass,
    ConfigCheckFail,
};

std::string_view to_string(AuthMode m) noexcept;
std::string_view to_string(SecurityMode m) noexcept;
std::string_view to_string(LogEvent e) noexcept;
std::optional<AuthMode> parse_auth_mode(std::string_view text) noexcept;
std::optional<SecurityMode> parse_security_mode(std::string_view text) noexcept;
std::optional<LogEvent> parse_log_event(std::string_view text) noexcept;

struct LogRecord {
    std::int64_t timestamp = 0;  // seconds since the Unix epoch
    std::string src;
    std::string dst;
    std::string protocol;
    AuthMode authMode = AuthMode::Password;
    SecurityMode securityMode = SecurityMode::SignAndEncrypt;
    LogEvent event = LogEvent::Session;
    std::string clientIp;

    bool operator==(const LogRecord&) const = default;
};

inline constexpr std::string_view kLogCsvHeader =
    "timestamp,src,dst,protocol,authMode,securityMode,event,clientIp";

/// Throws BadValue when timestamps decrease.
std::vector<LogRecord> read_logs(std::istream& in, std::string_view source);
std::vector<LogRecord> load_logs(const std::string& path);
void write_logs(std::ostream& out, std::span<const LogRecord> records);
void write_logs(const std::string& path, std::span<const LogRecord> records);

/// Event counts for one flow (or a pooled set of flows).
struct LogStats {
    std::size_t sessions = 0;
    std::size_t anonymous = 0;
    std::size_t certificate = 0;
    std::size_t insecureMode = 0;   // securityMode None
    std::size_t misconfigured = 0;  // securityMode Sign: signed but unencrypted
    std::size_t failedWrites = 0;
    std::size_t auditWrites = 0;
    std::size_t configChecks = 0;
    std::size_t configFailures = 0;
    std::set<std::string> clientIps;

    void add(const LogRecord& r);
    void merge(const LogStats& other);
};

/// Per-flow statistics keyed by (src, dst).
class LogIndex {
public:
    LogIndex() = default;
    explicit LogIndex(std::span<const LogRecord> records);

    bool empty() const noexcept { return flows_.empty(); }
    std::size_t record_count() const noexcept { return records_; }
    const LogStats* flow(std::string_view src, std::string_view dst) const;
    /// Pooled statistics of every flow touching `a` or `b`.
    LogStats touching(std::string_view a, std::string_view b) const;
    const std::map<std::pair<std::string, std::string>, LogStats, std::less<>>& flows() const noexcept {
        return flows_;
    }

private:
    std::map<std::pair<std::string, std::string>, LogStats, std::less<>> flows_;
    std::size_t records_ = 0;
};

// ---------------------------------------------------------------------------
// Factor derivation

enum class Convention : std::uint8_t { Literal, Complement };
std::string_view to_string(Convention c) noexcept;
std::optional<Convention> parse_convention(std::string_view text) noexcept;

/// Weakness scores ã, c̃, ẽ, h̃ (accessibility, configuration hygiene,
/// exploitability, hardening). 0 is perfect hygiene.
struct ControlFactors {
    double a = 0.0;
    double c = 0.0;
    double e = 0.0;
    double h = 0.0;

    bool operator==(const ControlFactors&) const = default;
};

/// Componentwise minimum: the less weak of two factor vectors.
ControlFactors componentwise_min(const ControlFactors& x, const ControlFactors& y) noexcept;

struct WeaknessCoefficients {
    double accessInsecure = 0.1;
    double accessClientIp = 0.001;
    double hygieneCert = 0.1;
    double exploitFailedWrite = 0.5;
    double exploitAuditWrite = 0.5;
    double exploitAccess = 0.1;
    double hardening = 0.5;
};

struct RiskConfig {
    Convention convention = Convention::Complement;
    WeaknessCoefficients coefficients;
    std::array<double, 2> accessComplexityCost{0.0, 0.2};          // Low, High
    std::array<double, 4> attackVectorCost{0.0, 0.1, 0.2, 0.3};    // Network .. Physical
    std::map<std::string, int> criticalityDefaults{
        {"Safety PLC", 10}, {"PLC", 9},      {"RTU", 8},         {"IED", 8},
        {"Historian", 8},   {"SCADA", 8},    {"HMI", 7},         {"Gateway", 7},
        {"Workstation", 5}, {"Sensor", 6},   {"Actuator", 6}};
    int fallbackCriticality = 5;
    /// Factor presets for pairs without logs, keyed by the target's zone.
    std::map<std::string, ControlFactors> zoneDefaults{
        {"DMZ", {0.06, 0.08, 0.05, 0.10}}, {"OT", {0.03, 0.04, 0.03, 0.05}}};
    ControlFactors fallbackZoneDefault{0.06, 0.08, 0.05, 0.10};
    double pruneThreshold = kDefaultPruneThreshold;
    /// Minimum confidence for imported relation predictions.
    double minPredictionConfidence = 0.5;

    const ControlFactors& zone_default(const std::optional<std::string>& zone) const;
};

RiskConfig risk_config_from_json(const nlohmann::json& j);
RiskConfig load_risk_config(const std::string& path);
nlohmann::json to_json(const RiskConfig& config);

ControlFactors derive_factors(const LogStats& stats, const WeaknessCoefficients& k = {});
/// Throws NoLogsForPair when no record belongs to the (src, dst) flow.
ControlFactors derive_factors(std::span<const LogRecord> logs,
                              const std::pair<std::string, std::string>& pair,
                              const WeaknessCoefficients& k = {});

double control_strength(const ControlFactors& f, Convention convention);
double aggregate_epss(std::span<const double> epss);
double p_exploit(std::span<const double> epss, double control_strength);
double attack_cost(const CvssSummary& cvss, double epss, const RiskConfig& config = {});
double risk_weight(double p_exploit, int criticality);

// ---------------------------------------------------------------------------
// Edge annotation

struct VulnerabilityInputs {
    std::vector<double> epss;
    std::vector<double> costs;
};
/// CVE inputs of a link whose target is `target`.
VulnerabilityInputs vulnerability_inputs(const KnowledgeGraph& graph, NodeIndex target,
                                         const RiskConfig& config);

RiskAttributes compute_risk(const VulnerabilityInputs& vulns, double control_strength,
                            int target_criticality);

/// Annotates every COMMUNICATES_WITH and HAS_POSSIBLE_COMMUNICATION edge; returns
/// the number annotated. Observed links use their own flow's logs, possible links
/// the pooled logs of both endpoints; pairs without logs use zone defaults.
std::size_t annotate(KnowledgeGraph& graph, const LogIndex& logs, const RiskConfig& config,
                     Diagnostics* diag = nullptr);

/// Factors an edge gets under `logs` (nullopt when it falls back to zone defaults).
std::optional<ControlFactors> edge_factors(const KnowledgeGraph& graph, const Edge& edge,
                                           const LogIndex& logs, const RiskConfig& config);

struct ControlApplicationReport {
    std::size_t edgesRecomputed = 0;
    std::size_t edgesPruned = 0;
};

/// Mirrors every COMMUNICATES_WITH and HAS_POSSIBLE_COMMUNICATION edge as
/// CONTROLLED_COMMUNICATES_WITH with attributes recomputed from the secured logs.
/// A control never raises a weakness score above its baseline value. Pairs cut by
/// segmentation get controlStrength 1. edgesPruned counts mirrors below the
/// prune threshold.
ControlApplicationReport apply_controls(KnowledgeGraph& graph, const ControlProfile& profile,
                                        const LogIndex& baseline, const LogIndex& secured,
                                        const RiskConfig& config, Diagnostics* diag = nullptr);

/// ∏ pExploit over a chain of communication edges that share endpoints in order
/// (traversed undirected). Throws DiscontiguousPath.
double path_probability(const KnowledgeGraph& graph, std::span<const EdgeIndex> edges);

/// Σ riskWeight over active edges whose stored target is `v`.
double exposure(const GraphView& view, NodeIndex v);

}  // namespace otkg
