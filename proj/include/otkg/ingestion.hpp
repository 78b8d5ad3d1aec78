#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otkg/controls.hpp"
#include "otkg/diagnostics.hpp"
#include "otkg/graph.hpp"

namespace otkg {

// ---------------------------------------------------------------------------
// Public vulnerability data

enum class VulnStatus { Active, Rejected, Resolved };
enum class AccessComplexity { Low, High };
enum class AttackVector { Network, Adjacent, Local, Physical };

std::string_view to_string(VulnStatus s) noexcept;
std::string_view to_string(AccessComplexity ac) noexcept;
std::string_view to_string(AttackVector av) noexcept;
std::optional<VulnStatus> parse_vuln_status(std::string_view text) noexcept;
std::optional<AccessComplexity> parse_access_complexity(std::string_view text) noexcept;
std::optional<AttackVector> parse_attack_vector(std::string_view text) noexcept;

struct CvssSummary {
    double baseScore = 5.0;
    AccessComplexity accessComplexity = AccessComplexity::Low;
    AttackVector attackVector = AttackVector::Network;
};

struct VulnRecord {
    std::string cveId;
    std::string description;
    VulnStatus status = VulnStatus::Active;
    double epss = 0.0;
    bool kev = false;
    CvssSummary cvss;
    std::vector<std::string> vendorStatements;
    std::vector<std::string> cpes;
};

/// Missing EPSS/CVSS fields fall back to 0.0 and 5.0; each fallback is reported.
VulnRecord vuln_record_from_node(const Node& node, Diagnostics* diag = nullptr);
/// Vulnerability-node properties carrying every field of `record`.
Properties vuln_properties(const VulnRecord& record);
/// CVSS/EPSS fields read back from a stored Vulnerability node.
struct VulnScores {
    double epss = 0.0;
    CvssSummary cvss;
};
VulnScores vuln_scores(const Node& node);

/// Drops REJECTED/RESOLVED entries and sanitizes descriptions (non-printables
/// removed, whitespace runs collapsed). Order is preserved.
std::vector<VulnRecord> preprocess_cves(std::vector<VulnRecord> records);
std::string sanitize_text(std::string_view text);

/// Lower-case, non-alphanumerics folded to single underscores.
std::string normalize_token(std::string_view text);

/// (vendor, product) tokens from CPE 2.3 strings, mapped to CVE ids.
class CpeIndex {
public:
    static CpeIndex build(std::span<const VulnRecord> records);
    void add(std::string_view cpe, std::string_view cve_id);
    std::vector<std::string> lookup(std::string_view vendor, std::string_view product) const;
    std::size_t size() const noexcept { return index_.size(); }

private:
    std::map<std::pair<std::string, std::string>, std::set<std::string>> index_;
};

struct Advisory {
    std::string id;
    std::string vendor;
    std::string product;
    std::vector<std::string> cves;
};
std::vector<Advisory> load_advisories(const std::string& path);
std::vector<Advisory> advisories_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Local testbed

struct ProtocolTraits {
    bool authCapable = true;
    bool encryptionCapable = true;
};

struct TestbedProduct {
    std::string name;
    std::string vendor;
    std::string model;
    std::string assetClass;
    std::string zone;
    std::optional<int> criticality;
    std::vector<std::string> protocols;
    /// Explicit "vendor:product" CPE override for matching.
    std::optional<std::string> cpe;
    std::vector<std::string> aliases;
};

struct Dataflow {
    std::string src;
    std::string dst;
    std::string protocol;
};

struct TestbedSpec {
    std::string name;
    std::vector<std::string> zones;  // Purdue order, outermost first
    std::map<std::string, ProtocolTraits> protocols;
    std::vector<TestbedProduct> products;
    std::vector<Dataflow> dataflows;
    std::vector<std::pair<std::string, std::string>> segmentationAllowlist;
    /// Named control profiles; each JSON object follows the control-profile schema.
    std::map<std::string, ControlProfile> controlProfiles;

    const TestbedProduct* product(std::string_view name) const;
    ProtocolTraits traits(std::string_view protocol) const;
    /// Named profile with the testbed allowlist attached. Throws InvalidConfig.
    ControlProfile control_profile(std::string_view name) const;
};

/// Validates that every dataflow endpoint is a declared product and every
/// product zone is one of the declared zones.
TestbedSpec testbed_from_json(const nlohmann::json& j);
TestbedSpec load_testbed(const std::string& path);
nlohmann::json to_json(const TestbedSpec& spec);

/// Adds Product nodes (plus their Zone/Protocol nodes and IN_ZONE/USES_PROTOCOL
/// edges). Criticality comes from the product or the asset-class defaults.
std::size_t add_testbed_products(KnowledgeGraph& graph, const TestbedSpec& testbed,
                                 const std::map<std::string, int>& criticality_defaults,
                                 int fallback_criticality);

/// One COMMUNICATES_WITH edge per dataflow (duplicates merge); risk left unset.
std::size_t build_dataflow_edges(KnowledgeGraph& graph, const TestbedSpec& testbed);

/// Links products to Vulnerability nodes through advisories and the CPE index.
/// Unmatched products produce a warning. Returns the number of new edges.
std::size_t link_products(KnowledgeGraph& graph, const TestbedSpec& testbed,
                          std::span<const Advisory> advisories, const CpeIndex& cpe_index,
                          Diagnostics* diag = nullptr);

// ---------------------------------------------------------------------------
// Bulk CSV loading

/// Loads node.csv / relation.csv into a graph. Vulnerability rows pass through
/// preprocess_cves; relations touching a filtered CVE are skipped, not errors.
class Ingestor {
public:
    explicit Ingestor(KnowledgeGraph& graph, Diagnostics* diag = nullptr)
        : graph_(graph), diag_(diag) {}

    std::size_t load_nodes(const std::string& path);
    std::size_t load_nodes(std::istream& in, std::string_view source);
    std::size_t load_relations(const std::string& path);
    std::size_t load_relations(std::istream& in, std::string_view source);
    /// Edge CSV as written by export_view(EdgeCsv).
    std::size_t load_edge_csv(const std::string& path);
    std::size_t load_edge_csv(std::istream& in, std::string_view source);

    const std::vector<VulnRecord>& vulnerabilities() const noexcept { return vulns_; }
    const std::set<std::string>& filtered_ids() const noexcept { return filtered_; }
    std::size_t skipped_relations() const noexcept { return skipped_relations_; }

private:
    KnowledgeGraph& graph_;
    Diagnostics* diag_;
    std::vector<VulnRecord> vulns_;
    std::set<std::string> filtered_;
    std::size_t skipped_relations_ = 0;
};

inline constexpr std::string_view kRelationCsvHeader = "src,dst,kind,props_json";
inline constexpr std::string_view kPredictionCsvHeader = "src,dst,kind,confidence";

struct PredictedRelation {
    std::string src;
    std::string dst;
    EdgeKind kind = EdgeKind::HasPossibleTechnique;
    double confidence = 0.0;
};

/// Rows of a prediction CSV; kind must be HAS_POSSIBLE_CWE, HAS_POSSIBLE_TECHNIQUE
/// or SUGGESTED_TACTIC (BadEnum otherwise) and confidence in [0,1].
std::vector<PredictedRelation> load_predictions(const std::string& path);
std::vector<PredictedRelation> read_predictions(std::istream& in, std::string_view source);

/// Adds an edge per row with confidence >= min_confidence. Confidence is kept in
/// the edge props.
std::size_t import_predictions(KnowledgeGraph& graph, std::span<const PredictedRelation> rows,
                               double min_confidence);

struct HierarchyViolation {
    std::string src;
    std::string dst;
    EdgeKind kind;
};
/// Full-graph audit of taxonomy edges against the asset → CVE → CWE → CAPEC →
/// ATT&CK chain.
std::vector<HierarchyViolation> audit_hierarchy(const KnowledgeGraph& graph);

}  // namespace otkg
