#include "otkg/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/csv.hpp"
#include "otkg/error.hpp"

namespace otkg {

using nlohmann::json;

namespace {

constexpr std::string_view kStatusNames[] = {"ACTIVE", "REJECTED", "RESOLVED"};
constexpr std::string_view kAcNames[] = {"Low", "High"};
constexpr std::string_view kAvNames[] = {"Network", "Adjacent", "Local", "Physical"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_ci(std::string_view text, const std::string_view (&names)[N]) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i].size() == text.size() &&
            std::equal(text.begin(), text.end(), names[i].begin(), [](char a, char b) {
                return std::tolower(static_cast<unsigned char>(a)) ==
                       std::tolower(static_cast<unsigned char>(b));
            })) {
            return static_cast<Enum>(i);
        }
    }
    return std::nullopt;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    return in;
}

json read_json_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::BadValue, path + ": " + e.what());
    }
}

std::string where(std::string_view source, std::size_t line) {
    return fmt::format("{}:{}", source, line);
}

std::optional<double> parse_double(std::string_view text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return v;
}

double require_double(std::string_view text, const std::string& context) {
    if (auto v = parse_double(text)) {
        return *v;
    }
    fail(ErrorCode::BadValue, context + ": '" + std::string(text) + "' is not a number");
}

/// props_json object to a flat string map; non-string values keep their JSON text.
Properties props_from_json_text(std::string_view text, const std::string& context) {
    Properties props;
    if (text.empty()) {
        return props;
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::BadValue, context + ": props_json: " + e.what());
    }
    if (!j.is_object()) {
        fail(ErrorCode::BadValue, context + ": props_json must be an object");
    }
    for (const auto& [k, v] : j.items()) {
        props[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return props;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) {
        return out;
    }
    if (text.front() == '[') {
        try {
            for (const auto& item : json::parse(text)) {
                out.push_back(item.get<std::string>());
            }
            return out;
        } catch (const json::exception&) {
            // fall through to ';'-separated parsing
        }
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(';', start);
        auto piece = text.substr(start, end == std::string_view::npos ? end : end - start);
        if (!piece.empty()) {
            out.emplace_back(piece);
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return out;
}

bool blank_row(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields.front().empty();
}

const std::string& field_at(const std::vector<std::string>& fields, std::size_t pos,
                            const std::string& context) {
    if (pos >= fields.size()) {
        fail(ErrorCode::MissingColumn, context + ": row has too few fields");
    }
    return fields[pos];
}

}  // namespace

std::string_view to_string(VulnStatus s) noexcept { return kStatusNames[static_cast<int>(s)]; }
std::string_view to_string(AccessComplexity ac) noexcept { return kAcNames[static_cast<int>(ac)]; }
std::string_view to_string(AttackVector av) noexcept { return kAvNames[static_cast<int>(av)]; }
std::optional<VulnStatus> parse_vuln_status(std::string_view text) noexcept {
    return parse_ci<VulnStatus>(text, kStatusNames);
}
std::optional<AccessComplexity> parse_access_complexity(std::string_view text) noexcept {
    return parse_ci<AccessComplexity>(text, kAcNames);
}
std::optional<AttackVector> parse_attack_vector(std::string_view text) noexcept {
    return parse_ci<AttackVector>(text, kAvNames);
}

// ---------------------------------------------------------------------------
// Vulnerability records

VulnRecord vuln_record_from_node(const Node& node, Diagnostics* diag) {
    VulnRecord r;
    r.cveId = node.id;
    const auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = node.props.find(key);
        if (it == node.props.end() || it->second.empty() || it->second == "null") {
            return std::nullopt;
        }
        return it->second;
    };
    r.description = get("description").value_or(node.name);
    if (auto s = get("status")) {
        auto st = parse_vuln_status(*s);
        if (!st) {
            fail(ErrorCode::BadEnum, fmt::format("{}: unknown status '{}'", node.id, *s));
        }
        r.status = *st;
    }
    if (auto e = get("epss")) {
        r.epss = require_double(*e, node.id + ".epss");
        if (!(r.epss >= 0.0 && r.epss <= 1.0)) {
            fail(ErrorCode::BadValue, fmt::format("{}: epss {} outside [0,1]", node.id, r.epss));
        }
    } else if (diag) {
        diag->warn(node.id + ": missing EPSS, using 0.0");
    }
    if (auto b = get("baseScore")) {
        r.cvss.baseScore = require_double(*b, node.id + ".baseScore");
        if (!(r.cvss.baseScore >= 0.0 && r.cvss.baseScore <= 10.0)) {
            fail(ErrorCode::BadValue,
                 fmt::format("{}: baseScore {} outside [0,10]", node.id, r.cvss.baseScore));
        }
    } else if (diag) {
        diag->warn(node.id + ": missing CVSS base score, using 5.0");
    }
    if (auto ac = get("accessComplexity")) {
        auto v = parse_access_complexity(*ac);
        if (!v) {
            fail(ErrorCode::BadEnum, fmt::format("{}: unknown accessComplexity '{}'", node.id, *ac));
        }
        r.cvss.accessComplexity = *v;
    }
    if (auto av = get("attackVector")) {
        auto v = parse_attack_vector(*av);
        if (!v) {
            fail(ErrorCode::BadEnum, fmt::format("{}: unknown attackVector '{}'", node.id, *av));
        }
        r.cvss.attackVector = *v;
    }
    if (auto k = get("kev")) {
        r.kev = (*k == "true" || *k == "1" || *k == "TRUE");
    }
    if (auto c = get("cpes")) {
        r.cpes = split_list(*c);
    }
    if (auto v = get("vendorStatements")) {
        r.vendorStatements = split_list(*v);
    }
    return r;
}

Properties vuln_properties(const VulnRecord& r) {
    Properties p;
    p["status"] = std::string(to_string(r.status));
    p["description"] = r.description;
    p["epss"] = fmt::format("{}", r.epss);
    p["kev"] = r.kev ? "true" : "false";
    p["baseScore"] = fmt::format("{}", r.cvss.baseScore);
    p["accessComplexity"] = std::string(to_string(r.cvss.accessComplexity));
    p["attackVector"] = std::string(to_string(r.cvss.attackVector));
    if (!r.cpes.empty()) {
        p["cpes"] = json(r.cpes).dump();
    }
    if (!r.vendorStatements.empty()) {
        p["vendorStatements"] = json(r.vendorStatements).dump();
    }
    return p;
}

VulnScores vuln_scores(const Node& node) {
    const VulnRecord r = vuln_record_from_node(node, nullptr);
    return VulnScores{r.epss, r.cvss};
}

std::string sanitize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (space) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x20 || c == 0x7F) {
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(ch);
    }
    return out;
}

std::vector<VulnRecord> preprocess_cves(std::vector<VulnRecord> records) {
    std::vector<VulnRecord> out;
    out.reserve(records.size());
    for (auto& r : records) {
        if (r.status == VulnStatus::Rejected || r.status == VulnStatus::Resolved) {
            continue;
        }
        r.description = sanitize_text(r.description);
        for (auto& s : r.vendorStatements) {
            s = sanitize_text(s);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string normalize_token(std::string_view text) {
    std::string out;
    bool pending = false;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (pending && !out.empty()) {
                out.push_back('_');
            }
            pending = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CPE index and advisories

CpeIndex CpeIndex::build(std::span<const VulnRecord> records) {
    CpeIndex index;
    for (const auto& r : records) {
        for (const auto& cpe : r.cpes) {
            index.add(cpe, r.cveId);
        }
    }
    return index;
}

void CpeIndex::add(std::string_view cpe, std::string_view cve_id) {
    // cpe:2.3:<part>:<vendor>:<product>:...
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto end = cpe.find(':', start);
        parts.push_back(cpe.substr(start, end == std::string_view::npos ? end : end - start));
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    if (parts.size() < 5 || parts[0] != "cpe") {
        return;
    }
    index_[{normalize_token(parts[3]), normalize_token(parts[4])}].insert(std::string(cve_id));
}

std::vector<std::string> CpeIndex::lookup(std::string_view vendor, std::string_view product) const {
    auto it = index_.find({normalize_token(vendor), normalize_token(product)});
    if (it == index_.end()) {
        return {};
    }
    return {it->second.begin(), it->second.end()};
}

std::vector<Advisory> advisories_from_json(const json& j) {
    std::vector<Advisory> out;
    for (const auto& a : j) {
        Advisory adv;
        adv.id = a.at("id").get<std::string>();
        adv.vendor = a.at("vendor").get<std::string>();
        adv.product = a.at("product").get<std::string>();
        adv.cves = a.value("cves", std::vector<std::string>{});
        out.push_back(std::move(adv));
    }
    return out;
}

std::vector<Advisory> load_advisories(const std::string& path) {
    try {
        return advisories_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        fail(ErrorCode::BadValue, path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Testbed

const TestbedProduct* TestbedSpec::product(std::string_view name) const {
    for (const auto& p : products) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

ProtocolTraits TestbedSpec::traits(std::string_view protocol) const {
    auto it = protocols.find(std::string(protocol));
    return it == protocols.end() ? ProtocolTraits{} : it->second;
}

ControlProfile TestbedSpec::control_profile(std::string_view profile_name) const {
    auto it = controlProfiles.find(std::string(profile_name));
    if (it == controlProfiles.end()) {
        fail(ErrorCode::InvalidConfig,
             fmt::format("testbed '{}' has no control profile '{}'", name, profile_name));
    }
    ControlProfile profile = it->second;
    profile.allowlist.insert(profile.allowlist.end(), segmentationAllowlist.begin(),
                             segmentationAllowlist.end());
    return profile;
}

TestbedSpec testbed_from_json(const json& j) {
    TestbedSpec spec;
    try {
        spec.name = j.value("name", std::string("testbed"));
        spec.zones = j.at("zones").get<std::vector<std::string>>();
        if (j.contains("protocols")) {
            for (const auto& [name, t] : j.at("protocols").items()) {
                spec.protocols[name] = ProtocolTraits{t.value("authCapable", true),
                                                      t.value("encryptionCapable", true)};
            }
        }
        for (const auto& p : j.at("products")) {
            TestbedProduct prod;
            prod.name = p.at("name").get<std::string>();
            prod.vendor = p.value("vendor", std::string{});
            prod.model = p.value("model", prod.name);
            prod.assetClass = p.value("assetClass", std::string("Workstation"));
            prod.zone = p.at("zone").get<std::string>();
            if (p.contains("criticality")) {
                prod.criticality = p.at("criticality").get<int>();
            }
            prod.protocols = p.value("protocols", std::vector<std::string>{});
            if (p.contains("cpe")) {
                prod.cpe = p.at("cpe").get<std::string>();
            }
            prod.aliases = p.value("aliases", std::vector<std::string>{});
            spec.products.push_back(std::move(prod));
        }
        if (j.contains("dataflows")) {
            for (const auto& f : j.at("dataflows")) {
                spec.dataflows.push_back(Dataflow{f.at("src").get<std::string>(),
                                                  f.at("dst").get<std::string>(),
                                                  f.at("protocol").get<std::string>()});
            }
        }
        if (j.contains("segmentationAllowlist")) {
            for (const auto& pair : j.at("segmentationAllowlist")) {
                spec.segmentationAllowlist.emplace_back(pair.at(0).get<std::string>(),
                                                        pair.at(1).get<std::string>());
            }
        }
        if (j.contains("controlProfiles")) {
            for (const auto& [name, profile] : j.at("controlProfiles").items()) {
                spec.controlProfiles[name] = control_profile_from_json(profile);
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::BadValue, std::string("testbed: ") + e.what());
    }

    std::set<std::string> names;
    for (const auto& p : spec.products) {
        if (!names.insert(p.name).second) {
            fail(ErrorCode::BadValue, "testbed: duplicate product '" + p.name + "'");
        }
        if (std::find(spec.zones.begin(), spec.zones.end(), p.zone) == spec.zones.end()) {
            fail(ErrorCode::BadValue,
                 fmt::format("testbed: product '{}' zone '{}' is not a declared zone", p.name,
                             p.zone));
        }
        if (p.criticality && (*p.criticality < 0 || *p.criticality > 10)) {
            fail(ErrorCode::InvalidCriticality,
                 fmt::format("testbed: product '{}' criticality {}", p.name, *p.criticality));
        }
    }
    for (const auto& f : spec.dataflows) {
        for (const auto& endpoint : {f.src, f.dst}) {
            if (!names.count(endpoint)) {
                fail(ErrorCode::DanglingReference,
                     fmt::format("testbed: dataflow {} -> {} names undeclared product '{}'",
                                 f.src, f.dst, endpoint));
            }
        }
    }
    return spec;
}

TestbedSpec load_testbed(const std::string& path) { return testbed_from_json(read_json_file(path)); }

json to_json(const TestbedSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["zones"] = spec.zones;
    j["protocols"] = json::object();
    for (const auto& [name, t] : spec.protocols) {
        j["protocols"][name] = {{"authCapable", t.authCapable},
                                {"encryptionCapable", t.encryptionCapable}};
    }
    j["products"] = json::array();
    for (const auto& p : spec.products) {
        json pj = {{"name", p.name},           {"vendor", p.vendor}, {"model", p.model},
                   {"assetClass", p.assetClass}, {"zone", p.zone},   {"protocols", p.protocols}};
        if (p.criticality) pj["criticality"] = *p.criticality;
        if (p.cpe) pj["cpe"] = *p.cpe;
        if (!p.aliases.empty()) pj["aliases"] = p.aliases;
        j["products"].push_back(std::move(pj));
    }
    j["dataflows"] = json::array();
    for (const auto& f : spec.dataflows) {
        j["dataflows"].push_back({{"src", f.src}, {"dst", f.dst}, {"protocol", f.protocol}});
    }
    j["segmentationAllowlist"] = json::array();
    for (const auto& [a, b] : spec.segmentationAllowlist) {
        j["segmentationAllowlist"].push_back({a, b});
    }
    j["controlProfiles"] = json::object();
    for (const auto& [name, profile] : spec.controlProfiles) {
        j["controlProfiles"][name] = to_json(profile);
    }
    return j;
}

std::size_t add_testbed_products(KnowledgeGraph& graph, const TestbedSpec& testbed,
                                 const std::map<std::string, int>& criticality_defaults,
                                 int fallback_criticality) {
    for (const auto& zone : testbed.zones) {
        graph.upsert_node(Node{"zone:" + zone, NodeKind::Zone, zone, {}, 0, std::nullopt});
    }
    std::size_t count = 0;
    for (const auto& p : testbed.products) {
        int criticality = fallback_criticality;
        if (p.criticality) {
            criticality = *p.criticality;
        } else if (auto it = criticality_defaults.find(p.assetClass);
                   it != criticality_defaults.end()) {
            criticality = it->second;
        }
        Properties props{{"vendor", p.vendor}, {"model", p.model}, {"assetClass", p.assetClass}};
        if (!p.protocols.empty()) {
            props["protocols"] = json(p.protocols).dump();
        }
        graph.upsert_node(Node{p.name, NodeKind::Product, p.model, std::move(props), criticality,
                               p.zone});
        graph.upsert_edge(p.name, "zone:" + p.zone, EdgeKind::InZone);
        for (const auto& proto : p.protocols) {
            const std::string pid = "protocol:" + proto;
            graph.upsert_node(Node{pid, NodeKind::Protocol, proto, {}, 0, std::nullopt});
            graph.upsert_edge(p.name, pid, EdgeKind::UsesProtocol);
        }
        ++count;
    }
    return count;
}

std::size_t build_dataflow_edges(KnowledgeGraph& graph, const TestbedSpec& testbed) {
    std::set<std::tuple<std::string, std::string>> seen;
    for (const auto& f : testbed.dataflows) {
        if (!graph.find(f.src) || !graph.find(f.dst)) {
            fail(ErrorCode::DanglingReference,
                 fmt::format("dataflow {} -> {}: endpoint not loaded", f.src, f.dst));
        }
        graph.upsert_edge(f.src, f.dst, EdgeKind::CommunicatesWith, std::nullopt,
                          Properties{{"protocol", f.protocol}});
        seen.emplace(f.src, f.dst);
    }
    return seen.size();
}

std::size_t link_products(KnowledgeGraph& graph, const TestbedSpec& testbed,
                          std::span<const Advisory> advisories, const CpeIndex& cpe_index,
                          Diagnostics* diag) {
    std::size_t added = 0;
    for (const auto& p : testbed.products) {
        std::set<std::string> cves;
        std::vector<std::string> names{p.model, p.name};
        names.insert(names.end(), p.aliases.begin(), p.aliases.end());
        const std::string vendor = normalize_token(p.vendor);
        for (const auto& adv : advisories) {
            if (normalize_token(adv.vendor) != vendor) {
                continue;
            }
            const std::string adv_product = normalize_token(adv.product);
            for (const auto& n : names) {
                if (normalize_token(n) == adv_product) {
                    cves.insert(adv.cves.begin(), adv.cves.end());
                    break;
                }
            }
        }
        for (const auto& n : names) {
            for (auto& c : cpe_index.lookup(p.vendor, n)) {
                cves.insert(std::move(c));
            }
        }
        if (p.cpe) {
            const auto colon = p.cpe->find(':');
            if (colon != std::string::npos) {
                for (auto& c : cpe_index.lookup(p.cpe->substr(0, colon), p.cpe->substr(colon + 1))) {
                    cves.insert(std::move(c));
                }
            }
        }
        const auto product = graph.find(p.name);
        if (!product) {
            fail(ErrorCode::DanglingReference, "link_products: product '" + p.name + "' not loaded");
        }
        std::size_t linked = 0;
        for (const auto& cve : cves) {
            auto vuln = graph.find(cve);
            if (!vuln || graph.node(*vuln).kind != NodeKind::Vulnerability) {
                if (diag) {
                    diag->warn(fmt::format("{}: {} not present after preprocessing", p.name, cve));
                }
                continue;
            }
            if (!graph.find_edge(*product, *vuln, EdgeKind::HasVulnerability)) {
                graph.upsert_edge(Edge{*product, *vuln, EdgeKind::HasVulnerability, std::nullopt, {}});
                ++added;
            }
            ++linked;
        }
        if (linked == 0 && diag) {
            diag->warn(fmt::format("{} ({} {}): no advisory or CPE match", p.name, p.vendor, p.model));
        }
    }
    return added;
}

// ---------------------------------------------------------------------------
// CSV loading

std::size_t Ingestor::load_nodes(const std::string& path) {
    auto in = open_input(path);
    return load_nodes(in, path);
}

std::size_t Ingestor::load_nodes(std::istream& in, std::string_view source) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        fail(ErrorCode::MissingColumn, std::string(source) + ": empty file, expected header");
    }
    const csv::Header header(fields);
    const auto c_id = header.require("id", source);
    const auto c_kind = header.require("kind", source);
    const auto c_name = header.require("name", source);
    const auto c_zone = header.require("zone", source);
    const auto c_crit = header.require("criticality", source);
    const auto c_props = header.require("props_json", source);

    std::set<std::string> accepted;
    while (reader.next(fields)) {
        if (blank_row(fields)) {
            continue;
        }
        const std::string ctx = where(source, reader.line());
        const std::string& kind_text = field_at(fields, c_kind, ctx);
        auto kind = parse_node_kind(kind_text);
        if (!kind) {
            fail(ErrorCode::BadEnum, ctx + ": unknown node kind '" + kind_text + "'");
        }
        Node node;
        node.id = field_at(fields, c_id, ctx);
        node.kind = *kind;
        node.name = field_at(fields, c_name, ctx);
        if (const auto& z = field_at(fields, c_zone, ctx); !z.empty()) {
            node.zone = z;
        }
        if (const auto& c = field_at(fields, c_crit, ctx); !c.empty()) {
            int v = 0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || ptr != c.data() + c.size()) {
                fail(ErrorCode::BadValue, ctx + ": criticality '" + c + "' is not an integer");
            }
            node.criticality = v;
        }
        node.props = props_from_json_text(field_at(fields, c_props, ctx), ctx);

        if (node.kind == NodeKind::Vulnerability) {
            std::vector<VulnRecord> one;
            try {
                one.push_back(vuln_record_from_node(node, diag_));
            } catch (const Error& e) {
                fail(e.code(), ctx + ": " + e.what());
            }
            auto kept = preprocess_cves(std::move(one));
            if (kept.empty()) {
                filtered_.insert(node.id);
                continue;
            }
            Properties extra = node.props;
            for (auto& [k, v] : vuln_properties(kept.front())) {
                extra[k] = std::move(v);
            }
            node.props = std::move(extra);
            vulns_.push_back(std::move(kept.front()));
        }
        try {
            graph_.upsert_node(std::move(node));
        } catch (const Error& e) {
            fail(e.code(), ctx + ": " + e.what());
        }
        accepted.insert(field_at(fields, c_id, ctx));
    }
    return accepted.size();
}

std::size_t Ingestor::load_relations(const std::string& path) {
    auto in = open_input(path);
    return load_relations(in, path);
}

std::size_t Ingestor::load_relations(std::istream& in, std::string_view source) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        fail(ErrorCode::MissingColumn, std::string(source) + ": empty file, expected header");
    }
    const csv::Header header(fields);
    const auto c_src = header.require("src", source);
    const auto c_dst = header.require("dst", source);
    const auto c_kind = header.require("kind", source);
    const auto c_props = header.find("props_json");

    std::set<std::tuple<std::string, std::string, EdgeKind>> accepted;
    while (reader.next(fields)) {
        if (blank_row(fields)) {
            continue;
        }
        const std::string ctx = where(source, reader.line());
        const std::string& src = field_at(fields, c_src, ctx);
        const std::string& dst = field_at(fields, c_dst, ctx);
        const std::string& kind_text = field_at(fields, c_kind, ctx);
        auto kind = parse_edge_kind(kind_text);
        if (!kind) {
            fail(ErrorCode::BadEnum, ctx + ": unknown relation kind '" + kind_text + "'");
        }
        if (filtered_.count(src) || filtered_.count(dst)) {
            ++skipped_relations_;
            continue;
        }
        for (const auto& endpoint : {src, dst}) {
            if (!graph_.find(endpoint)) {
                fail(ErrorCode::DanglingReference,
                     ctx + ": relation references unknown node '" + endpoint + "'");
            }
        }
        Properties props;
        if (c_props) {
            props = props_from_json_text(field_at(fields, *c_props, ctx), ctx);
        }
        try {
            graph_.upsert_edge(src, dst, *kind, std::nullopt, std::move(props));
        } catch (const Error& e) {
            fail(e.code(), ctx + ": " + e.what());
        }
        accepted.emplace(src, dst, *kind);
    }
    return accepted.size();
}

std::size_t Ingestor::load_edge_csv(const std::string& path) {
    auto in = open_input(path);
    return load_edge_csv(in, path);
}

std::size_t Ingestor::load_edge_csv(std::istream& in, std::string_view source) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        fail(ErrorCode::MissingColumn, std::string(source) + ": empty file, expected header");
    }
    const csv::Header header(fields);
    const auto c_src = header.require("src", source);
    const auto c_dst = header.require("dst", source);
    const auto c_kind = header.require("kind", source);
    const auto c_rw = header.require("riskWeight", source);
    const auto c_pe = header.require("pExploit", source);
    const auto c_ac = header.require("attackCost", source);
    const auto c_cs = header.require("controlStrength", source);
    const auto c_proto = header.require("protocol", source);

    std::size_t count = 0;
    while (reader.next(fields)) {
        if (blank_row(fields)) {
            continue;
        }
        const std::string ctx = where(source, reader.line());
        const std::string& kind_text = field_at(fields, c_kind, ctx);
        auto kind = parse_edge_kind(kind_text);
        if (!kind) {
            fail(ErrorCode::BadEnum, ctx + ": unknown relation kind '" + kind_text + "'");
        }
        const std::string& src = field_at(fields, c_src, ctx);
        const std::string& dst = field_at(fields, c_dst, ctx);
        if (!graph_.find(src) || !graph_.find(dst)) {
            fail(ErrorCode::DanglingReference, ctx + ": edge references unknown node");
        }
        std::optional<RiskAttributes> risk;
        if (!field_at(fields, c_rw, ctx).empty()) {
            risk = RiskAttributes{require_double(field_at(fields, c_cs, ctx), ctx),
                                  require_double(field_at(fields, c_pe, ctx), ctx),
                                  require_double(field_at(fields, c_ac, ctx), ctx),
                                  require_double(field_at(fields, c_rw, ctx), ctx)};
        }
        Properties props;
        if (const auto& proto = field_at(fields, c_proto, ctx); !proto.empty()) {
            props["protocol"] = proto;
        }
        try {
            graph_.upsert_edge(src, dst, *kind, risk, std::move(props));
        } catch (const Error& e) {
            fail(e.code(), ctx + ": " + e.what());
        }
        ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Predictions

std::vector<PredictedRelation> read_predictions(std::istream& in, std::string_view source) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        fail(ErrorCode::MissingColumn, std::string(source) + ": empty file, expected header");
    }
    const csv::Header header(fields);
    const auto c_src = header.require("src", source);
    const auto c_dst = header.require("dst", source);
    const auto c_kind = header.require("kind", source);
    const auto c_conf = header.require("confidence", source);
    std::vector<PredictedRelation> rows;
    while (reader.next(fields)) {
        if (blank_row(fields)) {
            continue;
        }
        const std::string ctx = where(source, reader.line());
        const std::string& kind_text = field_at(fields, c_kind, ctx);
        auto kind = parse_edge_kind(kind_text);
        if (!kind || (*kind != EdgeKind::HasPossibleCwe && *kind != EdgeKind::HasPossibleTechnique &&
                      *kind != EdgeKind::SuggestedTactic)) {
            fail(ErrorCode::BadEnum, ctx + ": '" + kind_text + "' is not a prediction kind");
        }
        const double conf = require_double(field_at(fields, c_conf, ctx), ctx);
        if (!(conf >= 0.0 && conf <= 1.0)) {
            fail(ErrorCode::BadValue, ctx + ": confidence outside [0,1]");
        }
        rows.push_back(
            PredictedRelation{field_at(fields, c_src, ctx), field_at(fields, c_dst, ctx), *kind, conf});
    }
    return rows;
}

std::vector<PredictedRelation> load_predictions(const std::string& path) {
    auto in = open_input(path);
    return read_predictions(in, path);
}

std::size_t import_predictions(KnowledgeGraph& graph, std::span<const PredictedRelation> rows,
                               double min_confidence) {
    std::size_t count = 0;
    for (const auto& row : rows) {
        if (row.kind != EdgeKind::HasPossibleCwe && row.kind != EdgeKind::HasPossibleTechnique &&
            row.kind != EdgeKind::SuggestedTactic) {
            fail(ErrorCode::BadEnum,
                 fmt::format("{} is not a prediction kind", to_string(row.kind)));
        }
        if (row.confidence < min_confidence) {
            continue;
        }
        if (!graph.find(row.src) || !graph.find(row.dst)) {
            fail(ErrorCode::DanglingReference,
                 fmt::format("prediction {} -> {} references an unknown node", row.src, row.dst));
        }
        graph.upsert_edge(row.src, row.dst, row.kind, std::nullopt,
                          Properties{{"confidence", fmt::format("{}", row.confidence)}});
        ++count;
    }
    return count;
}

std::vector<HierarchyViolation> audit_hierarchy(const KnowledgeGraph& graph) {
    std::vector<HierarchyViolation> out;
    for (const Edge& e : graph.edges()) {
        const Node& s = graph.node(e.src);
        const Node& d = graph.node(e.dst);
        if (!edge_kinds_compatible(e.kind, s.kind, d.kind)) {
            out.push_back(HierarchyViolation{s.id, d.id, e.kind});
        }
    }
    return out;
}

}  // namespace otkg
