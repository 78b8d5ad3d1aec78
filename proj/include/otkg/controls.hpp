#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace otkg {

enum class ControlType {
    NetworkSegmentation,
    PatchManagement,
    IntrusionDetection,
    AccessControl,
    ConfigHardening,
};

std::string_view to_string(ControlType control) noexcept;
std::optional<ControlType> parse_control_type(std::string_view text) noexcept;

/// Log-rate targets a control drives toward. Controls only ever lower a weakness
/// rate (or raise certificate usage); they never make a baseline worse.
struct ControlOverrides {
    // AccessControl
    double anonFrac = 0.001;
    double certFrac = 0.95;
    double accessInsecureModeFrac = 0.001;
    // ConfigHardening
    double misconfigRate = 0.002;
    double hardeningFailCheckFrac = 0.002;
    // PatchManagement
    double patchedInsecureModeFrac = 0.002;
    double patchedFailCheckFrac = 0.005;
    // IntrusionDetection
    double failedWriteFrac = 0.01;
    double auditWriteFrac = 0.004;
    // NetworkSegmentation
    int clientIpPoolSize = 3;
};

struct ControlProfile {
    std::set<ControlType> enabled;
    ControlOverrides overrides;
    /// Product pairs (unordered) allowed to communicate across zones when
    /// NetworkSegmentation is enabled.
    std::vector<std::pair<std::string, std::string>> allowlist;

    bool has(ControlType c) const { return enabled.count(c) != 0; }
    bool allowlisted(std::string_view a, std::string_view b) const;
    /// Cross-zone pair that segmentation cuts.
    bool blocks(std::string_view src, std::string_view src_zone, std::string_view dst,
                std::string_view dst_zone) const;
};

ControlProfile control_profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ControlProfile& profile);

}  // namespace otkg
