#include "otkg/controls.hpp"

#include <nlohmann/json.hpp>

#include "otkg/error.hpp"

namespace otkg {

namespace {
constexpr std::string_view kControlNames[] = {"NetworkSegmentation", "PatchManagement", "IDS",
                                              "AccessControl", "ConfigHardening"};

void check_rate(double v, std::string_view name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorCode::InvalidProfile, "control override '" + std::string(name) +
                                            "' must lie in [0,1]");
    }
}
}  // namespace

std::string_view to_string(ControlType control) noexcept {
    return kControlNames[static_cast<std::size_t>(control)];
}

std::optional<ControlType> parse_control_type(std::string_view text) noexcept {
    for (std::size_t i = 0; i < std::size(kControlNames); ++i) {
        if (kControlNames[i] == text) {
            return static_cast<ControlType>(i);
        }
    }
    if (text == "IntrusionDetection") {
        return ControlType::IntrusionDetection;
    }
    return std::nullopt;
}

bool ControlProfile::allowlisted(std::string_view a, std::string_view b) const {
    for (const auto& [x, y] : allowlist) {
        if ((x == a && y == b) || (x == b && y == a)) {
            return true;
        }
    }
    return false;
}

bool ControlProfile::blocks(std::string_view src, std::string_view src_zone, std::string_view dst,
                            std::string_view dst_zone) const {
    return has(ControlType::NetworkSegmentation) && src_zone != dst_zone &&
           !allowlisted(src, dst);
}

ControlProfile control_profile_from_json(const nlohmann::json& j) {
    ControlProfile profile;
    if (j.contains("enabled")) {
        for (const auto& name : j.at("enabled")) {
            auto c = parse_control_type(name.get<std::string>());
            if (!c) {
                fail(ErrorCode::BadEnum, "unknown control '" + name.get<std::string>() + "'");
            }
            profile.enabled.insert(*c);
        }
    }
    if (j.contains("overrides")) {
        const auto& o = j.at("overrides");
        auto& ov = profile.overrides;
        ov.anonFrac = o.value("anonFrac", ov.anonFrac);
        ov.certFrac = o.value("certFrac", ov.certFrac);
        ov.accessInsecureModeFrac = o.value("accessInsecureModeFrac", ov.accessInsecureModeFrac);
        ov.misconfigRate = o.value("misconfigRate", ov.misconfigRate);
        ov.hardeningFailCheckFrac = o.value("hardeningFailCheckFrac", ov.hardeningFailCheckFrac);
        ov.patchedInsecureModeFrac =
            o.value("patchedInsecureModeFrac", ov.patchedInsecureModeFrac);
        ov.patchedFailCheckFrac = o.value("patchedFailCheckFrac", ov.patchedFailCheckFrac);
        ov.failedWriteFrac = o.value("failedWriteFrac", ov.failedWriteFrac);
        ov.auditWriteFrac = o.value("auditWriteFrac", ov.auditWriteFrac);
        ov.clientIpPoolSize = o.value("clientIpPoolSize", ov.clientIpPoolSize);
        for (auto [v, name] : {std::pair{ov.anonFrac, "anonFrac"}, {ov.certFrac, "certFrac"},
                               {ov.accessInsecureModeFrac, "accessInsecureModeFrac"},
                               {ov.misconfigRate, "misconfigRate"},
                               {ov.hardeningFailCheckFrac, "hardeningFailCheckFrac"},
                               {ov.patchedInsecureModeFrac, "patchedInsecureModeFrac"},
                               {ov.patchedFailCheckFrac, "patchedFailCheckFrac"},
                               {ov.failedWriteFrac, "failedWriteFrac"},
                               {ov.auditWriteFrac, "auditWriteFrac"}}) {
            check_rate(v, name);
        }
        if (ov.clientIpPoolSize < 1) {
            fail(ErrorCode::InvalidProfile, "control override 'clientIpPoolSize' must be >= 1");
        }
    }
    if (j.contains("allowlist")) {
        for (const auto& pair : j.at("allowlist")) {
            profile.allowlist.emplace_back(pair.at(0).get<std::string>(),
                                           pair.at(1).get<std::string>());
        }
    }
    return profile;
}

nlohmann::json to_json(const ControlProfile& profile) {
    nlohmann::json j;
    j["enabled"] = nlohmann::json::array();
    for (ControlType c : profile.enabled) {
        j["enabled"].push_back(std::string(to_string(c)));
    }
    const auto& ov = profile.overrides;
    j["overrides"] = {{"anonFrac", ov.anonFrac},
                      {"certFrac", ov.certFrac},
                      {"accessInsecureModeFrac", ov.accessInsecureModeFrac},
                      {"misconfigRate", ov.misconfigRate},
                      {"hardeningFailCheckFrac", ov.hardeningFailCheckFrac},
                      {"patchedInsecureModeFrac", ov.patchedInsecureModeFrac},
                      {"patchedFailCheckFrac", ov.patchedFailCheckFrac},
                      {"failedWriteFrac", ov.failedWriteFrac},
                      {"auditWriteFrac", ov.auditWriteFrac},
                      {"clientIpPoolSize", ov.clientIpPoolSize}};
    j["allowlist"] = nlohmann::json::array();
    for (const auto& [a, b] : profile.allowlist) {
        j["allowlist"].push_back({a, b});
    }
    return j;
}

}  // namespace otkg
