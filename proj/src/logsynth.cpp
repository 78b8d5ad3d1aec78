#include "otkg/logsynth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/error.hpp"

namespace otkg {

using nlohmann::json;

namespace {

constexpr std::int64_t kEpoch = 1700000000;

enum Stream : std::uint64_t { kTime = 1, kAuth, kMode, kOp, kCheck, kIp, kReadWrite };

std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based uniform in [0,1) keyed by (seed, flow, session, stream).
double uniform(std::uint64_t seed, std::uint64_t flow, std::uint64_t session, std::uint64_t stream) {
    std::uint64_t h = mix(seed);
    h = mix(h ^ flow);
    h = mix(h ^ session);
    h = mix(h ^ stream);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void check_rate(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorCode::InvalidProfile, fmt::format("{} = {} must lie in [0,1]", name, v));
    }
}

std::string client_ip(int k) { return fmt::format("10.0.{}.{}", k / 250, k % 250 + 1); }

struct FlowPlan {
    std::size_t index;
    const Dataflow* flow;
    FlowRates rates;
};

std::vector<LogRecord> emit(const std::vector<FlowPlan>& plans, const SynthProfile& profile) {
    const std::size_t n = sessions_per_flow(profile);
    const double span_s = profile.durationHours * 3600.0;
    struct Tagged {
        LogRecord record;
        std::size_t flow;
        std::size_t seq;
    };
    std::vector<Tagged> all;
    all.reserve(plans.size() * n * 3);
    for (const auto& plan : plans) {
        const auto& r = plan.rates;
        std::size_t seq = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto fu = [&](Stream s) { return uniform(profile.seed, plan.index, j, s); };
            const double slot = span_s / static_cast<double>(n);
            const auto ts = kEpoch + static_cast<std::int64_t>(
                                         std::floor((static_cast<double>(j) + fu(kTime)) * slot));

            LogRecord base;
            base.timestamp = ts;
            base.src = plan.flow->src;
            base.dst = plan.flow->dst;
            base.protocol = plan.flow->protocol;

            const double ua = fu(kAuth);
            base.authMode = ua < r.anonFrac             ? AuthMode::Anonymous
                            : ua >= 1.0 - r.certFrac    ? AuthMode::Certificate
                                                        : AuthMode::Password;
            const double um = fu(kMode);
            base.securityMode = um < r.insecureModeFrac        ? SecurityMode::None
                                : um >= 1.0 - r.misconfigRate  ? SecurityMode::Sign
                                                               : SecurityMode::SignAndEncrypt;
            // Pool indices are drawn from the baseline pool; a smaller pool folds them.
            const int k = static_cast<int>(std::floor(fu(kIp) * profile.clientIpPoolSize));
            base.clientIp = client_ip(k % r.clientIpPoolSize);

            LogRecord session = base;
            session.event = LogEvent::Session;
            all.push_back({std::move(session), plan.index, seq++});

            LogRecord op = base;
            const double uo = fu(kOp);
            op.event = uo < r.failedWriteFrac          ? LogEvent::FailedWrite
                       : uo >= 1.0 - r.auditWriteFrac  ? LogEvent::AuditWrite
                       : fu(kReadWrite) < 0.5          ? LogEvent::Read
                                                       : LogEvent::Write;
            all.push_back({std::move(op), plan.index, seq++});

            LogRecord check = std::move(base);
            check.event = fu(kCheck) < r.failCheckFrac ? LogEvent::ConfigCheckFail
                                                       : LogEvent::ConfigCheckPass;
            all.push_back({std::move(check), plan.index, seq++});
        }
    }
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        return std::tie(a.record.timestamp, a.flow, a.seq) <
               std::tie(b.record.timestamp, b.flow, b.seq);
    });
    std::vector<LogRecord> out;
    out.reserve(all.size());
    for (auto& t : all) {
        out.push_back(std::move(t.record));
    }
    return out;
}

const std::string& zone_of(const TestbedSpec& testbed, const std::string& product) {
    const TestbedProduct* p = testbed.product(product);
    if (!p) {
        fail(ErrorCode::DanglingReference, "dataflow names undeclared product '" + product + "'");
    }
    return p->zone;
}

}  // namespace

void SynthProfile::validate() const {
    check_rate(anonFrac, "anonFrac");
    check_rate(insecureModeFrac, "insecureModeFrac");
    check_rate(certFrac, "certFrac");
    check_rate(misconfigRate, "misconfigRate");
    check_rate(failedWriteFrac, "failedWriteFrac");
    check_rate(auditWriteFrac, "auditWriteFrac");
    check_rate(failCheckFrac, "failCheckFrac");
    if (anonFrac + certFrac > 1.0) {
        fail(ErrorCode::InvalidProfile, "anonFrac + certFrac exceeds 1");
    }
    if (insecureModeFrac + misconfigRate > 1.0) {
        fail(ErrorCode::InvalidProfile, "insecureModeFrac + misconfigRate exceeds 1");
    }
    if (failedWriteFrac + auditWriteFrac > 1.0) {
        fail(ErrorCode::InvalidProfile, "failedWriteFrac + auditWriteFrac exceeds 1");
    }
    if (!(durationHours >= 0.0) || !std::isfinite(durationHours)) {
        fail(ErrorCode::InvalidProfile, "durationHours must be >= 0");
    }
    if (!(perFlowSessionRate >= 0.0) || !std::isfinite(perFlowSessionRate)) {
        fail(ErrorCode::InvalidProfile, "perFlowSessionRate must be >= 0");
    }
    if (clientIpPoolSize < 1) {
        fail(ErrorCode::InvalidProfile, "clientIpPoolSize must be >= 1");
    }
}

SynthProfile synth_profile_from_json(const json& j) {
    SynthProfile p;
    try {
        p.seed = j.value("seed", p.seed);
        p.durationHours = j.value("durationHours", p.durationHours);
        p.perFlowSessionRate = j.value("perFlowSessionRate", p.perFlowSessionRate);
        p.anonFrac = j.value("anonFrac", p.anonFrac);
        p.insecureModeFrac = j.value("insecureModeFrac", p.insecureModeFrac);
        p.certFrac = j.value("certFrac", p.certFrac);
        p.misconfigRate = j.value("misconfigRate", p.misconfigRate);
        p.failedWriteFrac = j.value("failedWriteFrac", p.failedWriteFrac);
        p.auditWriteFrac = j.value("auditWriteFrac", p.auditWriteFrac);
        p.failCheckFrac = j.value("failCheckFrac", p.failCheckFrac);
        p.clientIpPoolSize = j.value("clientIpPoolSize", p.clientIpPoolSize);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidProfile, std::string("synth profile: ") + e.what());
    }
    p.validate();
    return p;
}

SynthProfile load_synth_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    try {
        return synth_profile_from_json(json::parse(in));
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidProfile, path + ": " + e.what());
    }
}

json to_json(const SynthProfile& p) {
    return {{"seed", p.seed},
            {"durationHours", p.durationHours},
            {"perFlowSessionRate", p.perFlowSessionRate},
            {"anonFrac", p.anonFrac},
            {"insecureModeFrac", p.insecureModeFrac},
            {"certFrac", p.certFrac},
            {"misconfigRate", p.misconfigRate},
            {"failedWriteFrac", p.failedWriteFrac},
            {"auditWriteFrac", p.auditWriteFrac},
            {"failCheckFrac", p.failCheckFrac},
            {"clientIpPoolSize", p.clientIpPoolSize}};
}

FlowRates effective_rates(const SynthProfile& p, const ProtocolTraits& traits,
                          const ControlProfile* controls) {
    FlowRates r{p.anonFrac,        p.certFrac,       p.insecureModeFrac, p.misconfigRate,
                p.failedWriteFrac, p.auditWriteFrac, p.failCheckFrac,    p.clientIpPoolSize};
    if (controls) {
        const auto& o = controls->overrides;
        if (controls->has(ControlType::AccessControl)) {
            r.anonFrac = std::min(r.anonFrac, o.anonFrac);
            r.certFrac = std::max(r.certFrac, std::min(o.certFrac, 1.0 - r.anonFrac));
            r.insecureModeFrac = std::min(r.insecureModeFrac, o.accessInsecureModeFrac);
        }
        if (controls->has(ControlType::ConfigHardening)) {
            r.misconfigRate = std::min(r.misconfigRate, o.misconfigRate);
            r.failCheckFrac = std::min(r.failCheckFrac, o.hardeningFailCheckFrac);
        }
        if (controls->has(ControlType::PatchManagement)) {
            r.insecureModeFrac = std::min(r.insecureModeFrac, o.patchedInsecureModeFrac);
            r.failCheckFrac = std::min(r.failCheckFrac, o.patchedFailCheckFrac);
        }
        if (controls->has(ControlType::IntrusionDetection)) {
            r.failedWriteFrac = std::min(r.failedWriteFrac, o.failedWriteFrac);
            r.auditWriteFrac = std::min(r.auditWriteFrac, o.auditWriteFrac);
        }
        if (controls->has(ControlType::NetworkSegmentation)) {
            r.clientIpPoolSize = std::min(r.clientIpPoolSize, o.clientIpPoolSize);
        }
    }
    if (!traits.authCapable) {
        r.anonFrac = 1.0;
        r.certFrac = 0.0;
    }
    if (!traits.encryptionCapable) {
        r.insecureModeFrac = 1.0;
        r.misconfigRate = 0.0;
    }
    return r;
}

std::size_t sessions_per_flow(const SynthProfile& profile) {
    return static_cast<std::size_t>(std::llround(profile.perFlowSessionRate * profile.durationHours));
}

std::vector<LogRecord> generate(const TestbedSpec& testbed, const SynthProfile& profile) {
    profile.validate();
    std::vector<FlowPlan> plans;
    for (std::size_t i = 0; i < testbed.dataflows.size(); ++i) {
        const Dataflow& f = testbed.dataflows[i];
        plans.push_back({i, &f, effective_rates(profile, testbed.traits(f.protocol))});
    }
    return emit(plans, profile);
}

std::vector<LogRecord> generate_secured(const TestbedSpec& testbed, const SynthProfile& profile,
                                        const ControlProfile& controls) {
    profile.validate();
    std::vector<FlowPlan> plans;
    for (std::size_t i = 0; i < testbed.dataflows.size(); ++i) {
        const Dataflow& f = testbed.dataflows[i];
        if (controls.blocks(f.src, zone_of(testbed, f.src), f.dst, zone_of(testbed, f.dst))) {
            continue;
        }
        plans.push_back({i, &f, effective_rates(profile, testbed.traits(f.protocol), &controls)});
    }
    return emit(plans, profile);
}

}  // namespace otkg
