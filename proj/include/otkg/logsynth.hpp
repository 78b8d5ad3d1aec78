#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otkg/controls.hpp"
#include "otkg/ingestion.hpp"
#include "otkg/risk.hpp"

namespace otkg {

/// Baseline generation parameters. Event fractions are per session.
struct SynthProfile {
    std::uint64_t seed = 42;
    double durationHours = 24.0;
    /// Sessions per hour on every dataflow.
    double perFlowSessionRate = 100.0;
    double anonFrac = 0.03;
    double insecureModeFrac = 0.005;
    double certFrac = 0.90;
    double misconfigRate = 0.02;
    double failedWriteFrac = 0.05;
    double auditWriteFrac = 0.01;
    double failCheckFrac = 0.01;
    int clientIpPoolSize = 10;

    /// Throws InvalidProfile.
    void validate() const;
};

SynthProfile synth_profile_from_json(const nlohmann::json& j);
SynthProfile load_synth_profile(const std::string& path);
nlohmann::json to_json(const SynthProfile& profile);

/// Rates one flow actually draws from, after protocol limits and controls.
struct FlowRates {
    double anonFrac = 0.0;
    double certFrac = 0.0;
    double insecureModeFrac = 0.0;
    double misconfigRate = 0.0;
    double failedWriteFrac = 0.0;
    double auditWriteFrac = 0.0;
    double failCheckFrac = 0.0;
    int clientIpPoolSize = 1;
};

/// A protocol without authentication forces anonymous sessions; one without
/// encryption forces securityMode None. Controls never override those limits.
FlowRates effective_rates(const SynthProfile& profile, const ProtocolTraits& traits,
                          const ControlProfile* controls = nullptr);

/// Sessions generated per flow: round(rate × hours).
std::size_t sessions_per_flow(const SynthProfile& profile);

/// Every session emits a Session record, one operation record
/// (Read/Write/FailedWrite/AuditWrite) and one config-check record. Records of
/// all flows are merged by timestamp, then flow order.
std::vector<LogRecord> generate(const TestbedSpec& testbed, const SynthProfile& profile);

/// Same random stream as generate(), so each secured rate is pointwise no worse
/// than the baseline. Segmented cross-zone flows are dropped.
std::vector<LogRecord> generate_secured(const TestbedSpec& testbed, const SynthProfile& profile,
                                        const ControlProfile& controls);

}  // namespace otkg
