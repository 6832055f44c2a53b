// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic end-to-end ecosystem scenarios wiring every module together:
// the honest certification-and-install flow plus the two adversarial runs
// (weakest-link certification shopping, dormant developer). Scenarios drive a
// simulated clock, derive all keys from fixed seeds, and assert on terminal
// state; identical configuration yields an identical timeline.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dcm/common.hpp"
#include "dcm/verifier.hpp"

namespace dcm::sim {

/// An app store with its certification arm. `strict` stores issue exactly what
/// policy supports; a lax store hands out Trusted regardless of evidence.
struct IcaSpec {
    std::string name;
    bool strict = true;
};

struct EcosystemConfig {
    std::vector<IcaSpec> icas;
    Timestamp clock_start = 1'700'000'000;

    int64_t root_lifetime_days = 3650;
    int64_t ica_lifetime_days = 1825;
    int64_t developer_lifetime_days = 1095;

    bool monitor_enabled = true;
    bool exchange_enabled = true;
    bool responder_up = true;
    verifier::OfflinePolicy offline_policy = verifier::OfflinePolicy::FailOpen;

    /// Services run in-process by default; true runs them over loopback HTTP.
    bool use_sockets = false;

    /// Honest flow: days the clock advances before each install.
    int64_t days_between_installs = 0;

    /// Dormant developer: which store misses the malware and which one finds it.
    size_t listing_store = 0;
    size_t detecting_store = 1;
    /// Dormant developer: detection fires before the trust promotion.
    bool detect_before_promotion = false;

    /// Journals live here; empty picks a fresh directory under the system
    /// temp path.
    std::filesystem::path state_dir;
};

EcosystemConfig honest_flow_config();
EcosystemConfig weakest_link_config();
EcosystemConfig dormant_developer_config();

struct TimelineEvent {
    Timestamp at = 0;
    std::string actor;
    std::string action;
};

struct ScenarioResult {
    std::string scenario;
    /// False when the configuration removes the scenario's premise (for
    /// example: no lax store for the weakest-link run).
    bool applicable = true;
    std::vector<TimelineEvent> timeline;
    std::map<std::string, bool> assertions;
    std::map<std::string, std::string> details;

    [[nodiscard]] bool all_passed() const;
    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] std::string to_text() const;
};

Result<ScenarioResult> run_honest_flow(const EcosystemConfig& config);
Result<ScenarioResult> run_weakest_link(const EcosystemConfig& config);
Result<ScenarioResult> run_dormant_developer(const EcosystemConfig& config);

Result<ScenarioResult> run_scenario(const std::string& name, const EcosystemConfig& config);

}  // namespace dcm::sim
