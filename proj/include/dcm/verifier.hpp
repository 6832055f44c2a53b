// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Install-time package validation. Six ordered steps, evaluated with
// short-circuit so a single-fault package fails at exactly one step:
//
//   1  developer signature and content integrity against the manifest
//   2  chain structure and a trusted anchor
//   3  validity windows of every chain certificate
//   4  revocation status of every chain certificate
//   5  every chain signature
//   6  trust level read from the leaf extension
//
// The report feeds decide_install: Trusted installs without friction,
// Unknown/Warning prompt, Critical and any failed step deny.

#pragma once

#include <array>
#include <functional>

#include "dcm/common.hpp"
#include "dcm/package.hpp"
#include "dcm/revocation.hpp"
#include "dcm/trust.hpp"

namespace dcm::verifier {

/// What step 4 does when no status endpoint answers: FailOpen records the
/// outage but passes, FailClosed fails the step.
enum class OfflinePolicy : uint8_t { FailOpen = 0, FailClosed = 1 };

struct VerifierConfig {
    std::vector<trust::Certificate> trust_anchors;
    std::optional<revocation::Client> revocation;  // unset: no endpoint configured
    OfflinePolicy offline_policy = OfflinePolicy::FailOpen;
    std::function<Timestamp()> clock;
};

struct StepResult {
    enum class State : uint8_t { NotEvaluated = 0, Pass = 1, Fail = 2 };
    State state = State::NotEvaluated;
    /// Failure reason; on a pass it may still carry an annotation
    /// (RevocationUnavailable under FailOpen).
    Err reason = Err::None;
    std::string detail;

    [[nodiscard]] bool passed() const { return state == State::Pass; }
    [[nodiscard]] bool failed() const { return state == State::Fail; }
};

struct VerificationReport {
    std::array<StepResult, 6> steps;
    std::optional<trust::TrustLevel> trust_level;  // present when step 6 was reached
    std::optional<std::string> threat_summary;     // leaf annotation, surfaced in prompts
    std::string package_name;
    bool overall_ok = false;
    int first_failed_step = 0;  // 1-based; 0 when everything passed
    Err failure_reason = Err::None;

    [[nodiscard]] const StepResult& step(int number) const { return steps.at(number - 1); }
    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] std::string to_text() const;
};

VerificationReport verify_package(const package::PackageArchive& archive,
                                  const VerifierConfig& config);

struct InstallDecision {
    enum class Kind : uint8_t { Install = 0, Prompt = 1, Deny = 2 };
    Kind kind = Kind::Deny;
    std::optional<trust::TrustLevel> level;
    std::string message;
    Err reason = Err::None;
};

const char* to_string(InstallDecision::Kind kind);

InstallDecision decide_install(const VerificationReport& report);

// Exit-code contract when driven from the command line.
inline constexpr int kExitInstall = 0;
inline constexpr int kExitPrompt = 10;
inline constexpr int kExitDeny = 20;
inline constexpr int kExitMalformed = 30;

int exit_code_for(const InstallDecision& decision);

}  // namespace dcm::verifier
