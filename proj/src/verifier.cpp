// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/verifier.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace dcm::verifier {

namespace {

void fail_step(VerificationReport& report, int number, Err reason, std::string detail) {
    StepResult& step = report.steps[static_cast<size_t>(number - 1)];
    step.state = StepResult::State::Fail;
    step.reason = reason;
    step.detail = std::move(detail);
    report.overall_ok = false;
    report.first_failed_step = number;
    report.failure_reason = reason;
}

void pass_step(VerificationReport& report, int number, Err annotation = Err::None,
               std::string detail = {}) {
    StepResult& step = report.steps[static_cast<size_t>(number - 1)];
    step.state = StepResult::State::Pass;
    step.reason = annotation;
    step.detail = std::move(detail);
}

}  // namespace

VerificationReport verify_package(const package::PackageArchive& archive,
                                  const VerifierConfig& config) {
    VerificationReport report;
    report.overall_ok = true;
    const Timestamp now = config.clock ? config.clock() : 0;

    // Step 1: developer signature over the manifest, every content digest,
    // and a present package name.
    auto meta = package::extract_metadata(archive);
    if (!meta) {
        fail_step(report, 1, meta.code, meta.message);
        return report;
    }
    const package::PackageManifest& manifest = meta.value.manifest;
    const package::SignatureBlock& block = meta.value.signature_block;
    report.package_name = manifest.package_name;

    if (block.chain.empty()) {
        fail_step(report, 1, Err::SignatureInvalid, "empty certificate chain");
        return report;
    }
    const trust::Certificate& leaf = block.chain.front();

    if (!crypto::verify(block.manifest_digest, block.signature, leaf.body.subject_public_key)) {
        fail_step(report, 1, Err::SignatureInvalid,
                  "developer signature does not verify under the chain leaf key");
        return report;
    }
    if (crypto::sha256(package::serialize_manifest(manifest)) != block.manifest_digest) {
        fail_step(report, 1, Err::SignatureInvalid, "manifest does not match the signed digest");
        return report;
    }
    if (manifest.package_name.empty()) {
        fail_step(report, 1, Err::MalformedMetadata, "manifest lacks a package name");
        return report;
    }

    auto files = package::content_files(archive);
    if (!files) {
        fail_step(report, 1, Err::MalformedMetadata, files.message);
        return report;
    }
    std::map<std::string, const package::FileInput*> by_path;
    for (const auto& file : files.value) {
        by_path.emplace(file.path, &file);
    }
    if (by_path.size() != manifest.files.size()) {
        fail_step(report, 1, Err::DigestMismatch,
                  "archive content does not match the manifest file list");
        return report;
    }
    for (const auto& entry : manifest.files) {
        auto it = by_path.find(entry.path);
        if (it == by_path.end()) {
            fail_step(report, 1, Err::DigestMismatch, "manifest entry missing from archive: " + entry.path);
            return report;
        }
        const package::FileInput& file = *it->second;
        if (file.content.size() != entry.size || crypto::sha256(file.content) != entry.digest) {
            fail_step(report, 1, Err::DigestMismatch, "content digest mismatch: " + entry.path);
            return report;
        }
    }
    pass_step(report, 1);

    // The chain walk is pure; compute it once and attribute facets to steps
    // 2 (structure + anchor), 3 (validity), and 5 (signatures).
    trust::ChainReport chain_report = trust::validate_chain(block.chain, config.trust_anchors, now);

    // Step 2: issued under a trusted authority.
    {
        bool structure_ok = true;
        std::string detail;
        for (size_t i = 0; i < chain_report.links.size(); ++i) {
            if (!chain_report.links[i].role_ok) {
                structure_ok = false;
                detail = "link " + std::to_string(i) + " breaks the chain structure";
                break;
            }
        }
        if (!structure_ok) {
            fail_step(report, 2, Err::RoleOrderViolation, detail);
            return report;
        }
        if (!chain_report.anchor_ok) {
            fail_step(report, 2, Err::UnknownAnchor, "chain root is not a trusted anchor");
            return report;
        }
        pass_step(report, 2);
    }

    // Step 3: validity windows.
    for (size_t i = 0; i < chain_report.links.size(); ++i) {
        if (!chain_report.links[i].validity_ok) {
            const auto& problems = chain_report.links[i].problems;
            Err reason = std::find(problems.begin(), problems.end(), Err::NotYetValid) != problems.end()
                             ? Err::NotYetValid
                             : Err::Expired;
            fail_step(report, 3, reason, "certificate at link " + std::to_string(i));
            return report;
        }
    }
    pass_step(report, 3);

    // Step 4: revocation status of every chain certificate. Only a revoked
    // answer fails; unknown is an in-band answer (self-signed roots are
    // unknown to every registry by construction).
    {
        bool unavailable = !config.revocation.has_value();
        std::string detail;
        if (config.revocation) {
            for (size_t i = 0; i < block.chain.size(); ++i) {
                const trust::Certificate& cert = block.chain[i];
                auto status = config.revocation->check(cert.body.serial,
                                                       cert.body.issuer_fingerprint, now);
                if (!status) {
                    unavailable = true;
                    detail = status.message;
                    break;
                }
                if (status.value.status == revocation::CertStatus::Revoked) {
                    fail_step(report, 4, Err::Revoked,
                              "certificate at link " + std::to_string(i) + " is revoked");
                    return report;
                }
            }
        }
        if (unavailable) {
            if (config.offline_policy == OfflinePolicy::FailClosed) {
                fail_step(report, 4, Err::RevocationUnavailable,
                          detail.empty() ? "no status endpoint reachable" : detail);
                return report;
            }
            pass_step(report, 4, Err::RevocationUnavailable, "status endpoint unavailable; passing open");
        } else {
            pass_step(report, 4);
        }
    }

    // Step 5: every chain signature.
    for (size_t i = 0; i < chain_report.links.size(); ++i) {
        if (!chain_report.links[i].signature_ok) {
            fail_step(report, 5, Err::SignatureInvalid,
                      "signature at link " + std::to_string(i) + " does not verify");
            return report;
        }
    }
    pass_step(report, 5);

    // Step 6: trust level from the leaf extension.
    auto level = leaf.trust_level();
    if (!level) {
        fail_step(report, 6, Err::MissingTrustLevel, "leaf carries no valid trust level");
        return report;
    }
    report.trust_level = *level;
    report.threat_summary = leaf.threat_summary();
    pass_step(report, 6, Err::None, trust::to_string(*level));
    return report;
}

const char* to_string(InstallDecision::Kind kind) {
    switch (kind) {
        case InstallDecision::Kind::Install: return "Install";
        case InstallDecision::Kind::Prompt: return "Prompt";
        case InstallDecision::Kind::Deny: return "Deny";
    }
    return "?";
}

InstallDecision decide_install(const VerificationReport& report) {
    InstallDecision decision;
    if (!report.overall_ok) {
        decision.kind = InstallDecision::Kind::Deny;
        decision.reason = report.failure_reason;
        decision.message = "validation failed at step " + std::to_string(report.first_failed_step) +
                           ": " + to_string(report.failure_reason);
        return decision;
    }
    decision.level = report.trust_level;
    switch (*report.trust_level) {
        case trust::TrustLevel::Trusted:
            decision.kind = InstallDecision::Kind::Install;
            decision.message = "developer is Trusted";
            break;
        case trust::TrustLevel::Unknown:
            decision.kind = InstallDecision::Kind::Prompt;
            decision.message = "developer trust level is Unknown; continue at your own risk";
            break;
        case trust::TrustLevel::Warning:
            decision.kind = InstallDecision::Kind::Prompt;
            decision.message = "developer is flagged Warning";
            if (report.threat_summary) {
                decision.message += " (" + *report.threat_summary + ")";
            }
            break;
        case trust::TrustLevel::Critical:
            decision.kind = InstallDecision::Kind::Deny;
            decision.reason = Err::None;
            decision.message = "developer is Critical; installation is blocked";
            break;
    }
    return decision;
}

int exit_code_for(const InstallDecision& decision) {
    switch (decision.kind) {
        case InstallDecision::Kind::Install: return kExitInstall;
        case InstallDecision::Kind::Prompt: return kExitPrompt;
        case InstallDecision::Kind::Deny: return kExitDeny;
    }
    return kExitMalformed;
}

std::string VerificationReport::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (size_t i = 0; i < steps.size(); ++i) {
        const StepResult& step = steps[i];
        const char* state = step.state == StepResult::State::Pass     ? "pass"
                            : step.state == StepResult::State::Fail   ? "fail"
                                                                      : "not-evaluated";
        nlohmann::json j = {{"step", i + 1}, {"state", state}};
        if (step.reason != Err::None) {
            j["reason"] = to_string(step.reason);
        }
        if (!step.detail.empty()) {
            j["detail"] = step.detail;
        }
        steps_json.push_back(std::move(j));
    }
    nlohmann::json j = {
        {"package_name", package_name},
        {"overall", overall_ok ? "pass" : "fail"},
        {"steps", steps_json},
    };
    if (trust_level) {
        j["trust_level"] = trust::to_string(*trust_level);
    }
    if (!overall_ok) {
        j["first_failed_step"] = first_failed_step;
        j["failure_reason"] = to_string(failure_reason);
    }
    return j.dump(2);
}

std::string VerificationReport::to_text() const {
    std::ostringstream out;
    out << "package: " << (package_name.empty() ? "(unknown)" : package_name) << '\n';
    static const char* kNames[6] = {
        "developer signature and content integrity",
        "trusted certificate authority",
        "certificate validity window",
        "revocation status",
        "certificate chain signatures",
        "trust level",
    };
    for (size_t i = 0; i < steps.size(); ++i) {
        const StepResult& step = steps[i];
        out << "  step " << (i + 1) << " " << kNames[i] << ": ";
        switch (step.state) {
            case StepResult::State::Pass:
                out << "pass";
                if (step.reason != Err::None) {
                    out << " (" << to_string(step.reason) << ")";
                }
                break;
            case StepResult::State::Fail:
                out << "FAIL [" << to_string(step.reason) << "]";
                if (!step.detail.empty()) {
                    out << " " << step.detail;
                }
                break;
            case StepResult::State::NotEvaluated:
                out << "-";
                break;
        }
        out << '\n';
    }
    if (trust_level) {
        out << "  trust level: " << trust::to_string(*trust_level) << '\n';
    }
    out << "  overall: " << (overall_ok ? "pass" : "fail") << '\n';
    return out.str();
}

}  // namespace dcm::verifier
