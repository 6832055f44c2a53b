// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/sim.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "dcm/authority.hpp"
#include "dcm/ctlog.hpp"
#include "dcm/net.hpp"
#include "dcm/package.hpp"
#include "dcm/revocation.hpp"
#include "dcm/threatx.hpp"

namespace dcm::sim {

namespace {

Hash32 seed_of(std::string_view label) {
    return crypto::sha256(ByteSpan(reinterpret_cast<const uint8_t*>(label.data()), label.size()));
}

Bytes text_bytes(std::string_view text) {
    return Bytes(text.begin(), text.end());
}

trust::SubjectIdentity make_identity(std::string common_name, std::string organization) {
    trust::SubjectIdentity identity;
    identity.common_name = std::move(common_name);
    identity.organization = std::move(organization);
    identity.country = "PT";
    return identity;
}

/// Responder that never answers; models a downed status endpoint.
class DownSource : public revocation::StatusSource {
  public:
    Result<revocation::StatusResponse> fetch(const revocation::StatusRequest&) override {
        return Result<revocation::StatusResponse>::failure(Err::Unreachable, "responder down");
    }
};

struct Store {
    IcaSpec spec;
    authority::CaState ca;
    std::set<Hash32> listed;
    threatx::IngestState ingest;
    uint64_t cursor = 0;
};

struct Ecosystem {
    EcosystemConfig cfg;
    std::atomic<Timestamp> now{0};
    std::filesystem::path dir;
    ScenarioResult result;

    authority::CaState root;
    std::deque<Store> stores;
    std::shared_ptr<ctlog::Log> log;
    std::shared_ptr<threatx::Exchange> exchange;
    std::shared_ptr<std::mutex> state_mutex = std::make_shared<std::mutex>();
    crypto::KeyPair responder_keys;

    std::unique_ptr<ctlog::CtSubmitter> submitter;
    std::shared_ptr<revocation::StatusSource> status_source;

    net::ServerHandle ocsp_http;
    net::ServerHandle ctlog_http;
    net::ServerHandle threatx_http;
    std::function<Result<uint64_t>(const threatx::ThreatEvent&)> publish_fn;
    std::function<Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>>(uint64_t)> pull_fn;

    ~Ecosystem() {
        ocsp_http.stop();
        ctlog_http.stop();
        threatx_http.stop();
    }

    void note(const std::string& actor, const std::string& action) {
        result.timeline.push_back({now.load(), actor, action});
    }

    void advance_days(int64_t days) {
        now += days * kSecondsPerDay;
    }

    [[nodiscard]] verifier::VerifierConfig verifier_config() const {
        verifier::VerifierConfig config;
        config.trust_anchors = {root.own_certificate};
        config.revocation =
            revocation::Client{status_source, responder_keys.public_key};
        config.offline_policy = cfg.offline_policy;
        Timestamp at = now.load();
        config.clock = [at] { return at; };
        return config;
    }

    [[nodiscard]] ctlog::MonitorContext monitor_context() {
        std::lock_guard lock(*state_mutex);
        ctlog::MonitorContext ctx;
        ctlog::add_registry_to_context(ctx, root);
        for (const auto& store : stores) {
            ctlog::add_registry_to_context(ctx, store.ca);
        }
        return ctx;
    }

    [[nodiscard]] threatx::ActorView actor_view(const Store& store) const {
        threatx::ActorView view;
        view.actor_id = store.spec.name;
        view.listed_packages = store.listed;
        for (const auto& [serial, record] : store.ca.issued) {
            if (record.certificate.body.role == trust::CertificateRole::Developer) {
                view.issued_developers.insert(record.certificate.subject_key_fingerprint());
            }
        }
        return view;
    }
};

std::filesystem::path fresh_state_dir(const std::string& scenario) {
    static std::atomic<uint64_t> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("dcm-sim-" + scenario + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

Result<void> setup(Ecosystem& eco, const EcosystemConfig& cfg, const std::string& scenario) {
    if (cfg.icas.empty()) {
        return Result<void>::failure(Err::ConfigInvalid, "at least one store is required");
    }
    eco.cfg = cfg;
    eco.now = cfg.clock_start;
    eco.result.scenario = scenario;
    eco.dir = cfg.state_dir.empty() ? fresh_state_dir(scenario) : cfg.state_dir;
    std::filesystem::create_directories(eco.dir);

    auto root = authority::init_root(make_identity("DCM Root", "DCM Consortium"),
                                     cfg.root_lifetime_days, eco.now.load(),
                                     seed_of(scenario + "/root"));
    if (!root) {
        return Result<void>::failure(root.code, root.message);
    }
    eco.root = std::move(root.value);
    if (auto bound = authority::bind_journal(eco.root, eco.dir / "root.journal"); !bound) {
        return bound;
    }

    for (size_t i = 0; i < cfg.icas.size(); ++i) {
        const IcaSpec& spec = cfg.icas[i];
        auto issued = authority::issue_intermediate(eco.root, make_identity(spec.name, spec.name),
                                                    cfg.ica_lifetime_days, eco.now.load(),
                                                    seed_of(scenario + "/ica/" + spec.name));
        if (!issued) {
            return Result<void>::failure(issued.code, issued.message);
        }
        Store store;
        store.spec = spec;
        store.ca = std::move(issued.value.second);
        auto journal_path = eco.dir / ("ica-" + std::to_string(i) + ".journal");
        if (auto bound = authority::bind_journal(store.ca, journal_path); !bound) {
            return bound;
        }
        eco.stores.push_back(std::move(store));
    }

    auto log = ctlog::Log::open(eco.dir / "ctlog",
                                crypto::keypair_from_seed(seed_of(scenario + "/log")));
    if (!log) {
        return Result<void>::failure(log.code, log.message);
    }
    eco.log = std::make_shared<ctlog::Log>(std::move(log.value));

    auto exchange = threatx::Exchange::open(eco.dir / "threat.journal");
    if (!exchange) {
        return Result<void>::failure(exchange.code, exchange.message);
    }
    eco.exchange = std::make_shared<threatx::Exchange>(std::move(exchange.value));

    eco.responder_keys = crypto::keypair_from_seed(seed_of(scenario + "/responder"));

    Ecosystem* e = &eco;
    auto clock_fn = [e] { return e->now.load(); };
    auto registries_fn = [e] {
        std::lock_guard lock(*e->state_mutex);
        std::vector<revocation::RegistryView> views;
        views.push_back(revocation::registry_view(e->root));
        for (const auto& store : e->stores) {
            views.push_back(revocation::registry_view(store.ca));
        }
        return views;
    };

    if (cfg.use_sockets) {
        std::vector<net::OcspRegistry> registries;
        registries.push_back(
            {[e] {
                 std::lock_guard lock(*e->state_mutex);
                 return revocation::registry_view(e->root);
             },
             eco.root.secret_key});
        for (size_t i = 0; i < eco.stores.size(); ++i) {
            registries.push_back(
                {[e, i] {
                     std::lock_guard lock(*e->state_mutex);
                     return revocation::registry_view(e->stores[i].ca);
                 },
                 eco.stores[i].ca.secret_key});
        }
        eco.ocsp_http = net::serve_ocsp(std::move(registries), eco.responder_keys, clock_fn,
                                        "127.0.0.1", 0);
        eco.ctlog_http = net::serve_ctlog(eco.log, clock_fn, [e] { return e->monitor_context(); },
                                          "127.0.0.1", 0);
        eco.threatx_http = net::serve_threatx(eco.exchange, "127.0.0.1", 0);
        if (eco.ocsp_http.port <= 0 || eco.ctlog_http.port <= 0 || eco.threatx_http.port <= 0) {
            return Result<void>::failure(Err::IoError, "loopback services failed to start");
        }
        eco.submitter = std::make_unique<net::HttpCtSubmitter>("127.0.0.1", eco.ctlog_http.port);
        eco.status_source =
            std::make_shared<net::HttpStatusSource>("127.0.0.1", eco.ocsp_http.port);
        net::HttpExchangeClient exchange_client{"127.0.0.1", eco.threatx_http.port};
        eco.publish_fn = [exchange_client](const threatx::ThreatEvent& event) {
            return exchange_client.publish(event);
        };
        eco.pull_fn = [exchange_client](uint64_t cursor) {
            return exchange_client.pull_since(cursor);
        };
    } else {
        eco.submitter = std::make_unique<ctlog::InProcessSubmitter>(*eco.log, clock_fn);
        eco.status_source = std::make_shared<revocation::RegistrySource>(
            registries_fn, eco.responder_keys.secret, clock_fn);
        eco.publish_fn = [e](const threatx::ThreatEvent& event) { return e->exchange->publish(event); };
        eco.pull_fn = [e](uint64_t cursor) { return e->exchange->pull_since(cursor); };
    }
    if (!cfg.responder_up) {
        eco.status_source = std::make_shared<DownSource>();
    }
    return Result<void>::success();
}

Result<package::PackageArchive> make_package(const std::string& name, uint64_t version,
                                             const std::vector<package::FileInput>& files,
                                             const crypto::SigningKey& key,
                                             const trust::CertificateChain& chain) {
    auto manifest = package::build_manifest(name, version, files);
    if (!manifest) {
        return forward_failure<package::PackageArchive>(manifest);
    }
    return package::sign_package(files, manifest.value, key, chain);
}

Hash32 package_digest(const package::PackageArchive& archive) {
    return crypto::sha256(archive.zip);
}

void check_replay(Ecosystem& eco) {
    bool ok = true;
    std::string detail;

    auto root_replay = authority::load_ca(eco.dir / "root.journal", eco.root.secret_key);
    if (!root_replay || !authority::registries_equal(root_replay.value, eco.root)) {
        ok = false;
        detail = "root registry replay diverged";
    }
    for (size_t i = 0; i < eco.stores.size() && ok; ++i) {
        auto replay = authority::load_ca(eco.dir / ("ica-" + std::to_string(i) + ".journal"),
                                         eco.stores[i].ca.secret_key);
        if (!replay || !authority::registries_equal(replay.value, eco.stores[i].ca)) {
            ok = false;
            detail = "intermediate registry replay diverged";
        }
    }
    if (ok) {
        auto exchange_replay = threatx::Exchange::open(eco.dir / "threat.journal");
        if (!exchange_replay || exchange_replay.value.events() != eco.exchange->events()) {
            ok = false;
            detail = "threat exchange replay diverged";
        }
    }
    if (ok) {
        auto log_replay = ctlog::Log::open(eco.dir / "ctlog");
        if (!log_replay || log_replay.value.entries() != eco.log->entries() ||
            log_replay.value.current_root() != eco.log->current_root()) {
            ok = false;
            detail = "transparency log replay diverged";
        }
    }
    eco.result.assertions["replay_consistent"] = ok;
    if (!ok) {
        eco.result.details["replay_failure"] = detail;
    }
}

std::string describe(const verifier::InstallDecision& decision) {
    std::string text = verifier::to_string(decision.kind);
    if (decision.level) {
        text += std::string(" (") + trust::to_string(*decision.level) + ")";
    }
    return text;
}

}  // namespace

EcosystemConfig honest_flow_config() {
    EcosystemConfig cfg;
    cfg.icas = {{"StoreA CA", true}};
    return cfg;
}

EcosystemConfig weakest_link_config() {
    EcosystemConfig cfg;
    cfg.icas = {{"StoreA CA", true}, {"StoreB CA", false}};
    return cfg;
}

EcosystemConfig dormant_developer_config() {
    EcosystemConfig cfg;
    cfg.icas = {{"StoreA CA", true}, {"StoreB CA", true}};
    cfg.listing_store = 0;
    cfg.detecting_store = 1;
    return cfg;
}

Result<ScenarioResult> run_honest_flow(const EcosystemConfig& config) {
    using Out = Result<ScenarioResult>;
    Ecosystem eco;
    if (auto ready = setup(eco, config, "honest"); !ready) {
        return Out::failure(ready.code == Err::IoError ? Err::IoError : Err::ConfigInvalid,
                            ready.message);
    }
    Store& store = eco.stores.front();

    crypto::KeyPair dev = crypto::keypair_from_seed(seed_of("honest/developer"));
    authority::PolicyEvidence evidence{true, 800, 15'000, {}};
    eco.note("developer", "requests certification from " + store.spec.name);

    Result<authority::DeveloperIssuance> issuance = [&] {
        std::lock_guard lock(*eco.state_mutex);
        return authority::issue_developer(store.ca, make_identity("Example Dev", "Example Ltd"),
                                          dev.public_key, evidence,
                                          config.developer_lifetime_days, *eco.submitter,
                                          eco.now.load());
    }();
    if (!issuance) {
        return forward_failure<ScenarioResult>(issuance);
    }
    const trust::Certificate& cert = issuance.value.certificate;
    auto level = cert.trust_level();
    eco.result.assertions["certified_trusted"] = level == trust::TrustLevel::Trusted;
    eco.note(store.spec.name, "issues Developer certificate at " +
                                  std::string(level ? trust::to_string(*level) : "?") +
                                  ", serial " + cert.body.serial.hex());

    trust::CertificateChain chain = {cert, store.ca.own_certificate, eco.root.own_certificate};

    // One certificate, two platform builds.
    for (const char* platform_tag : {"a", "b"}) {
        const std::string platform = platform_tag;
        eco.advance_days(config.days_between_installs);
        std::vector<package::FileInput> files = {
            {"bin/app", text_bytes("binary payload for platform " + platform)},
            {"assets/readme.txt", text_bytes("an honest application")},
            {"platform.txt", text_bytes("platform-" + platform)},
        };
        auto archive = make_package("com.example.app", 1, files, dev.secret, chain);
        if (!archive) {
            return forward_failure<ScenarioResult>(archive);
        }
        eco.note("developer", "signs com.example.app for platform " + platform);
        auto report = verifier::verify_package(archive.value, eco.verifier_config());
        auto decision = verifier::decide_install(report);
        std::string key = "install_" + platform;
        eco.result.assertions[key] =
            decision.kind == verifier::InstallDecision::Kind::Install;
        eco.result.details[key + "_decision"] = describe(decision);
        if (!report.overall_ok) {
            eco.result.details[key + "_failed_step"] = std::to_string(report.first_failed_step);
        }
        eco.note("mosim-" + platform, "verifies com.example.app: " + describe(decision));
    }

    check_replay(eco);
    return Out::success(std::move(eco.result));
}

Result<ScenarioResult> run_weakest_link(const EcosystemConfig& config) {
    using Out = Result<ScenarioResult>;
    if (config.icas.size() < 2) {
        return Out::failure(Err::ConfigInvalid, "the weakest-link run needs at least two stores");
    }
    Ecosystem eco;
    if (auto ready = setup(eco, config, "weakest-link"); !ready) {
        return Out::failure(ready.code == Err::IoError ? Err::IoError : Err::ConfigInvalid,
                            ready.message);
    }

    crypto::KeyPair attacker = crypto::keypair_from_seed(seed_of("weakest-link/attacker"));
    authority::PolicyEvidence weak_evidence{false, 10, 50, {}};
    eco.note("attacker", "shops for a Trusted certificate; evidence supports only " +
                             std::string(trust::to_string(authority::evaluate_policy(weak_evidence))));

    Store* lax = nullptr;
    std::optional<trust::Certificate> attacker_cert;
    for (Store& store : eco.stores) {
        if (store.spec.strict) {
            eco.note(store.spec.name, "declines: policy evaluates the evidence to Unknown");
            continue;
        }
        Result<authority::DeveloperIssuance> issued = [&] {
            std::lock_guard lock(*eco.state_mutex);
            return authority::issue_developer_at(
                store.ca, make_identity("Shady Dev", "Shady Ltd"), attacker.public_key,
                weak_evidence, trust::TrustLevel::Trusted, std::nullopt,
                config.developer_lifetime_days, *eco.submitter, eco.now.load());
        }();
        if (!issued) {
            return forward_failure<ScenarioResult>(issued);
        }
        lax = &store;
        attacker_cert = issued.value.certificate;
        eco.note(store.spec.name, "issues Trusted despite non-qualifying evidence, serial " +
                                      issued.value.certificate.body.serial.hex());
        break;
    }

    if (lax == nullptr) {
        eco.result.applicable = false;
        eco.result.details["status"] = "NotApplicable";
        eco.note("scenario", "every store is strict; no Trusted certificate was mis-issued");
        check_replay(eco);
        return Out::success(std::move(eco.result));
    }

    trust::CertificateChain chain = {*attacker_cert, lax->ca.own_certificate,
                                     eco.root.own_certificate};
    std::vector<package::FileInput> files = {
        {"bin/app", text_bytes("weaponized payload")},
        {"assets/strings.txt", text_bytes("innocuous-looking strings")},
    };
    auto archive = make_package("com.shady.app", 1, files, attacker.secret, chain);
    if (!archive) {
        return forward_failure<ScenarioResult>(archive);
    }
    eco.note("attacker", "signs com.shady.app with the mis-issued certificate");

    bool alert_raised = false;
    bool ica_revoked = false;
    if (config.monitor_enabled) {
        auto alerts = ctlog::monitor_scan(*eco.log, eco.monitor_context());
        for (const auto& alert : alerts) {
            if (alert.kind == ctlog::AlertKind::TrustedWithoutEvidence) {
                alert_raised = true;
                eco.note("monitor", "alert: " + alert.detail);
            }
        }
        if (alert_raised) {
            std::lock_guard lock(*eco.state_mutex);
            Fingerprint lax_fp = lax->ca.fingerprint();
            for (const auto& [serial, record] : eco.root.issued) {
                if (record.certificate.subject_key_fingerprint() == lax_fp &&
                    !eco.root.revoked.contains(serial)) {
                    auto revoked = authority::revoke(eco.root, serial,
                                                     authority::RevocationReason::CaMisissuance,
                                                     eco.now.load());
                    ica_revoked = revoked.ok();
                    break;
                }
            }
            if (ica_revoked) {
                eco.note("root-ca", "revokes the intermediate certificate of " + lax->spec.name);
            }
        }
    } else {
        eco.note("monitor", "disabled; the log is never scanned");
    }

    auto report = verifier::verify_package(archive.value, eco.verifier_config());
    auto decision = verifier::decide_install(report);
    eco.note("mosim", "verifies com.shady.app: " + describe(decision));
    eco.result.details["install_decision"] = describe(decision);
    if (!report.overall_ok) {
        eco.result.details["failed_step"] = std::to_string(report.first_failed_step);
        eco.result.details["failure_reason"] = to_string(report.failure_reason);
    }

    eco.result.assertions["alert_raised"] = alert_raised;
    eco.result.assertions["ica_revoked"] = ica_revoked;
    eco.result.assertions["install_denied"] =
        decision.kind == verifier::InstallDecision::Kind::Deny;
    check_replay(eco);
    return Out::success(std::move(eco.result));
}

Result<ScenarioResult> run_dormant_developer(const EcosystemConfig& config) {
    using Out = Result<ScenarioResult>;
    if (config.icas.size() < 2) {
        return Out::failure(Err::ConfigInvalid,
                            "the dormant-developer run needs a listing and a detecting store");
    }
    if (config.listing_store >= config.icas.size() ||
        config.detecting_store >= config.icas.size() ||
        config.listing_store == config.detecting_store) {
        return Out::failure(Err::ConfigInvalid, "listing/detecting store indices are invalid");
    }
    Ecosystem eco;
    if (auto ready = setup(eco, config, "dormant-developer"); !ready) {
        return Out::failure(ready.code == Err::IoError ? Err::IoError : Err::ConfigInvalid,
                            ready.message);
    }
    Store& home = eco.stores[config.listing_store];
    Store& watcher = eco.stores[config.detecting_store];

    crypto::KeyPair dev = crypto::keypair_from_seed(seed_of("dormant/developer"));
    Fingerprint dev_fp = trust::fingerprint(dev.public_key);
    authority::PolicyEvidence young{false, 0, 0, {}};

    Result<authority::DeveloperIssuance> first = [&] {
        std::lock_guard lock(*eco.state_mutex);
        return authority::issue_developer(home.ca, make_identity("Patient Dev", "Patient Ltd"),
                                          dev.public_key, young, config.developer_lifetime_days,
                                          *eco.submitter, eco.now.load());
    }();
    if (!first) {
        return forward_failure<ScenarioResult>(first);
    }
    eco.note(home.spec.name, "certifies the developer at Unknown, serial " +
                                 first.value.certificate.body.serial.hex());

    trust::CertificateChain chain1 = {first.value.certificate, home.ca.own_certificate,
                                      eco.root.own_certificate};
    std::vector<package::FileInput> benign_files = {
        {"bin/app", text_bytes("benign application v1")},
        {"assets/readme.txt", text_bytes("nothing to see here")},
    };
    auto v1 = make_package("com.dormant.app", 1, benign_files, dev.secret, chain1);
    if (!v1) {
        return forward_failure<ScenarioResult>(v1);
    }
    Hash32 v1_digest = package_digest(v1.value);
    home.listed.insert(v1_digest);
    watcher.listed.insert(v1_digest);
    eco.note("developer", "releases benign com.dormant.app v1; both stores list it");

    // The malicious artifact: v1 itself when detection fires early, otherwise
    // the post-promotion v2 update.
    package::PackageArchive malicious;
    Hash32 malicious_digest{};
    authority::PolicyEvidence evidence_now = young;

    if (config.detect_before_promotion) {
        eco.advance_days(30);
        malicious = v1.value;
        malicious_digest = v1_digest;
        eco.result.details["promotion"] = "never reached; detection fired first";
    } else {
        // Track-record schedule: one day and one install past the thresholds.
        eco.advance_days(731);
        evidence_now = authority::PolicyEvidence{true, 731, 10'001, {}};
        eco.note("developer", "reaches 731 days of track record and 10001 installs, identity verified");
        Result<authority::ReevaluationOutcome> promotion = [&] {
            std::lock_guard lock(*eco.state_mutex);
            return authority::reevaluate(home.ca, dev_fp, evidence_now, *eco.submitter,
                                         eco.now.load());
        }();
        if (!promotion) {
            return forward_failure<ScenarioResult>(promotion);
        }
        eco.result.details["promotion"] =
            promotion.value.reissued ? trust::to_string(promotion.value.level) : "unchanged";
        if (!promotion.value.reissued || !promotion.value.new_certificate) {
            return Out::failure(Err::ConfigInvalid, "promotion to Trusted did not happen");
        }
        eco.note(home.spec.name, "revokes the Unknown certificate and reissues at Trusted");

        trust::CertificateChain chain2 = {*promotion.value.new_certificate,
                                          home.ca.own_certificate, eco.root.own_certificate};
        std::vector<package::FileInput> malicious_files = {
            {"bin/app", text_bytes("application v2 with a hidden exfiltration routine")},
            {"assets/readme.txt", text_bytes("nothing to see here")},
        };
        auto v2 = make_package("com.dormant.app", 2, malicious_files, dev.secret, chain2);
        if (!v2) {
            return forward_failure<ScenarioResult>(v2);
        }
        malicious = std::move(v2.value);
        malicious_digest = package_digest(malicious);
        home.listed.insert(malicious_digest);
        eco.note(home.spec.name, "lists v2 without noticing the malware");
    }

    threatx::ThreatEvent event;
    event.event_id = "evt-0001";
    event.developer_fingerprint = dev_fp;
    event.package_digest = malicious_digest;
    event.severity = trust::Severity::Critical;
    event.indicators = {"proc:hidden-exfiltration", "url:collector.example"};
    event.reported_by = watcher.spec.name;
    event.timestamp = eco.now.load();

    bool shared = false;
    bool delisted = false;
    bool revoked = false;

    if (config.exchange_enabled) {
        eco.note(watcher.spec.name, "screening detects malware and publishes " + event.event_id);
        auto ack = eco.publish_fn(event);
        if (!ack) {
            return forward_failure<ScenarioResult>(ack);
        }

        for (Store& store : eco.stores) {
            auto pulled = eco.pull_fn(store.cursor);
            if (!pulled) {
                return forward_failure<ScenarioResult>(pulled);
            }
            store.cursor = pulled.value.second;
            for (const threatx::ThreatEvent& incoming : pulled.value.first) {
                auto actions = threatx::ingest(store.ingest, eco.actor_view(store), incoming);
                for (const threatx::Action& action : actions) {
                    if (action.kind == threatx::ActionKind::DelistPackage) {
                        store.listed.erase(action.package_digest);
                        eco.note(store.spec.name, "delists the flagged package");
                    } else {
                        authority::PolicyEvidence with_threat = evidence_now;
                        with_threat.open_threats.push_back(
                            {incoming.severity, incoming.event_id});
                        Result<authority::ReevaluationOutcome> reeval = [&] {
                            std::lock_guard lock(*eco.state_mutex);
                            return authority::reevaluate(store.ca, action.developer, with_threat,
                                                         *eco.submitter, eco.now.load());
                        }();
                        if (reeval && reeval.value.reissued) {
                            eco.note(store.spec.name,
                                     "revokes the developer certificate and reissues at " +
                                         std::string(trust::to_string(reeval.value.level)));
                        }
                    }
                }
            }
        }

        // Shared means every subscriber's cursor moved past the event.
        shared = true;
        for (const Store& store : eco.stores) {
            shared &= store.cursor >= ack.value;
        }

        delisted = !home.listed.contains(malicious_digest);
        // Revoked means: the certificate that signed the malicious package is
        // revoked and the developer's live certificate sits at Critical.
        for (const auto& [serial, record] : home.ca.issued) {
            if (record.certificate.subject_key_fingerprint() != dev_fp) {
                continue;
            }
            if (!home.ca.revoked.contains(serial) &&
                record.certificate.trust_level() == trust::TrustLevel::Critical) {
                revoked = true;
            }
        }
        auto meta = package::extract_metadata(malicious);
        if (revoked && meta) {
            const Serial signing_serial = meta.value.signature_block.chain.front().body.serial;
            revoked = home.ca.revoked.contains(signing_serial);
        }
    } else {
        eco.note(watcher.spec.name,
                 "screening detects malware but no exchange is configured; nothing propagates");
    }

    auto report = verifier::verify_package(malicious, eco.verifier_config());
    auto decision = verifier::decide_install(report);
    eco.note("mosim", "side-load attempt verifies the flagged package: " + describe(decision));
    eco.result.details["sideload_decision"] = describe(decision);
    if (!report.overall_ok) {
        eco.result.details["sideload_failed_step"] = std::to_string(report.first_failed_step);
        eco.result.details["sideload_reason"] = to_string(report.failure_reason);
    }

    eco.result.assertions["shared"] = shared;
    eco.result.assertions["delisted"] = delisted;
    eco.result.assertions["revoked"] = revoked;
    eco.result.assertions["sideload_denied"] =
        decision.kind == verifier::InstallDecision::Kind::Deny;
    check_replay(eco);
    return Out::success(std::move(eco.result));
}

Result<ScenarioResult> run_scenario(const std::string& name, const EcosystemConfig& config) {
    if (name == "honest") {
        return run_honest_flow(config);
    }
    if (name == "weakest-link") {
        return run_weakest_link(config);
    }
    if (name == "dormant-developer") {
        return run_dormant_developer(config);
    }
    return Result<ScenarioResult>::failure(Err::ConfigInvalid, "unknown scenario: " + name);
}

bool ScenarioResult::all_passed() const {
    for (const auto& [name, passed] : assertions) {
        if (!passed) {
            return false;
        }
    }
    return true;
}

std::string ScenarioResult::to_json() const {
    nlohmann::json timeline_json = nlohmann::json::array();
    for (const auto& event : timeline) {
        timeline_json.push_back({{"t", event.at}, {"actor", event.actor}, {"action", event.action}});
    }
    nlohmann::json j = {
        {"scenario", scenario},
        {"applicable", applicable},
        {"assertions", assertions},
        {"details", details},
        {"timeline", timeline_json},
        {"all_passed", all_passed()},
    };
    return j.dump(2);
}

std::string ScenarioResult::to_text() const {
    std::ostringstream out;
    out << "scenario: " << scenario << (applicable ? "" : " (not applicable)") << '\n';
    for (const auto& event : timeline) {
        out << "  [t+" << event.at << "] " << event.actor << ": " << event.action << '\n';
    }
    out << "assertions:\n";
    for (const auto& [name, passed] : assertions) {
        out << "  " << name << ": " << (passed ? "pass" : "FAIL") << '\n';
    }
    return out.str();
}

}  // namespace dcm::sim
