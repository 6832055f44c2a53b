// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dcm/sim.hpp"
#include "helpers.hpp"

using namespace dcm;

namespace {

void check_assertions(const sim::ScenarioResult& result, std::initializer_list<const char*> names) {
    for (const char* name : names) {
        CAPTURE(name);
        REQUIRE(result.assertions.contains(name));
        CHECK(result.assertions.at(name));
    }
}

}  // namespace

TEST_CASE("honest flow: one certificate installs on both platforms") {
    auto result = sim::run_honest_flow(sim::honest_flow_config());
    REQUIRE(result.ok());
    CHECK(result.value.applicable);
    check_assertions(result.value,
                     {"certified_trusted", "install_a", "install_b", "replay_consistent"});
    CHECK(result.value.all_passed());
    CHECK_FALSE(result.value.timeline.empty());
}

TEST_CASE("honest flow: certificate expiring between installs fails step 3") {
    auto cfg = sim::honest_flow_config();
    cfg.developer_lifetime_days = 100;
    cfg.days_between_installs = 80;  // second install happens at day 160
    auto result = sim::run_honest_flow(cfg);
    REQUIRE(result.ok());
    CHECK(result.value.assertions.at("install_a"));
    CHECK_FALSE(result.value.assertions.at("install_b"));
    CHECK(result.value.details.at("install_b_failed_step") == "3");
}

TEST_CASE("honest flow: responder down with fail-closed fails step 4") {
    auto cfg = sim::honest_flow_config();
    cfg.responder_up = false;
    cfg.offline_policy = verifier::OfflinePolicy::FailClosed;
    auto result = sim::run_honest_flow(cfg);
    REQUIRE(result.ok());
    CHECK_FALSE(result.value.assertions.at("install_a"));
    CHECK(result.value.details.at("install_a_failed_step") == "4");

    SUBCASE("fail-open shrugs the outage off") {
        cfg.offline_policy = verifier::OfflinePolicy::FailOpen;
        auto open = sim::run_honest_flow(cfg);
        REQUIRE(open.ok());
        CHECK(open.value.assertions.at("install_a"));
    }
}

TEST_CASE("honest flow is deterministic") {
    auto a = sim::run_honest_flow(sim::honest_flow_config());
    auto b = sim::run_honest_flow(sim::honest_flow_config());
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.value.assertions == b.value.assertions);
    CHECK(a.value.details == b.value.details);
    REQUIRE(a.value.timeline.size() == b.value.timeline.size());
    for (size_t i = 0; i < a.value.timeline.size(); ++i) {
        CHECK(a.value.timeline[i].at == b.value.timeline[i].at);
        CHECK(a.value.timeline[i].actor == b.value.timeline[i].actor);
        CHECK(a.value.timeline[i].action == b.value.timeline[i].action);
    }
}

TEST_CASE("weakest link: mis-issuance is detected, the lax CA revoked, the install denied") {
    auto result = sim::run_weakest_link(sim::weakest_link_config());
    REQUIRE(result.ok());
    CHECK(result.value.applicable);
    check_assertions(result.value,
                     {"alert_raised", "ica_revoked", "install_denied", "replay_consistent"});
    CHECK(result.value.details.at("failed_step") == "4");
    CHECK(result.value.details.at("failure_reason") == std::string("Revoked"));
}

TEST_CASE("weakest link: all-strict configuration is not applicable") {
    auto cfg = sim::weakest_link_config();
    for (auto& ica : cfg.icas) {
        ica.strict = true;
    }
    auto result = sim::run_weakest_link(cfg);
    REQUIRE(result.ok());
    CHECK_FALSE(result.value.applicable);
    CHECK(result.value.details.at("status") == "NotApplicable");
}

TEST_CASE("weakest link: with the monitor disabled the attack lands") {
    auto cfg = sim::weakest_link_config();
    cfg.monitor_enabled = false;
    auto result = sim::run_weakest_link(cfg);
    REQUIRE(result.ok());
    CHECK(result.value.applicable);
    CHECK_FALSE(result.value.assertions.at("alert_raised"));
    CHECK_FALSE(result.value.assertions.at("ica_revoked"));
    CHECK_FALSE(result.value.assertions.at("install_denied"));
    CHECK(result.value.details.at("install_decision").find("Install") != std::string::npos);
}

TEST_CASE("weakest link rejects configs without two stores") {
    auto cfg = sim::weakest_link_config();
    cfg.icas.resize(1);
    CHECK(sim::run_weakest_link(cfg).code == Err::ConfigInvalid);
}

TEST_CASE("dormant developer: share, delist, revoke, and deny the side-load") {
    auto result = sim::run_dormant_developer(sim::dormant_developer_config());
    REQUIRE(result.ok());
    check_assertions(result.value,
                     {"shared", "delisted", "revoked", "sideload_denied", "replay_consistent"});
    CHECK(result.value.details.at("promotion") == std::string("Trusted"));
    CHECK(result.value.details.at("sideload_failed_step") == "4");
}

TEST_CASE("dormant developer: without the exchange nothing propagates") {
    auto cfg = sim::dormant_developer_config();
    cfg.exchange_enabled = false;
    auto result = sim::run_dormant_developer(cfg);
    REQUIRE(result.ok());
    CHECK_FALSE(result.value.assertions.at("shared"));
    CHECK_FALSE(result.value.assertions.at("delisted"));
    CHECK_FALSE(result.value.assertions.at("revoked"));
    CHECK_FALSE(result.value.assertions.at("sideload_denied"));
    CHECK(result.value.details.at("sideload_decision").find("Install") != std::string::npos);
}

TEST_CASE("dormant developer: detection before promotion reissues Critical from Unknown") {
    auto cfg = sim::dormant_developer_config();
    cfg.detect_before_promotion = true;
    auto result = sim::run_dormant_developer(cfg);
    REQUIRE(result.ok());
    check_assertions(result.value, {"shared", "delisted", "revoked", "sideload_denied"});
    CHECK(result.value.details.at("promotion").find("never reached") != std::string::npos);
}

TEST_CASE("scenario results serialize to JSON and text") {
    auto result = sim::run_weakest_link(sim::weakest_link_config());
    REQUIRE(result.ok());
    auto json = result.value.to_json();
    CHECK(json.find("\"scenario\"") != std::string::npos);
    CHECK(json.find("alert_raised") != std::string::npos);
    CHECK(result.value.to_text().find("assertions:") != std::string::npos);
}

TEST_CASE("run_scenario dispatches by name") {
    CHECK(sim::run_scenario("honest", sim::honest_flow_config()).ok());
    CHECK(sim::run_scenario("nope", sim::honest_flow_config()).code == Err::ConfigInvalid);
}
