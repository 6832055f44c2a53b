// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/threatx.hpp"

#include <json.hpp>

#include "dcm/encoding.hpp"

namespace dcm::threatx {

Bytes serialize_event(const ThreatEvent& event) {
    enc::Encoder e;
    e.str(event.event_id);
    e.fixed(event.developer_fingerprint.bytes);
    e.u8(event.package_digest.has_value() ? 1 : 0);
    if (event.package_digest) {
        e.fixed(*event.package_digest);
    }
    e.u8(static_cast<uint8_t>(event.severity));
    e.u32(static_cast<uint32_t>(event.indicators.size()));
    for (const auto& indicator : event.indicators) {
        e.str(indicator);
    }
    e.str(event.reported_by);
    e.i64(event.timestamp);
    return e.take();
}

Result<ThreatEvent> decode_event(ByteSpan data) {
    enc::Decoder d(data);
    ThreatEvent event;
    event.event_id = d.str();
    event.developer_fingerprint.bytes = d.fixed<32>();
    if (d.u8() != 0) {
        event.package_digest = d.fixed<32>();
    }
    event.severity = static_cast<trust::Severity>(d.u8());
    uint32_t count = d.u32();
    for (uint32_t i = 0; i < count && !d.failed(); ++i) {
        event.indicators.push_back(d.str());
    }
    event.reported_by = d.str();
    event.timestamp = d.i64();
    if (!d.done() || static_cast<uint8_t>(event.severity) > 1 || event.event_id.empty()) {
        return Result<ThreatEvent>::failure(Err::MalformedInput, "malformed threat event");
    }
    return Result<ThreatEvent>::success(std::move(event));
}

std::string event_to_json(const ThreatEvent& event) {
    nlohmann::json j = {
        {"event_id", event.event_id},
        {"developer_fingerprint", event.developer_fingerprint.hex()},
        {"severity", trust::to_string(event.severity)},
        {"indicators", event.indicators},
        {"reported_by", event.reported_by},
        {"timestamp", event.timestamp},
    };
    if (event.package_digest) {
        j["package_digest"] = to_hex(*event.package_digest);
    }
    return j.dump();
}

Result<Exchange> Exchange::open(const std::filesystem::path& path) {
    Exchange exchange;
    if (std::filesystem::exists(path)) {
        auto records = Journal::read_all(path);
        if (!records) {
            return forward_failure<Exchange>(records);
        }
        for (const auto& raw : records.value) {
            auto event = decode_event(raw);
            if (!event) {
                return forward_failure<Exchange>(event);
            }
            exchange.event_ids_.insert(event.value.event_id);
            exchange.events_.push_back(std::move(event.value));
        }
    }
    auto journal = Journal::open(path);
    if (!journal) {
        return forward_failure<Exchange>(journal);
    }
    exchange.journal_ = std::make_shared<Journal>(std::move(journal.value));
    return Result<Exchange>::success(std::move(exchange));
}

Result<uint64_t> Exchange::publish(const ThreatEvent& event) {
    if (event.event_id.empty()) {
        return Result<uint64_t>::failure(Err::MalformedInput, "event_id must be non-empty");
    }
    if (event_ids_.contains(event.event_id)) {
        return Result<uint64_t>::failure(Err::DuplicateEventId,
                                         "event already published: " + event.event_id);
    }
    if (journal_ && journal_->is_open()) {
        if (auto r = journal_->append(serialize_event(event)); !r) {
            return forward_failure<uint64_t>(r);
        }
    }
    event_ids_.insert(event.event_id);
    events_.push_back(event);
    return Result<uint64_t>::success(events_.size());
}

Result<std::pair<std::vector<ThreatEvent>, uint64_t>> Exchange::pull_since(uint64_t cursor) const {
    using Out = Result<std::pair<std::vector<ThreatEvent>, uint64_t>>;
    if (cursor > events_.size()) {
        return Out::failure(Err::BadCursor, "cursor beyond journal length");
    }
    std::vector<ThreatEvent> out(events_.begin() + static_cast<ptrdiff_t>(cursor), events_.end());
    return Out::success({std::move(out), events_.size()});
}

std::vector<Action> ingest(IngestState& state, const ActorView& actor, const ThreatEvent& event) {
    std::vector<Action> actions;
    if (!state.seen_event_ids.insert(event.event_id).second) {
        return actions;
    }
    if (event.package_digest && actor.listed_packages.contains(*event.package_digest)) {
        Action action;
        action.kind = ActionKind::DelistPackage;
        action.package_digest = *event.package_digest;
        action.developer = event.developer_fingerprint;
        actions.push_back(action);
    }
    if (actor.issued_developers.contains(event.developer_fingerprint)) {
        Action action;
        action.kind = ActionKind::TriggerReevaluation;
        action.developer = event.developer_fingerprint;
        actions.push_back(action);
    }
    return actions;
}

}  // namespace dcm::threatx
