// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Threat-intelligence exchange: an append-only journal of indicator events
// that stores and CAs pull with their own cursors. Ingesting an event yields
// the actions the receiving actor must take (delist a package, reevaluate a
// developer).

#pragma once

#include <set>

#include "dcm/common.hpp"
#include "dcm/journal.hpp"
#include "dcm/trust.hpp"

namespace dcm::threatx {

struct ThreatEvent {
    std::string event_id;  // unique across the exchange
    Fingerprint developer_fingerprint;
    std::optional<Hash32> package_digest;
    trust::Severity severity = trust::Severity::Warning;
    std::vector<std::string> indicators;
    std::string reported_by;
    Timestamp timestamp = 0;

    bool operator==(const ThreatEvent&) const = default;
};

Bytes serialize_event(const ThreatEvent& event);
Result<ThreatEvent> decode_event(ByteSpan data);
std::string event_to_json(const ThreatEvent& event);

class Exchange {
  public:
    Exchange() = default;

    /// Persistent exchange; replays the journal at `path`.
    static Result<Exchange> open(const std::filesystem::path& path);

    /// Appends the event. The ack is the journal length after the append,
    /// which is also the cursor positioned just past this event.
    Result<uint64_t> publish(const ThreatEvent& event);

    /// Everything after `cursor`, in publication order, plus the new cursor.
    [[nodiscard]] Result<std::pair<std::vector<ThreatEvent>, uint64_t>> pull_since(
        uint64_t cursor) const;

    [[nodiscard]] uint64_t size() const { return events_.size(); }
    [[nodiscard]] const std::vector<ThreatEvent>& events() const { return events_; }

  private:
    std::vector<ThreatEvent> events_;
    std::set<std::string> event_ids_;
    std::shared_ptr<Journal> journal_;
};

/// The slice of an actor's state that event ingestion looks at.
struct ActorView {
    std::string actor_id;
    std::set<Hash32> listed_packages;        // store catalogue
    std::set<Fingerprint> issued_developers;  // developers this CA has certified
};

enum class ActionKind : uint8_t { DelistPackage = 0, TriggerReevaluation = 1 };

struct Action {
    ActionKind kind = ActionKind::DelistPackage;
    Hash32 package_digest{};   // DelistPackage
    Fingerprint developer;     // TriggerReevaluation
};

/// Per-actor ingestion memory; makes ingest idempotent per event id.
struct IngestState {
    std::set<std::string> seen_event_ids;
};

/// DelistPackage when the event's digest is in the actor's catalogue;
/// TriggerReevaluation when the actor has certified the developer. A repeated
/// event id yields nothing.
std::vector<Action> ingest(IngestState& state, const ActorView& actor, const ThreatEvent& event);

}  // namespace dcm::threatx
