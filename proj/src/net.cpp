// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/net.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dcm/encoding.hpp"

namespace dcm::net {

namespace {

constexpr const char* kBinaryType = "application/octet-stream";

std::string body_string(ByteSpan data) {
    return std::string(reinterpret_cast<const char*>(data.data()), data.size());
}

ByteSpan body_span(const std::string& body) {
    return ByteSpan(reinterpret_cast<const uint8_t*>(body.data()), body.size());
}

}  // namespace

class HttpServer {
  public:
    httplib::Server server;
    std::thread thread;

    ~HttpServer() { stop(); }

    int start(const std::string& host, int port) {
        int bound = port;
        if (port == 0) {
            bound = server.bind_to_any_port(host);
            if (bound < 0) {
                return -1;
            }
        } else if (!server.bind_to_port(host, port)) {
            return -1;
        }
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
        return bound;
    }

    void stop() {
        if (thread.joinable()) {
            server.stop();
            thread.join();
        }
    }
};

void ServerHandle::stop() {
    if (server) {
        server->stop();
    }
}

namespace {

ServerHandle finish(std::shared_ptr<HttpServer> server, const std::string& host, int port) {
    int bound = server->start(host, port);
    if (bound < 0) {
        return {};
    }
    return {std::move(server), bound};
}

}  // namespace

ServerHandle serve_ocsp(std::vector<OcspRegistry> registries, crypto::KeyPair responder_keys,
                        std::function<Timestamp()> clock, const std::string& host, int port) {
    auto server = std::make_shared<HttpServer>();
    auto regs = std::make_shared<std::vector<OcspRegistry>>(std::move(registries));

    auto answer = [regs, responder_keys, clock](const revocation::StatusRequest& request) {
        Timestamp now = clock();
        for (const auto& registry : *regs) {
            revocation::RegistryView view = registry.view();
            if (view.issuer == request.issuer_fingerprint) {
                return revocation::serve_status(request, view, responder_keys.secret, now);
            }
        }
        revocation::StatusResponse response;
        response.status = revocation::CertStatus::Unknown;
        response.produced_at = now;
        response.responder_signature =
            crypto::sign(revocation::response_signing_payload(response), responder_keys.secret);
        return response;
    };

    server->server.Post("/status", [answer](const httplib::Request& req, httplib::Response& res) {
        auto request = revocation::decode_request(body_span(req.body));
        if (!request) {
            res.status = 400;
            res.set_content(request.message, "text/plain");
            return;
        }
        auto response = answer(request.value);
        res.set_content(body_string(revocation::serialize_response(response)), kBinaryType);
    });

    server->server.Get("/status.json", [answer](const httplib::Request& req, httplib::Response& res) {
        auto issuer = Fingerprint::from_hex(req.get_param_value("issuer"));
        auto serial = Serial::from_hex(req.get_param_value("serial"));
        if (!issuer || !serial) {
            res.status = 400;
            res.set_content("issuer and serial must be hex parameters", "text/plain");
            return;
        }
        auto response = answer(revocation::StatusRequest{*issuer, *serial});
        nlohmann::json j = {
            {"status", revocation::to_string(response.status)},
            {"produced_at", response.produced_at},
        };
        if (response.revoked_at) {
            j["revoked_at"] = *response.revoked_at;
        }
        if (response.reason) {
            j["reason"] = authority::to_string(*response.reason);
        }
        res.set_content(j.dump(2), "application/json");
    });

    server->server.Get("/crl", [regs, clock](const httplib::Request& req, httplib::Response& res) {
        std::optional<Fingerprint> issuer;
        if (req.has_param("issuer")) {
            issuer = Fingerprint::from_hex(req.get_param_value("issuer"));
            if (!issuer) {
                res.status = 400;
                res.set_content("bad issuer parameter", "text/plain");
                return;
            }
        }
        for (const auto& registry : *regs) {
            revocation::RegistryView view = registry.view();
            if (!issuer || view.issuer == *issuer) {
                auto crl = revocation::build_crl(view, clock(), registry.issuer_key);
                res.set_content(body_string(revocation::serialize_crl(crl)), kBinaryType);
                return;
            }
        }
        res.status = 404;
        res.set_content("no registry for that issuer", "text/plain");
    });

    return finish(std::move(server), host, port);
}

ServerHandle serve_ctlog(std::shared_ptr<ctlog::Log> log, std::function<Timestamp()> clock,
                         std::function<ctlog::MonitorContext()> monitor_context,
                         const std::string& host, int port) {
    auto server = std::make_shared<HttpServer>();
    auto mutex = std::make_shared<std::mutex>();

    server->server.Post("/submit", [log, mutex, clock](const httplib::Request& req,
                                                       httplib::Response& res) {
        auto cert = trust::decode_certificate(body_span(req.body));
        if (!cert) {
            res.status = 400;
            res.set_content(cert.message, "text/plain");
            return;
        }
        std::lock_guard lock(*mutex);
        auto sct = log->append(cert.value, clock());
        if (!sct) {
            res.status = 500;
            res.set_content(sct.message, "text/plain");
            return;
        }
        res.set_content(body_string(ctlog::serialize_sct(sct.value)), kBinaryType);
    });

    server->server.Get("/root", [log, mutex](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(*mutex);
        uint64_t size = log->size();
        if (req.has_param("size")) {
            size = std::strtoull(req.get_param_value("size").c_str(), nullptr, 10);
        }
        auto root = log->root_hash(size);
        if (!root) {
            res.status = 400;
            res.set_content(root.message, "text/plain");
            return;
        }
        enc::Encoder e;
        e.u64(size);
        e.fixed(root.value);
        res.set_content(body_string(e.take()), kBinaryType);
    });

    server->server.Get("/inclusion", [log, mutex](const httplib::Request& req, httplib::Response& res) {
        uint64_t index = std::strtoull(req.get_param_value("index").c_str(), nullptr, 10);
        uint64_t size = std::strtoull(req.get_param_value("size").c_str(), nullptr, 10);
        std::lock_guard lock(*mutex);
        auto proof = log->inclusion_proof(index, size);
        if (!proof) {
            res.status = 400;
            res.set_content(proof.message, "text/plain");
            return;
        }
        enc::Encoder e;
        e.u64(proof.value.index);
        e.u64(proof.value.tree_size);
        e.u32(static_cast<uint32_t>(proof.value.path.size()));
        for (const auto& hash : proof.value.path) {
            e.fixed(hash);
        }
        res.set_content(body_string(e.take()), kBinaryType);
    });

    server->server.Get("/consistency", [log, mutex](const httplib::Request& req,
                                                    httplib::Response& res) {
        uint64_t old_size = std::strtoull(req.get_param_value("old").c_str(), nullptr, 10);
        uint64_t new_size = std::strtoull(req.get_param_value("new").c_str(), nullptr, 10);
        std::lock_guard lock(*mutex);
        auto proof = log->consistency_proof(old_size, new_size);
        if (!proof) {
            res.status = 400;
            res.set_content(proof.message, "text/plain");
            return;
        }
        enc::Encoder e;
        e.u64(proof.value.old_size);
        e.u64(proof.value.new_size);
        e.u32(static_cast<uint32_t>(proof.value.path.size()));
        for (const auto& hash : proof.value.path) {
            e.fixed(hash);
        }
        res.set_content(body_string(e.take()), kBinaryType);
    });

    server->server.Get("/alerts", [log, mutex, monitor_context](const httplib::Request&,
                                                                httplib::Response& res) {
        if (!monitor_context) {
            res.status = 404;
            res.set_content("no monitor context configured", "text/plain");
            return;
        }
        ctlog::MonitorContext ctx = monitor_context();
        std::lock_guard lock(*mutex);
        auto alerts = ctlog::monitor_scan(*log, ctx);
        nlohmann::json j = nlohmann::json::array();
        for (const auto& alert : alerts) {
            j.push_back({{"kind", ctlog::to_string(alert.kind)},
                         {"entry_index", alert.entry_index},
                         {"detail", alert.detail}});
        }
        res.set_content(j.dump(2), "application/json");
    });

    return finish(std::move(server), host, port);
}

ServerHandle serve_threatx(std::shared_ptr<threatx::Exchange> exchange, const std::string& host,
                           int port) {
    auto server = std::make_shared<HttpServer>();
    auto mutex = std::make_shared<std::mutex>();

    server->server.Post("/events", [exchange, mutex](const httplib::Request& req,
                                                     httplib::Response& res) {
        auto event = threatx::decode_event(body_span(req.body));
        if (!event) {
            res.status = 400;
            res.set_content(event.message, "text/plain");
            return;
        }
        std::lock_guard lock(*mutex);
        auto ack = exchange->publish(event.value);
        if (!ack) {
            res.status = ack.code == Err::DuplicateEventId ? 409 : 400;
            res.set_content(ack.message, "text/plain");
            return;
        }
        enc::Encoder e;
        e.u64(ack.value);
        res.set_content(body_string(e.take()), kBinaryType);
    });

    auto pull = [exchange, mutex](const httplib::Request& req)
        -> Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>> {
        uint64_t cursor = 0;
        if (req.has_param("cursor")) {
            cursor = std::strtoull(req.get_param_value("cursor").c_str(), nullptr, 10);
        }
        std::lock_guard lock(*mutex);
        return exchange->pull_since(cursor);
    };

    server->server.Get("/events", [pull](const httplib::Request& req, httplib::Response& res) {
        auto events = pull(req);
        if (!events) {
            res.status = 400;
            res.set_content(events.message, "text/plain");
            return;
        }
        enc::Encoder e;
        e.u64(events.value.second);
        e.u32(static_cast<uint32_t>(events.value.first.size()));
        for (const auto& event : events.value.first) {
            e.bytes(threatx::serialize_event(event));
        }
        res.set_content(body_string(e.take()), kBinaryType);
    });

    server->server.Get("/events.json", [pull](const httplib::Request& req, httplib::Response& res) {
        auto events = pull(req);
        if (!events) {
            res.status = 400;
            res.set_content(events.message, "text/plain");
            return;
        }
        nlohmann::json j = nlohmann::json::array();
        for (const auto& event : events.value.first) {
            j.push_back(nlohmann::json::parse(threatx::event_to_json(event)));
        }
        nlohmann::json out = {{"cursor", events.value.second}, {"events", j}};
        res.set_content(out.dump(2), "application/json");
    });

    return finish(std::move(server), host, port);
}

Result<revocation::StatusResponse> HttpStatusSource::fetch(const revocation::StatusRequest& request) {
    httplib::Client client(host_, port_);
    auto res = client.Post("/status", body_string(revocation::serialize_request(request)),
                           kBinaryType);
    if (!res) {
        return Result<revocation::StatusResponse>::failure(Err::Unreachable,
                                                           "status endpoint unreachable");
    }
    if (res->status != 200) {
        return Result<revocation::StatusResponse>::failure(Err::Unreachable,
                                                           "status endpoint error: " + res->body);
    }
    return revocation::decode_response(body_span(res->body));
}

Result<ctlog::SignedCertificateTimestamp> HttpCtSubmitter::submit(const trust::Certificate& cert) {
    httplib::Client client(host_, port_);
    auto res = client.Post("/submit", body_string(trust::serialize_certificate(cert)), kBinaryType);
    if (!res || res->status != 200) {
        return Result<ctlog::SignedCertificateTimestamp>::failure(Err::CtLogUnreachable,
                                                                  "transparency log unreachable");
    }
    return ctlog::decode_sct(body_span(res->body));
}

Result<uint64_t> HttpExchangeClient::publish(const threatx::ThreatEvent& event) const {
    httplib::Client client(host, port);
    auto res = client.Post("/events", body_string(threatx::serialize_event(event)), kBinaryType);
    if (!res) {
        return Result<uint64_t>::failure(Err::Unreachable, "exchange unreachable");
    }
    if (res->status == 409) {
        return Result<uint64_t>::failure(Err::DuplicateEventId, res->body);
    }
    if (res->status != 200) {
        return Result<uint64_t>::failure(Err::MalformedInput, res->body);
    }
    enc::Decoder d(body_span(res->body));
    uint64_t ack = d.u64();
    if (!d.done()) {
        return Result<uint64_t>::failure(Err::MalformedInput, "malformed publish ack");
    }
    return Result<uint64_t>::success(ack);
}

Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>> HttpExchangeClient::pull_since(
    uint64_t cursor) const {
    using Out = Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>>;
    httplib::Client client(host, port);
    auto res = client.Get("/events?cursor=" + std::to_string(cursor));
    if (!res) {
        return Out::failure(Err::Unreachable, "exchange unreachable");
    }
    if (res->status != 200) {
        return Out::failure(Err::BadCursor, res->body);
    }
    enc::Decoder d(body_span(res->body));
    uint64_t new_cursor = d.u64();
    uint32_t count = d.u32();
    std::vector<threatx::ThreatEvent> events;
    for (uint32_t i = 0; i < count && !d.failed(); ++i) {
        auto event = threatx::decode_event(d.bytes());
        if (!event) {
            return forward_failure<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>>(event);
        }
        events.push_back(std::move(event.value));
    }
    if (!d.done()) {
        return Out::failure(Err::MalformedInput, "malformed event list");
    }
    return Out::success({std::move(events), new_cursor});
}

Result<Bytes> http_get_binary(const std::string& host, int port, const std::string& path) {
    httplib::Client client(host, port);
    auto res = client.Get(path);
    if (!res) {
        return Result<Bytes>::failure(Err::Unreachable, "endpoint unreachable");
    }
    if (res->status != 200) {
        return Result<Bytes>::failure(Err::MalformedInput, res->body);
    }
    const auto& body = res->body;
    return Result<Bytes>::success(Bytes(body.begin(), body.end()));
}

Result<revocation::Crl> fetch_crl(const std::string& host, int port,
                                  const std::optional<Fingerprint>& issuer) {
    std::string path = "/crl";
    if (issuer) {
        path += "?issuer=" + issuer->hex();
    }
    auto body = http_get_binary(host, port, path);
    if (!body) {
        return forward_failure<revocation::Crl>(body);
    }
    return revocation::decode_crl(body.value);
}

}  // namespace dcm::net
