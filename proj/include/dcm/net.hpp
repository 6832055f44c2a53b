// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// HTTP transports for the three services. Bodies are the canonical binary
// encodings; *.json endpoints mirror them for debugging. Each server runs
// its accept loop on a background thread and serves concurrent requests over
// snapshots guarded by the providers it was constructed with.

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "dcm/common.hpp"
#include "dcm/ctlog.hpp"
#include "dcm/revocation.hpp"
#include "dcm/threatx.hpp"

namespace dcm::net {

/// One issuer registry behind the status responder: a snapshot provider plus
/// the key that signs that issuer's CRL.
struct OcspRegistry {
    std::function<revocation::RegistryView()> view;
    crypto::SigningKey issuer_key;
};

class HttpServer;

struct ServerHandle {
    std::shared_ptr<HttpServer> server;
    int port = 0;

    void stop();
};

/// POST /status (binary request/response), GET /status.json?issuer=&serial=,
/// GET /crl?issuer= (binary; first registry when omitted).
ServerHandle serve_ocsp(std::vector<OcspRegistry> registries, crypto::KeyPair responder_keys,
                        std::function<Timestamp()> clock, const std::string& host, int port);

/// POST /submit (certificate in, SCT out); GET /root?size=; GET
/// /inclusion?index=&size=; GET /consistency?old=&new=; GET /alerts (JSON,
/// needs a monitor context provider).
ServerHandle serve_ctlog(std::shared_ptr<ctlog::Log> log, std::function<Timestamp()> clock,
                         std::function<ctlog::MonitorContext()> monitor_context,
                         const std::string& host, int port);

/// POST /events (event in, ack cursor out); GET /events?cursor=N (binary
/// list); GET /events.json?cursor=N.
ServerHandle serve_threatx(std::shared_ptr<threatx::Exchange> exchange, const std::string& host,
                           int port);

class HttpStatusSource : public revocation::StatusSource {
  public:
    HttpStatusSource(std::string host, int port) : host_(std::move(host)), port_(port) {}
    Result<revocation::StatusResponse> fetch(const revocation::StatusRequest& request) override;

  private:
    std::string host_;
    int port_;
};

class HttpCtSubmitter : public ctlog::CtSubmitter {
  public:
    HttpCtSubmitter(std::string host, int port) : host_(std::move(host)), port_(port) {}
    Result<ctlog::SignedCertificateTimestamp> submit(const trust::Certificate& cert) override;

  private:
    std::string host_;
    int port_;
};

struct HttpExchangeClient {
    std::string host;
    int port = 0;

    Result<uint64_t> publish(const threatx::ThreatEvent& event) const;
    Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>> pull_since(uint64_t cursor) const;
};

Result<Bytes> http_get_binary(const std::string& host, int port, const std::string& path);
Result<revocation::Crl> fetch_crl(const std::string& host, int port,
                                  const std::optional<Fingerprint>& issuer = std::nullopt);

}  // namespace dcm::net
