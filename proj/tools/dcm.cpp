// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// dcm — command-line front end for the developer certification toolkit.
//
// Exit codes: 0 success (or Install), 10 Prompt, 20 Deny / verification or
// scenario failure, 30 usage or malformed input. DCM_CLOCK (seconds since the
// epoch) pins the clock for reproducible runs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

#include "dcm/authority.hpp"
#include "dcm/ctlog.hpp"
#include "dcm/net.hpp"
#include "dcm/package.hpp"
#include "dcm/revocation.hpp"
#include "dcm/sim.hpp"
#include "dcm/threatx.hpp"
#include "dcm/trust.hpp"
#include "dcm/verifier.hpp"

namespace {

using namespace dcm;

constexpr int kOk = 0;
constexpr int kDeny = 20;
constexpr int kUsage = 30;

Timestamp now_or_env() {
    if (const char* fixed = std::getenv("DCM_CLOCK"); fixed != nullptr && *fixed != '\0') {
        return static_cast<Timestamp>(std::strtoll(fixed, nullptr, 10));
    }
    return static_cast<Timestamp>(::time(nullptr));
}

int fail(const std::string& message, int code = kUsage) {
    std::cerr << "error: " << message << '\n';
    return code;
}

template <typename T>
int fail(const Result<T>& result, int code = kUsage) {
    return fail(std::string(to_string(result.code)) +
                    (result.message.empty() ? "" : ": " + result.message),
                code);
}

// Key files: "DCMS" + 64 secret bytes, "DCMP" + 32 public bytes; secrets 0600.

Result<void> write_signing_key(const std::filesystem::path& path, const crypto::SigningKey& key) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        return Result<void>::failure(Err::IoError, "cannot open " + path.string());
    }
    out << "DCMS";
    out.write(reinterpret_cast<const char*>(key.bytes.data()), 64);
    out.close();
    std::error_code ec;
    std::filesystem::permissions(
        path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write, ec);
    return Result<void>::success();
}

Result<void> write_verify_key(const std::filesystem::path& path, const crypto::VerifyKey& key) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        return Result<void>::failure(Err::IoError, "cannot open " + path.string());
    }
    out << "DCMP";
    out.write(reinterpret_cast<const char*>(key.bytes.data()), 32);
    return Result<void>::success();
}

Result<Bytes> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return Result<Bytes>::failure(Err::IoError, "cannot open " + path.string());
    }
    return Result<Bytes>::success(
        Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

Result<crypto::SigningKey> read_signing_key(const std::filesystem::path& path) {
    auto raw = read_file(path);
    if (!raw) {
        return forward_failure<crypto::SigningKey>(raw);
    }
    if (raw.value.size() != 68 ||
        std::string_view(reinterpret_cast<char*>(raw.value.data()), 4) != "DCMS") {
        return Result<crypto::SigningKey>::failure(Err::MalformedInput,
                                                   "not a secret key file: " + path.string());
    }
    crypto::SigningKey key;
    std::copy(raw.value.begin() + 4, raw.value.end(), key.bytes.begin());
    return Result<crypto::SigningKey>::success(key);
}

Result<crypto::VerifyKey> read_verify_key(const std::filesystem::path& path) {
    auto raw = read_file(path);
    if (!raw) {
        return forward_failure<crypto::VerifyKey>(raw);
    }
    if (raw.value.size() != 36 ||
        std::string_view(reinterpret_cast<char*>(raw.value.data()), 4) != "DCMP") {
        return Result<crypto::VerifyKey>::failure(Err::MalformedInput,
                                                  "not a public key file: " + path.string());
    }
    crypto::VerifyKey key;
    std::copy(raw.value.begin() + 4, raw.value.end(), key.bytes.begin());
    return Result<crypto::VerifyKey>::success(key);
}

// CA directory layout: journal.dcmj, ca.key, ca.cert.

std::filesystem::path ca_journal(const std::filesystem::path& dir) { return dir / "journal.dcmj"; }

Result<authority::CaState> load_ca_dir(const std::filesystem::path& dir) {
    auto key = read_signing_key(dir / "ca.key");
    if (!key) {
        return forward_failure<authority::CaState>(key);
    }
    return authority::load_ca(ca_journal(dir), key.value);
}

Result<void> save_ca_dir(const std::filesystem::path& dir, authority::CaState& ca) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (auto r = write_signing_key(dir / "ca.key", ca.secret_key); !r) {
        return r;
    }
    if (auto r = trust::write_certificate_file(dir / "ca.cert", ca.own_certificate); !r) {
        return r;
    }
    return authority::bind_journal(ca, ca_journal(dir));
}

struct IdentityFlags {
    std::string cn;
    std::string org;
    std::string ou;
    std::string locality;
    std::string state;
    std::string country;
    std::string email;

    void attach(CLI::App* cmd) {
        cmd->add_option("--cn", cn, "subject common name")->required();
        cmd->add_option("--org", org, "organization");
        cmd->add_option("--ou", ou, "organizational unit");
        cmd->add_option("--locality", locality, "city / locality");
        cmd->add_option("--state", state, "state / region");
        cmd->add_option("--country", country, "two-letter country code");
        cmd->add_option("--email", email, "contact email");
    }

    [[nodiscard]] trust::SubjectIdentity value() const {
        trust::SubjectIdentity id;
        id.common_name = cn;
        id.organization = org;
        if (!ou.empty()) id.organizational_unit = ou;
        if (!locality.empty()) id.locality = locality;
        if (!state.empty()) id.state_region = state;
        id.country = country;
        if (!email.empty()) id.email = email;
        return id;
    }
};

struct EvidenceFlags {
    bool verified = false;
    int64_t age_days = 0;
    int64_t installs = 0;
    std::vector<std::string> threats;

    void attach(CLI::App* cmd) {
        cmd->add_flag("--verified", verified, "identity verification completed");
        cmd->add_option("--age-days", age_days, "age of the oldest distributed app in days");
        cmd->add_option("--installs", installs, "total install count");
        cmd->add_option("--threat", threats,
                        "open threat as SEVERITY:EVENT_ID (repeatable; Warning or Critical)");
    }

    [[nodiscard]] Result<authority::PolicyEvidence> value() const {
        authority::PolicyEvidence evidence;
        evidence.identity_verified = verified;
        evidence.oldest_app_age_days = age_days;
        evidence.total_installs = installs;
        for (const std::string& spec : threats) {
            auto colon = spec.find(':');
            auto severity = trust::severity_from_name(spec.substr(0, colon));
            if (colon == std::string::npos || !severity) {
                return Result<authority::PolicyEvidence>::failure(
                    Err::MalformedInput, "threat must be SEVERITY:EVENT_ID, got " + spec);
            }
            evidence.open_threats.push_back({*severity, spec.substr(colon + 1)});
        }
        return Result<authority::PolicyEvidence>::success(std::move(evidence));
    }
};

struct HostPort {
    std::string host;
    int port = 0;
};

Result<HostPort> parse_http_url(const std::string& url) {
    constexpr std::string_view prefix = "http://";
    if (!url.starts_with(prefix)) {
        return Result<HostPort>::failure(Err::MalformedInput, "only http:// URLs are supported");
    }
    std::string rest = url.substr(prefix.size());
    if (auto slash = rest.find('/'); slash != std::string::npos) {
        rest.resize(slash);
    }
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
        return Result<HostPort>::failure(Err::MalformedInput, "URL must carry an explicit port");
    }
    HostPort hp;
    hp.host = rest.substr(0, colon);
    hp.port = std::atoi(rest.c_str() + colon + 1);
    if (hp.host.empty() || hp.port <= 0) {
        return Result<HostPort>::failure(Err::MalformedInput, "bad host:port in URL");
    }
    return Result<HostPort>::success(std::move(hp));
}

/// Either a local log directory or a remote log URL.
struct CtTarget {
    std::string dir;
    std::string url;

    void attach(CLI::App* cmd) {
        auto* d = cmd->add_option("--ctlog-dir", dir, "local transparency log directory");
        cmd->add_option("--ctlog", url, "transparency log base URL (http://host:port)")
            ->excludes(d);
    }

    struct Opened {
        std::shared_ptr<ctlog::Log> log;  // set in dir mode
        std::unique_ptr<ctlog::CtSubmitter> submitter;
    };

    [[nodiscard]] Result<Opened> open(Timestamp now) const {
        Opened opened;
        if (!dir.empty()) {
            auto log = ctlog::Log::open(dir);
            if (!log) {
                return forward_failure<Opened>(log);
            }
            opened.log = std::make_shared<ctlog::Log>(std::move(log.value));
            opened.submitter =
                std::make_unique<ctlog::InProcessSubmitter>(*opened.log, [now] { return now; });
            return Result<Opened>::success(std::move(opened));
        }
        if (!url.empty()) {
            auto hp = parse_http_url(url);
            if (!hp) {
                return forward_failure<Opened>(hp);
            }
            opened.submitter = std::make_unique<net::HttpCtSubmitter>(hp.value.host, hp.value.port);
            return Result<Opened>::success(std::move(opened));
        }
        return Result<Opened>::failure(Err::MalformedInput,
                                       "one of --ctlog-dir or --ctlog is required");
    }
};

void wait_forever() {
    std::promise<void>().get_future().wait();
}

void serve_announce(const char* what, const std::string& host, int port) {
    std::cout << what << " listening on " << host << ":" << port << std::endl;
}

nlohmann::json report_json(const verifier::VerificationReport& report,
                           const verifier::InstallDecision& decision) {
    nlohmann::json j = nlohmann::json::parse(report.to_json());
    j["decision"] = verifier::to_string(decision.kind);
    j["message"] = decision.message;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dcm — developer-trust PKI toolkit: certificates with trust levels, package "
                 "signing, install-time verification, revocation, transparency log, threat "
                 "exchange, and ecosystem scenarios"};
    app.require_subcommand(1);
    int rc = kOk;

    // ---------------- keygen ----------------
    {
        auto* cmd = app.add_subcommand("keygen", "generate a signing keypair");
        auto out = std::make_shared<std::string>();
        auto seed = std::make_shared<std::string>();
        cmd->add_option("--out", *out, "output prefix; writes PREFIX.key and PREFIX.pub")
            ->required();
        cmd->add_option("--seed", *seed, "derive the keypair from this text (reproducible)");
        cmd->callback([&rc, out, seed] {
            crypto::KeyPair keys;
            if (seed->empty()) {
                keys = crypto::generate_keypair();
            } else {
                keys = crypto::keypair_from_seed(crypto::sha256(
                    ByteSpan(reinterpret_cast<const uint8_t*>(seed->data()), seed->size())));
            }
            if (auto r = write_signing_key(*out + ".key", keys.secret); !r) {
                rc = fail(r);
                return;
            }
            if (auto r = write_verify_key(*out + ".pub", keys.public_key); !r) {
                rc = fail(r);
                return;
            }
            std::cout << "fingerprint " << trust::fingerprint(keys.public_key).hex() << '\n';
        });
    }

    // ---------------- ca ----------------
    auto* ca = app.add_subcommand("ca", "certification authority operations");
    ca->require_subcommand(1);
    {
        auto* cmd = ca->add_subcommand("init-root", "create a root CA directory");
        auto dir = std::make_shared<std::string>();
        auto lifetime = std::make_shared<int64_t>(3650);
        auto identity = std::make_shared<IdentityFlags>();
        cmd->add_option("--ca-dir", *dir, "directory for the new CA state")->required();
        cmd->add_option("--lifetime-days", *lifetime, "certificate lifetime in days");
        identity->attach(cmd);
        cmd->callback([&rc, dir, lifetime, identity] {
            auto root = authority::init_root(identity->value(), *lifetime, now_or_env());
            if (!root) {
                rc = fail(root);
                return;
            }
            if (auto r = save_ca_dir(*dir, root.value); !r) {
                rc = fail(r);
                return;
            }
            std::cout << "root CA at " << *dir << ", fingerprint "
                      << root.value.fingerprint().hex() << '\n';
        });
    }
    {
        auto* cmd = ca->add_subcommand("issue-intermediate", "issue an intermediate CA");
        auto root_dir = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>();
        auto lifetime = std::make_shared<int64_t>(1825);
        auto identity = std::make_shared<IdentityFlags>();
        cmd->add_option("--ca-dir", *root_dir, "root CA directory")->required();
        cmd->add_option("--out-dir", *out_dir, "directory for the new intermediate CA")
            ->required();
        cmd->add_option("--lifetime-days", *lifetime, "certificate lifetime in days");
        identity->attach(cmd);
        cmd->callback([&rc, root_dir, out_dir, lifetime, identity] {
            auto root = load_ca_dir(*root_dir);
            if (!root) {
                rc = fail(root);
                return;
            }
            auto issued = authority::issue_intermediate(root.value, identity->value(), *lifetime,
                                                        now_or_env());
            if (!issued) {
                rc = fail(issued);
                return;
            }
            if (auto r = save_ca_dir(*out_dir, issued.value.second); !r) {
                rc = fail(r);
                return;
            }
            std::cout << "intermediate CA at " << *out_dir << ", serial "
                      << issued.value.first.body.serial.hex() << ", fingerprint "
                      << issued.value.second.fingerprint().hex() << '\n';
        });
    }
    {
        auto* cmd = ca->add_subcommand("issue-developer", "certify a developer key");
        auto ca_dir = std::make_shared<std::string>();
        auto pubkey = std::make_shared<std::string>();
        auto cert_out = std::make_shared<std::string>();
        auto lifetime = std::make_shared<int64_t>(365);
        auto identity = std::make_shared<IdentityFlags>();
        auto evidence = std::make_shared<EvidenceFlags>();
        auto ct_target = std::make_shared<CtTarget>();
        cmd->add_option("--ca-dir", *ca_dir, "intermediate CA directory")->required();
        cmd->add_option("--pubkey", *pubkey, "developer public key file")->required();
        cmd->add_option("--cert-out", *cert_out, "where to write the certificate")->required();
        cmd->add_option("--lifetime-days", *lifetime, "certificate lifetime in days");
        identity->attach(cmd);
        evidence->attach(cmd);
        ct_target->attach(cmd);
        cmd->callback([&rc, ca_dir, pubkey, cert_out, lifetime, identity, evidence, ct_target] {
            auto ica = load_ca_dir(*ca_dir);
            if (!ica) {
                rc = fail(ica);
                return;
            }
            auto key = read_verify_key(*pubkey);
            if (!key) {
                rc = fail(key);
                return;
            }
            auto facts = evidence->value();
            if (!facts) {
                rc = fail(facts);
                return;
            }
            Timestamp now = now_or_env();
            auto opened = ct_target->open(now);
            if (!opened) {
                rc = fail(opened);
                return;
            }
            auto issued =
                authority::issue_developer(ica.value, identity->value(), key.value, facts.value,
                                           *lifetime, *opened.value.submitter, now);
            if (!issued) {
                rc = fail(issued, kDeny);
                return;
            }
            if (auto r = trust::write_certificate_file(*cert_out, issued.value.certificate); !r) {
                rc = fail(r);
                return;
            }
            std::cout << "issued serial " << issued.value.certificate.body.serial.hex()
                      << " at level " << trust::to_string(*issued.value.certificate.trust_level())
                      << ", logged at index " << issued.value.sct.index << '\n';
        });
    }
    {
        auto* cmd = ca->add_subcommand("revoke", "revoke an issued certificate");
        auto ca_dir = std::make_shared<std::string>();
        auto serial_hex = std::make_shared<std::string>();
        auto reason_name = std::make_shared<std::string>("KeyCompromise");
        cmd->add_option("--ca-dir", *ca_dir, "CA directory")->required();
        cmd->add_option("--serial", *serial_hex, "serial (hex)")->required();
        cmd->add_option("--reason", *reason_name,
                        "TrustLevelChange|KeyCompromise|PolicyViolation|CaMisissuance");
        cmd->callback([&rc, ca_dir, serial_hex, reason_name] {
            auto ca_state = load_ca_dir(*ca_dir);
            if (!ca_state) {
                rc = fail(ca_state);
                return;
            }
            auto serial = Serial::from_hex(*serial_hex);
            auto reason = authority::revocation_reason_from_name(*reason_name);
            if (!serial || !reason) {
                rc = fail("bad --serial or --reason");
                return;
            }
            auto r = authority::revoke(ca_state.value, *serial, *reason, now_or_env());
            if (!r) {
                rc = fail(r, kDeny);
                return;
            }
            std::cout << "revoked " << serial->hex() << '\n';
        });
    }
    {
        auto* cmd = ca->add_subcommand("reevaluate", "re-run policy for a developer");
        auto ca_dir = std::make_shared<std::string>();
        auto dev_fp = std::make_shared<std::string>();
        auto pubkey = std::make_shared<std::string>();
        auto cert_out = std::make_shared<std::string>();
        auto evidence = std::make_shared<EvidenceFlags>();
        auto ct_target = std::make_shared<CtTarget>();
        cmd->add_option("--ca-dir", *ca_dir, "intermediate CA directory")->required();
        cmd->add_option("--developer", *dev_fp, "developer key fingerprint (hex)");
        cmd->add_option("--pubkey", *pubkey, "developer public key file (alternative)");
        cmd->add_option("--cert-out", *cert_out, "where to write a reissued certificate");
        evidence->attach(cmd);
        ct_target->attach(cmd);
        cmd->callback([&rc, ca_dir, dev_fp, pubkey, cert_out, evidence, ct_target] {
            auto ica = load_ca_dir(*ca_dir);
            if (!ica) {
                rc = fail(ica);
                return;
            }
            Fingerprint developer;
            if (!dev_fp->empty()) {
                auto parsed = Fingerprint::from_hex(*dev_fp);
                if (!parsed) {
                    rc = fail("bad --developer fingerprint");
                    return;
                }
                developer = *parsed;
            } else if (!pubkey->empty()) {
                auto key = read_verify_key(*pubkey);
                if (!key) {
                    rc = fail(key);
                    return;
                }
                developer = trust::fingerprint(key.value);
            } else {
                rc = fail("one of --developer or --pubkey is required");
                return;
            }
            auto facts = evidence->value();
            if (!facts) {
                rc = fail(facts);
                return;
            }
            Timestamp now = now_or_env();
            auto opened = ct_target->open(now);
            if (!opened) {
                rc = fail(opened);
                return;
            }
            auto outcome = authority::reevaluate(ica.value, developer, facts.value,
                                                 *opened.value.submitter, now);
            if (!outcome) {
                rc = fail(outcome, kDeny);
                return;
            }
            if (outcome.value.reissued) {
                std::cout << "reissued at " << trust::to_string(outcome.value.level) << '\n';
                if (!cert_out->empty()) {
                    if (auto r = trust::write_certificate_file(*cert_out,
                                                               *outcome.value.new_certificate);
                        !r) {
                        rc = fail(r);
                        return;
                    }
                }
            } else {
                std::cout << "unchanged at " << trust::to_string(outcome.value.level) << '\n';
            }
        });
    }

    // ---------------- pkg ----------------
    auto* pkg = app.add_subcommand("pkg", "package signing and inspection");
    pkg->require_subcommand(1);
    {
        auto* cmd = pkg->add_subcommand("sign", "build and sign a package archive");
        auto name = std::make_shared<std::string>();
        auto version = std::make_shared<uint64_t>(1);
        auto key_path = std::make_shared<std::string>();
        auto certs = std::make_shared<std::vector<std::string>>();
        auto out = std::make_shared<std::string>();
        auto root_dir = std::make_shared<std::string>(".");
        auto files = std::make_shared<std::vector<std::string>>();
        cmd->add_option("--name", *name, "package name (reverse-dns)")->required();
        cmd->add_option("--version", *version, "version code (positive)");
        cmd->add_option("--key", *key_path, "developer secret key file")->required();
        cmd->add_option("--cert", *certs, "chain certificate files, leaf first (repeatable)")
            ->required();
        cmd->add_option("--out", *out, "output package path")->required();
        cmd->add_option("--root-dir", *root_dir, "directory content paths are relative to");
        cmd->add_option("files", *files, "content files (paths relative to --root-dir)")
            ->required();
        cmd->callback([&rc, name, version, key_path, certs, out, root_dir, files] {
            auto key = read_signing_key(*key_path);
            if (!key) {
                rc = fail(key);
                return;
            }
            trust::CertificateChain chain;
            for (const auto& path : *certs) {
                auto cert = trust::read_certificate_file(path);
                if (!cert) {
                    rc = fail(cert);
                    return;
                }
                chain.push_back(std::move(cert.value));
            }
            std::vector<package::FileInput> inputs;
            for (const auto& rel : *files) {
                auto data = read_file(std::filesystem::path(*root_dir) / rel);
                if (!data) {
                    rc = fail(data);
                    return;
                }
                inputs.push_back(
                    {std::filesystem::path(rel).generic_string(), std::move(data.value)});
            }
            auto manifest = package::build_manifest(*name, *version, inputs);
            if (!manifest) {
                rc = fail(manifest);
                return;
            }
            auto archive = package::sign_package(inputs, manifest.value, key.value, chain);
            if (!archive) {
                rc = fail(archive);
                return;
            }
            if (auto r = package::write_package_file(*out, archive.value); !r) {
                rc = fail(r);
                return;
            }
            std::cout << "signed " << *out << " (" << inputs.size() << " files)\n";
        });
    }
    {
        auto* cmd = pkg->add_subcommand("inspect", "print package metadata");
        auto path = std::make_shared<std::string>();
        auto as_json = std::make_shared<bool>(false);
        cmd->add_option("package", *path, "package file")->required();
        cmd->add_flag("--json", *as_json, "JSON output");
        cmd->callback([&rc, path, as_json] {
            auto archive = package::read_package_file(*path);
            if (!archive) {
                rc = fail(archive);
                return;
            }
            auto meta = package::extract_metadata(archive.value);
            if (!meta) {
                rc = fail(meta);
                return;
            }
            if (*as_json) {
                nlohmann::json files = nlohmann::json::array();
                for (const auto& entry : meta.value.manifest.files) {
                    files.push_back({{"path", entry.path},
                                     {"digest", to_hex(entry.digest)},
                                     {"size", entry.size}});
                }
                nlohmann::json chain = nlohmann::json::array();
                for (const auto& cert : meta.value.signature_block.chain) {
                    chain.push_back(nlohmann::json::parse(trust::certificate_to_json(cert)));
                }
                nlohmann::json j = {{"package_name", meta.value.manifest.package_name},
                                    {"version_code", meta.value.manifest.version_code},
                                    {"files", files},
                                    {"chain", chain}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "package: " << meta.value.manifest.package_name << " v"
                          << meta.value.manifest.version_code << '\n';
                for (const auto& entry : meta.value.manifest.files) {
                    std::cout << "  " << entry.path << "  " << entry.size << " bytes  "
                              << to_hex(entry.digest).substr(0, 16) << "...\n";
                }
                for (const auto& cert : meta.value.signature_block.chain) {
                    std::cout << "  chain: " << trust::to_string(cert.body.role) << " "
                              << cert.body.subject.common_name;
                    if (auto level = cert.trust_level()) {
                        std::cout << " [" << trust::to_string(*level) << "]";
                    }
                    std::cout << '\n';
                }
            }
        });
    }

    // ---------------- verify ----------------
    {
        auto* cmd = app.add_subcommand("verify", "six-step install-time verification");
        auto path = std::make_shared<std::string>();
        auto anchors = std::make_shared<std::vector<std::string>>();
        auto ocsp_url = std::make_shared<std::string>();
        auto registries = std::make_shared<std::vector<std::string>>();
        auto responder_pub = std::make_shared<std::string>();
        auto fail_closed = std::make_shared<bool>(false);
        auto max_age = std::make_shared<int64_t>(revocation::kDefaultMaxResponseAge);
        auto as_json = std::make_shared<bool>(false);
        cmd->add_option("package", *path, "package file")->required();
        cmd->add_option("--anchor", *anchors, "trusted root certificate file or directory of .cert files (repeatable)")
            ->required();
        cmd->add_option("--ocsp", *ocsp_url, "status responder URL (http://host:port)");
        cmd->add_option("--registry", *registries,
                        "CA directory for offline status answers (repeatable)");
        cmd->add_option("--responder-pub", *responder_pub, "responder public key file");
        cmd->add_flag("--fail-closed", *fail_closed, "fail step 4 when no responder answers");
        cmd->add_option("--max-age", *max_age, "maximum status response age in seconds");
        cmd->add_flag("--json", *as_json, "JSON report");
        cmd->callback([&rc, path, anchors, ocsp_url, registries, responder_pub, fail_closed,
                       max_age, as_json] {
            auto archive = package::read_package_file(*path);
            if (!archive) {
                rc = fail(archive);
                return;
            }
            // Not being a zip archive at all is malformed input (exit 30); a
            // parseable package that fails validation is a Deny (exit 20).
            if (auto entries = package::zip_unpack(archive.value.zip); !entries) {
                rc = fail("not a package archive: " + *path);
                return;
            }
            verifier::VerifierConfig config;
            for (const auto& anchor_path : *anchors) {
                std::vector<std::filesystem::path> cert_files;
                if (std::filesystem::is_directory(anchor_path)) {
                    for (const auto& entry : std::filesystem::directory_iterator(anchor_path)) {
                        if (entry.path().extension() == ".cert") {
                            cert_files.push_back(entry.path());
                        }
                    }
                    std::sort(cert_files.begin(), cert_files.end());
                } else {
                    cert_files.emplace_back(anchor_path);
                }
                for (const auto& file : cert_files) {
                    auto cert = trust::read_certificate_file(file);
                    if (!cert) {
                        rc = fail(cert);
                        return;
                    }
                    config.trust_anchors.push_back(std::move(cert.value));
                }
            }
            Timestamp now = now_or_env();
            config.clock = [now] { return now; };
            config.offline_policy = *fail_closed ? verifier::OfflinePolicy::FailClosed
                                                 : verifier::OfflinePolicy::FailOpen;

            if (!ocsp_url->empty()) {
                auto hp = parse_http_url(*ocsp_url);
                if (!hp) {
                    rc = fail(hp);
                    return;
                }
                if (responder_pub->empty()) {
                    rc = fail("--ocsp needs --responder-pub to verify responses");
                    return;
                }
                auto key = read_verify_key(*responder_pub);
                if (!key) {
                    rc = fail(key);
                    return;
                }
                revocation::Client client;
                client.source =
                    std::make_shared<net::HttpStatusSource>(hp.value.host, hp.value.port);
                client.responder_key = key.value;
                client.max_age = *max_age;
                config.revocation = client;
            } else if (!registries->empty()) {
                auto views = std::make_shared<std::vector<revocation::RegistryView>>();
                std::optional<crypto::SigningKey> responder_key;
                for (const auto& dir : *registries) {
                    auto ca_state = load_ca_dir(dir);
                    if (!ca_state) {
                        rc = fail(ca_state);
                        return;
                    }
                    if (!responder_key) {
                        responder_key = ca_state.value.secret_key;
                    }
                    views->push_back(revocation::registry_view(ca_state.value));
                }
                revocation::Client client;
                client.source = std::make_shared<revocation::RegistrySource>(
                    [views] { return *views; }, *responder_key, [now] { return now; });
                client.responder_key = responder_key->verify_key();
                client.max_age = *max_age;
                config.revocation = client;
            }

            auto report = verifier::verify_package(archive.value, config);
            auto decision = verifier::decide_install(report);
            if (*as_json) {
                std::cout << report_json(report, decision).dump(2) << '\n';
            } else {
                std::cout << report.to_text() << "decision: " << verifier::to_string(decision.kind)
                          << " - " << decision.message << '\n';
            }
            if (!report.overall_ok) {
                std::cerr << "failed at step " << report.first_failed_step << ": "
                          << to_string(report.failure_reason) << '\n';
            }
            rc = verifier::exit_code_for(decision);
        });
    }

    // ---------------- ocsp ----------------
    auto* ocsp = app.add_subcommand("ocsp", "certificate status responder and client");
    ocsp->require_subcommand(1);
    {
        auto* cmd = ocsp->add_subcommand("serve", "serve /status, /status.json, /crl");
        auto registries = std::make_shared<std::vector<std::string>>();
        auto key_path = std::make_shared<std::string>();
        auto host = std::make_shared<std::string>("127.0.0.1");
        auto port = std::make_shared<int>(0);
        cmd->add_option("--registry", *registries, "CA directory (repeatable)")->required();
        cmd->add_option("--key", *key_path,
                        "responder secret key (defaults to the first registry's CA key)");
        cmd->add_option("--host", *host, "bind address");
        cmd->add_option("--port", *port, "port (0 picks a free one)");
        cmd->callback([&rc, registries, key_path, host, port] {
            std::vector<net::OcspRegistry> regs;
            std::optional<crypto::SigningKey> responder_secret;
            for (const auto& dir : *registries) {
                auto ca_state = load_ca_dir(dir);
                if (!ca_state) {
                    rc = fail(ca_state);
                    return;
                }
                if (!responder_secret) {
                    responder_secret = ca_state.value.secret_key;
                }
                auto view = revocation::registry_view(ca_state.value);
                regs.push_back({[view] { return view; }, ca_state.value.secret_key});
            }
            if (!key_path->empty()) {
                auto key = read_signing_key(*key_path);
                if (!key) {
                    rc = fail(key);
                    return;
                }
                responder_secret = key.value;
            }
            crypto::KeyPair responder{*responder_secret, responder_secret->verify_key()};
            auto handle = net::serve_ocsp(std::move(regs), responder,
                                          [] { return now_or_env(); }, *host, *port);
            if (handle.port <= 0) {
                rc = fail("failed to bind " + *host + ":" + std::to_string(*port));
                return;
            }
            serve_announce("ocsp responder", *host, handle.port);
            wait_forever();
        });
    }
    {
        auto* cmd = ocsp->add_subcommand("query", "query a responder and verify the answer");
        auto url = std::make_shared<std::string>();
        auto issuer_hex = std::make_shared<std::string>();
        auto serial_hex = std::make_shared<std::string>();
        auto responder_pub = std::make_shared<std::string>();
        auto max_age = std::make_shared<int64_t>(revocation::kDefaultMaxResponseAge);
        cmd->add_option("--url", *url, "responder URL (http://host:port)")->required();
        cmd->add_option("--issuer", *issuer_hex, "issuer fingerprint (hex)")->required();
        cmd->add_option("--serial", *serial_hex, "serial (hex)")->required();
        cmd->add_option("--responder-pub", *responder_pub, "responder public key file")
            ->required();
        cmd->add_option("--max-age", *max_age, "maximum response age in seconds");
        cmd->callback([&rc, url, issuer_hex, serial_hex, responder_pub, max_age] {
            auto hp = parse_http_url(*url);
            auto issuer = Fingerprint::from_hex(*issuer_hex);
            auto serial = Serial::from_hex(*serial_hex);
            auto key = read_verify_key(*responder_pub);
            if (!hp || !issuer || !serial || !key) {
                rc = fail("bad --url, --issuer, --serial, or --responder-pub");
                return;
            }
            revocation::Client client;
            client.source = std::make_shared<net::HttpStatusSource>(hp.value.host, hp.value.port);
            client.responder_key = key.value;
            client.max_age = *max_age;
            auto response = client.check(*serial, *issuer, now_or_env());
            if (!response) {
                rc = fail(response, kDeny);
                return;
            }
            std::cout << revocation::to_string(response.value.status) << '\n';
            rc = response.value.status == revocation::CertStatus::Revoked ? kDeny : kOk;
        });
    }

    // ---------------- ctlog ----------------
    auto* ct = app.add_subcommand("ctlog", "certificate transparency log");
    ct->require_subcommand(1);
    {
        auto* cmd =
            ct->add_subcommand("serve", "serve /submit, /root, /inclusion, /consistency, /alerts");
        auto dir = std::make_shared<std::string>();
        auto registries = std::make_shared<std::vector<std::string>>();
        auto host = std::make_shared<std::string>("127.0.0.1");
        auto port = std::make_shared<int>(0);
        cmd->add_option("--log-dir", *dir, "log directory")->required();
        cmd->add_option("--registry", *registries,
                        "CA directories providing monitor context for /alerts (repeatable)");
        cmd->add_option("--host", *host, "bind address");
        cmd->add_option("--port", *port, "port (0 picks a free one)");
        cmd->callback([&rc, dir, registries, host, port] {
            auto log = ctlog::Log::open(*dir);
            if (!log) {
                rc = fail(log);
                return;
            }
            auto shared = std::make_shared<ctlog::Log>(std::move(log.value));
            std::function<ctlog::MonitorContext()> context;
            if (!registries->empty()) {
                auto ctx = std::make_shared<ctlog::MonitorContext>();
                for (const auto& reg : *registries) {
                    auto ca_state = load_ca_dir(reg);
                    if (!ca_state) {
                        rc = fail(ca_state);
                        return;
                    }
                    ctlog::add_registry_to_context(*ctx, ca_state.value);
                }
                context = [ctx] { return *ctx; };
            }
            auto handle =
                net::serve_ctlog(shared, [] { return now_or_env(); }, context, *host, *port);
            if (handle.port <= 0) {
                rc = fail("failed to bind " + *host + ":" + std::to_string(*port));
                return;
            }
            serve_announce("transparency log", *host, handle.port);
            wait_forever();
        });
    }
    {
        auto* cmd = ct->add_subcommand("submit", "append a certificate");
        auto cert_path = std::make_shared<std::string>();
        auto target = std::make_shared<CtTarget>();
        cmd->add_option("--cert", *cert_path, "certificate file")->required();
        target->attach(cmd);
        cmd->callback([&rc, cert_path, target] {
            auto cert = trust::read_certificate_file(*cert_path);
            if (!cert) {
                rc = fail(cert);
                return;
            }
            auto opened = target->open(now_or_env());
            if (!opened) {
                rc = fail(opened);
                return;
            }
            auto sct = opened.value.submitter->submit(cert.value);
            if (!sct) {
                rc = fail(sct, kDeny);
                return;
            }
            std::cout << "index " << sct.value.index << " log " << sct.value.log_id.hex() << '\n';
        });
    }
    {
        auto* cmd = ct->add_subcommand("prove", "produce inclusion or consistency proofs");
        auto dir = std::make_shared<std::string>();
        auto index = std::make_shared<uint64_t>(0);
        auto size = std::make_shared<uint64_t>(0);
        auto old_size = std::make_shared<uint64_t>(0);
        auto new_size = std::make_shared<uint64_t>(0);
        auto inclusion = std::make_shared<bool>(false);
        auto consistency = std::make_shared<bool>(false);
        cmd->add_option("--log-dir", *dir, "log directory")->required();
        cmd->add_flag("--inclusion", *inclusion, "inclusion proof (--index, --size)");
        cmd->add_flag("--consistency", *consistency, "consistency proof (--old, --new)");
        cmd->add_option("--index", *index, "leaf index");
        cmd->add_option("--size", *size, "tree size (defaults to the full log)");
        cmd->add_option("--old", *old_size, "old tree size");
        cmd->add_option("--new", *new_size, "new tree size (defaults to the full log)");
        cmd->callback([&rc, dir, index, size, old_size, new_size, inclusion, consistency] {
            auto log = ctlog::Log::open(*dir);
            if (!log) {
                rc = fail(log);
                return;
            }
            if (*inclusion == *consistency) {
                rc = fail("choose exactly one of --inclusion or --consistency");
                return;
            }
            nlohmann::json j;
            if (*inclusion) {
                uint64_t tree = *size == 0 ? log.value.size() : *size;
                auto proof = log.value.inclusion_proof(*index, tree);
                if (!proof) {
                    rc = fail(proof);
                    return;
                }
                nlohmann::json path = nlohmann::json::array();
                for (const auto& hash : proof.value.path) {
                    path.push_back(to_hex(hash));
                }
                j = {{"kind", "inclusion"},
                     {"index", proof.value.index},
                     {"tree_size", proof.value.tree_size},
                     {"path", path},
                     {"root", to_hex(log.value.root_hash(tree).value)},
                     {"leaf_hash", to_hex(log.value.entries()[*index].leaf_hash)}};
            } else {
                uint64_t tree = *new_size == 0 ? log.value.size() : *new_size;
                auto proof = log.value.consistency_proof(*old_size, tree);
                if (!proof) {
                    rc = fail(proof);
                    return;
                }
                nlohmann::json path = nlohmann::json::array();
                for (const auto& hash : proof.value.path) {
                    path.push_back(to_hex(hash));
                }
                j = {{"kind", "consistency"},
                     {"old_size", proof.value.old_size},
                     {"new_size", proof.value.new_size},
                     {"path", path},
                     {"old_root", to_hex(log.value.root_hash(*old_size).value)},
                     {"new_root", to_hex(log.value.root_hash(tree).value)}};
            }
            std::cout << j.dump(2) << '\n';
        });
    }
    {
        auto* cmd = ct->add_subcommand("monitor", "scan the log for mis-issuance");
        auto dir = std::make_shared<std::string>();
        auto registries = std::make_shared<std::vector<std::string>>();
        auto known = std::make_shared<std::vector<std::string>>();
        auto as_json = std::make_shared<bool>(false);
        cmd->add_option("--log-dir", *dir, "log directory")->required();
        cmd->add_option("--registry", *registries, "CA directory (repeatable)");
        cmd->add_option("--known-issuer", *known, "extra known issuer fingerprint (hex)");
        cmd->add_flag("--json", *as_json, "JSON output");
        cmd->callback([&rc, dir, registries, known, as_json] {
            auto log = ctlog::Log::open(*dir);
            if (!log) {
                rc = fail(log);
                return;
            }
            ctlog::MonitorContext ctx;
            for (const auto& reg : *registries) {
                auto ca_state = load_ca_dir(reg);
                if (!ca_state) {
                    rc = fail(ca_state);
                    return;
                }
                ctlog::add_registry_to_context(ctx, ca_state.value);
            }
            for (const auto& hex : *known) {
                auto fp = Fingerprint::from_hex(hex);
                if (!fp) {
                    rc = fail("bad --known-issuer fingerprint");
                    return;
                }
                ctx.known_issuers.insert(*fp);
            }
            auto alerts = ctlog::monitor_scan(log.value, ctx);
            if (*as_json) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& alert : alerts) {
                    j.push_back({{"kind", ctlog::to_string(alert.kind)},
                                 {"entry_index", alert.entry_index},
                                 {"detail", alert.detail}});
                }
                std::cout << j.dump(2) << '\n';
            } else {
                for (const auto& alert : alerts) {
                    std::cout << ctlog::to_string(alert.kind) << " at entry " << alert.entry_index
                              << ": " << alert.detail << '\n';
                }
                std::cout << alerts.size() << " alert(s)\n";
            }
            rc = alerts.empty() ? kOk : kDeny;
        });
    }

    // ---------------- threatx ----------------
    auto* tx = app.add_subcommand("threatx", "threat-intelligence exchange");
    tx->require_subcommand(1);
    {
        auto* cmd = tx->add_subcommand("serve", "serve /events and /events.json");
        auto journal = std::make_shared<std::string>();
        auto host = std::make_shared<std::string>("127.0.0.1");
        auto port = std::make_shared<int>(0);
        cmd->add_option("--journal", *journal, "event journal file")->required();
        cmd->add_option("--host", *host, "bind address");
        cmd->add_option("--port", *port, "port (0 picks a free one)");
        cmd->callback([&rc, journal, host, port] {
            auto exchange = threatx::Exchange::open(*journal);
            if (!exchange) {
                rc = fail(exchange);
                return;
            }
            auto shared = std::make_shared<threatx::Exchange>(std::move(exchange.value));
            auto handle = net::serve_threatx(shared, *host, *port);
            if (handle.port <= 0) {
                rc = fail("failed to bind " + *host + ":" + std::to_string(*port));
                return;
            }
            serve_announce("threat exchange", *host, handle.port);
            wait_forever();
        });
    }
    {
        auto* cmd = tx->add_subcommand("publish", "publish an indicator event");
        auto journal = std::make_shared<std::string>();
        auto url = std::make_shared<std::string>();
        auto event_id = std::make_shared<std::string>();
        auto developer = std::make_shared<std::string>();
        auto digest = std::make_shared<std::string>();
        auto severity = std::make_shared<std::string>("Critical");
        auto indicators = std::make_shared<std::vector<std::string>>();
        auto reporter = std::make_shared<std::string>();
        cmd->add_option("--journal", *journal, "local journal file");
        cmd->add_option("--url", *url, "exchange URL (http://host:port)");
        cmd->add_option("--event-id", *event_id, "unique event id")->required();
        cmd->add_option("--developer", *developer, "developer fingerprint (hex)")->required();
        cmd->add_option("--digest", *digest, "package digest (hex, optional)");
        cmd->add_option("--severity", *severity, "Warning|Critical");
        cmd->add_option("--indicator", *indicators, "indicator of compromise (repeatable)");
        cmd->add_option("--reporter", *reporter, "reporting store id")->required();
        cmd->callback(
            [&rc, journal, url, event_id, developer, digest, severity, indicators, reporter] {
                threatx::ThreatEvent event;
                event.event_id = *event_id;
                auto fp = Fingerprint::from_hex(*developer);
                auto sev = trust::severity_from_name(*severity);
                if (!fp || !sev) {
                    rc = fail("bad --developer or --severity");
                    return;
                }
                event.developer_fingerprint = *fp;
                event.severity = *sev;
                if (!digest->empty()) {
                    auto hash = array_from_hex<32>(*digest);
                    if (!hash) {
                        rc = fail("bad --digest");
                        return;
                    }
                    event.package_digest = *hash;
                }
                event.indicators = *indicators;
                event.reported_by = *reporter;
                event.timestamp = now_or_env();

                Result<uint64_t> ack = Result<uint64_t>::failure(
                    Err::MalformedInput, "one of --journal or --url is required");
                if (!url->empty()) {
                    auto hp = parse_http_url(*url);
                    if (!hp) {
                        rc = fail(hp);
                        return;
                    }
                    ack = net::HttpExchangeClient{hp.value.host, hp.value.port}.publish(event);
                } else if (!journal->empty()) {
                    auto exchange = threatx::Exchange::open(*journal);
                    if (!exchange) {
                        rc = fail(exchange);
                        return;
                    }
                    ack = exchange.value.publish(event);
                }
                if (!ack) {
                    rc = fail(ack, ack.code == Err::MalformedInput ? kUsage : kDeny);
                    return;
                }
                std::cout << "cursor " << ack.value << '\n';
            });
    }
    {
        auto* cmd = tx->add_subcommand("pull", "pull events after a cursor");
        auto journal = std::make_shared<std::string>();
        auto url = std::make_shared<std::string>();
        auto cursor = std::make_shared<uint64_t>(0);
        cmd->add_option("--journal", *journal, "local journal file");
        cmd->add_option("--url", *url, "exchange URL (http://host:port)");
        cmd->add_option("--cursor", *cursor, "pull events after this cursor");
        cmd->callback([&rc, journal, url, cursor] {
            Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>> pulled =
                Result<std::pair<std::vector<threatx::ThreatEvent>, uint64_t>>::failure(
                    Err::MalformedInput, "one of --journal or --url is required");
            if (!url->empty()) {
                auto hp = parse_http_url(*url);
                if (!hp) {
                    rc = fail(hp);
                    return;
                }
                pulled = net::HttpExchangeClient{hp.value.host, hp.value.port}.pull_since(*cursor);
            } else if (!journal->empty()) {
                auto exchange = threatx::Exchange::open(*journal);
                if (!exchange) {
                    rc = fail(exchange);
                    return;
                }
                pulled = exchange.value.pull_since(*cursor);
            }
            if (!pulled) {
                rc = fail(pulled);
                return;
            }
            nlohmann::json events = nlohmann::json::array();
            for (const auto& event : pulled.value.first) {
                events.push_back(nlohmann::json::parse(threatx::event_to_json(event)));
            }
            nlohmann::json j = {{"cursor", pulled.value.second}, {"events", events}};
            std::cout << j.dump(2) << '\n';
        });
    }

    // ---------------- sim ----------------
    auto* sim_cmd = app.add_subcommand("sim", "ecosystem scenarios");
    sim_cmd->require_subcommand(1);
    {
        auto* cmd = sim_cmd->add_subcommand("run", "run a scenario and check its assertions");
        auto scenario = std::make_shared<std::string>();
        auto as_json = std::make_shared<bool>(false);
        auto out_path = std::make_shared<std::string>();
        auto sockets = std::make_shared<bool>(false);
        auto all_strict = std::make_shared<bool>(false);
        auto no_monitor = std::make_shared<bool>(false);
        auto no_exchange = std::make_shared<bool>(false);
        auto responder_down = std::make_shared<bool>(false);
        auto fail_closed = std::make_shared<bool>(false);
        auto detect_early = std::make_shared<bool>(false);
        auto expire_days = std::make_shared<int64_t>(0);
        auto state_dir = std::make_shared<std::string>();
        cmd->add_option("--scenario", *scenario, "honest | weakest-link | dormant-developer")
            ->required();
        cmd->add_flag("--json", *as_json, "JSON result on stdout");
        cmd->add_option("--out", *out_path, "also write the JSON result to this file");
        cmd->add_flag("--sockets", *sockets, "run services over loopback HTTP");
        cmd->add_flag("--all-strict", *all_strict, "make every store strict");
        cmd->add_flag("--no-monitor", *no_monitor, "disable the log monitor");
        cmd->add_flag("--no-exchange", *no_exchange, "disable the threat exchange");
        cmd->add_flag("--responder-down", *responder_down, "status responder is unreachable");
        cmd->add_flag("--fail-closed", *fail_closed, "verifier fails step 4 when offline");
        cmd->add_flag("--detect-early", *detect_early, "detection fires before trust promotion");
        cmd->add_option("--expire-days", *expire_days,
                        "honest flow: days the clock advances before each install");
        cmd->add_option("--state-dir", *state_dir, "directory for scenario journals");
        cmd->callback([&rc, scenario, as_json, out_path, sockets, all_strict, no_monitor,
                       no_exchange, responder_down, fail_closed, detect_early, expire_days,
                       state_dir] {
            sim::EcosystemConfig cfg;
            if (*scenario == "honest") {
                cfg = sim::honest_flow_config();
            } else if (*scenario == "weakest-link") {
                cfg = sim::weakest_link_config();
            } else if (*scenario == "dormant-developer") {
                cfg = sim::dormant_developer_config();
            } else {
                rc = fail("unknown scenario: " + *scenario);
                return;
            }
            cfg.use_sockets = *sockets;
            if (*all_strict) {
                for (auto& ica : cfg.icas) {
                    ica.strict = true;
                }
            }
            cfg.monitor_enabled = !*no_monitor;
            cfg.exchange_enabled = !*no_exchange;
            cfg.responder_up = !*responder_down;
            if (*fail_closed) {
                cfg.offline_policy = verifier::OfflinePolicy::FailClosed;
            }
            cfg.detect_before_promotion = *detect_early;
            cfg.days_between_installs = *expire_days;
            if (!state_dir->empty()) {
                cfg.state_dir = *state_dir;
            }
            auto result = sim::run_scenario(*scenario, cfg);
            if (!result) {
                rc = fail(result);
                return;
            }
            if (*as_json) {
                std::cout << result.value.to_json() << '\n';
            } else {
                std::cout << result.value.to_text();
            }
            if (!out_path->empty()) {
                std::ofstream out(*out_path, std::ios::trunc);
                out << result.value.to_json() << '\n';
            }
            rc = (!result.value.applicable || result.value.all_passed()) ? kOk : kDeny;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    return rc;
}
