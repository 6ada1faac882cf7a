// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/tee.hpp"

namespace aqua::tee {

namespace {

Bytes quote_message(const Digest& measurement, ByteView report_data, const Digest& platform_id) {
    ByteWriter w;
    w.put_u8(0x20);  // quote domain tag
    w.put_digest(measurement);
    w.put_var(report_data);
    w.put_digest(platform_id);
    return std::move(w).data();
}

const crypto::KeyPair& authority_keypair() {
    static const crypto::KeyPair kp = [] {
        Digest seed = crypto::sha256(to_bytes(std::string_view("simulated quoting authority")));
        return crypto::keypair_from_secret(crypto::Scheme::kTee, as_view(seed));
    }();
    return kp;
}

}  // namespace

const Digest& enclave_measurement() {
    static const Digest m = crypto::sha256(to_bytes(std::string_view("aquareum enclave code v1")));
    return m;
}

const crypto::PublicKey& authority_key() { return authority_keypair().pub; }

bool Quote::verify(const Digest& expected_measurement,
                   const crypto::PublicKey& expected_tee_key) const {
    if (measurement != expected_measurement) return false;
    if (report_data != expected_tee_key.bytes) return false;
    return crypto::verify(authority_key(), as_view(quote_message(measurement, as_view(report_data), platform_id)),
                          sig);
}

Platform::Platform(crypto::Rng& rng) : secret_(rng.bytes(32)) {
    id_ = crypto::sha256({to_bytes(std::string_view("platform id")), as_view(secret_)});
}

Quote Platform::quote(const Digest& measurement, ByteView report_data) const {
    Quote q;
    q.measurement = measurement;
    q.report_data = to_bytes(report_data);
    q.platform_id = id_;
    q.sig = crypto::sign(authority_keypair().secret,
                         as_view(quote_message(measurement, report_data, id_)));
    return q;
}

Digest Platform::sealing_key() const {
    return crypto::sha256({to_bytes(std::string_view("sealing key")), as_view(secret_)});
}

}  // namespace aqua::tee
