// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aqua/crypto.hpp"

namespace aqua::tee {

// Measurement of the enclave code identity and configuration. Clients pin
// this constant; the measurement-compare stub stands in for remote
// attestation infrastructure.
const Digest& enclave_measurement();

// Well-known verification key of the simulated quoting authority.
const crypto::PublicKey& authority_key();

struct Quote {
    Digest measurement;
    Bytes report_data;  // the enclave's tee public key
    Digest platform_id;
    crypto::Signature sig;

    bool verify(const Digest& expected_measurement, const crypto::PublicKey& expected_tee_key) const;
};

// One physical TEE platform. Sealed state binds to the platform identity;
// destroying the platform models a permanent hardware failure.
class Platform {
  public:
    explicit Platform(crypto::Rng& rng);

    const Digest& id() const { return id_; }
    Quote quote(const Digest& measurement, ByteView report_data) const;

    // Platform-bound sealing key. Only the enclave simulation calls this.
    Digest sealing_key() const;

  private:
    Bytes secret_;
    Digest id_;
};

}  // namespace aqua::tee
