// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aqua/operator_node.hpp"

namespace aqua::client {

inline constexpr std::size_t kMaxPayloadSize = 64 * 1024;

struct VerifyResult {
    bool ok = false;
    // True once the bundle chains to the on-chain root directly; false for
    // receipts still riding on an unsynced "promise" extension.
    bool anchored = false;
};

enum class ResolutionPhase { kPending, kResolved };

struct Resolution {
    ResolutionPhase phase = ResolutionPhase::kPending;
    ledger::CensStatus status = ledger::CensStatus::kPending;
    Bytes data;  // decrypted payload for OK resolutions
};

class Client {
  public:
    Client(chain::SimChain& chain, op::Operator& op, std::uint64_t seed);

    // Registration: obtain an access ticket, pin the contract's enclave
    // keys, and attest.
    void enroll();
    bool attest() const;
    // Re-pins keys after an EnclaveReplaced event.
    void refresh_keys();

    const crypto::PublicKey& public_key() const { return kp_.pub; }
    ledger::AccountId id() const { return ledger::account_id(kp_.pub); }

    ledger::Transaction make_transfer(const ledger::AccountId& to, std::uint64_t amount);
    ledger::Transaction make_deploy(const Bytes& code, std::uint64_t amount = 0);
    ledger::Transaction make_call(const ledger::AccountId& contract, const Bytes& calldata,
                                  std::uint64_t amount = 0,
                                  const std::vector<ledger::AccountId>& declared = {});

    // Signs and delivers to the operator; false when the operator refuses
    // or drops the submission (Π_CT territory).
    bool submit(const ledger::Transaction& tx, std::uint64_t now_ms);

    // Full receipt verification against the fresh on-chain root.
    VerifyResult verify_receipt(const op::ReceiptBundle& bundle,
                                const ledger::Transaction& tx) const;

    // Censorship escalation via the contract; returns the request index.
    std::uint64_t escalate_tx(const ledger::Transaction& tx);
    std::uint64_t escalate_query(const ledger::Query& query);
    ledger::Query make_tx_query(const Digest& tx_hash, std::uint64_t block_id) const;
    ledger::Query make_account_query(const ledger::AccountId& id) const;

    Resolution check_resolution(std::uint64_t index) const;

    // Exportable pending-request evidence for out-of-band disputes.
    nlohmann::json censorship_evidence(std::uint64_t index) const;

    std::uint64_t next_nonce() const { return next_nonce_; }

  private:
    ledger::Transaction base_tx();
    crypto::Ciphertext encrypt_for_enclave(ByteView plaintext);

    chain::SimChain* chain_;
    op::Operator* op_;
    crypto::Rng rng_;
    crypto::KeyPair kp_;
    ledger::AccessTicket ticket_;
    crypto::PublicKey pinned_pb_;
    crypto::PublicKey pinned_tee_;
    Digest expected_measurement_;
    std::uint64_t next_nonce_ = 0;
    std::map<std::uint64_t, Bytes> escalated_;  // request index -> ciphertext encoding
};

}  // namespace aqua::client
