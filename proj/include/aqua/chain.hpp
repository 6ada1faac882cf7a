// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aqua/ledger.hpp"

namespace aqua::chain {

using ContractId = Digest;

// Contract calls. Caller authentication, where the protocol needs it, is
// carried inside the call (operator signature, access ticket).
struct PostLRoot {
    Digest root_a;
    Digest root_b;
    crypto::Signature sig;
};

struct ReplaceEnc {
    crypto::PublicKey pk_pb;
    crypto::PublicKey pk_tee;
    Digest root_a;
    Digest root_b;
    crypto::Signature sig;     // enclave transition signature (new key)
    crypto::Signature op_sig;  // operator signature over the call message
};

struct SubmitCensTx {
    crypto::Ciphertext etx;
    ledger::AccessTicket ticket;
};

struct SubmitCensQry {
    crypto::Ciphertext equery;
    ledger::AccessTicket ticket;
};

struct ResolveCensTx {
    std::uint64_t index = 0;
    ledger::CensStatus status = ledger::CensStatus::kPending;
    crypto::Signature sig;
};

struct ResolveCensQry {
    std::uint64_t index = 0;
    ledger::CensStatus status = ledger::CensStatus::kPending;
    std::optional<crypto::Ciphertext> edata;
    crypto::Signature sig;
};

using Call = std::variant<PostLRoot, ReplaceEnc, SubmitCensTx, SubmitCensQry, ResolveCensTx,
                          ResolveCensQry>;

// Events: the asynchronous channel. Storage keeps only digests of
// censorship payloads; the full ciphertexts travel here.
struct RootPosted {
    Digest from;
    Digest to;
};
struct RootRejected {
    Digest attempted_from;
    Digest attempted_to;
};
struct EnclaveReplaced {
    crypto::PublicKey pk_pb;
    crypto::PublicKey pk_tee;
};
struct CensTxSubmitted {
    std::uint64_t index = 0;
    crypto::Ciphertext etx;
};
struct CensQrySubmitted {
    std::uint64_t index = 0;
    crypto::Ciphertext equery;
};
struct CensTxResolved {
    std::uint64_t index = 0;
    ledger::CensStatus status = ledger::CensStatus::kPending;
    crypto::Signature sig;
};
struct CensQryResolved {
    std::uint64_t index = 0;
    ledger::CensStatus status = ledger::CensStatus::kPending;
    std::optional<crypto::Ciphertext> edata;
    crypto::Signature sig;
};

struct Event {
    std::uint64_t height = 0;
    std::variant<RootPosted, RootRejected, EnclaveReplaced, CensTxSubmitted, CensQrySubmitted,
                 CensTxResolved, CensQryResolved>
        body;
};

struct CallResult {
    bool ok = false;
    std::string revert_reason;
    std::optional<std::uint64_t> request_index;  // for censorship submissions
};

// On-chain record of a censorship request. Only digests are stored.
struct CensRecord {
    bool is_tx = true;
    Digest request_hash;
    ledger::CensStatus status = ledger::CensStatus::kPending;
    std::optional<Digest> edata_hash;
};

struct ContractState {
    std::vector<crypto::PublicKey> pk_e_tee;  // append-only; back() is active
    std::vector<crypto::PublicKey> pk_e_pb;
    crypto::PublicKey pk_o;
    Digest lroot_pb{};  // genesis sentinel until the first accepted transition
    std::vector<CensRecord> cens_reqs;
};

// Single deterministic node: total-order application after a configurable
// confirmation delay, no forks.
class SimChain {
  public:
    explicit SimChain(std::uint64_t confirmation_delay = 0)
        : confirmation_delay_(confirmation_delay) {}

    std::uint64_t height() const { return height_; }
    void tick();
    void tick(std::uint64_t n);

    ContractId deploy(const crypto::PublicKey& pk_e_pb, const crypto::PublicKey& pk_e_tee,
                      const crypto::PublicKey& pk_o);

    // Enqueues a call; with zero confirmation delay it applies immediately.
    // Returns a handle for the eventual result.
    std::uint64_t submit(Call call);
    std::optional<CallResult> result_of(std::uint64_t handle) const;

    const ContractState& contract() const { return state_; }
    bool deployed() const { return deployed_; }
    ContractId id() const { return id_; }

    std::size_t event_count() const { return events_.size(); }
    std::vector<Event> events_since(std::size_t index) const;

    nlohmann::json dump() const;

  private:
    CallResult apply(const Call& call);

    std::uint64_t confirmation_delay_ = 0;
    std::uint64_t height_ = 0;
    bool deployed_ = false;
    ContractId id_{};
    std::uint64_t deploy_count_ = 0;
    ContractState state_;
    std::vector<Event> events_;

    struct Pending {
        std::uint64_t apply_at;
        Call call;
        std::uint64_t handle;
    };
    std::deque<Pending> queue_;
    std::vector<std::optional<CallResult>> results_;
};

}  // namespace aqua::chain
