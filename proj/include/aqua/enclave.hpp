// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>

#include "aqua/history_tree.hpp"
#include "aqua/ledger.hpp"
#include "aqua/mpt.hpp"
#include "aqua/tee.hpp"
#include "aqua/vm.hpp"

namespace aqua::enclave {

struct ExecOutput {
    htree::Commitment lroot_pb;
    htree::Commitment lroot_cur;
    mpt::PartialState state;
    ledger::Header header;
    std::vector<ledger::Transaction> executed;
    std::vector<ledger::Receipt> receipts;
    std::vector<Bytes> rejected;
    crypto::Signature sig;  // over the version transition pair
};

struct SignTxOutput {
    crypto::Signature sig;
    ledger::CensStatus status;
};

struct SignQryOutput {
    crypto::Signature sig;
    ledger::CensStatus status;
    std::optional<crypto::Ciphertext> edata;
};

struct ReinitOutput {
    htree::Commitment lroot_pb;
    htree::Commitment lroot_cur;
    crypto::Signature sig;
    crypto::PublicKey pk_pb;
    crypto::PublicKey pk_tee;
};

// Untrusted-host callbacks used during replay after a platform failure.
// Everything they return is verified before it takes effect.
struct HostCallbacks {
    std::function<std::pair<htree::IncrementalProof, htree::Commitment>()> next_inc_proof;
    std::function<mpt::PartialState(const ledger::Block&)> get_partial_state;
    // Host replays the block on its own state and reports its resulting
    // ledger root.
    std::function<Digest(const ledger::Block&)> replay_block;
};

// The trusted state machine. In this simulation the "enclave boundary" is
// the class interface: secrets live in private members, every output is a
// serializable value, and all operations are strictly serialized by the
// caller.
class Enclave {
  public:
    Enclave(const tee::Platform& platform, std::uint64_t entropy_seed);

    // Generates both keypairs and returns (PK_tee, PK_pb). Fails on a
    // second call.
    std::pair<crypto::PublicKey, crypto::PublicKey> init();

    tee::Quote quote() const;

    // Verifies the partial state against the last header, runs the block,
    // extends the ledger through the proof template, and signs the version
    // transition. On any precondition failure the enclave is unchanged.
    ExecOutput exec(const std::vector<Bytes>& wire_txs, const mpt::PartialState& ps_old,
                    const htree::IncrementalProof& template_proof,
                    const htree::Commitment& lroot_tmp);

    // Shift the anchored root to the current one after an accepted sync.
    void flush();

    Bytes decrypt_request(const crypto::Ciphertext& edata);

    // Censored-transaction resolution. Proof failures for a well-formed,
    // well-signed transaction throw; nothing is signed in that case.
    SignTxOutput sign_tx(const crypto::Ciphertext& etx, const merkle::Proof& tx_proof,
                         const ledger::Header& hdr, const htree::MembershipProof& hdr_proof);

    SignQryOutput sign_qry_tx(const crypto::Ciphertext& equery, const ledger::Block& blk,
                              const htree::MembershipProof& hdr_proof);

    SignQryOutput sign_qry_as(const crypto::Ciphertext& equery,
                              const std::optional<ledger::AccountState>& account,
                              const mpt::Proof& proof);

    ledger::AccessTicket issue_ticket(const crypto::PublicKey& client,
                                      std::uint64_t expiry_height);

    // Sealed-state file: "AQSE" magic, version counter, AEAD blob bound to
    // the platform identity.
    Bytes seal();
    // Returns the sealed version counter so the caller can flag rollback.
    std::uint64_t unseal(ByteView blob);

    // Replays unsynced blocks on a fresh platform after a permanent
    // failure, driving the host for templates, partial states, and its own
    // replay. Aborts without signing on any divergence.
    ReinitOutput reinit(const htree::Commitment& lroot_old,
                        const std::vector<ledger::Block>& prev_blks,
                        const std::optional<ledger::Header>& hdr_sync,
                        const HostCallbacks& host);

    bool initialized() const { return initialized_; }
    const crypto::PublicKey& pb_key() const { return kp_pb_.pub; }
    const crypto::PublicKey& tee_key() const { return kp_tee_.pub; }
    htree::Commitment lroot_pb() const { return lroot_pb_; }
    htree::Commitment lroot_cur() const { return lroot_cur_; }
    std::optional<ledger::Header> last_header() const { return hdr_last_; }

  private:
    Digest expected_state_root() const;
    ledger::Query parse_query(const crypto::Ciphertext& equery, bool& ok) const;
    crypto::Signature sign_pb(ByteView message) const;

    const tee::Platform* platform_;
    crypto::Rng rng_;
    bool initialized_ = false;
    crypto::KeyPair kp_pb_;
    crypto::KeyPair kp_tee_;
    std::optional<ledger::Header> hdr_last_;
    htree::Commitment lroot_pb_;
    htree::Commitment lroot_cur_;
    std::uint64_t id_cur_ = 1;
    std::uint64_t seal_counter_ = 0;
    std::uint64_t step_budget_ = vm::kDefaultStepBudget;
};

}  // namespace aqua::enclave
