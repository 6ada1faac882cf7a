// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>

#include "aqua/chain.hpp"
#include "aqua/enclave.hpp"
#include "aqua/history_tree.hpp"
#include "aqua/ledger.hpp"
#include "aqua/mpt.hpp"

namespace aqua::op {

struct Config {
    std::size_t flush_tx_count = 100;        // txs per block before a cycle runs
    std::uint64_t flush_tx_timeout_ms = 1000;
    std::size_t sync_block_count = 5;        // blocks per chain sync
    std::uint64_t sync_timeout_ms = 10000;
    std::uint64_t ticket_lifetime = 100000;  // chain heights
    std::uint64_t step_budget = vm::kDefaultStepBudget;
};

// What a client needs to verify one transaction's execution against the
// public anchor: receipt + Merkle proof, header + membership proof, the
// signed version transition, and (for unsynced blocks) the incremental
// proof from the anchored root.
struct ReceiptBundle {
    ledger::Receipt receipt;
    merkle::Proof receipt_proof;
    ledger::Header header;
    htree::MembershipProof header_proof;
    Digest pair_a{};                 // first element of the signed pair
    htree::Commitment lroot_cur;     // second element, with its version
    std::optional<htree::IncrementalProof> inc_proof;  // absent once synced
    crypto::Signature sig;
};

class Operator {
  public:
    Operator(chain::SimChain& chain, const tee::Platform& platform, Config cfg, std::uint64_t seed);

    // Initializes the enclave, deploys the contract, attests.
    void init(std::uint64_t now_ms);
    chain::ContractId contract_id() const { return contract_id_; }

    // --- client surface -------------------------------------------------
    bool submit_tx(Bytes wire_tx, std::uint64_t now_ms);
    std::optional<ReceiptBundle> get_receipt(const Digest& tx_hash) const;
    std::optional<ledger::Block> get_block(std::uint64_t id) const;
    std::optional<ledger::AccountState> get_account(const ledger::AccountId& id) const;
    ledger::AccessTicket register_client(const crypto::PublicKey& client_pub);
    tee::Quote enclave_quote() const;

    // --- event loop -----------------------------------------------------
    // Runs flush/sync timeouts and drains chain events.
    void on_tick(std::uint64_t now_ms);
    void sync(std::uint64_t now_ms);
    // Runs a block cycle now if transactions are waiting.
    void flush_block(std::uint64_t now_ms);

    // --- failure handling -----------------------------------------------
    void kill_enclave();
    bool enclave_alive() const { return enclave_ != nullptr; }
    // Brings up the enclave on a platform: resumes from the sealed file
    // when the identity matches, otherwise replays per the re-init
    // protocol and rotates keys on the contract.
    void restore_enclave(const tee::Platform& platform, std::uint64_t now_ms);

    // --- simulation hooks -----------------------------------------------
    void set_censoring(bool on) { censoring_ = on; }      // drop client txs
    void set_deadbeat(bool on) { deadbeat_ = on; }        // ignore chain events
    void corrupt_stored_block(std::uint64_t id, std::size_t byte_index);

    // --- introspection ---------------------------------------------------
    htree::Commitment lroot_cur() const { return tree_.commitment(); }
    htree::Commitment anchor() const { return anchor_; }
    Digest state_root() const { return state_root_; }
    std::uint64_t block_count() const { return tree_.size(); }
    std::size_t pending_tx_count() const { return txs_u_.size(); }
    std::size_t pending_cens_tx_count() const { return cens_txs_.size(); }
    const std::vector<Bytes>& last_rejected() const { return last_rejected_; }
    std::uint64_t enclave_flush_count() const { return flush_count_; }
    const crypto::PublicKey& public_key() const { return kp_.pub; }
    // Rebuilds the history tree from stored headers and replays every block
    // through the VM; true when both reproduce the live roots.
    bool audit_coherence() const;

  private:
    void block_cycle(std::uint64_t now_ms);
    void maybe_cycle(std::uint64_t now_ms);
    void drain_events();
    void handle_cens_tx_event(const crypto::Ciphertext& etx, std::uint64_t index);
    void handle_cens_qry_event(const crypto::Ciphertext& equery, std::uint64_t index);
    void resolve_cens_txs();
    void resolve_one_cens_tx(const Digest& tx_hash, const crypto::Ciphertext& etx,
                             std::uint64_t index);
    std::vector<Bytes> touched_keys(const std::vector<Bytes>& wire_txs) const;
    ledger::Block stored_block(std::uint64_t id) const;  // throws on bad id
    void append_block(const ledger::Block& block);
    Digest replay_block_local(const ledger::Block& block);

    chain::SimChain* chain_;
    Config cfg_;
    crypto::Rng rng_;
    crypto::KeyPair kp_;  // operator identity under the pb scheme
    std::unique_ptr<enclave::Enclave> enclave_;
    chain::ContractId contract_id_{};

    // Ledger L: block encodings (position = header id - 1) plus the
    // history tree over header hashes.
    std::vector<Bytes> blocks_;
    htree::Tree tree_;
    std::map<Digest, std::pair<std::uint64_t, std::size_t>> tx_index_;  // hash -> (block id, pos)

    // Full VM state.
    mpt::MemoryNodeStore state_store_;
    Digest state_root_;

    // Sync bookkeeping.
    htree::Commitment anchor_;       // last version accepted by the contract
    Digest synced_pair_a_{};         // first element of the accepted pair
    crypto::Signature sig_synced_;   // signature of the accepted pair
    Digest last_pair_a_{};           // first element of the latest signed pair
    crypto::Signature sig_last_;     // latest transition signature
    std::size_t blocks_since_sync_ = 0;
    std::uint64_t last_vm_flush_ms_ = 0;
    std::uint64_t last_pb_flush_ms_ = 0;

    // Unprocessed transaction cache and censorship bookkeeping.
    std::vector<Bytes> txs_u_;
    std::vector<Bytes> last_rejected_;
    struct CensTxEntry {
        Digest tx_hash;
        crypto::Ciphertext etx;
        std::uint64_t index;
    };
    std::vector<CensTxEntry> cens_txs_;
    std::size_t event_cursor_ = 0;

    Bytes sealed_blob_;
    std::uint64_t seal_version_ = 0;
    std::uint64_t flush_count_ = 0;
    bool censoring_ = false;
    bool deadbeat_ = false;
};

}  // namespace aqua::op
