// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/operator_node.hpp"

#include <algorithm>
#include <set>

namespace aqua::op {

using ledger::Block;
using ledger::CensStatus;
using ledger::Header;
using ledger::Transaction;

Operator::Operator(chain::SimChain& chain, const tee::Platform& platform, Config cfg,
                   std::uint64_t seed)
    : chain_(&chain), cfg_(cfg), rng_(seed), state_root_(mpt::empty_root()) {
    kp_ = crypto::keygen(crypto::Scheme::kPb, rng_);
    enclave_ = std::make_unique<enclave::Enclave>(platform, rng_.next_u64());
}

void Operator::init(std::uint64_t now_ms) {
    auto [pk_tee, pk_pb] = enclave_->init();
    contract_id_ = chain_->deploy(pk_pb, pk_tee, kp_.pub);
    anchor_ = htree::genesis();
    last_vm_flush_ms_ = now_ms;
    last_pb_flush_ms_ = now_ms;
    sealed_blob_ = enclave_->seal();
    seal_version_ += 1;
}

bool Operator::submit_tx(Bytes wire_tx, std::uint64_t now_ms) {
    if (censoring_) return false;  // pretended unavailability
    txs_u_.push_back(std::move(wire_tx));
    maybe_cycle(now_ms);
    return true;
}

void Operator::maybe_cycle(std::uint64_t now_ms) {
    if (txs_u_.empty() || !enclave_) return;
    if (txs_u_.size() >= cfg_.flush_tx_count ||
        now_ms - last_vm_flush_ms_ >= cfg_.flush_tx_timeout_ms)
        block_cycle(now_ms);
}

void Operator::flush_block(std::uint64_t now_ms) {
    if (!txs_u_.empty() && enclave_) block_cycle(now_ms);
}

std::vector<Bytes> Operator::touched_keys(const std::vector<Bytes>& wire_txs) const {
    std::set<ledger::AccountId> ids;
    for (const auto& wire : wire_txs) {
        try {
            Transaction tx = Transaction::decode(as_view(wire));
            for (const auto& id : vm::touched_accounts(tx)) ids.insert(id);
        } catch (const ParseError&) {
            // Undecodable wire txs reach the enclave and land in txs_er
            // without touching state.
        }
    }
    std::vector<Bytes> keys;
    keys.reserve(ids.size());
    for (const auto& id : ids) keys.push_back(to_bytes(as_view(id)));
    return keys;
}

void Operator::block_cycle(std::uint64_t now_ms) {
    mpt::Trie trie(state_store_, state_root_);
    mpt::PartialState ps_old = trie.extract(touched_keys(txs_u_));

    auto [template_proof, lroot_tmp] = tree_.proof_template(ledger::placeholder_leaf());

    enclave::ExecOutput out;
    try {
        out = enclave_->exec(txs_u_, ps_old, template_proof, lroot_tmp);
    } catch (const IntegrityError&) {
        // Cycle aborted; transactions stay cached for the next attempt.
        return;
    }

    // Absorb the new partial state: shared subtrees are referenced by
    // digest, so merging nodes and repointing the root is the full update.
    for (const auto& [digest, enc] : out.state.nodes) state_store_.put(digest, enc);
    state_root_ = out.state.root;

    Block block{out.header, std::move(out.executed), std::move(out.receipts)};
    append_block(block);
    if (tree_.commitment() != out.lroot_cur)
        throw IntegrityError("operator ledger diverged from enclave output");

    last_pair_a_ = out.lroot_pb.root;
    sig_last_ = out.sig;
    last_rejected_ = std::move(out.rejected);

    txs_u_.clear();
    blocks_since_sync_ += 1;
    last_vm_flush_ms_ = now_ms;

    sealed_blob_ = enclave_->seal();
    seal_version_ += 1;

    if (blocks_since_sync_ >= cfg_.sync_block_count ||
        now_ms - last_pb_flush_ms_ >= cfg_.sync_timeout_ms)
        sync(now_ms);
}

void Operator::append_block(const Block& block) {
    if (block.hdr.id != tree_.size() + 1) throw IntegrityError("block id out of sequence");
    blocks_.push_back(block.encode());
    tree_.add(block.hdr.hash());
    for (std::size_t i = 0; i < block.txs.size(); ++i)
        tx_index_[block.txs[i].hash()] = {block.hdr.id, i};
}

ledger::Block Operator::stored_block(std::uint64_t id) const {
    if (id == 0 || id > blocks_.size()) throw std::out_of_range("no such block");
    return Block::decode(as_view(blocks_[id - 1]));
}

void Operator::sync(std::uint64_t now_ms) {
    if (!enclave_) return;
    htree::Commitment cur = tree_.commitment();
    if (cur == anchor_) return;  // nothing to publish

    std::uint64_t handle = chain_->submit(chain::PostLRoot{last_pair_a_, cur.root, sig_last_});
    auto result = chain_->result_of(handle);
    if (result && !result->ok)
        throw IntegrityError("sync rejected: " + result->revert_reason);

    // Flush directly after posting, as the single root writer; with a
    // confirmation delay the contract catches up within finality.
    enclave_->flush();
    flush_count_ += 1;
    synced_pair_a_ = last_pair_a_;
    sig_synced_ = sig_last_;
    anchor_ = cur;
    blocks_since_sync_ = 0;
    last_pb_flush_ms_ = now_ms;
    sealed_blob_ = enclave_->seal();
    seal_version_ += 1;
    resolve_cens_txs();
}

void Operator::on_tick(std::uint64_t now_ms) {
    if (!deadbeat_) drain_events();
    if (!enclave_) return;
    maybe_cycle(now_ms);
    if (blocks_since_sync_ > 0 && now_ms - last_pb_flush_ms_ >= cfg_.sync_timeout_ms)
        sync(now_ms);
}

void Operator::drain_events() {
    auto events = chain_->events_since(event_cursor_);
    event_cursor_ += events.size();
    if (!enclave_) return;
    for (const auto& event : events) {
        if (const auto* tx = std::get_if<chain::CensTxSubmitted>(&event.body))
            handle_cens_tx_event(tx->etx, tx->index);
        else if (const auto* qry = std::get_if<chain::CensQrySubmitted>(&event.body))
            handle_cens_qry_event(qry->equery, qry->index);
    }
}

void Operator::handle_cens_tx_event(const crypto::Ciphertext& etx, std::uint64_t index) {
    Bytes wire;
    try {
        wire = enclave_->decrypt_request(etx);
    } catch (const IntegrityError&) {
        // Undecryptable: resolve immediately; the enclave re-derives the
        // parsing failure and signs it.
        auto out = enclave_->sign_tx(etx, {}, {}, {});
        chain_->submit(chain::ResolveCensTx{index, out.status, out.sig});
        return;
    }

    Digest tx_hash{};
    bool decodable = false;
    try {
        tx_hash = Transaction::decode(as_view(wire)).hash();
        decodable = true;
    } catch (const ParseError&) {
    }

    if (decodable) {
        auto it = tx_index_.find(tx_hash);
        if (it != tx_index_.end() && it->second.first <= anchor_.version) {
            // Already executed and anchored: resolve without re-execution.
            resolve_one_cens_tx(tx_hash, etx, index);
            return;
        }
        if (it == tx_index_.end()) txs_u_.push_back(wire);  // bypasses censoring
    } else {
        // Garbage plaintext: the enclave will sign PARSING_ERROR.
        auto out = enclave_->sign_tx(etx, {}, {}, {});
        chain_->submit(chain::ResolveCensTx{index, out.status, out.sig});
        return;
    }
    cens_txs_.push_back({tx_hash, etx, index});
}

void Operator::resolve_one_cens_tx(const Digest& tx_hash, const crypto::Ciphertext& etx,
                                   std::uint64_t index) {
    auto it = tx_index_.find(tx_hash);
    enclave::SignTxOutput out;
    if (it == tx_index_.end()) {
        // Never included: parse/signature failures resolve themselves; a
        // valid tx makes the enclave refuse, keeping the request pending.
        out = enclave_->sign_tx(etx, {}, {}, {});
    } else {
        auto [block_id, pos] = it->second;
        Block block = stored_block(block_id);
        std::vector<Bytes> tx_elements;
        tx_elements.reserve(block.txs.size());
        for (const auto& tx : block.txs) tx_elements.push_back(tx.encode());
        merkle::Proof tx_proof = merkle::prove(pos, tx_elements);
        htree::MembershipProof hdr_proof = tree_.mem_proof(block.hdr.id - 1, anchor_);
        out = enclave_->sign_tx(etx, tx_proof, block.hdr, hdr_proof);
    }
    chain_->submit(chain::ResolveCensTx{index, out.status, out.sig});
}

void Operator::resolve_cens_txs() {
    std::vector<CensTxEntry> retained;
    for (const auto& entry : cens_txs_) {
        try {
            auto it = tx_index_.find(entry.tx_hash);
            if (it != tx_index_.end() && it->second.first > anchor_.version) {
                retained.push_back(entry);  // block not anchored yet
                continue;
            }
            resolve_one_cens_tx(entry.tx_hash, entry.etx, entry.index);
        } catch (const IntegrityError&) {
            retained.push_back(entry);  // enclave refused; retry next sync
        }
    }
    cens_txs_ = std::move(retained);
}

void Operator::handle_cens_qry_event(const crypto::Ciphertext& equery, std::uint64_t index) {
    std::optional<ledger::Query> query;
    try {
        query = ledger::Query::decode(as_view(enclave_->decrypt_request(equery)));
    } catch (const std::exception&) {
    }

    enclave::SignQryOutput out;
    if (!query) {
        // Unknown shape: the enclave re-derives the parsing failure.
        out = enclave_->sign_qry_tx(equery, {}, {});
    } else if (query->type == ledger::QueryType::kReadTx) {
        Block block;
        htree::MembershipProof hdr_proof;
        if (query->block_id >= 1 && query->block_id <= anchor_.version) {
            block = stored_block(query->block_id);
            hdr_proof = tree_.mem_proof(block.hdr.id - 1, anchor_);
        }
        out = enclave_->sign_qry_tx(equery, block, hdr_proof);
    } else {
        mpt::Trie trie(state_store_, state_root_);
        std::optional<ledger::AccountState> account;
        auto raw = trie.get(as_view(query->id));
        if (raw) account = ledger::AccountState::decode(as_view(*raw));
        mpt::Proof proof = trie.prove(as_view(query->id));
        out = enclave_->sign_qry_as(equery, account, proof);
    }
    chain_->submit(chain::ResolveCensQry{index, out.status, out.edata, out.sig});
}

std::optional<ReceiptBundle> Operator::get_receipt(const Digest& tx_hash) const {
    auto it = tx_index_.find(tx_hash);
    if (it == tx_index_.end()) return std::nullopt;
    auto [block_id, pos] = it->second;
    Block block = stored_block(block_id);

    ReceiptBundle bundle;
    bundle.receipt = block.rcps[pos];
    std::vector<Bytes> rcp_elements;
    rcp_elements.reserve(block.rcps.size());
    for (const auto& r : block.rcps) rcp_elements.push_back(r.encode());
    bundle.receipt_proof = merkle::prove(pos, rcp_elements);
    bundle.header = block.hdr;

    bool synced = block_id <= anchor_.version;
    if (synced) {
        bundle.lroot_cur = anchor_;
        bundle.header_proof = tree_.mem_proof(block.hdr.id - 1, anchor_);
        bundle.pair_a = synced_pair_a_;
        bundle.sig = sig_synced_;
    } else {
        htree::Commitment cur = tree_.commitment();
        bundle.lroot_cur = cur;
        bundle.header_proof = tree_.mem_proof(block.hdr.id - 1, cur);
        bundle.inc_proof = tree_.inc_proof(anchor_, cur);
        bundle.pair_a = last_pair_a_;
        bundle.sig = sig_last_;
    }
    return bundle;
}

std::optional<ledger::Block> Operator::get_block(std::uint64_t id) const {
    if (id == 0 || id > blocks_.size()) return std::nullopt;
    return stored_block(id);
}

std::optional<ledger::AccountState> Operator::get_account(const ledger::AccountId& id) const {
    mpt::Trie trie(const_cast<mpt::MemoryNodeStore&>(state_store_), state_root_);
    auto raw = trie.get(as_view(id));
    if (!raw) return std::nullopt;
    return ledger::AccountState::decode(as_view(*raw));
}

ledger::AccessTicket Operator::register_client(const crypto::PublicKey& client_pub) {
    return enclave_->issue_ticket(client_pub, chain_->height() + cfg_.ticket_lifetime);
}

tee::Quote Operator::enclave_quote() const {
    if (!enclave_) throw IntegrityError("enclave unavailable");
    return enclave_->quote();
}

void Operator::kill_enclave() { enclave_.reset(); }

void Operator::corrupt_stored_block(std::uint64_t id, std::size_t byte_index) {
    if (id == 0 || id > blocks_.size()) throw std::out_of_range("no such block");
    Bytes& enc = blocks_[id - 1];
    enc[byte_index % enc.size()] ^= 0x01;
}

Digest Operator::replay_block_local(const ledger::Block& block) {
    std::vector<Bytes> wire;
    wire.reserve(block.txs.size());
    for (const auto& tx : block.txs) wire.push_back(tx.encode());

    mpt::Trie trie(state_store_, state_root_);
    mpt::PartialState ps = trie.extract(touched_keys(wire));
    vm::Output out = vm::run(wire, ps, cfg_.step_budget);

    Header header;
    header.id = tree_.size() + 1;
    header.txs_root = ledger::txs_root(out.executed);
    header.rcp_root = ledger::rcps_root(out.receipts);
    header.st_root = out.state.root;
    if (header != block.hdr)
        throw IntegrityError("stored block does not replay to its header");

    for (const auto& [digest, enc] : out.state.nodes) state_store_.put(digest, enc);
    state_root_ = out.state.root;
    append_block(block);
    return tree_.commitment().root;
}

void Operator::restore_enclave(const tee::Platform& platform, std::uint64_t now_ms) {
    auto fresh = std::make_unique<enclave::Enclave>(platform, rng_.next_u64());
    try {
        fresh->unseal(as_view(sealed_blob_));
        // Same platform identity: a plain restart, no key rotation.
        enclave_ = std::move(fresh);
        return;
    } catch (const IntegrityError&) {
        // Foreign platform: the sealed file is unreadable, replay instead.
    }

    std::uint64_t synced = anchor_.version;
    std::optional<Header> hdr_sync;
    if (synced >= 1) hdr_sync = stored_block(synced).hdr;

    std::vector<Block> unsynced;
    for (std::uint64_t id = synced + 1; id <= blocks_.size(); ++id) {
        Block block = stored_block(id);  // ParseError on torn storage
        if (block.hdr.id != id || !block.self_consistent())
            throw IntegrityError("unsynced block failed integrity check");
        unsynced.push_back(std::move(block));
    }
    // Roll the ledger and state back to the anchored version.
    tree_.truncate(synced);
    blocks_.resize(synced);
    for (auto it = tx_index_.begin(); it != tx_index_.end();) {
        if (it->second.first > synced)
            it = tx_index_.erase(it);
        else
            ++it;
    }
    state_root_ = hdr_sync ? hdr_sync->st_root : mpt::empty_root();
    blocks_since_sync_ = 0;

    enclave::HostCallbacks host;
    host.next_inc_proof = [this] { return tree_.proof_template(ledger::placeholder_leaf()); };
    host.get_partial_state = [this](const Block& block) {
        std::vector<Bytes> wire;
        for (const auto& tx : block.txs) wire.push_back(tx.encode());
        mpt::Trie trie(state_store_, state_root_);
        return trie.extract(touched_keys(wire));
    };
    host.replay_block = [this](const Block& block) { return replay_block_local(block); };

    enclave::ReinitOutput out = fresh->reinit(anchor_, unsynced, hdr_sync, host);
    if (out.lroot_cur != tree_.commitment())
        throw IntegrityError("replay finished at a different ledger root");

    crypto::Signature op_sig = crypto::sign(
        kp_.secret, as_view(ledger::replace_enc_message(out.pk_pb, out.pk_tee, out.lroot_pb.root,
                                                        out.lroot_cur.root, out.sig)));
    std::uint64_t handle = chain_->submit(chain::ReplaceEnc{
        out.pk_pb, out.pk_tee, out.lroot_pb.root, out.lroot_cur.root, out.sig, op_sig});
    auto result = chain_->result_of(handle);
    while (!result) {
        chain_->tick();
        result = chain_->result_of(handle);
    }
    if (!result->ok) throw IntegrityError("enclave replacement rejected: " + result->revert_reason);

    enclave_ = std::move(fresh);
    enclave_->flush();
    flush_count_ += 1;
    last_pair_a_ = out.lroot_pb.root;
    sig_last_ = out.sig;
    synced_pair_a_ = out.lroot_pb.root;
    sig_synced_ = out.sig;
    anchor_ = tree_.commitment();
    last_pb_flush_ms_ = now_ms;
    sealed_blob_ = enclave_->seal();
    seal_version_ += 1;
}

bool Operator::audit_coherence() const {
    // Rebuild the history tree from stored headers.
    htree::Tree rebuilt;
    for (std::uint64_t id = 1; id <= blocks_.size(); ++id)
        rebuilt.add(stored_block(id).hdr.hash());
    if (rebuilt.commitment() != tree_.commitment()) return false;

    // Replay every block through the VM from genesis.
    mpt::MemoryNodeStore store;
    Digest root = mpt::empty_root();
    for (std::uint64_t id = 1; id <= blocks_.size(); ++id) {
        Block block = stored_block(id);
        std::vector<Bytes> wire;
        for (const auto& tx : block.txs) wire.push_back(tx.encode());
        mpt::Trie trie(store, root);
        mpt::PartialState ps = trie.extract(touched_keys(wire));
        vm::Output out = vm::run(wire, ps, cfg_.step_budget);
        if (!out.rejected.empty()) return false;
        if (ledger::txs_root(out.executed) != block.hdr.txs_root) return false;
        if (ledger::rcps_root(out.receipts) != block.hdr.rcp_root) return false;
        if (out.state.root != block.hdr.st_root) return false;
        for (const auto& [digest, enc] : out.state.nodes) store.put(digest, enc);
        root = out.state.root;
    }
    return root == state_root_;
}

}  // namespace aqua::op
