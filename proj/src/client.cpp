// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/client.hpp"

namespace aqua::client {

using ledger::CensStatus;

Client::Client(chain::SimChain& chain, op::Operator& op, std::uint64_t seed)
    : chain_(&chain), op_(&op), rng_(seed) {
    kp_ = crypto::keygen(crypto::Scheme::kPb, rng_);
    expected_measurement_ = tee::enclave_measurement();
}

void Client::enroll() {
    ticket_ = op_->register_client(kp_.pub);
    refresh_keys();
}

void Client::refresh_keys() {
    const auto& contract = chain_->contract();
    if (contract.pk_e_pb.empty()) throw IntegrityError("contract not deployed");
    pinned_pb_ = contract.pk_e_pb.back();
    pinned_tee_ = contract.pk_e_tee.back();
}

bool Client::attest() const {
    try {
        tee::Quote quote = op_->enclave_quote();
        return quote.verify(expected_measurement_, pinned_tee_);
    } catch (const std::exception&) {
        return false;
    }
}

ledger::Transaction Client::base_tx() {
    ledger::Transaction tx;
    tx.sender = kp_.pub;
    tx.nonce = next_nonce_;
    return tx;
}

ledger::Transaction Client::make_transfer(const ledger::AccountId& to, std::uint64_t amount) {
    ledger::Transaction tx = base_tx();
    tx.kind = ledger::TxKind::kTransfer;
    tx.recipient = to;
    tx.amount = amount;
    return ledger::sign_tx(std::move(tx), kp_.secret);
}

ledger::Transaction Client::make_deploy(const Bytes& code, std::uint64_t amount) {
    ledger::Transaction tx = base_tx();
    tx.kind = ledger::TxKind::kDeploy;
    tx.amount = amount;
    tx.payload = code;
    return ledger::sign_tx(std::move(tx), kp_.secret);
}

ledger::Transaction Client::make_call(const ledger::AccountId& contract, const Bytes& calldata,
                                      std::uint64_t amount,
                                      const std::vector<ledger::AccountId>& declared) {
    ledger::Transaction tx = base_tx();
    tx.kind = ledger::TxKind::kCall;
    tx.recipient = contract;
    tx.amount = amount;
    ledger::CallPayload payload;
    payload.declared = declared;
    payload.data = calldata;
    tx.payload = payload.encode();
    return ledger::sign_tx(std::move(tx), kp_.secret);
}

bool Client::submit(const ledger::Transaction& tx, std::uint64_t now_ms) {
    if (tx.payload.size() > kMaxPayloadSize) throw std::invalid_argument("payload too large");
    bool accepted = op_->submit_tx(tx.encode(), now_ms);
    if (accepted && tx.nonce == next_nonce_) next_nonce_ += 1;
    return accepted;
}

VerifyResult Client::verify_receipt(const op::ReceiptBundle& bundle,
                                    const ledger::Transaction& tx) const {
    VerifyResult result;
    Digest onchain_root = chain_->contract().lroot_pb;

    // The enclave's signature over the claimed version transition pair.
    if (!crypto::verify(pinned_pb_,
                        as_view(ledger::vtp_message(bundle.pair_a, bundle.lroot_cur.root)),
                        bundle.sig))
        return result;

    if (bundle.lroot_cur.root == onchain_root) {
        // The target version is anchored; no incremental proof needed.
        if (bundle.inc_proof) return result;
        result.anchored = true;
    } else if (bundle.pair_a == onchain_root) {
        // Promise extension: the anchored root must extend into the
        // claimed current root.
        if (!bundle.inc_proof) return result;
        htree::Commitment from{bundle.inc_proof->old_version, bundle.pair_a};
        if (!bundle.inc_proof->verify(from, bundle.lroot_cur)) return result;
    } else {
        return result;  // stale or equivocating anchor
    }

    const ledger::Header& hdr = bundle.header;
    if (hdr.id == 0 || hdr.id > bundle.lroot_cur.version) return result;
    if (!bundle.header_proof.verify(hdr.id - 1, hdr.hash(), bundle.lroot_cur)) return result;

    if (!merkle::verify(bundle.receipt_proof, as_view(bundle.receipt.encode()), hdr.rcp_root))
        return result;
    if (bundle.receipt.tx_hash != tx.hash()) return result;

    result.ok = true;
    return result;
}

crypto::Ciphertext Client::encrypt_for_enclave(ByteView plaintext) {
    return crypto::encrypt(pinned_pb_, plaintext, rng_);
}

std::uint64_t Client::escalate_tx(const ledger::Transaction& tx) {
    crypto::Ciphertext etx = encrypt_for_enclave(as_view(tx.encode()));
    std::uint64_t handle = chain_->submit(chain::SubmitCensTx{etx, ticket_});
    auto result = chain_->result_of(handle);
    while (!result) {
        chain_->tick();
        result = chain_->result_of(handle);
    }
    if (!result->ok) throw IntegrityError("censorship submission reverted: " + result->revert_reason);
    escalated_[*result->request_index] = etx.encode();
    return *result->request_index;
}

ledger::Query Client::make_tx_query(const Digest& tx_hash, std::uint64_t block_id) const {
    ledger::Query q;
    q.type = ledger::QueryType::kReadTx;
    q.id = tx_hash;
    q.block_id = block_id;
    q.reply_key = kp_.pub;
    return q;
}

ledger::Query Client::make_account_query(const ledger::AccountId& id) const {
    ledger::Query q;
    q.type = ledger::QueryType::kReadAs;
    q.id = id;
    q.block_id = 0;
    q.reply_key = kp_.pub;
    return q;
}

std::uint64_t Client::escalate_query(const ledger::Query& query) {
    crypto::Ciphertext equery = encrypt_for_enclave(as_view(query.encode()));
    std::uint64_t handle = chain_->submit(chain::SubmitCensQry{equery, ticket_});
    auto result = chain_->result_of(handle);
    while (!result) {
        chain_->tick();
        result = chain_->result_of(handle);
    }
    if (!result->ok) throw IntegrityError("censorship submission reverted: " + result->revert_reason);
    escalated_[*result->request_index] = equery.encode();
    return *result->request_index;
}

Resolution Client::check_resolution(std::uint64_t index) const {
    Resolution res;
    const auto& contract = chain_->contract();
    if (index >= contract.cens_reqs.size()) throw std::out_of_range("no such request");
    const chain::CensRecord& record = contract.cens_reqs[index];
    if (record.status == CensStatus::kPending) return res;

    // Re-verify the resolution event's enclave signature rather than
    // trusting the recorded status.
    auto it = escalated_.find(index);
    Digest request_hash = it != escalated_.end() ? crypto::sha256(as_view(it->second))
                                                 : record.request_hash;

    for (const auto& event : chain_->events_since(0)) {
        if (const auto* r = std::get_if<chain::CensTxResolved>(&event.body)) {
            if (r->index != index) continue;
            bool sig_ok = false;
            for (const auto& pk : contract.pk_e_pb)
                if (crypto::verify(pk, as_view(ledger::cens_tx_message(request_hash, r->status)),
                                   r->sig))
                    sig_ok = true;
            if (!sig_ok) throw IntegrityError("resolution signature does not verify");
            res.phase = ResolutionPhase::kResolved;
            res.status = r->status;
            return res;
        }
        if (const auto* r = std::get_if<chain::CensQryResolved>(&event.body)) {
            if (r->index != index) continue;
            Digest edata_hash = r->edata ? crypto::sha256(as_view(r->edata->encode()))
                                         : ledger::absent_payload_hash();
            bool sig_ok = false;
            for (const auto& pk : contract.pk_e_pb)
                if (crypto::verify(
                        pk, as_view(ledger::cens_qry_message(request_hash, r->status, edata_hash)),
                        r->sig))
                    sig_ok = true;
            if (!sig_ok) throw IntegrityError("resolution signature does not verify");
            res.phase = ResolutionPhase::kResolved;
            res.status = r->status;
            if (r->status == CensStatus::kOk) {
                if (!r->edata) throw IntegrityError("OK resolution without data");
                res.data = crypto::decrypt(kp_.secret, *r->edata);
            }
            return res;
        }
    }
    throw IntegrityError("resolved status without a resolution event");
}

nlohmann::json Client::censorship_evidence(std::uint64_t index) const {
    const auto& contract = chain_->contract();
    if (index >= contract.cens_reqs.size()) throw std::out_of_range("no such request");
    std::uint64_t submission_height = 0;
    for (const auto& event : chain_->events_since(0)) {
        if (const auto* s = std::get_if<chain::CensTxSubmitted>(&event.body))
            if (s->index == index) submission_height = event.height;
        if (const auto* s = std::get_if<chain::CensQrySubmitted>(&event.body))
            if (s->index == index) submission_height = event.height;
    }
    nlohmann::json j;
    j["contract_id"] = chain_->id().hex();
    j["request_index"] = index;
    j["submission_height"] = submission_height;
    j["now_height"] = chain_->height();
    j["ciphertext_digest"] = contract.cens_reqs[index].request_hash.hex();
    j["status"] = ledger::to_string(contract.cens_reqs[index].status);
    return j;
}

}  // namespace aqua::client
