// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/enclave.hpp"

namespace aqua::enclave {

using ledger::CensStatus;

namespace {

constexpr char kSealMagic[4] = {'A', 'Q', 'S', 'E'};

Bytes encode_keypair(const crypto::KeyPair& kp) {
    ByteWriter w;
    w.put_u8(static_cast<std::uint8_t>(kp.scheme));
    w.put_var(as_view(kp.secret.bytes));
    w.put_var(as_view(kp.pub.bytes));
    return std::move(w).data();
}

crypto::KeyPair decode_keypair(ByteReader& r) {
    crypto::KeyPair kp;
    kp.scheme = static_cast<crypto::Scheme>(r.get_u8());
    kp.secret = crypto::PrivateKey{kp.scheme, r.get_var()};
    kp.pub = crypto::PublicKey{kp.scheme, r.get_var()};
    return kp;
}

}  // namespace

Enclave::Enclave(const tee::Platform& platform, std::uint64_t entropy_seed)
    : platform_(&platform), rng_(entropy_seed) {}

std::pair<crypto::PublicKey, crypto::PublicKey> Enclave::init() {
    if (initialized_) throw IntegrityError("enclave already initialized");
    kp_pb_ = crypto::keygen(crypto::Scheme::kPb, rng_);
    kp_tee_ = crypto::keygen(crypto::Scheme::kTee, rng_);
    hdr_last_.reset();
    lroot_pb_ = htree::genesis();
    lroot_cur_ = htree::genesis();
    id_cur_ = 1;
    initialized_ = true;
    return {kp_tee_.pub, kp_pb_.pub};
}

tee::Quote Enclave::quote() const {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    return platform_->quote(tee::enclave_measurement(), as_view(kp_tee_.pub.bytes));
}

Digest Enclave::expected_state_root() const {
    return hdr_last_ ? hdr_last_->st_root : mpt::empty_root();
}

crypto::Signature Enclave::sign_pb(ByteView message) const {
    return crypto::sign(kp_pb_.secret, message);
}

ExecOutput Enclave::exec(const std::vector<Bytes>& wire_txs, const mpt::PartialState& ps_old,
                         const htree::IncrementalProof& template_proof,
                         const htree::Commitment& lroot_tmp) {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    if (ps_old.root != expected_state_root())
        throw IntegrityError("stale partial state: root does not match last header");
    if (lroot_tmp.version != lroot_cur_.version + 1)
        throw IntegrityError("proof template must extend the ledger by one block");
    if (!template_proof.verify(lroot_cur_, lroot_tmp))
        throw IntegrityError("proof template does not extend the current ledger");

    vm::Output vm_out = vm::run(wire_txs, ps_old, step_budget_);

    ledger::Header header;
    header.id = id_cur_;
    header.txs_root = ledger::txs_root(vm_out.executed);
    header.rcp_root = ledger::rcps_root(vm_out.receipts);
    header.st_root = vm_out.state.root;

    htree::IncrementalProof extended = template_proof;
    extended.set_new_leaf(header.hash());
    htree::Commitment new_cur{lroot_tmp.version, extended.derive_new_root()};

    ExecOutput out;
    out.lroot_pb = lroot_pb_;
    out.lroot_cur = new_cur;
    out.state = std::move(vm_out.state);
    out.header = header;
    out.executed = std::move(vm_out.executed);
    out.receipts = std::move(vm_out.receipts);
    out.rejected = std::move(vm_out.rejected);
    out.sig = sign_pb(as_view(ledger::vtp_message(lroot_pb_.root, new_cur.root)));

    hdr_last_ = header;
    id_cur_ += 1;
    lroot_cur_ = new_cur;
    return out;
}

void Enclave::flush() {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    lroot_pb_ = lroot_cur_;
}

Bytes Enclave::decrypt_request(const crypto::Ciphertext& edata) {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    return crypto::decrypt(kp_pb_.secret, edata);
}

SignTxOutput Enclave::sign_tx(const crypto::Ciphertext& etx, const merkle::Proof& tx_proof,
                              const ledger::Header& hdr,
                              const htree::MembershipProof& hdr_proof) {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    Digest etx_hash = crypto::sha256(as_view(etx.encode()));

    CensStatus status = CensStatus::kIncluded;
    std::optional<ledger::Transaction> tx;
    try {
        tx = ledger::Transaction::decode(as_view(crypto::decrypt(kp_pb_.secret, etx)));
    } catch (const std::exception&) {
        status = CensStatus::kParsingError;
    }
    if (tx && !tx->check_signature()) status = CensStatus::kSignatureError;

    if (status == CensStatus::kIncluded) {
        // Proofs bind the tx to a header and the header to the anchored
        // ledger. A failure here is the operator's fault; refuse to sign.
        if (!merkle::verify(tx_proof, as_view(tx->encode()), hdr.txs_root))
            throw IntegrityError("tx proof does not bind to the header");
        if (hdr.id == 0 || hdr.id > lroot_pb_.version ||
            !hdr_proof.verify(hdr.id - 1, hdr.hash(), lroot_pb_))
            throw IntegrityError("header proof does not bind to the anchored ledger");
    }

    SignTxOutput out;
    out.status = status;
    out.sig = sign_pb(as_view(ledger::cens_tx_message(etx_hash, status)));
    return out;
}

ledger::Query Enclave::parse_query(const crypto::Ciphertext& equery, bool& ok) const {
    ok = false;
    ledger::Query q;
    try {
        q = ledger::Query::decode(as_view(crypto::decrypt(kp_pb_.secret, equery)));
        ok = true;
    } catch (const std::exception&) {
    }
    return q;
}

SignQryOutput Enclave::sign_qry_tx(const crypto::Ciphertext& equery, const ledger::Block& blk,
                                   const htree::MembershipProof& hdr_proof) {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    Digest equery_hash = crypto::sha256(as_view(equery.encode()));

    SignQryOutput out;
    bool parsed = false;
    ledger::Query q = parse_query(equery, parsed);
    if (!parsed) {
        out.status = CensStatus::kParsingError;
    } else {
        if (q.type != ledger::QueryType::kReadTx)
            throw IntegrityError("query type dispatched to the wrong handler");
        if (q.block_id == 0 || q.block_id > lroot_pb_.version) {
            out.status = CensStatus::kBlkNotFound;
        } else {
            if (blk.hdr.id != q.block_id)
                throw IntegrityError("operator supplied a different block than queried");
            if (!hdr_proof.verify(blk.hdr.id - 1, blk.hdr.hash(), lroot_pb_))
                throw IntegrityError("header proof does not bind to the anchored ledger");
            if (!blk.self_consistent()) throw IntegrityError("block fails consistency recompute");

            out.status = CensStatus::kTxNotFound;
            for (const auto& tx : blk.txs) {
                if (tx.hash() == q.id) {
                    out.status = CensStatus::kOk;
                    out.edata = crypto::encrypt(q.reply_key, as_view(tx.encode()), rng_);
                    break;
                }
            }
        }
    }

    Digest edata_hash = out.edata ? crypto::sha256(as_view(out.edata->encode()))
                                  : ledger::absent_payload_hash();
    out.sig = sign_pb(as_view(ledger::cens_qry_message(equery_hash, out.status, edata_hash)));
    return out;
}

SignQryOutput Enclave::sign_qry_as(const crypto::Ciphertext& equery,
                                   const std::optional<ledger::AccountState>& account,
                                   const mpt::Proof& proof) {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    Digest equery_hash = crypto::sha256(as_view(equery.encode()));

    SignQryOutput out;
    bool parsed = false;
    ledger::Query q = parse_query(equery, parsed);
    if (!parsed) {
        out.status = CensStatus::kParsingError;
    } else {
        if (q.type != ledger::QueryType::kReadAs)
            throw IntegrityError("query type dispatched to the wrong handler");
        Digest state_root = expected_state_root();
        if (!account) {
            if (!proof.verify_exclusion(as_view(q.id), state_root))
                throw IntegrityError("exclusion proof does not bind to the current state");
            out.status = CensStatus::kNotFound;
        } else {
            Bytes encoded = account->encode();
            if (!proof.verify_inclusion(as_view(q.id), state_root) || proof.value() != encoded)
                throw IntegrityError("inclusion proof does not bind to the supplied account");
            out.status = CensStatus::kOk;
            out.edata = crypto::encrypt(q.reply_key, as_view(encoded), rng_);
        }
    }

    Digest edata_hash = out.edata ? crypto::sha256(as_view(out.edata->encode()))
                                  : ledger::absent_payload_hash();
    out.sig = sign_pb(as_view(ledger::cens_qry_message(equery_hash, out.status, edata_hash)));
    return out;
}

ledger::AccessTicket Enclave::issue_ticket(const crypto::PublicKey& client,
                                           std::uint64_t expiry_height) {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    ledger::AccessTicket ticket;
    ticket.client = client;
    ticket.expiry_height = expiry_height;
    ticket.sig = sign_pb(as_view(ledger::ticket_message(client, expiry_height)));
    return ticket;
}

Bytes Enclave::seal() {
    if (!initialized_) throw IntegrityError("enclave not initialized");
    seal_counter_ += 1;

    ByteWriter state;
    state.put_var(as_view(encode_keypair(kp_pb_)));
    state.put_var(as_view(encode_keypair(kp_tee_)));
    state.put_bool(hdr_last_.has_value());
    if (hdr_last_) state.put_bytes(as_view(hdr_last_->encode()));
    state.put_u64(lroot_pb_.version);
    state.put_digest(lroot_pb_.root);
    state.put_u64(lroot_cur_.version);
    state.put_digest(lroot_cur_.root);
    state.put_u64(id_cur_);

    ByteWriter aad;
    aad.put_bytes(ByteView(reinterpret_cast<const std::uint8_t*>(kSealMagic), 4));
    aad.put_u64(seal_counter_);

    Bytes nonce = rng_.bytes(12);
    Bytes sealed = crypto::aead_seal(platform_->sealing_key(), as_view(nonce),
                                     as_view(state.data()), as_view(aad.data()));

    ByteWriter out;
    out.put_bytes(as_view(aad.data()));
    out.put_var(as_view(nonce));
    out.put_var(as_view(sealed));
    return std::move(out).data();
}

std::uint64_t Enclave::unseal(ByteView blob) {
    ByteReader r(blob);
    Bytes magic = r.get_bytes(4);
    if (std::memcmp(magic.data(), kSealMagic, 4) != 0) throw ParseError("not a sealed state");
    std::uint64_t counter = r.get_u64();
    Bytes nonce = r.get_var();
    Bytes sealed = r.get_var();
    r.expect_done();

    ByteWriter aad;
    aad.put_bytes(as_view(magic));
    aad.put_u64(counter);
    // Fails with IntegrityError on any other platform identity.
    Bytes state = crypto::aead_open(platform_->sealing_key(), as_view(nonce), as_view(sealed),
                                    as_view(aad.data()));

    ByteReader s(as_view(state));
    Bytes kp_pb_bytes = s.get_var();
    ByteReader kp_pb_reader(as_view(kp_pb_bytes));
    kp_pb_ = decode_keypair(kp_pb_reader);
    Bytes kp_tee_bytes = s.get_var();
    ByteReader kp_tee_reader(as_view(kp_tee_bytes));
    kp_tee_ = decode_keypair(kp_tee_reader);
    hdr_last_.reset();
    if (s.get_bool()) hdr_last_ = ledger::Header::decode(as_view(s.get_bytes(8 + 3 * kDigestSize)));
    lroot_pb_.version = s.get_u64();
    lroot_pb_.root = s.get_digest();
    lroot_cur_.version = s.get_u64();
    lroot_cur_.root = s.get_digest();
    id_cur_ = s.get_u64();
    s.expect_done();

    seal_counter_ = counter;
    initialized_ = true;
    return counter;
}

ReinitOutput Enclave::reinit(const htree::Commitment& lroot_old,
                             const std::vector<ledger::Block>& prev_blks,
                             const std::optional<ledger::Header>& hdr_sync,
                             const HostCallbacks& host) {
    if (initialized_) throw IntegrityError("reinit requires a fresh enclave");
    if (lroot_old.version == 0) {
        if (hdr_sync) throw IntegrityError("genesis reinit cannot carry a header");
    } else {
        if (!hdr_sync || hdr_sync->id != lroot_old.version)
            throw IntegrityError("sync header does not match the anchored version");
    }

    crypto::KeyPair kp_pb = crypto::keygen(crypto::Scheme::kPb, rng_);
    crypto::KeyPair kp_tee = crypto::keygen(crypto::Scheme::kTee, rng_);

    std::optional<ledger::Header> hdr_last = hdr_sync;
    htree::Commitment cur = lroot_old;
    std::uint64_t id_cur = lroot_old.version + 1;

    for (const ledger::Block& block : prev_blks) {
        auto [template_proof, lroot_tmp] = host.next_inc_proof();
        mpt::PartialState ps_old = host.get_partial_state(block);
        Digest expected = hdr_last ? hdr_last->st_root : mpt::empty_root();
        if (ps_old.root != expected) throw IntegrityError("replay: stale partial state");
        if (lroot_tmp.version != cur.version + 1 || !template_proof.verify(cur, lroot_tmp))
            throw IntegrityError("replay: bad proof template");

        std::vector<Bytes> wire;
        wire.reserve(block.txs.size());
        for (const auto& tx : block.txs) wire.push_back(tx.encode());
        vm::Output vm_out = vm::run(wire, ps_old, step_budget_);
        if (!vm_out.rejected.empty())
            throw IntegrityError("replay: stored block contains invalid transactions");

        ledger::Header header;
        header.id = id_cur;
        header.txs_root = ledger::txs_root(vm_out.executed);
        header.rcp_root = ledger::rcps_root(vm_out.receipts);
        header.st_root = vm_out.state.root;

        htree::IncrementalProof extended = template_proof;
        extended.set_new_leaf(header.hash());
        cur = htree::Commitment{lroot_tmp.version, extended.derive_new_root()};
        hdr_last = header;
        id_cur += 1;

        Digest host_root = host.replay_block(block);
        if (host_root != cur.root)
            throw IntegrityError("replay: host and enclave diverged");
    }

    // Commit only after the full replay went through.
    kp_pb_ = kp_pb;
    kp_tee_ = kp_tee;
    hdr_last_ = hdr_last;
    lroot_pb_ = lroot_old;
    lroot_cur_ = cur;
    id_cur_ = id_cur;
    initialized_ = true;

    ReinitOutput out;
    out.lroot_pb = lroot_pb_;
    out.lroot_cur = lroot_cur_;
    out.sig = sign_pb(as_view(ledger::vtp_message(lroot_pb_.root, lroot_cur_.root)));
    out.pk_pb = kp_pb_.pub;
    out.pk_tee = kp_tee_.pub;
    return out;
}

}  // namespace aqua::enclave
