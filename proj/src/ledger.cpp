// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/ledger.hpp"

namespace aqua::ledger {

namespace {

// Domain tags for enclave-signed protocol messages.
constexpr std::uint8_t kTagVtp = 0x10;
constexpr std::uint8_t kTagCensTx = 0x11;
constexpr std::uint8_t kTagCensQry = 0x12;
constexpr std::uint8_t kTagTicket = 0x13;
constexpr std::uint8_t kTagReplaceEnc = 0x14;

void put_public_key(ByteWriter& w, const crypto::PublicKey& key) {
    w.put_u8(static_cast<std::uint8_t>(key.scheme));
    w.put_var(as_view(key.bytes));
}

crypto::PublicKey get_public_key(ByteReader& r) {
    crypto::PublicKey key;
    std::uint8_t scheme = r.get_u8();
    if (scheme > 1) throw ParseError("unknown key scheme");
    key.scheme = static_cast<crypto::Scheme>(scheme);
    key.bytes = r.get_var();
    return key;
}

}  // namespace

AccountId account_id(const crypto::PublicKey& pub) { return crypto::sha256(as_view(pub.bytes)); }

Bytes CallPayload::encode() const {
    ByteWriter w;
    w.put_u16(static_cast<std::uint16_t>(declared.size()));
    for (const auto& id : declared) w.put_digest(id);
    w.put_var(as_view(data));
    return std::move(w).data();
}

CallPayload CallPayload::decode(ByteView in) {
    ByteReader r(in);
    CallPayload p;
    std::uint16_t n = r.get_u16();
    for (std::uint16_t i = 0; i < n; ++i) p.declared.push_back(r.get_digest());
    p.data = r.get_var();
    r.expect_done();
    return p;
}

Bytes Transaction::signing_bytes() const {
    ByteWriter w;
    put_public_key(w, sender);
    w.put_u64(nonce);
    w.put_u8(static_cast<std::uint8_t>(kind));
    w.put_bool(recipient.has_value());
    if (recipient) w.put_digest(*recipient);
    w.put_u64(amount);
    w.put_var(as_view(payload));
    return std::move(w).data();
}

Bytes Transaction::encode() const {
    ByteWriter w;
    w.put_var(as_view(signing_bytes()));
    w.put_var(as_view(signature.encode()));
    return std::move(w).data();
}

Transaction Transaction::decode(ByteView in) {
    ByteReader outer(in);
    Bytes signed_part = outer.get_var();
    Bytes sig_part = outer.get_var();
    outer.expect_done();

    ByteReader r(as_view(signed_part));
    Transaction tx;
    tx.sender = get_public_key(r);
    if (tx.sender.scheme != crypto::Scheme::kPb) throw ParseError("tx sender must be a pb key");
    tx.nonce = r.get_u64();
    std::uint8_t kind = r.get_u8();
    if (kind > 2) throw ParseError("unknown tx kind");
    tx.kind = static_cast<TxKind>(kind);
    if (r.get_bool()) tx.recipient = r.get_digest();
    tx.amount = r.get_u64();
    tx.payload = r.get_var();
    r.expect_done();

    if (tx.kind == TxKind::kDeploy && tx.recipient) throw ParseError("deploy carries a recipient");
    if (tx.kind != TxKind::kDeploy && !tx.recipient) throw ParseError("tx lacks a recipient");
    if (tx.kind == TxKind::kCall) CallPayload::decode(as_view(tx.payload));

    tx.signature = crypto::Signature::decode(as_view(sig_part));
    return tx;
}

Digest Transaction::hash() const { return crypto::sha256(as_view(encode())); }

bool Transaction::check_signature() const {
    return crypto::verify(sender, as_view(signing_bytes()), signature);
}

Transaction sign_tx(Transaction tx, const crypto::PrivateKey& key) {
    tx.signature = crypto::sign(key, as_view(tx.signing_bytes()));
    return tx;
}

Bytes Receipt::encode() const {
    ByteWriter w;
    w.put_digest(tx_hash);
    w.put_u8(static_cast<std::uint8_t>(code));
    w.put_u32(static_cast<std::uint32_t>(events.size()));
    for (const auto& e : events) {
        w.put_u64(e.topic);
        w.put_u64(e.data);
    }
    return std::move(w).data();
}

Receipt Receipt::decode(ByteView in) {
    ByteReader r(in);
    Receipt rc;
    rc.tx_hash = r.get_digest();
    std::uint8_t code = r.get_u8();
    if (code > 4) throw ParseError("unknown return code");
    rc.code = static_cast<ReturnCode>(code);
    std::uint32_t n = r.get_u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        LogEvent e;
        e.topic = r.get_u64();
        e.data = r.get_u64();
        rc.events.push_back(e);
    }
    r.expect_done();
    return rc;
}

Bytes AccountState::encode() const {
    ByteWriter w;
    w.put_u64(balance);
    w.put_u64(nonce);
    w.put_var(as_view(code));
    w.put_u32(static_cast<std::uint32_t>(storage.size()));
    for (const auto& [k, v] : storage) {
        w.put_u64(k);
        w.put_u64(v);
    }
    return std::move(w).data();
}

AccountState AccountState::decode(ByteView in) {
    ByteReader r(in);
    AccountState as;
    as.balance = r.get_u64();
    as.nonce = r.get_u64();
    as.code = r.get_var();
    std::uint32_t n = r.get_u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t k = r.get_u64();
        as.storage[k] = r.get_u64();
    }
    r.expect_done();
    return as;
}

Bytes Header::encode() const {
    ByteWriter w;
    w.put_u64(id);
    w.put_digest(txs_root);
    w.put_digest(rcp_root);
    w.put_digest(st_root);
    return std::move(w).data();
}

Header Header::decode(ByteView in) {
    ByteReader r(in);
    Header h;
    h.id = r.get_u64();
    h.txs_root = r.get_digest();
    h.rcp_root = r.get_digest();
    h.st_root = r.get_digest();
    r.expect_done();
    return h;
}

Digest Header::hash() const { return crypto::sha256(as_view(encode())); }

Digest placeholder_leaf() { return Header{}.hash(); }

Bytes Block::encode() const {
    ByteWriter w;
    w.put_bytes(as_view(hdr.encode()));
    w.put_u32(static_cast<std::uint32_t>(txs.size()));
    for (const auto& tx : txs) w.put_var(as_view(tx.encode()));
    w.put_u32(static_cast<std::uint32_t>(rcps.size()));
    for (const auto& rc : rcps) w.put_var(as_view(rc.encode()));
    return std::move(w).data();
}

Block Block::decode(ByteView in) {
    ByteReader r(in);
    Block b;
    b.hdr = Header::decode(as_view(r.get_bytes(8 + 3 * kDigestSize)));
    std::uint32_t nt = r.get_u32();
    for (std::uint32_t i = 0; i < nt; ++i) b.txs.push_back(Transaction::decode(as_view(r.get_var())));
    std::uint32_t nr = r.get_u32();
    for (std::uint32_t i = 0; i < nr; ++i) b.rcps.push_back(Receipt::decode(as_view(r.get_var())));
    r.expect_done();
    return b;
}

bool Block::self_consistent() const {
    if (txs.size() != rcps.size()) return false;
    if (txs_root(txs) != hdr.txs_root || rcps_root(rcps) != hdr.rcp_root) return false;
    for (std::size_t i = 0; i < txs.size(); ++i)
        if (rcps[i].tx_hash != txs[i].hash()) return false;
    return true;
}

Digest txs_root(const std::vector<Transaction>& txs) {
    std::vector<Bytes> elements;
    elements.reserve(txs.size());
    for (const auto& tx : txs) elements.push_back(tx.encode());
    return merkle::root(elements);
}

Digest rcps_root(const std::vector<Receipt>& rcps) {
    std::vector<Bytes> elements;
    elements.reserve(rcps.size());
    for (const auto& rc : rcps) elements.push_back(rc.encode());
    return merkle::root(elements);
}

const char* to_string(CensStatus status) {
    switch (status) {
        case CensStatus::kPending: return "PENDING";
        case CensStatus::kIncluded: return "INCLUDED";
        case CensStatus::kParsingError: return "PARSING_ERROR";
        case CensStatus::kSignatureError: return "SIGNATURE_ERROR";
        case CensStatus::kOk: return "OK";
        case CensStatus::kTxNotFound: return "TX_NOT_FOUND";
        case CensStatus::kBlkNotFound: return "BLK_NOT_FOUND";
        case CensStatus::kNotFound: return "NOT_FOUND";
    }
    return "?";
}

Bytes Query::encode() const {
    ByteWriter w;
    w.put_u8(static_cast<std::uint8_t>(type));
    w.put_digest(id);
    w.put_u64(block_id);
    put_public_key(w, reply_key);
    return std::move(w).data();
}

Query Query::decode(ByteView in) {
    ByteReader r(in);
    Query q;
    std::uint8_t type = r.get_u8();
    if (type != 1 && type != 2) throw ParseError("unknown query type");
    q.type = static_cast<QueryType>(type);
    q.id = r.get_digest();
    q.block_id = r.get_u64();
    q.reply_key = get_public_key(r);
    if (q.reply_key.scheme != crypto::Scheme::kPb) throw ParseError("reply key must be pb");
    r.expect_done();
    return q;
}

Bytes AccessTicket::encode() const {
    ByteWriter w;
    put_public_key(w, client);
    w.put_u64(expiry_height);
    w.put_var(as_view(sig.encode()));
    return std::move(w).data();
}

AccessTicket AccessTicket::decode(ByteView in) {
    ByteReader r(in);
    AccessTicket t;
    t.client = get_public_key(r);
    t.expiry_height = r.get_u64();
    t.sig = crypto::Signature::decode(as_view(r.get_var()));
    r.expect_done();
    return t;
}

Bytes vtp_message(const Digest& root_a, const Digest& root_b) {
    ByteWriter w;
    w.put_u8(kTagVtp);
    w.put_digest(root_a);
    w.put_digest(root_b);
    return std::move(w).data();
}

Bytes cens_tx_message(const Digest& etx_hash, CensStatus status) {
    ByteWriter w;
    w.put_u8(kTagCensTx);
    w.put_digest(etx_hash);
    w.put_u8(static_cast<std::uint8_t>(status));
    return std::move(w).data();
}

Bytes cens_qry_message(const Digest& equery_hash, CensStatus status, const Digest& edata_hash) {
    ByteWriter w;
    w.put_u8(kTagCensQry);
    w.put_digest(equery_hash);
    w.put_u8(static_cast<std::uint8_t>(status));
    w.put_digest(edata_hash);
    return std::move(w).data();
}

Bytes ticket_message(const crypto::PublicKey& client, std::uint64_t expiry_height) {
    ByteWriter w;
    w.put_u8(kTagTicket);
    put_public_key(w, client);
    w.put_u64(expiry_height);
    return std::move(w).data();
}

Bytes replace_enc_message(const crypto::PublicKey& pk_pb, const crypto::PublicKey& pk_tee,
                          const Digest& root_a, const Digest& root_b,
                          const crypto::Signature& transition_sig) {
    ByteWriter w;
    w.put_u8(kTagReplaceEnc);
    put_public_key(w, pk_pb);
    put_public_key(w, pk_tee);
    w.put_digest(root_a);
    w.put_digest(root_b);
    w.put_var(as_view(transition_sig.encode()));
    return std::move(w).data();
}

Digest absent_payload_hash() { return crypto::sha256(ByteView{}); }

}  // namespace aqua::ledger
