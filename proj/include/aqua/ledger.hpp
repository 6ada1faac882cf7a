// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "aqua/crypto.hpp"
#include "aqua/merkle.hpp"

namespace aqua::ledger {

// Accounts are keyed by the hash of the holder's pb public key.
using AccountId = Digest;

AccountId account_id(const crypto::PublicKey& pub);

enum class TxKind : std::uint8_t { kTransfer = 0, kDeploy = 1, kCall = 2 };

// Call payloads carry the account set the call may touch, so the operator
// can extract a sufficient partial state up front.
struct CallPayload {
    std::vector<AccountId> declared;
    Bytes data;

    Bytes encode() const;
    static CallPayload decode(ByteView in);
};

struct Transaction {
    crypto::PublicKey sender;  // pb scheme
    std::uint64_t nonce = 0;
    TxKind kind = TxKind::kTransfer;
    std::optional<AccountId> recipient;  // absent for deploys
    std::uint64_t amount = 0;
    Bytes payload;  // deploy: bytecode; call: CallPayload encoding
    crypto::Signature signature;

    // Canonical encoding of everything but the signature; this is what is
    // signed and must stay bit-exact.
    Bytes signing_bytes() const;
    Bytes encode() const;
    static Transaction decode(ByteView in);

    // Identity: hash of the full canonical encoding.
    Digest hash() const;
    AccountId sender_id() const { return account_id(sender); }
    bool check_signature() const;
};

Transaction sign_tx(Transaction tx, const crypto::PrivateKey& key);

enum class ReturnCode : std::uint8_t {
    kOk = 0,
    kReverted = 1,
    kOutOfBounds = 2,
    kBadNonce = 3,
    kInsufficientBalance = 4,
};

struct LogEvent {
    std::uint64_t topic = 0;
    std::uint64_t data = 0;
};

struct Receipt {
    Digest tx_hash;
    ReturnCode code = ReturnCode::kOk;
    std::vector<LogEvent> events;

    Bytes encode() const;
    static Receipt decode(ByteView in);
};

struct AccountState {
    std::uint64_t balance = 0;
    std::uint64_t nonce = 0;
    Bytes code;  // empty for simple accounts
    std::map<std::uint64_t, std::uint64_t> storage;

    Bytes encode() const;
    static AccountState decode(ByteView in);
};

struct Header {
    std::uint64_t id = 0;  // history-tree version at creation
    Digest txs_root{};
    Digest rcp_root{};
    Digest st_root{};

    Bytes encode() const;
    static Header decode(ByteView in);
    Digest hash() const;

    auto operator<=>(const Header&) const = default;
};

// Leaf content of the proof-template placeholder: the all-zero header.
Digest placeholder_leaf();

struct Block {
    Header hdr;
    std::vector<Transaction> txs;
    std::vector<Receipt> rcps;

    Bytes encode() const;
    static Block decode(ByteView in);

    // txsRoot/rcpRoot recompute and per-position receipt binding.
    bool self_consistent() const;
};

Digest txs_root(const std::vector<Transaction>& txs);
Digest rcps_root(const std::vector<Receipt>& rcps);

// Censorship-request lifecycle. Submissions start pending; only an
// enclave-signed resolution moves them.
enum class CensStatus : std::uint8_t {
    kPending = 0,
    kIncluded = 1,
    kParsingError = 2,
    kSignatureError = 3,
    kOk = 4,
    kTxNotFound = 5,
    kBlkNotFound = 6,
    kNotFound = 7,
};

const char* to_string(CensStatus status);

enum class QueryType : std::uint8_t { kReadTx = 1, kReadAs = 2 };

// Censored read query plaintext. Carries the client's reply key so the
// enclave can encrypt the response without trusting the operator.
struct Query {
    QueryType type = QueryType::kReadTx;
    Digest id{};                  // tx hash or account id
    std::uint64_t block_id = 0;   // READ_TX only
    crypto::PublicKey reply_key;  // pb scheme

    Bytes encode() const;
    static Query decode(ByteView in);
};

// Chain-side access control for censorship submissions: enclave-signed
// membership with an expiry height.
struct AccessTicket {
    crypto::PublicKey client;
    std::uint64_t expiry_height = 0;
    crypto::Signature sig;

    Bytes encode() const;
    static AccessTicket decode(ByteView in);
};

// Canonical byte strings signed by the enclave (and checked by the
// contract and clients). Domain-tagged so signatures cannot cross roles.
Bytes vtp_message(const Digest& root_a, const Digest& root_b);
Bytes cens_tx_message(const Digest& etx_hash, CensStatus status);
Bytes cens_qry_message(const Digest& equery_hash, CensStatus status, const Digest& edata_hash);
Bytes ticket_message(const crypto::PublicKey& client, std::uint64_t expiry_height);
Bytes replace_enc_message(const crypto::PublicKey& pk_pb, const crypto::PublicKey& pk_tee,
                          const Digest& root_a, const Digest& root_b,
                          const crypto::Signature& transition_sig);

// Hash bound into censorship resolutions when the optional payload is
// absent.
Digest absent_payload_hash();

}  // namespace aqua::ledger
