// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "aqua/ledger.hpp"
#include "aqua/mpt.hpp"
#include "aqua/vm.hpp"

namespace aqua::testing {

struct Account {
    crypto::KeyPair kp;
    std::uint64_t nonce = 0;

    ledger::AccountId id() const { return ledger::account_id(kp.pub); }

    ledger::Transaction transfer(const ledger::AccountId& to, std::uint64_t amount) {
        ledger::Transaction tx;
        tx.sender = kp.pub;
        tx.nonce = nonce++;
        tx.kind = ledger::TxKind::kTransfer;
        tx.recipient = to;
        tx.amount = amount;
        return ledger::sign_tx(std::move(tx), kp.secret);
    }

    ledger::Transaction deploy(const Bytes& code, std::uint64_t amount = 0) {
        ledger::Transaction tx;
        tx.sender = kp.pub;
        tx.nonce = nonce++;
        tx.kind = ledger::TxKind::kDeploy;
        tx.amount = amount;
        tx.payload = code;
        return ledger::sign_tx(std::move(tx), kp.secret);
    }

    ledger::Transaction call(const ledger::AccountId& contract, const Bytes& calldata,
                             std::uint64_t amount = 0) {
        ledger::Transaction tx;
        tx.sender = kp.pub;
        tx.nonce = nonce++;
        tx.kind = ledger::TxKind::kCall;
        tx.recipient = contract;
        tx.amount = amount;
        ledger::CallPayload payload;
        payload.data = calldata;
        tx.payload = payload.encode();
        return ledger::sign_tx(std::move(tx), kp.secret);
    }
};

inline Account make_account(crypto::Rng& rng) {
    return Account{crypto::keygen(crypto::Scheme::kPb, rng)};
}

// Writes an account directly into a full-state trie (test fixture setup).
inline void seed_account(mpt::Trie& trie, const ledger::AccountId& id,
                         const ledger::AccountState& as) {
    trie.add(as_view(id), as_view(as.encode()));
}

inline std::vector<Bytes> wire(const std::vector<ledger::Transaction>& txs) {
    std::vector<Bytes> out;
    out.reserve(txs.size());
    for (const auto& tx : txs) out.push_back(tx.encode());
    return out;
}

inline std::vector<Bytes> touched_keys_of(const std::vector<ledger::Transaction>& txs) {
    std::vector<Bytes> keys;
    for (const auto& tx : txs)
        for (const auto& id : vm::touched_accounts(tx)) keys.push_back(to_bytes(as_view(id)));
    return keys;
}

// Counter contract: increments slot 0 on every call and emits the new
// value under topic 7.
inline Bytes counter_code() {
    vm::Program p;
    p.push(0).op(vm::Op::kSload);     // count
    p.push(1).op(vm::Op::kAdd);       // count + 1
    p.op(vm::Op::kDup);
    p.push(7).op(vm::Op::kEmit);      // emit(topic=7, count+1)
    p.push(0).op(vm::Op::kSstore);    // store[0] = count + 1
    p.op(vm::Op::kHalt);
    return p.code();
}

// Token-style contract used by the bench: calldata = (slot, delta); adds
// delta to the slot's value.
inline Bytes token_code() {
    vm::Program p;
    p.push(0).op(vm::Op::kCalldata);  // slot
    p.op(vm::Op::kDup);
    p.op(vm::Op::kSload);             // slot, value
    p.push(8).op(vm::Op::kCalldata);  // slot, value, delta
    p.op(vm::Op::kAdd);               // slot, value+delta
    p.op(vm::Op::kSwap);
    p.op(vm::Op::kSstore);            // store[slot] = value + delta
    p.op(vm::Op::kHalt);
    return p.code();
}

inline Bytes loop_forever_code() {
    vm::Program p;
    p.push(0).op(vm::Op::kJmp);
    return p.code();
}

inline Bytes u64_calldata(std::uint64_t a, std::uint64_t b) {
    ByteWriter w;
    w.put_u64(a);
    w.put_u64(b);
    return std::move(w).data();
}

}  // namespace aqua::testing
