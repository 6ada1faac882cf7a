// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/vm.hpp"

#include <algorithm>

namespace aqua::vm {

using ledger::AccountId;
using ledger::AccountState;
using ledger::Receipt;
using ledger::ReturnCode;
using ledger::Transaction;
using ledger::TxKind;

const crypto::KeyPair& issuer_keypair() {
    static const crypto::KeyPair kp = [] {
        Digest seed = crypto::sha256(to_bytes(std::string_view("aquareum native token issuer")));
        return crypto::keypair_from_secret(crypto::Scheme::kPb, as_view(seed));
    }();
    return kp;
}

const AccountId& issuer_id() {
    static const AccountId id = ledger::account_id(issuer_keypair().pub);
    return id;
}

ledger::AccountId contract_address(const crypto::PublicKey& sender, std::uint64_t nonce) {
    ByteWriter w;
    w.put_var(as_view(sender.bytes));
    w.put_u64(nonce);
    return crypto::sha256(as_view(w.data()));
}

ContractResult exec_contract(const Bytes& code, const Bytes& calldata,
                             const std::map<std::uint64_t, std::uint64_t>& storage,
                             std::uint64_t amount, std::uint64_t step_budget) {
    ContractResult result;
    result.storage = storage;

    auto fail = [&](ReturnCode rc) {
        result.code = rc;
        result.storage = storage;  // roll back
        result.events.clear();
        return result;
    };

    if (calldata.empty()) return fail(ReturnCode::kReverted);  // calling convention

    std::vector<std::uint64_t> stack;
    auto pop = [&]() -> std::uint64_t {
        std::uint64_t v = stack.back();
        stack.pop_back();
        return v;
    };

    std::size_t pc = 0;
    for (std::uint64_t steps = 0;; ++steps) {
        if (steps >= step_budget) return fail(ReturnCode::kOutOfBounds);
        if (pc >= code.size()) return fail(ReturnCode::kReverted);  // fell off the end
        Op op = static_cast<Op>(code[pc]);
        switch (op) {
            case Op::kHalt:
                result.code = ReturnCode::kOk;
                return result;
            case Op::kRevert:
                return fail(ReturnCode::kReverted);
            case Op::kPush: {
                if (pc + 8 >= code.size()) return fail(ReturnCode::kReverted);
                if (stack.size() >= kMaxStackDepth) return fail(ReturnCode::kReverted);
                std::uint64_t v = 0;
                for (int i = 1; i <= 8; ++i) v = (v << 8) | code[pc + i];
                stack.push_back(v);
                pc += 9;
                continue;
            }
            case Op::kPop:
                if (stack.empty()) return fail(ReturnCode::kReverted);
                stack.pop_back();
                break;
            case Op::kDup:
                if (stack.empty() || stack.size() >= kMaxStackDepth)
                    return fail(ReturnCode::kReverted);
                stack.push_back(stack.back());
                break;
            case Op::kSwap:
                if (stack.size() < 2) return fail(ReturnCode::kReverted);
                std::swap(stack[stack.size() - 1], stack[stack.size() - 2]);
                break;
            case Op::kAdd:
            case Op::kSub:
            case Op::kMul:
            case Op::kDiv:
            case Op::kMod:
            case Op::kLt:
            case Op::kGt:
            case Op::kEq:
            case Op::kAnd:
            case Op::kOr: {
                if (stack.size() < 2) return fail(ReturnCode::kReverted);
                std::uint64_t b = pop();
                std::uint64_t a = pop();
                std::uint64_t r = 0;
                switch (op) {
                    case Op::kAdd: r = a + b; break;
                    case Op::kSub: r = a - b; break;
                    case Op::kMul: r = a * b; break;
                    case Op::kDiv:
                        if (b == 0) return fail(ReturnCode::kReverted);
                        r = a / b;
                        break;
                    case Op::kMod:
                        if (b == 0) return fail(ReturnCode::kReverted);
                        r = a % b;
                        break;
                    case Op::kLt: r = a < b ? 1 : 0; break;
                    case Op::kGt: r = a > b ? 1 : 0; break;
                    case Op::kEq: r = a == b ? 1 : 0; break;
                    case Op::kAnd: r = a & b; break;
                    case Op::kOr: r = a | b; break;
                    default: break;
                }
                stack.push_back(r);
                break;
            }
            case Op::kNot:
                if (stack.empty()) return fail(ReturnCode::kReverted);
                stack.back() = stack.back() == 0 ? 1 : 0;
                break;
            case Op::kJmp: {
                if (stack.empty()) return fail(ReturnCode::kReverted);
                std::uint64_t target = pop();
                if (target >= code.size()) return fail(ReturnCode::kReverted);
                pc = static_cast<std::size_t>(target);
                continue;
            }
            case Op::kJmpIf: {
                if (stack.size() < 2) return fail(ReturnCode::kReverted);
                std::uint64_t target = pop();
                std::uint64_t cond = pop();
                if (cond != 0) {
                    if (target >= code.size()) return fail(ReturnCode::kReverted);
                    pc = static_cast<std::size_t>(target);
                    continue;
                }
                break;
            }
            case Op::kSload: {
                if (stack.empty()) return fail(ReturnCode::kReverted);
                std::uint64_t key = pop();
                auto it = result.storage.find(key);
                stack.push_back(it == result.storage.end() ? 0 : it->second);
                break;
            }
            case Op::kSstore: {
                if (stack.size() < 2) return fail(ReturnCode::kReverted);
                std::uint64_t key = pop();
                std::uint64_t value = pop();
                if (value == 0)
                    result.storage.erase(key);
                else
                    result.storage[key] = value;
                break;
            }
            case Op::kCalldata: {
                if (stack.empty() || stack.size() > kMaxStackDepth)
                    return fail(ReturnCode::kReverted);
                std::uint64_t offset = pop();
                std::uint64_t v = 0;
                for (int i = 0; i < 8; ++i) {
                    std::uint64_t at = offset + static_cast<std::uint64_t>(i);
                    std::uint8_t byte = at < calldata.size() ? calldata[at] : 0;
                    v = (v << 8) | byte;
                }
                stack.push_back(v);
                break;
            }
            case Op::kCalldataLen:
                if (stack.size() >= kMaxStackDepth) return fail(ReturnCode::kReverted);
                stack.push_back(calldata.size());
                break;
            case Op::kAmount:
                if (stack.size() >= kMaxStackDepth) return fail(ReturnCode::kReverted);
                stack.push_back(amount);
                break;
            case Op::kEmit: {
                if (stack.size() < 2) return fail(ReturnCode::kReverted);
                std::uint64_t topic = pop();
                std::uint64_t data = pop();
                result.events.push_back({topic, data});
                break;
            }
            default:
                return fail(ReturnCode::kReverted);  // malformed opcode
        }
        ++pc;
    }
}

namespace {

class StateView {
  public:
    explicit StateView(const mpt::PartialState& ps) : trie_(ps) {}

    AccountState get(const AccountId& id) const {
        auto raw = trie_.get(as_view(id));
        if (!raw) return AccountState{};
        return AccountState::decode(as_view(*raw));
    }

    bool exists(const AccountId& id) const { return trie_.get(as_view(id)).has_value(); }

    void put(const AccountId& id, const AccountState& as) {
        trie_.put(as_view(id), as_view(as.encode()));
    }

    mpt::PartialState snapshot() const { return trie_.state(); }

  private:
    mpt::PartialTrie trie_;
};

}  // namespace

Output run(const std::vector<Bytes>& wire_txs, const mpt::PartialState& ps,
           std::uint64_t step_budget) {
    Output out;
    StateView state(ps);

    for (const Bytes& wire : wire_txs) {
        Transaction tx;
        try {
            tx = Transaction::decode(as_view(wire));
        } catch (const ParseError&) {
            out.rejected.push_back(wire);
            continue;
        }
        if (!tx.check_signature()) {
            out.rejected.push_back(wire);
            continue;
        }

        Receipt receipt;
        receipt.tx_hash = tx.hash();

        AccountId sender = tx.sender_id();
        AccountState sender_state = state.get(sender);
        if (tx.nonce != sender_state.nonce) {
            receipt.code = ReturnCode::kBadNonce;
            out.executed.push_back(std::move(tx));
            out.receipts.push_back(std::move(receipt));
            continue;
        }
        // The nonce is consumed by every signature-valid transaction with a
        // matching nonce, whether or not it succeeds.
        sender_state.nonce += 1;

        bool is_issuer = sender == issuer_id();
        auto debit = [&](std::uint64_t amount) {
            if (is_issuer) return true;  // faucet: mint instead of debit
            if (sender_state.balance < amount) return false;
            sender_state.balance -= amount;
            return true;
        };

        switch (tx.kind) {
            case TxKind::kTransfer: {
                if (!debit(tx.amount)) {
                    receipt.code = ReturnCode::kInsufficientBalance;
                    break;
                }
                if (*tx.recipient == sender) {
                    sender_state.balance += tx.amount;
                    break;
                }
                AccountState recipient = state.get(*tx.recipient);
                recipient.balance += tx.amount;
                state.put(*tx.recipient, recipient);
                break;
            }
            case TxKind::kDeploy: {
                if (!debit(tx.amount)) {
                    receipt.code = ReturnCode::kInsufficientBalance;
                    break;
                }
                AccountId address = contract_address(tx.sender, tx.nonce);
                AccountState contract = state.get(address);
                contract.code = tx.payload;
                contract.balance += tx.amount;
                state.put(address, contract);
                break;
            }
            case TxKind::kCall: {
                auto payload = ledger::CallPayload::decode(as_view(tx.payload));
                if (!debit(tx.amount)) {
                    receipt.code = ReturnCode::kInsufficientBalance;
                    break;
                }
                if (*tx.recipient == sender) {
                    // Self-call: the value transfer is a no-op, code still runs.
                    sender_state.balance += tx.amount;
                    if (sender_state.code.empty()) break;
                    ContractResult res = exec_contract(sender_state.code, payload.data,
                                                       sender_state.storage, tx.amount,
                                                       step_budget);
                    receipt.code = res.code;
                    if (res.code == ReturnCode::kOk) {
                        sender_state.storage = res.storage;
                        receipt.events = res.events;
                    }
                    break;
                }
                AccountState contract = state.get(*tx.recipient);
                contract.balance += tx.amount;
                if (contract.code.empty()) {
                    // Call into a plain account behaves as a transfer.
                    state.put(*tx.recipient, contract);
                    break;
                }
                ContractResult res = exec_contract(contract.code, payload.data, contract.storage,
                                                   tx.amount, step_budget);
                receipt.code = res.code;
                if (res.code == ReturnCode::kOk) {
                    contract.storage = res.storage;
                    receipt.events = res.events;
                    state.put(*tx.recipient, contract);
                } else if (!is_issuer) {
                    // Failed call: the value transfer unwinds with it.
                    sender_state.balance += tx.amount;
                }
                break;
            }
        }
        state.put(sender, sender_state);
        out.executed.push_back(std::move(tx));
        out.receipts.push_back(std::move(receipt));
    }

    out.state = state.snapshot();
    return out;
}

std::vector<ledger::AccountId> touched_accounts(const ledger::Transaction& tx) {
    std::vector<AccountId> ids{tx.sender_id()};
    switch (tx.kind) {
        case TxKind::kTransfer:
            ids.push_back(*tx.recipient);
            break;
        case TxKind::kDeploy:
            ids.push_back(contract_address(tx.sender, tx.nonce));
            break;
        case TxKind::kCall: {
            ids.push_back(*tx.recipient);
            auto payload = ledger::CallPayload::decode(as_view(tx.payload));
            ids.insert(ids.end(), payload.declared.begin(), payload.declared.end());
            break;
        }
    }
    return ids;
}

}  // namespace aqua::vm
