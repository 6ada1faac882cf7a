// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "aqua/ledger.hpp"
#include "aqua/mpt.hpp"

namespace aqua::vm {

// Per-transaction step allowance; stands in for gas metering.
inline constexpr std::uint64_t kDefaultStepBudget = 10'000;
inline constexpr std::size_t kMaxStackDepth = 1024;

// Stack machine over 64-bit words. PUSH carries an 8-byte big-endian
// immediate; everything else is a single byte.
enum class Op : std::uint8_t {
    kHalt = 0x00,
    kPush = 0x01,
    kPop = 0x02,
    kDup = 0x03,
    kSwap = 0x04,
    kAdd = 0x05,
    kSub = 0x06,
    kMul = 0x07,
    kDiv = 0x08,
    kMod = 0x09,
    kLt = 0x0a,
    kGt = 0x0b,
    kEq = 0x0c,
    kNot = 0x0d,
    kAnd = 0x0e,
    kOr = 0x0f,
    kJmp = 0x10,
    kJmpIf = 0x11,
    kSload = 0x12,
    kSstore = 0x13,
    kCalldata = 0x14,
    kCalldataLen = 0x15,
    kAmount = 0x16,
    kEmit = 0x17,
    kRevert = 0x18,
};

// Small assembler for tests, demos, and the bench workloads.
class Program {
  public:
    Program& op(Op opcode) {
        code_.push_back(static_cast<std::uint8_t>(opcode));
        return *this;
    }
    Program& push(std::uint64_t value) {
        op(Op::kPush);
        for (int i = 7; i >= 0; --i) code_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
        return *this;
    }
    const Bytes& code() const { return code_; }

  private:
    Bytes code_;
};

struct ContractResult {
    ledger::ReturnCode code = ledger::ReturnCode::kOk;
    std::map<std::uint64_t, std::uint64_t> storage;  // post-state (pre-state on failure)
    std::vector<ledger::LogEvent> events;            // empty unless kOk
};

// Deterministic bytecode interpreter over a contract's storage map.
ContractResult exec_contract(const Bytes& code, const Bytes& calldata,
                             const std::map<std::uint64_t, std::uint64_t>& storage,
                             std::uint64_t amount, std::uint64_t step_budget);

// Simulation faucet: the one account whose outgoing transfers are never
// balance-checked, so scenarios can provision funded states through
// ordinary enclave-executed blocks.
const crypto::KeyPair& issuer_keypair();
const ledger::AccountId& issuer_id();

struct Output {
    mpt::PartialState state;
    std::vector<ledger::Transaction> executed;  // block order, 1:1 with receipts
    std::vector<ledger::Receipt> receipts;
    std::vector<Bytes> rejected;  // wire txs failing parse or signature checks
};

// Executes wire transactions over a partial state. Parse and signature
// failures land in `rejected` and never touch state; valid-but-failing
// transactions consume the sender's nonce and get a failure receipt.
// Throws mpt::PathMissingError when the partial state misses a touched
// account's path.
Output run(const std::vector<Bytes>& wire_txs, const mpt::PartialState& ps,
           std::uint64_t step_budget = kDefaultStepBudget);

// Accounts a transaction may touch; drives partial-state extraction.
std::vector<ledger::AccountId> touched_accounts(const ledger::Transaction& tx);

ledger::AccountId contract_address(const crypto::PublicKey& sender, std::uint64_t nonce);

}  // namespace aqua::vm
