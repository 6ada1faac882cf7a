// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/scenario.hpp"

#include <fstream>
#include <sstream>

namespace aqua::sim {

Stack::Stack(StackConfig cfg) : cfg_(cfg), rng_(cfg.seed), chain_(cfg.chain_delay) {
    platforms_.push_back(std::make_unique<tee::Platform>(rng_));
    op_ = std::make_unique<op::Operator>(chain_, *platforms_.back(), cfg.op, rng_.next_u64());
    op_->init(now_ms_);
    for (std::size_t i = 0; i < cfg.clients; ++i) new_client();
    if (cfg.fund > 0) fund_clients(cfg.fund);
}

client::Client& Stack::new_client() {
    clients_.push_back(std::make_unique<client::Client>(chain_, *op_, rng_.next_u64()));
    clients_.back()->enroll();
    return *clients_.back();
}

ledger::Transaction Stack::issuer_transfer(const ledger::AccountId& to, std::uint64_t amount) {
    ledger::Transaction tx;
    tx.sender = vm::issuer_keypair().pub;
    tx.nonce = issuer_nonce++;
    tx.kind = ledger::TxKind::kTransfer;
    tx.recipient = to;
    tx.amount = amount;
    return ledger::sign_tx(std::move(tx), vm::issuer_keypair().secret);
}

void Stack::fund_clients(std::uint64_t amount) {
    for (auto& c : clients_) {
        ledger::Transaction tx = issuer_transfer(c->id(), amount);
        op_->submit_tx(tx.encode(), now_ms_);
    }
    op_->flush_block(now_ms_);
    op_->sync(now_ms_);
    chain_.tick();
}

void Stack::tick_ms(std::uint64_t ms, std::uint64_t chain_ticks) {
    now_ms_ += ms;
    chain_.tick(chain_ticks);
    op_->on_tick(now_ms_);
}

void Stack::replace_platform_and_restore() {
    platforms_.push_back(std::make_unique<tee::Platform>(rng_));
    op_->restore_enclave(*platforms_.back(), now_ms_);
}

namespace {

StackConfig config_from_json(const nlohmann::json& j) {
    StackConfig cfg;
    cfg.seed = j.value("seed", 42u);
    const auto& c = j.contains("config") ? j["config"] : nlohmann::json::object();
    cfg.op.flush_tx_count = c.value("flush_tx_count", 2u);
    cfg.op.flush_tx_timeout_ms = c.value("flush_tx_timeout_ms", 1000u);
    cfg.op.sync_block_count = c.value("sync_block_count", 2u);
    cfg.op.sync_timeout_ms = c.value("sync_timeout_ms", 10000u);
    cfg.chain_delay = c.value("chain_delay", 0u);
    cfg.clients = c.value("clients", 2u);
    cfg.fund = c.value("fund", 1000u);
    return cfg;
}

Bytes named_code(const std::string& name) {
    if (name == "counter") {
        vm::Program p;
        p.push(0).op(vm::Op::kSload);
        p.push(1).op(vm::Op::kAdd);
        p.op(vm::Op::kDup);
        p.push(7).op(vm::Op::kEmit);
        p.push(0).op(vm::Op::kSstore);
        p.op(vm::Op::kHalt);
        return p.code();
    }
    if (name == "token") {
        vm::Program p;
        p.push(0).op(vm::Op::kCalldata);
        p.op(vm::Op::kDup);
        p.op(vm::Op::kSload);
        p.push(8).op(vm::Op::kCalldata);
        p.op(vm::Op::kAdd);
        p.op(vm::Op::kSwap);
        p.op(vm::Op::kSstore);
        p.op(vm::Op::kHalt);
        return p.code();
    }
    if (name == "loop") {
        vm::Program p;
        p.push(0).op(vm::Op::kJmp);
        return p.code();
    }
    throw std::invalid_argument("unknown contract name: " + name);
}

ledger::CensStatus status_from_string(const std::string& s) {
    for (int i = 0; i <= 7; ++i) {
        auto status = static_cast<ledger::CensStatus>(i);
        if (s == ledger::to_string(status)) return status;
    }
    throw std::invalid_argument("unknown status: " + s);
}

// Execution state threaded through the steps.
struct Runner {
    Stack stack;
    std::map<std::size_t, ledger::Transaction> last_tx;  // per client
    std::vector<std::uint64_t> escalations;              // request indices, in order
    std::optional<ledger::AccountId> last_contract;
    nlohmann::json steps = nlohmann::json::array();
    bool passed = true;
    std::ostringstream log;

    explicit Runner(StackConfig cfg) : stack(std::move(cfg)) {}

    void note(std::size_t index, const std::string& op, bool ok, const std::string& detail) {
        nlohmann::json s;
        s["index"] = index;
        s["op"] = op;
        s["ok"] = ok;
        if (!detail.empty()) s["detail"] = detail;
        steps.push_back(s);
        if (!ok) passed = false;
        log << (ok ? "  ok  " : " FAIL ") << op;
        if (!detail.empty()) log << "  (" << detail << ")";
        log << "\n";
    }
};

std::uint64_t resolve_request_index(const Runner& r, const nlohmann::json& step) {
    if (!step.contains("index") || step["index"] == "last") {
        if (r.escalations.empty()) throw std::invalid_argument("no escalations yet");
        return r.escalations.back();
    }
    if (step["index"].is_number()) return step["index"].get<std::uint64_t>();
    return r.escalations.at(step["index"].get<std::size_t>());
}

void run_step(Runner& r, std::size_t index, const nlohmann::json& step) {
    const std::string op = step.at("op").get<std::string>();
    Stack& stack = r.stack;

    if (op == "transfer" || op == "submit_censored") {
        std::size_t from = step.value("from", 0u);
        std::size_t to = step.value("to", 0u);
        auto& sender = stack.client_at(from);
        ledger::Transaction tx =
            sender.make_transfer(stack.client_at(to).id(), step.value("amount", 1u));
        bool accepted = sender.submit(tx, stack.now());
        r.last_tx[from] = tx;
        r.note(index, op, true, accepted ? "accepted" : "dropped");
    } else if (op == "deploy") {
        std::size_t who = step.value("client", 0u);
        auto& sender = stack.client_at(who);
        ledger::Transaction tx = sender.make_deploy(named_code(step.value("code", "counter")));
        r.last_contract = vm::contract_address(sender.public_key(), tx.nonce);
        bool accepted = sender.submit(tx, stack.now());
        r.last_tx[who] = tx;
        r.note(index, op, true, accepted ? "accepted" : "dropped");
    } else if (op == "call") {
        std::size_t who = step.value("client", 0u);
        if (!r.last_contract) throw std::invalid_argument("no contract deployed yet");
        auto& sender = stack.client_at(who);
        Bytes data;
        if (step.contains("data_u64")) {
            ByteWriter w;
            for (const auto& v : step["data_u64"]) w.put_u64(v.get<std::uint64_t>());
            data = std::move(w).data();
        } else {
            data = {0x01};
        }
        ledger::Transaction tx = sender.make_call(*r.last_contract, data, step.value("amount", 0u));
        bool accepted = sender.submit(tx, stack.now());
        r.last_tx[who] = tx;
        r.note(index, op, true, accepted ? "accepted" : "dropped");
    } else if (op == "flush") {
        stack.op().flush_block(stack.now());
        r.note(index, op, true, "blocks=" + std::to_string(stack.op().block_count()));
    } else if (op == "sync") {
        stack.op().sync(stack.now());
        stack.chain().tick();
        r.note(index, op, true,
               "anchor_version=" + std::to_string(stack.op().anchor().version));
    } else if (op == "tick") {
        stack.tick_ms(step.value("ms", 1000u), step.value("chain", 1u));
        r.note(index, op, true, "");
    } else if (op == "censor") {
        stack.op().set_censoring(step.value("on", true));
        r.note(index, op, true, step.value("on", true) ? "on" : "off");
    } else if (op == "deadbeat") {
        stack.op().set_deadbeat(step.value("on", true));
        r.note(index, op, true, step.value("on", true) ? "on" : "off");
    } else if (op == "escalate_tx") {
        std::size_t who = step.value("client", 0u);
        auto it = r.last_tx.find(who);
        if (it == r.last_tx.end()) throw std::invalid_argument("client has no tx to escalate");
        std::uint64_t idx = stack.client_at(who).escalate_tx(it->second);
        r.escalations.push_back(idx);
        r.note(index, op, true, "request=" + std::to_string(idx));
    } else if (op == "escalate_qry_tx") {
        std::size_t who = step.value("client", 0u);
        auto& c = stack.client_at(who);
        Digest tx_hash{};
        if (step.value("tx", "last") == "last") {
            auto it = r.last_tx.find(who);
            if (it == r.last_tx.end()) throw std::invalid_argument("client has no tx");
            tx_hash = it->second.hash();
        } else {
            tx_hash = crypto::sha256(as_view(from_hex(step["tx"].get<std::string>())));
        }
        std::uint64_t idx =
            c.escalate_query(c.make_tx_query(tx_hash, step.value("block", 1u)));
        r.escalations.push_back(idx);
        r.note(index, op, true, "request=" + std::to_string(idx));
    } else if (op == "escalate_qry_as") {
        std::size_t who = step.value("client", 0u);
        auto& c = stack.client_at(who);
        ledger::AccountId target;
        if (step.contains("account")) {
            target = stack.client_at(step["account"].get<std::size_t>()).id();
        } else {
            // A deliberately absent account.
            target = crypto::sha256(to_bytes(std::string_view("absent account")));
        }
        std::uint64_t idx = c.escalate_query(c.make_account_query(target));
        r.escalations.push_back(idx);
        r.note(index, op, true, "request=" + std::to_string(idx));
    } else if (op == "kill_enclave") {
        stack.op().kill_enclave();
        r.note(index, op, true, "");
    } else if (op == "restore") {
        stack.replace_platform_and_restore();
        r.note(index, op, true,
               "anchor_version=" + std::to_string(stack.op().anchor().version));
    } else if (op == "tamper_block") {
        stack.op().corrupt_stored_block(step.value("block", 1u), step.value("byte", 0u));
        r.note(index, op, true, "");
    } else if (op == "verify_receipt") {
        std::size_t who = step.value("client", 0u);
        auto it = r.last_tx.find(who);
        if (it == r.last_tx.end()) throw std::invalid_argument("client has no tx");
        bool expect = step.value("expect", true);
        bool ok = false;
        bool anchored = false;
        try {
            auto bundle = stack.op().get_receipt(it->second.hash());
            if (bundle) {
                auto res = stack.client_at(who).verify_receipt(*bundle, it->second);
                ok = res.ok;
                anchored = res.anchored;
            }
        } catch (const std::exception&) {
            ok = false;  // unable to produce a verifiable bundle
        }
        bool pass = ok == expect;
        if (pass && step.contains("expect_anchored"))
            pass = anchored == step["expect_anchored"].get<bool>();
        r.note(index, op, pass,
               std::string("verified=") + (ok ? "true" : "false") +
                   (anchored ? " anchored" : ""));
    } else if (op == "attest") {
        std::size_t who = step.value("client", 0u);
        bool ok = stack.client_at(who).attest();
        r.note(index, op, ok == step.value("expect", true),
               ok ? "attested" : "refused");
    } else if (op == "refresh_keys") {
        stack.client_at(step.value("client", 0u)).refresh_keys();
        r.note(index, op, true, "");
    } else if (op == "assert_contract_root") {
        Digest onchain = stack.chain().contract().lroot_pb;
        std::string want = step.value("equals", "lroot_cur");
        bool pass = false;
        if (want == "lroot_cur") pass = onchain == stack.op().lroot_cur().root;
        else if (want == "anchor") pass = onchain == stack.op().anchor().root;
        else if (want == "not_lroot_cur") pass = onchain != stack.op().lroot_cur().root;
        r.note(index, op, pass, "contract_root=" + onchain.hex().substr(0, 12));
    } else if (op == "assert_cens_status") {
        std::uint64_t idx = resolve_request_index(r, step);
        auto status = status_from_string(step.at("status").get<std::string>());
        const auto& reqs = stack.chain().contract().cens_reqs;
        bool pass = idx < reqs.size() && reqs[idx].status == status;
        r.note(index, op, pass,
               "request=" + std::to_string(idx) + " status=" +
                   (idx < reqs.size() ? ledger::to_string(reqs[idx].status) : "?"));
    } else if (op == "assert_resolution_data") {
        std::uint64_t idx = resolve_request_index(r, step);
        std::size_t who = step.value("client", 0u);
        auto res = stack.client_at(who).check_resolution(idx);
        bool pass = res.phase == client::ResolutionPhase::kResolved && !res.data.empty();
        r.note(index, op, pass, "bytes=" + std::to_string(res.data.size()));
    } else if (op == "assert_balance") {
        std::size_t who = step.value("client", 0u);
        auto account = stack.op().get_account(stack.client_at(who).id());
        std::uint64_t balance = account ? account->balance : 0;
        bool pass = balance == step.at("equals").get<std::uint64_t>();
        r.note(index, op, pass, "balance=" + std::to_string(balance));
    } else if (op == "assert_block_count") {
        bool pass = stack.op().block_count() == step.at("equals").get<std::uint64_t>();
        r.note(index, op, pass, "blocks=" + std::to_string(stack.op().block_count()));
    } else if (op == "assert_keys_rotated") {
        bool pass = stack.chain().contract().pk_e_pb.size() ==
                    step.at("pb_count").get<std::size_t>();
        r.note(index, op, pass,
               "pb_keys=" + std::to_string(stack.chain().contract().pk_e_pb.size()));
    } else if (op == "assert_coherence") {
        bool pass = stack.op().audit_coherence();
        r.note(index, op, pass, "");
    } else {
        throw std::invalid_argument("unknown step op: " + op);
    }
}

}  // namespace

ScenarioReport run_scenario(const nlohmann::json& scenario) {
    Runner runner(config_from_json(scenario));
    runner.log << "scenario: " << scenario.value("name", "unnamed") << "\n";

    const auto& steps = scenario.at("steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        try {
            run_step(runner, i, steps[i]);
        } catch (const std::exception& e) {
            runner.note(i, steps[i].value("op", "?"), false,
                        std::string("exception: ") + e.what());
        }
    }

    ScenarioReport report;
    report.passed = runner.passed;
    report.json["name"] = scenario.value("name", "unnamed");
    report.json["seed"] = scenario.value("seed", 42u);
    report.json["passed"] = runner.passed;
    report.json["steps"] = runner.steps;
    nlohmann::json final_state;
    final_state["blocks"] = runner.stack.op().block_count();
    final_state["lroot_cur"] = runner.stack.op().lroot_cur().root.hex();
    final_state["anchor_version"] = runner.stack.op().anchor().version;
    final_state["contract_root"] = runner.stack.chain().contract().lroot_pb.hex();
    final_state["chain"] = runner.stack.chain().dump();
    report.json["final"] = final_state;

    runner.log << (runner.passed ? "PASSED" : "FAILED") << "\n";
    report.summary = runner.log.str();
    return report;
}

ScenarioReport run_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open scenario file: " + path);
    nlohmann::json scenario;
    try {
        in >> scenario;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("scenario parse error in " + path + ": " + e.what());
    }
    return run_scenario(scenario);
}

nlohmann::json builtin_scenario(const std::string& name) {
    using json = nlohmann::json;
    if (name == "happy-path") {
        return json{
            {"name", "happy-path"},
            {"seed", 7},
            {"config",
             {{"flush_tx_count", 2}, {"sync_block_count", 2}, {"clients", 3}, {"fund", 1000}}},
            {"steps",
             json::array({
                 {{"op", "attest"}, {"client", 0}, {"expect", true}},
                 {{"op", "transfer"}, {"from", 0}, {"to", 1}, {"amount", 50}},
                 {{"op", "transfer"}, {"from", 1}, {"to", 2}, {"amount", 25}},
                 {{"op", "sync"}},
                 {{"op", "verify_receipt"}, {"client", 0}, {"expect", true}, {"expect_anchored", true}},
                 {{"op", "assert_balance"}, {"client", 1}, {"equals", 1025}},
                 {{"op", "deploy"}, {"client", 2}, {"code", "counter"}},
                 {{"op", "call"}, {"client", 2}},
                 {{"op", "verify_receipt"}, {"client", 2}, {"expect", true}},
                 {{"op", "sync"}},
                 {{"op", "assert_contract_root"}, {"equals", "lroot_cur"}},
                 {{"op", "assert_coherence"}},
             })}};
    }
    if (name == "censor-demo") {
        return json{
            {"name", "censor-demo"},
            {"seed", 11},
            {"config",
             {{"flush_tx_count", 1}, {"sync_block_count", 1}, {"clients", 2}, {"fund", 500}}},
            {"steps",
             json::array({
                 {{"op", "censor"}, {"on", true}},
                 {{"op", "submit_censored"}, {"from", 0}, {"to", 1}, {"amount", 9}},
                 {{"op", "escalate_tx"}, {"client", 0}},
                 {{"op", "tick"}, {"ms", 2000}},
                 {{"op", "tick"}, {"ms", 2000}},
                 {{"op", "assert_cens_status"}, {"index", "last"}, {"status", "INCLUDED"}},
                 {{"op", "escalate_qry_as"}, {"client", 0}, {"account", 1}},
                 {{"op", "tick"}, {"ms", 2000}},
                 {{"op", "assert_cens_status"}, {"index", "last"}, {"status", "OK"}},
                 {{"op", "assert_resolution_data"}, {"client", 0}},
                 {{"op", "escalate_qry_as"}, {"client", 0}},
                 {{"op", "tick"}, {"ms", 2000}},
                 {{"op", "assert_cens_status"}, {"index", "last"}, {"status", "NOT_FOUND"}},
                 {{"op", "assert_balance"}, {"client", 1}, {"equals", 509}},
             })}};
    }
    if (name == "tamper-demo") {
        return json{
            {"name", "tamper-demo"},
            {"seed", 13},
            {"config",
             {{"flush_tx_count", 1}, {"sync_block_count", 1}, {"clients", 2}, {"fund", 300}}},
            {"steps",
             json::array({
                 {{"op", "transfer"}, {"from", 0}, {"to", 1}, {"amount", 5}},
                 {{"op", "sync"}},
                 {{"op", "verify_receipt"}, {"client", 0}, {"expect", true}},
                 {{"op", "tamper_block"}, {"block", 3}, {"byte", 150}},
                 {{"op", "verify_receipt"}, {"client", 0}, {"expect", false}},
             })}};
    }
    if (name == "failover-demo") {
        return json{
            {"name", "failover-demo"},
            {"seed", 17},
            {"config",
             {{"flush_tx_count", 1}, {"sync_block_count", 100}, {"clients", 2}, {"fund", 400}}},
            {"steps",
             json::array({
                 {{"op", "sync"}},
                 {{"op", "transfer"}, {"from", 0}, {"to", 1}, {"amount", 3}},
                 {{"op", "transfer"}, {"from", 1}, {"to", 0}, {"amount", 1}},
                 {{"op", "kill_enclave"}},
                 {{"op", "restore"}},
                 {{"op", "assert_keys_rotated"}, {"pb_count", 2}},
                 {{"op", "assert_contract_root"}, {"equals", "lroot_cur"}},
                 {{"op", "refresh_keys"}, {"client", 0}},
                 {{"op", "attest"}, {"client", 0}, {"expect", true}},
                 {{"op", "assert_coherence"}},
             })}};
    }
    throw std::invalid_argument("unknown builtin scenario: " + name);
}

std::vector<std::string> builtin_scenario_names() {
    return {"happy-path", "censor-demo", "tamper-demo", "failover-demo"};
}

}  // namespace aqua::sim
