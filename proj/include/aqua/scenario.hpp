// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "aqua/client.hpp"
#include "aqua/operator_node.hpp"

namespace aqua::sim {

struct StackConfig {
    op::Config op;
    std::uint64_t chain_delay = 0;
    std::uint64_t seed = 42;
    std::size_t clients = 0;
    std::uint64_t fund = 0;  // initial balance per client, via the issuer
};

// A whole in-process deployment: chain, TEE platform, operator, enclave,
// clients, and an injected logical clock.
class Stack {
  public:
    explicit Stack(StackConfig cfg);

    client::Client& new_client();
    client::Client& client_at(std::size_t i) { return *clients_[i]; }
    std::size_t client_count() const { return clients_.size(); }

    // Issues `amount` to each listed client through ordinary issuer
    // transfer blocks and waits for them to land.
    void fund_clients(std::uint64_t amount);

    // Advances the logical clock and the chain height together.
    void tick_ms(std::uint64_t ms, std::uint64_t chain_ticks = 1);
    std::uint64_t now() const { return now_ms_; }

    // Replaces the failed platform with a fresh one and restores.
    void replace_platform_and_restore();

    chain::SimChain& chain() { return chain_; }
    op::Operator& op() { return *op_; }
    crypto::Rng& rng() { return rng_; }

    std::uint64_t issuer_nonce = 0;
    ledger::Transaction issuer_transfer(const ledger::AccountId& to, std::uint64_t amount);

  private:
    StackConfig cfg_;
    crypto::Rng rng_;
    chain::SimChain chain_;
    std::vector<std::unique_ptr<tee::Platform>> platforms_;
    std::unique_ptr<op::Operator> op_;
    std::vector<std::unique_ptr<client::Client>> clients_;
    std::uint64_t now_ms_ = 0;
};

// JSON-scripted scenario execution. Same seed, same report bytes.
struct ScenarioReport {
    bool passed = false;
    nlohmann::json json;
    std::string summary;
};

ScenarioReport run_scenario(const nlohmann::json& scenario);
ScenarioReport run_scenario_file(const std::string& path);

// Bundled scripts for the demo subcommands and the determinism gate.
nlohmann::json builtin_scenario(const std::string& name);  // throws on unknown
std::vector<std::string> builtin_scenario_names();

struct BenchRow {
    std::size_t block_size = 0;
    std::size_t accounts = 0;
    std::string kind;
    double mean_tps = 0;
    double std_tps = 0;
    std::size_t runs = 0;
};

// Measures end-to-end block-pipeline throughput (pre-signed transactions,
// enclave execution, ledger append, sealing).
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& block_sizes,
                                const std::vector<std::size_t>& account_counts,
                                const std::string& kind, std::size_t runs,
                                std::size_t txs_per_run, std::uint64_t seed);

nlohmann::json bench_to_json(const std::vector<BenchRow>& rows);
std::string bench_to_table(const std::vector<BenchRow>& rows);

}  // namespace aqua::sim
