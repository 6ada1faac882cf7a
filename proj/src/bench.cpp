// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "aqua/scenario.hpp"

namespace aqua::sim {

namespace {

crypto::KeyPair bench_keypair(std::uint64_t seed, std::size_t index) {
    ByteWriter w;
    w.put_u64(seed);
    w.put_u64(index);
    Digest d = crypto::sha256(as_view(w.data()));
    return crypto::keypair_from_secret(crypto::Scheme::kPb, as_view(d));
}

struct BenchStack {
    StackConfig cfg;
    std::unique_ptr<Stack> stack;
    std::vector<crypto::KeyPair> accounts;
    std::vector<std::uint64_t> nonces;
    std::optional<ledger::AccountId> token;

    BenchStack(std::size_t block_size, std::size_t account_count, std::uint64_t seed,
               bool with_token, std::size_t sender_budget) {
        cfg.seed = seed;
        cfg.op.flush_tx_count = block_size;
        cfg.op.flush_tx_timeout_ms = ~std::uint64_t{0} >> 1;
        cfg.op.sync_block_count = ~std::uint64_t{0} >> 1;
        cfg.op.sync_timeout_ms = ~std::uint64_t{0} >> 1;
        stack = std::make_unique<Stack>(cfg);

        accounts.reserve(account_count);
        nonces.assign(account_count, 0);
        for (std::size_t i = 0; i < account_count; ++i)
            accounts.push_back(bench_keypair(seed, i));

        // Provision the full state in large issuer blocks before measuring.
        auto& op = stack->op();
        std::size_t funded = 0;
        while (funded < account_count) {
            std::size_t batch = std::min<std::size_t>(1000, account_count - funded);
            for (std::size_t i = 0; i < batch; ++i) {
                auto tx = stack->issuer_transfer(ledger::account_id(accounts[funded + i].pub),
                                                 sender_budget);
                op.submit_tx(tx.encode(), stack->now());
            }
            op.flush_block(stack->now());
            funded += batch;
        }

        if (with_token) {
            ledger::Transaction deploy;
            deploy.sender = accounts[0].pub;
            deploy.nonce = nonces[0]++;
            deploy.kind = ledger::TxKind::kDeploy;
            vm::Program p;
            p.push(0).op(vm::Op::kCalldata);
            p.op(vm::Op::kDup);
            p.op(vm::Op::kSload);
            p.push(8).op(vm::Op::kCalldata);
            p.op(vm::Op::kAdd);
            p.op(vm::Op::kSwap);
            p.op(vm::Op::kSstore);
            p.op(vm::Op::kHalt);
            deploy.payload = p.code();
            token = vm::contract_address(deploy.sender, deploy.nonce);
            op.submit_tx(ledger::sign_tx(std::move(deploy), accounts[0].secret).encode(),
                         stack->now());
            op.flush_block(stack->now());
        }
    }
};

}  // namespace

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& block_sizes,
                                const std::vector<std::size_t>& account_counts,
                                const std::string& kind, std::size_t runs,
                                std::size_t txs_per_run, std::uint64_t seed) {
    bool contract = kind == "contract";
    std::vector<BenchRow> rows;

    for (std::size_t accounts : account_counts) {
        for (std::size_t block_size : block_sizes) {
            std::vector<double> samples;
            for (std::size_t run = 0; run < runs; ++run) {
                BenchStack bench(block_size, accounts, seed + run * 1000 + block_size, contract,
                                 txs_per_run);
                std::size_t senders = std::min<std::size_t>(64, accounts);

                // Pre-sign the workload; measurement covers the pipeline,
                // not client-side signing.
                std::vector<Bytes> wire;
                wire.reserve(txs_per_run);
                for (std::size_t i = 0; i < txs_per_run; ++i) {
                    std::size_t s = i % senders;
                    ledger::Transaction tx;
                    tx.sender = bench.accounts[s].pub;
                    tx.nonce = bench.nonces[s]++;
                    if (contract) {
                        tx.kind = ledger::TxKind::kCall;
                        tx.recipient = *bench.token;
                        ledger::CallPayload payload;
                        ByteWriter w;
                        w.put_u64(i % 1024);
                        w.put_u64(1);
                        payload.data = std::move(w).data();
                        tx.payload = payload.encode();
                    } else {
                        tx.kind = ledger::TxKind::kTransfer;
                        tx.recipient =
                            ledger::account_id(bench.accounts[(i * 7 + 1) % accounts].pub);
                        tx.amount = 1;
                    }
                    wire.push_back(ledger::sign_tx(std::move(tx), bench.accounts[s].secret).encode());
                }

                auto& op = bench.stack->op();
                auto start = std::chrono::steady_clock::now();
                for (auto& tx : wire) op.submit_tx(std::move(tx), bench.stack->now());
                op.flush_block(bench.stack->now());
                auto stop = std::chrono::steady_clock::now();
                double secs = std::chrono::duration<double>(stop - start).count();
                samples.push_back(static_cast<double>(txs_per_run) / secs);
            }

            double mean = 0;
            for (double s : samples) mean += s;
            mean /= static_cast<double>(samples.size());
            double var = 0;
            for (double s : samples) var += (s - mean) * (s - mean);
            var /= static_cast<double>(samples.size());

            rows.push_back({block_size, accounts, contract ? "contract" : "payment", mean,
                            std::sqrt(var), runs});
        }
    }
    return rows;
}

nlohmann::json bench_to_json(const std::vector<BenchRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["block_size"] = r.block_size;
        row["accounts"] = r.accounts;
        row["kind"] = r.kind;
        row["mean_tps"] = r.mean_tps;
        row["std_tps"] = r.std_tps;
        row["runs"] = r.runs;
        j.push_back(row);
    }
    return j;
}

std::string bench_to_table(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(12) << "block_size" << std::setw(10) << "accounts"
        << std::setw(10) << "kind" << std::setw(14) << "mean_tps" << std::setw(12) << "std_tps"
        << "runs\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(12) << r.block_size << std::setw(10) << r.accounts
            << std::setw(10) << r.kind << std::setw(14) << std::fixed << std::setprecision(1)
            << r.mean_tps << std::setw(12) << r.std_tps << r.runs << "\n";
    }
    return out.str();
}

}  // namespace aqua::sim
