// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "aqua/scenario.hpp"

namespace {

void write_out(const std::string& path, const nlohmann::json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

int run_builtin(const std::string& name, std::uint64_t seed, const std::string& out_path) {
    nlohmann::json scenario = aqua::sim::builtin_scenario(name);
    if (seed != 0) scenario["seed"] = seed;
    auto report = aqua::sim::run_scenario(scenario);
    std::cout << report.summary;
    write_out(out_path, report.json);
    return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aquareum: verifiable centralized ledger simulator"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_path;
    app.add_option("--seed", seed, "override the scenario seed");
    app.add_option("--out", out_path, "write the JSON report to a file");

    auto* init = app.add_subcommand("init", "set up a fresh deployment and print its anchors");

    std::string scenario_path;
    auto* run = app.add_subcommand("run-scenario", "execute a JSON scenario file");
    run->add_option("file", scenario_path, "scenario file")->required();

    std::vector<std::size_t> block_sizes{1, 10, 100, 1000};
    std::vector<std::size_t> account_counts{1000, 10000};
    std::string bench_kind = "payment";
    std::size_t bench_runs = 10;
    std::size_t bench_txs = 2000;
    auto* bench = app.add_subcommand("bench", "block-size / state-size throughput sweep");
    bench->add_option("--block-sizes", block_sizes, "transactions per block");
    bench->add_option("--accounts", account_counts, "full-state sizes");
    bench->add_option("--kind", bench_kind, "payment | contract")
        ->check(CLI::IsMember({"payment", "contract"}));
    bench->add_option("--runs", bench_runs, "repetitions per configuration");
    bench->add_option("--txs", bench_txs, "transactions per repetition");

    auto* censor = app.add_subcommand("censor-demo", "censored-request resolution walkthrough");
    auto* tamper = app.add_subcommand("tamper-demo", "tamper-detection walkthrough");
    auto* failover = app.add_subcommand("failover-demo", "enclave failure and replacement walkthrough");

    CLI11_PARSE(app, argc, argv);

    try {
        if (init->parsed()) {
            aqua::sim::StackConfig cfg;
            cfg.seed = seed ? seed : 42;
            cfg.clients = 2;
            cfg.fund = 1000;
            aqua::sim::Stack stack(cfg);
            nlohmann::json j;
            j["contract_id"] = stack.op().contract_id().hex();
            j["lroot_cur"] = stack.op().lroot_cur().root.hex();
            j["contract_root"] = stack.chain().contract().lroot_pb.hex();
            j["attested"] = stack.client_at(0).attest();
            std::cout << j.dump(2) << "\n";
            write_out(out_path, j);
            return 0;
        }
        if (run->parsed()) {
            nlohmann::json scenario;
            {
                std::ifstream in(scenario_path);
                if (!in.good()) {
                    std::cerr << "cannot open " << scenario_path << "\n";
                    return 2;
                }
                in >> scenario;
            }
            if (seed != 0) scenario["seed"] = seed;
            auto report = aqua::sim::run_scenario(scenario);
            std::cout << report.summary;
            write_out(out_path, report.json);
            return report.passed ? 0 : 1;
        }
        if (bench->parsed()) {
            auto rows = aqua::sim::run_bench(block_sizes, account_counts, bench_kind, bench_runs,
                                             bench_txs, seed ? seed : 42);
            std::cout << aqua::sim::bench_to_table(rows);
            write_out(out_path, aqua::sim::bench_to_json(rows));
            return 0;
        }
        if (censor->parsed()) return run_builtin("censor-demo", seed, out_path);
        if (tamper->parsed()) return run_builtin("tamper-demo", seed, out_path);
        if (failover->parsed()) return run_builtin("failover-demo", seed, out_path);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "scenario parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
