// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/chain.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace aqua;
using namespace aqua::testing;
using ledger::CensStatus;

namespace {

struct Env {
    crypto::Rng rng{21};
    crypto::KeyPair enclave_pb;
    crypto::KeyPair enclave_tee;
    crypto::KeyPair op;
    crypto::KeyPair client;
    chain::SimChain chain;

    explicit Env(std::uint64_t delay = 0) : chain(delay) {
        enclave_pb = crypto::keygen(crypto::Scheme::kPb, rng);
        enclave_tee = crypto::keygen(crypto::Scheme::kTee, rng);
        op = crypto::keygen(crypto::Scheme::kPb, rng);
        client = crypto::keygen(crypto::Scheme::kPb, rng);
        chain.deploy(enclave_pb.pub, enclave_tee.pub, op.pub);
    }

    crypto::Signature sign_transition(const Digest& a, const Digest& b,
                                      const crypto::KeyPair& key) {
        return crypto::sign(key.secret, as_view(ledger::vtp_message(a, b)));
    }

    ledger::AccessTicket ticket(std::uint64_t expiry) {
        ledger::AccessTicket t;
        t.client = client.pub;
        t.expiry_height = expiry;
        t.sig = crypto::sign(enclave_pb.secret,
                             as_view(ledger::ticket_message(client.pub, expiry)));
        return t;
    }

    crypto::Ciphertext cipher(ByteView data) {
        return crypto::encrypt(enclave_pb.pub, data, rng);
    }
};

Digest digest_of(std::uint8_t fill) {
    Digest d;
    d.bytes.fill(fill);
    return d;
}

}  // namespace

TEST_CASE("contract deploy starts at the genesis sentinel") {
    Env env;
    CHECK(env.chain.contract().lroot_pb == Digest{});
    CHECK(env.chain.contract().pk_e_pb.size() == 1);
    CHECK(env.chain.contract().pk_e_tee.size() == 1);

    chain::SimChain another;
    crypto::Rng rng(5);
    auto kp = crypto::keygen(crypto::Scheme::kPb, rng);
    auto kt = crypto::keygen(crypto::Scheme::kTee, rng);
    another.deploy(kp.pub, kt.pub, kp.pub);
    CHECK(another.id() != env.chain.id());
}

TEST_CASE("contract accepts only chained signed transitions") {
    Env env;
    Digest r1 = digest_of(0x11), r2 = digest_of(0x22);

    auto h1 = env.chain.submit(
        chain::PostLRoot{Digest{}, r1, env.sign_transition(Digest{}, r1, env.enclave_pb)});
    CHECK(env.chain.result_of(h1)->ok);
    CHECK(env.chain.contract().lroot_pb == r1);

    auto h2 = env.chain.submit(
        chain::PostLRoot{r1, r2, env.sign_transition(r1, r2, env.enclave_pb)});
    CHECK(env.chain.result_of(h2)->ok);
    CHECK(env.chain.contract().lroot_pb == r2);

    // Replay of the first transition: no state change, a rejection event.
    std::size_t events_before = env.chain.event_count();
    auto h3 = env.chain.submit(
        chain::PostLRoot{Digest{}, r1, env.sign_transition(Digest{}, r1, env.enclave_pb)});
    CHECK(env.chain.result_of(h3)->ok);
    CHECK(env.chain.contract().lroot_pb == r2);
    auto events = env.chain.events_since(events_before);
    REQUIRE(events.size() == 1);
    CHECK(std::holds_alternative<chain::RootRejected>(events[0].body));
}

TEST_CASE("contract rejects foreign transition signatures") {
    Env env;
    crypto::Rng rng(9);
    auto mallory = crypto::keygen(crypto::Scheme::kPb, rng);
    Digest r1 = digest_of(0x33);
    auto h = env.chain.submit(
        chain::PostLRoot{Digest{}, r1, env.sign_transition(Digest{}, r1, mallory)});
    CHECK_FALSE(env.chain.result_of(h)->ok);
    CHECK(env.chain.contract().lroot_pb == Digest{});
}

TEST_CASE("contract replaces the enclave only on an operator-signed call") {
    Env env;
    crypto::Rng rng(10);
    auto new_pb = crypto::keygen(crypto::Scheme::kPb, rng);
    auto new_tee = crypto::keygen(crypto::Scheme::kTee, rng);
    Digest r1 = digest_of(0x44);

    auto transition = env.sign_transition(Digest{}, r1, new_pb);  // signed by the NEW key
    Bytes msg = ledger::replace_enc_message(new_pb.pub, new_tee.pub, Digest{}, r1, transition);

    SUBCASE("operator-signed replacement rotates keys and advances the root") {
        auto op_sig = crypto::sign(env.op.secret, as_view(msg));
        auto h = env.chain.submit(
            chain::ReplaceEnc{new_pb.pub, new_tee.pub, Digest{}, r1, transition, op_sig});
        CHECK(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().pk_e_pb.size() == 2);
        CHECK(env.chain.contract().pk_e_pb.back() == new_pb.pub);
        CHECK(env.chain.contract().lroot_pb == r1);
    }

    SUBCASE("non-operator signature reverts") {
        auto bad_sig = crypto::sign(env.client.secret, as_view(msg));
        auto h = env.chain.submit(
            chain::ReplaceEnc{new_pb.pub, new_tee.pub, Digest{}, r1, transition, bad_sig});
        CHECK_FALSE(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().pk_e_pb.size() == 1);
    }

    SUBCASE("stale anchor leaves keys and root untouched") {
        Digest stale = digest_of(0x55);
        auto t2 = env.sign_transition(stale, r1, new_pb);
        Bytes msg2 = ledger::replace_enc_message(new_pb.pub, new_tee.pub, stale, r1, t2);
        auto op_sig = crypto::sign(env.op.secret, as_view(msg2));
        auto h = env.chain.submit(
            chain::ReplaceEnc{new_pb.pub, new_tee.pub, stale, r1, t2, op_sig});
        CHECK_FALSE(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().pk_e_pb.size() == 1);
        CHECK(env.chain.contract().lroot_pb == Digest{});
    }
}

TEST_CASE("censorship submissions require a live ticket") {
    Env env;
    auto etx = env.cipher(to_bytes(std::string_view("tx bytes")));

    SUBCASE("valid ticket appends a pending record and emits the ciphertext") {
        auto h = env.chain.submit(chain::SubmitCensTx{etx, env.ticket(100)});
        auto result = env.chain.result_of(h);
        REQUIRE(result->ok);
        CHECK(*result->request_index == 0);
        REQUIRE(env.chain.contract().cens_reqs.size() == 1);
        CHECK(env.chain.contract().cens_reqs[0].status == CensStatus::kPending);
        CHECK(env.chain.contract().cens_reqs[0].request_hash ==
              crypto::sha256(as_view(etx.encode())));

        auto events = env.chain.events_since(0);
        REQUIRE(events.size() == 1);
        auto* sub = std::get_if<chain::CensTxSubmitted>(&events[0].body);
        REQUIRE(sub != nullptr);
        CHECK(sub->etx.encode() == etx.encode());
    }

    SUBCASE("expired ticket reverts") {
        env.chain.tick(10);
        auto h = env.chain.submit(chain::SubmitCensTx{etx, env.ticket(5)});
        CHECK_FALSE(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().cens_reqs.empty());
    }

    SUBCASE("forged ticket reverts") {
        auto t = env.ticket(100);
        t.sig = crypto::sign(env.client.secret,
                             as_view(ledger::ticket_message(env.client.pub, 100)));
        auto h = env.chain.submit(chain::SubmitCensTx{etx, t});
        CHECK_FALSE(env.chain.result_of(h)->ok);
    }

    SUBCASE("two submissions keep order") {
        auto h1 = env.chain.submit(chain::SubmitCensTx{etx, env.ticket(100)});
        auto equery = env.cipher(to_bytes(std::string_view("query")));
        auto h2 = env.chain.submit(chain::SubmitCensQry{equery, env.ticket(100)});
        CHECK(*env.chain.result_of(h1)->request_index == 0);
        CHECK(*env.chain.result_of(h2)->request_index == 1);
    }
}

TEST_CASE("censorship resolution demands the matching enclave signature") {
    Env env;
    auto etx = env.cipher(to_bytes(std::string_view("censored tx")));
    env.chain.submit(chain::SubmitCensTx{etx, env.ticket(100)});
    Digest etx_hash = crypto::sha256(as_view(etx.encode()));

    SUBCASE("enclave-signed INCLUDED status lands") {
        auto sig = crypto::sign(env.enclave_pb.secret,
                                as_view(ledger::cens_tx_message(etx_hash, CensStatus::kIncluded)));
        auto h = env.chain.submit(chain::ResolveCensTx{0, CensStatus::kIncluded, sig});
        CHECK(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().cens_reqs[0].status == CensStatus::kIncluded);

        // A second resolution cannot overwrite the first.
        auto again = crypto::sign(
            env.enclave_pb.secret,
            as_view(ledger::cens_tx_message(etx_hash, CensStatus::kSignatureError)));
        auto h2 = env.chain.submit(chain::ResolveCensTx{0, CensStatus::kSignatureError, again});
        CHECK_FALSE(env.chain.result_of(h2)->ok);
        CHECK(env.chain.contract().cens_reqs[0].status == CensStatus::kIncluded);
    }

    SUBCASE("forged signature reverts and stays pending") {
        auto sig = crypto::sign(env.client.secret,
                                as_view(ledger::cens_tx_message(etx_hash, CensStatus::kIncluded)));
        auto h = env.chain.submit(chain::ResolveCensTx{0, CensStatus::kIncluded, sig});
        CHECK_FALSE(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().cens_reqs[0].status == CensStatus::kPending);
    }

    SUBCASE("bad index reverts") {
        auto sig = crypto::sign(env.enclave_pb.secret,
                                as_view(ledger::cens_tx_message(etx_hash, CensStatus::kIncluded)));
        auto h = env.chain.submit(chain::ResolveCensTx{5, CensStatus::kIncluded, sig});
        CHECK_FALSE(env.chain.result_of(h)->ok);
    }

    SUBCASE("tx-style resolution of a query record fails the signature check") {
        auto equery = env.cipher(to_bytes(std::string_view("query")));
        env.chain.submit(chain::SubmitCensQry{equery, env.ticket(100)});
        Digest equery_hash = crypto::sha256(as_view(equery.encode()));
        // Signed as if it were a tx record.
        auto sig = crypto::sign(
            env.enclave_pb.secret,
            as_view(ledger::cens_tx_message(equery_hash, CensStatus::kIncluded)));
        auto h = env.chain.submit(chain::ResolveCensTx{1, CensStatus::kIncluded, sig});
        CHECK_FALSE(env.chain.result_of(h)->ok);
        CHECK(env.chain.contract().cens_reqs[1].status == CensStatus::kPending);
    }
}

TEST_CASE("query resolution binds status and payload hashes") {
    Env env;
    auto equery = env.cipher(to_bytes(std::string_view("read query")));
    env.chain.submit(chain::SubmitCensQry{equery, env.ticket(100)});
    Digest equery_hash = crypto::sha256(as_view(equery.encode()));

    auto edata = env.cipher(to_bytes(std::string_view("response")));
    Digest edata_hash = crypto::sha256(as_view(edata.encode()));

    auto sig = crypto::sign(
        env.enclave_pb.secret,
        as_view(ledger::cens_qry_message(equery_hash, CensStatus::kOk, edata_hash)));
    auto h = env.chain.submit(chain::ResolveCensQry{0, CensStatus::kOk, edata, sig});
    CHECK(env.chain.result_of(h)->ok);
    CHECK(env.chain.contract().cens_reqs[0].status == CensStatus::kOk);
    CHECK(env.chain.contract().cens_reqs[0].edata_hash == edata_hash);
}

TEST_CASE("confirmation delay defers application in submission order") {
    Env env(3);
    Digest r1 = digest_of(0x66), r2 = digest_of(0x77);
    auto h1 = env.chain.submit(
        chain::PostLRoot{Digest{}, r1, env.sign_transition(Digest{}, r1, env.enclave_pb)});
    auto h2 = env.chain.submit(
        chain::PostLRoot{r1, r2, env.sign_transition(r1, r2, env.enclave_pb)});

    CHECK_FALSE(env.chain.result_of(h1).has_value());
    env.chain.tick(2);
    CHECK_FALSE(env.chain.result_of(h1).has_value());
    env.chain.tick();
    CHECK(env.chain.result_of(h1).has_value());
    CHECK(env.chain.result_of(h2).has_value());
    CHECK(env.chain.contract().lroot_pb == r2);  // applied in order
}

TEST_CASE("chain state dump is valid json") {
    Env env;
    auto etx = env.cipher(to_bytes(std::string_view("x")));
    env.chain.submit(chain::SubmitCensTx{etx, env.ticket(100)});
    auto j = env.chain.dump();
    CHECK(j["cens_reqs"].size() == 1);
    CHECK(j["lroot_pb"].get<std::string>() == Digest{}.hex());
}
