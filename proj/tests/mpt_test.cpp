// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/mpt.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace aqua;

namespace {

// Oracle: rebuild a fresh trie from the surviving entries in sorted key
// order. The root must be a pure function of the key->value map.
Digest sorted_rebuild_root(const std::map<Bytes, Bytes>& entries) {
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    for (const auto& [k, v] : entries) trie.add(as_view(k), as_view(v));
    return trie.root();
}

Bytes random_key(crypto::Rng& rng) {
    Digest d = crypto::sha256(as_view(rng.bytes(8)));
    return to_bytes(as_view(d));
}

}  // namespace

TEST_CASE("mpt empty trie has the fixed sentinel root") {
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    CHECK(trie.root() == mpt::empty_root());
    CHECK(trie.get(as_view(random_key(*(new crypto::Rng(1))))) == std::nullopt);
}

TEST_CASE("mpt add/get/delete basics") {
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    crypto::Rng rng(2);
    Bytes k = random_key(rng);
    Bytes v = to_bytes(std::string_view("value-1"));

    Digest before = trie.root();
    trie.add(as_view(k), as_view(v));
    CHECK(trie.root() != before);
    CHECK(trie.get(as_view(k)) == v);

    Bytes v2 = to_bytes(std::string_view("value-2"));
    trie.add(as_view(k), as_view(v2));
    CHECK(trie.get(as_view(k)) == v2);

    CHECK(trie.remove(as_view(k)));
    CHECK(trie.get(as_view(k)) == std::nullopt);
    CHECK_FALSE(trie.remove(as_view(k)));
    CHECK(trie.root() == mpt::empty_root());
}

TEST_CASE("mpt root equals sorted-rebuild oracle under adds and deletes") {
    crypto::Rng rng(3);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::map<Bytes, Bytes> reference;

    std::vector<Bytes> keys;
    for (int i = 0; i < 100; ++i) {
        Bytes k = random_key(rng);
        Bytes v = rng.bytes(1 + rng.next_u64() % 40);
        trie.add(as_view(k), as_view(v));
        reference[k] = v;
        keys.push_back(k);
    }
    CHECK(trie.root() == sorted_rebuild_root(reference));

    for (int i = 0; i < 30; ++i) {
        const Bytes& k = keys[rng.next_u64() % keys.size()];
        bool was_present = reference.erase(k) > 0;
        CHECK(trie.remove(as_view(k)) == was_present);
    }
    CHECK(trie.root() == sorted_rebuild_root(reference));
}

TEST_CASE("mpt root is insertion-order independent") {
    crypto::Rng rng(5);
    std::map<Bytes, Bytes> entries;
    for (int i = 0; i < 24; ++i) entries[random_key(rng)] = rng.bytes(8);

    std::vector<std::pair<Bytes, Bytes>> shuffled(entries.begin(), entries.end());
    Digest expected = sorted_rebuild_root(entries);
    for (int round = 0; round < 6; ++round) {
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
        mpt::MemoryNodeStore store;
        mpt::Trie trie(store);
        for (const auto& [k, v] : shuffled) trie.add(as_view(k), as_view(v));
        CHECK(trie.root() == expected);
    }
}

TEST_CASE("mpt handles prefix keys via branch value slots") {
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    Bytes shorter = from_hex("a1b2");
    Bytes longer = from_hex("a1b2c3");
    trie.add(as_view(shorter), to_bytes(std::string_view("short")));
    trie.add(as_view(longer), to_bytes(std::string_view("long")));
    CHECK(trie.get(as_view(shorter)) == to_bytes(std::string_view("short")));
    CHECK(trie.get(as_view(longer)) == to_bytes(std::string_view("long")));

    auto proof = trie.prove(as_view(shorter));
    CHECK(proof.verify_inclusion(as_view(shorter), trie.root()));

    CHECK(trie.remove(as_view(shorter)));
    CHECK(trie.get(as_view(longer)) == to_bytes(std::string_view("long")));
    std::map<Bytes, Bytes> reference{{longer, to_bytes(std::string_view("long"))}};
    CHECK(trie.root() == sorted_rebuild_root(reference));
}

TEST_CASE("mpt inclusion and exclusion proofs verify and cross-fail") {
    crypto::Rng rng(7);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::vector<Bytes> keys;
    for (int i = 0; i < 16; ++i) {
        Bytes k = random_key(rng);
        trie.add(as_view(k), as_view(rng.bytes(12)));
        keys.push_back(k);
    }
    Digest root = trie.root();

    for (const auto& k : keys) {
        auto proof = trie.prove(as_view(k));
        CHECK(proof.polarity == mpt::Proof::Polarity::kInclusion);
        CHECK(proof.verify_inclusion(as_view(k), root));
        CHECK_FALSE(proof.verify_exclusion(as_view(k), root));
    }
    for (int i = 0; i < 16; ++i) {
        Bytes absent = random_key(rng);
        if (trie.get(as_view(absent))) continue;
        auto proof = trie.prove(as_view(absent));
        CHECK(proof.polarity == mpt::Proof::Polarity::kExclusion);
        CHECK(proof.verify_exclusion(as_view(absent), root));
        CHECK_FALSE(proof.verify_inclusion(as_view(absent), root));
    }
}

TEST_CASE("mpt proof against wrong root or tampered node fails") {
    crypto::Rng rng(11);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    Bytes k = random_key(rng);
    trie.add(as_view(k), as_view(rng.bytes(4)));
    Bytes k2 = random_key(rng);
    trie.add(as_view(k2), as_view(rng.bytes(4)));

    auto proof = trie.prove(as_view(k));
    Digest wrong_root = trie.root();
    wrong_root.bytes[3] ^= 0x10;
    CHECK_FALSE(proof.verify_inclusion(as_view(k), wrong_root));

    auto tampered = proof;
    tampered.nodes.back()[tampered.nodes.back().size() - 1] ^= 0x01;
    CHECK_FALSE(tampered.verify_inclusion(as_view(k), trie.root()));
}

TEST_CASE("mpt single-entry trie proof is a lone leaf") {
    crypto::Rng rng(13);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    Bytes k = random_key(rng);
    trie.add(as_view(k), to_bytes(std::string_view("solo")));
    auto proof = trie.prove(as_view(k));
    CHECK(proof.nodes.size() == 1);
    CHECK(proof.verify_inclusion(as_view(k), trie.root()));
    CHECK(proof.value() == to_bytes(std::string_view("solo")));
}

TEST_CASE("mpt exclusion proof on the empty trie") {
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    crypto::Rng rng(17);
    Bytes k = random_key(rng);
    auto proof = trie.prove(as_view(k));
    CHECK(proof.nodes.empty());
    CHECK(proof.verify_exclusion(as_view(k), trie.root()));
    CHECK_FALSE(proof.verify_exclusion(as_view(k), sorted_rebuild_root({{k, k}})));
}

TEST_CASE("mpt partial state covers requested paths and nothing more") {
    crypto::Rng rng(19);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::vector<Bytes> keys;
    for (int i = 0; i < 10; ++i) {
        Bytes k = random_key(rng);
        trie.add(as_view(k), as_view(rng.bytes(10)));
        keys.push_back(k);
    }

    auto none = trie.extract({});
    CHECK(none.nodes.size() == 1);  // just the root node
    CHECK(none.root == trie.root());

    std::vector<Bytes> subset{keys[0], keys[5]};
    auto ps = trie.extract(subset);
    CHECK(ps.root == trie.root());
    CHECK(ps.nodes.size() < store.entries().size());

    mpt::PartialTrie partial(ps);
    CHECK(partial.get(as_view(keys[0])) == trie.get(as_view(keys[0])));
    CHECK(partial.get(as_view(keys[5])) == trie.get(as_view(keys[5])));
}

TEST_CASE("mpt partial apply equals full-trie writes") {
    crypto::Rng rng(23);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::map<Bytes, Bytes> reference;
    for (int i = 0; i < 200; ++i) {
        Bytes k = random_key(rng);
        Bytes v = rng.bytes(16);
        trie.add(as_view(k), as_view(v));
        reference[k] = v;
    }

    std::vector<Bytes> touched;
    auto it = reference.begin();
    for (int i = 0; i < 5; ++i, ++it) touched.push_back(it->first);
    Bytes fresh = random_key(rng);
    touched.push_back(fresh);  // absent key: path extracted for creation

    auto ps = trie.extract(touched);
    std::vector<mpt::Write> writes;
    writes.push_back({touched[0], rng.bytes(20)});
    writes.push_back({touched[1], rng.bytes(1)});
    writes.push_back({fresh, rng.bytes(8)});

    Digest partial_root = mpt::partial_apply(ps, writes);
    for (const auto& w : writes) trie.add(as_view(w.key), as_view(*w.value));
    CHECK(partial_root == trie.root());
}

TEST_CASE("mpt partial apply with zero writes keeps the root") {
    crypto::Rng rng(29);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    for (int i = 0; i < 8; ++i) trie.add(as_view(random_key(rng)), as_view(rng.bytes(4)));
    auto ps = trie.extract({});
    CHECK(mpt::partial_apply(ps, {}) == trie.root());
}

TEST_CASE("mpt partial apply to an uncovered key fails") {
    crypto::Rng rng(31);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::vector<Bytes> keys;
    for (int i = 0; i < 64; ++i) {
        Bytes k = random_key(rng);
        trie.add(as_view(k), as_view(rng.bytes(4)));
        keys.push_back(k);
    }
    auto ps = trie.extract({keys[0]});
    std::vector<mpt::Write> writes{{keys[40], rng.bytes(4)}};
    CHECK_THROWS_AS((void)mpt::partial_apply(ps, writes), mpt::PathMissingError);
}

TEST_CASE("mpt partial state detects node tampering") {
    crypto::Rng rng(37);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::vector<Bytes> keys;
    for (int i = 0; i < 12; ++i) {
        Bytes k = random_key(rng);
        trie.add(as_view(k), as_view(rng.bytes(6)));
        keys.push_back(k);
    }
    auto ps = trie.extract({keys[2]});
    Bytes wire = ps.encode();

    // Flip one byte inside a node payload region and re-decode: either the
    // digest map rekeys (breaking the path) or the root vanishes.
    for (std::size_t flip = wire.size() - 1; flip > wire.size() - 8; --flip) {
        Bytes mutated = wire;
        mutated[flip] ^= 0x01;
        bool detected = false;
        try {
            auto bad = mpt::PartialState::decode(as_view(mutated));
            mpt::PartialTrie partial(bad);
            detected = partial.get(as_view(keys[2])) != trie.get(as_view(keys[2])) ||
                       partial.root() != trie.root();
        } catch (const std::exception&) {
            detected = true;
        }
        CHECK(detected);
    }
}

TEST_CASE("mpt exclusion path in partial state supports later insertion") {
    crypto::Rng rng(41);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    for (int i = 0; i < 50; ++i) trie.add(as_view(random_key(rng)), as_view(rng.bytes(4)));

    Bytes absent = random_key(rng);
    auto ps = trie.extract({absent});
    mpt::PartialTrie partial(ps);
    CHECK(partial.get(as_view(absent)) == std::nullopt);

    Bytes v = rng.bytes(10);
    partial.put(as_view(absent), as_view(v));
    trie.add(as_view(absent), as_view(v));
    CHECK(partial.root() == trie.root());
}

TEST_CASE("mpt proof and partial state encodings round-trip") {
    crypto::Rng rng(43);
    mpt::MemoryNodeStore store;
    mpt::Trie trie(store);
    std::vector<Bytes> keys;
    for (int i = 0; i < 9; ++i) {
        Bytes k = random_key(rng);
        trie.add(as_view(k), as_view(rng.bytes(5)));
        keys.push_back(k);
    }
    auto proof = mpt::Proof::decode(as_view(trie.prove(as_view(keys[4])).encode()));
    CHECK(proof.verify_inclusion(as_view(keys[4]), trie.root()));

    auto ps = mpt::PartialState::decode(as_view(trie.extract({keys[1]}).encode()));
    CHECK(ps.root == trie.root());
    mpt::PartialTrie partial(ps);
    CHECK(partial.get(as_view(keys[1])) == trie.get(as_view(keys[1])));
}
