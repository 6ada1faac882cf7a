// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "aqua/crypto.hpp"

namespace aqua::mpt {

// Root of the empty trie.
Digest empty_root();

// Thrown when a walk needs a node that the backing store does not hold.
// For a partial state this signals an insufficient extract, not tampering.
struct PathMissingError : IntegrityError {
    explicit PathMissingError(const std::string& what) : IntegrityError(what) {}
};

enum class NodeKind : std::uint8_t { kLeaf = 1, kExtension = 2, kBranch = 3 };

using Nibbles = std::vector<std::uint8_t>;

Nibbles key_to_nibbles(ByteView key);

// Nodes are immutable values referenced by the hash of their canonical
// encoding; path fragments use compact hex-prefix packing.
struct Node {
    NodeKind kind = NodeKind::kLeaf;
    Nibbles path;                                    // leaf / extension fragment
    std::optional<Digest> child;                     // extension target
    std::array<std::optional<Digest>, 16> children;  // branch slots
    std::optional<Bytes> value;                      // leaf value or branch value slot

    Bytes encode() const;
    static Node decode(ByteView in);
};

class NodeStore {
  public:
    virtual ~NodeStore() = default;
    virtual std::optional<Bytes> get(const Digest& digest) const = 0;
    virtual void put(const Digest& digest, Bytes encoding) = 0;
};

class MemoryNodeStore : public NodeStore {
  public:
    std::optional<Bytes> get(const Digest& digest) const override;
    void put(const Digest& digest, Bytes encoding) override;

    const std::map<Digest, Bytes>& entries() const { return entries_; }

  private:
    std::map<Digest, Bytes> entries_;
};

// Inclusion or exclusion proof: the node encodings on the walk from the
// root toward the key, ending at the key's leaf or at the divergence
// witnessing its absence.
struct Proof {
    enum class Polarity : std::uint8_t { kInclusion = 1, kExclusion = 2 };

    Polarity polarity = Polarity::kExclusion;
    std::vector<Bytes> nodes;

    // The proven value, for inclusion proofs.
    std::optional<Bytes> value() const;

    bool verify_inclusion(ByteView key, const Digest& root) const;
    bool verify_exclusion(ByteView key, const Digest& root) const;

    Bytes encode() const;
    static Proof decode(ByteView in);
};

// The node subset shipped into the enclave: every covered key's full
// root-to-terminus path. Node digests are recomputed from the encodings on
// decode, so a tampered node breaks its path instead of lying quietly.
struct PartialState {
    Digest root;
    std::vector<Bytes> covered_keys;
    std::map<Digest, Bytes> nodes;

    Bytes encode() const;
    static PartialState decode(ByteView in);
};

class Trie {
  public:
    explicit Trie(NodeStore& store) : store_(store), root_(empty_root()) {}
    Trie(NodeStore& store, const Digest& root) : store_(store), root_(root) {}

    Digest root() const { return root_; }

    Digest add(ByteView key, ByteView value);
    std::optional<Bytes> get(ByteView key) const;
    bool remove(ByteView key);

    Proof prove(ByteView key) const;
    PartialState extract(std::span<const Bytes> keys) const;
    PartialState extract(std::initializer_list<Bytes> keys) const {
        return extract(std::span<const Bytes>(keys.begin(), keys.size()));
    }

  private:
    Node load(const Digest& digest) const;
    Digest store(const Node& node);

    NodeStore& store_;
    Digest root_;
};

// A trie over the nodes of a partial state. Walks beyond the extracted
// paths throw PathMissingError.
class PartialTrie {
  public:
    explicit PartialTrie(const PartialState& ps);

    Digest root() const { return trie_.root(); }
    std::optional<Bytes> get(ByteView key) const { return trie_.get(key); }
    void put(ByteView key, ByteView value) { trie_.add(key, value); }
    bool remove(ByteView key) { return trie_.remove(key); }

    // Snapshot carrying all nodes accumulated so far under the new root.
    PartialState state() const;

  private:
    MemoryNodeStore store_;
    std::vector<Bytes> covered_keys_;
    Trie trie_;
};

struct Write {
    Bytes key;
    std::optional<Bytes> value;  // nullopt deletes the key
};

// Stateless-update equivalence primitive: applying `writes` to the partial
// state yields the same root the full trie reaches under the same writes.
Digest partial_apply(const PartialState& ps, std::span<const Write> writes);

}  // namespace aqua::mpt
