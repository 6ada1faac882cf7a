// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "aqua/crypto.hpp"

namespace aqua::htree {

// Version-v root of the append-only tree. Version counts appended leaves;
// version 0 is the genesis sentinel (all-zero root).
struct Commitment {
    std::uint64_t version = 0;
    Digest root{};

    auto operator<=>(const Commitment&) const = default;
};

inline Commitment genesis() { return Commitment{}; }

// (level, index): the node whose subtree covers leaves
// [index * 2^level, (index+1) * 2^level).
using NodeId = std::pair<std::uint32_t, std::uint64_t>;
using NodeSet = std::map<NodeId, Digest>;

// Pruned tree between two versions. Stored digests are frozen subtree
// hashes, so the same set recomputes the root at either version.
struct IncrementalProof {
    std::uint64_t old_version = 0;
    std::uint64_t new_version = 0;
    NodeSet nodes;

    Digest derive_old_root() const;  // throws IntegrityError on missing nodes
    Digest derive_new_root() const;
    bool verify(const Commitment& from, const Commitment& to) const;

    // Overwrites the newest leaf slot with the leaf hash of `content`.
    // This is how a proof template becomes the proof of the real block.
    void set_new_leaf(const Digest& content);

    Bytes encode() const;
    static IncrementalProof decode(ByteView in);
};

struct MembershipProof {
    std::uint64_t leaf_index = 0;
    std::uint64_t target_version = 0;
    NodeSet nodes;

    bool verify(std::uint64_t index, const Digest& content, const Commitment& at) const;

    Bytes encode() const;
    static MembershipProof decode(ByteView in);
};

class Tree {
  public:
    Commitment add(const Digest& leaf_content);

    std::uint64_t size() const { return leaves_.size(); }
    Commitment commitment() const { return commitment_at(leaves_.size()); }
    Commitment commitment_at(std::uint64_t version) const;

    // Throws IntegrityError unless both commitments are genuine historical
    // commitments of this tree with from.version <= to.version.
    IncrementalProof inc_proof(const Commitment& from, const Commitment& to) const;
    // Throws std::out_of_range unless index < at.version; IntegrityError on
    // a forged commitment.
    MembershipProof mem_proof(std::uint64_t index, const Commitment& at) const;

    // Appends `placeholder` once, captures the one-leaf extension proof and
    // the temporary commitment, then drops the leaf again. The tree is
    // unchanged on return.
    std::pair<IncrementalProof, Commitment> proof_template(const Digest& placeholder);

    // Drops every leaf at index >= version (operator-side rollback).
    void truncate(std::uint64_t version);

  private:
    void validate(const Commitment& c) const;
    NodeSet collect(std::uint64_t version, const std::vector<std::uint64_t>& target_leaves,
                    std::optional<std::uint64_t> exclude_leaf) const;

    std::vector<Digest> leaves_;                // leaf node digests (already leaf-hashed)
    std::vector<std::vector<Digest>> frozen_;   // frozen_[r][i], r >= 1
};

}  // namespace aqua::htree
