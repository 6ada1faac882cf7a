// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "aqua/crypto.hpp"

namespace aqua::merkle {

// Second-preimage discipline: leaves hash under 0x01, interior nodes under
// 0x02, the empty list under a fixed 0x00 sentinel. Unpaired nodes are
// promoted unchanged instead of duplicated.
inline constexpr std::uint8_t kEmptyPrefix = 0x00;
inline constexpr std::uint8_t kLeafPrefix = 0x01;
inline constexpr std::uint8_t kInteriorPrefix = 0x02;

struct ProofStep {
    Digest sibling;
    bool sibling_on_left = false;
};

struct Proof {
    std::uint64_t index = 0;
    std::vector<ProofStep> steps;

    Bytes encode() const;
    static Proof decode(ByteView in);
};

Digest empty_root();
Digest leaf_hash(ByteView element);
Digest interior_hash(const Digest& left, const Digest& right);

Digest root(const std::vector<Bytes>& elements);
// Throws std::out_of_range when index >= |elements|.
Proof prove(std::uint64_t index, const std::vector<Bytes>& elements);
bool verify(const Proof& proof, ByteView element, const Digest& root);

}  // namespace aqua::merkle
