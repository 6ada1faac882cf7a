// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/merkle.hpp"

#include <stdexcept>

namespace aqua::merkle {

Digest empty_root() {
    static const Digest d = crypto::sha256({ByteView(&kEmptyPrefix, 1)});
    return d;
}

Digest leaf_hash(ByteView element) {
    return crypto::sha256({ByteView(&kLeafPrefix, 1), element});
}

Digest interior_hash(const Digest& left, const Digest& right) {
    return crypto::sha256({ByteView(&kInteriorPrefix, 1), as_view(left), as_view(right)});
}

namespace {

std::vector<Digest> next_level(const std::vector<Digest>& level) {
    std::vector<Digest> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
        up.push_back(interior_hash(level[i], level[i + 1]));
    if (level.size() % 2 == 1) up.push_back(level.back());
    return up;
}

}  // namespace

Digest root(const std::vector<Bytes>& elements) {
    if (elements.empty()) return empty_root();
    std::vector<Digest> level;
    level.reserve(elements.size());
    for (const auto& e : elements) level.push_back(leaf_hash(as_view(e)));
    while (level.size() > 1) level = next_level(level);
    return level.front();
}

Proof prove(std::uint64_t index, const std::vector<Bytes>& elements) {
    if (index >= elements.size()) throw std::out_of_range("merkle proof index out of range");
    std::vector<Digest> level;
    level.reserve(elements.size());
    for (const auto& e : elements) level.push_back(leaf_hash(as_view(e)));

    Proof proof;
    proof.index = index;
    std::size_t pos = index;
    while (level.size() > 1) {
        std::size_t sib = pos ^ 1;
        if (sib < level.size())
            proof.steps.push_back({level[sib], /*sibling_on_left=*/sib < pos});
        // else: unpaired node, promoted without a step
        level = next_level(level);
        pos /= 2;
    }
    return proof;
}

bool verify(const Proof& proof, ByteView element, const Digest& root) {
    Digest cur = leaf_hash(element);
    for (const auto& step : proof.steps)
        cur = step.sibling_on_left ? interior_hash(step.sibling, cur)
                                   : interior_hash(cur, step.sibling);
    return cur == root;
}

Bytes Proof::encode() const {
    ByteWriter w;
    w.put_u64(index);
    w.put_u32(static_cast<std::uint32_t>(steps.size()));
    for (const auto& s : steps) {
        w.put_digest(s.sibling);
        w.put_u8(s.sibling_on_left ? 1 : 0);
    }
    return std::move(w).data();
}

Proof Proof::decode(ByteView in) {
    ByteReader r(in);
    Proof p;
    p.index = r.get_u64();
    std::uint32_t n = r.get_u32();
    p.steps.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ProofStep s;
        s.sibling = r.get_digest();
        s.sibling_on_left = r.get_u8() != 0;
        p.steps.push_back(s);
    }
    r.expect_done();
    return p;
}

}  // namespace aqua::merkle
