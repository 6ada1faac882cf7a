// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/history_tree.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "aqua/merkle.hpp"

namespace aqua::htree {

namespace {

// Height of the version-v tree: leaves sit at level 0, the root at this
// level. Version 1 is a single leaf.
std::uint32_t root_level(std::uint64_t version) {
    return version <= 1 ? 0 : static_cast<std::uint32_t>(std::bit_width(version - 1));
}

bool frozen_at(std::uint32_t level, std::uint64_t index, std::uint64_t version) {
    return (index + 1) << level <= version;
}

// Recomputes the node hash at `version` from a pruned set. Nodes whose
// right subtree is empty at `version` promote the left child unchanged.
Digest compute(const NodeSet& nodes, std::uint32_t level, std::uint64_t index,
               std::uint64_t version) {
    std::uint64_t lo = index << level;
    if (lo >= version) throw IntegrityError("history proof: node beyond version");
    if (frozen_at(level, index, version)) {
        auto it = nodes.find({level, index});
        if (it != nodes.end()) return it->second;
        if (level == 0) throw IntegrityError("history proof: missing leaf node");
    } else if (level == 0) {
        throw IntegrityError("history proof: missing leaf node");
    }
    Digest left = compute(nodes, level - 1, 2 * index, version);
    std::uint64_t mid = lo + (std::uint64_t{1} << (level - 1));
    if (version <= mid) return left;
    Digest right = compute(nodes, level - 1, 2 * index + 1, version);
    return merkle::interior_hash(left, right);
}

Digest root_from(const NodeSet& nodes, std::uint64_t version) {
    if (version == 0) return Digest{};
    return compute(nodes, root_level(version), 0, version);
}

Bytes encode_node_set(ByteWriter& w, const NodeSet& nodes) {
    for (const auto& [id, digest] : nodes) {
        w.put_u16(static_cast<std::uint16_t>(id.first));
        w.put_u64(id.second);
        w.put_digest(digest);
    }
    return std::move(w).data();
}

NodeSet decode_node_set(ByteReader& r) {
    NodeSet nodes;
    while (!r.done()) {
        std::uint32_t level = r.get_u16();
        std::uint64_t index = r.get_u64();
        nodes[{level, index}] = r.get_digest();
    }
    return nodes;
}

}  // namespace

Digest IncrementalProof::derive_old_root() const { return root_from(nodes, old_version); }

Digest IncrementalProof::derive_new_root() const { return root_from(nodes, new_version); }

bool IncrementalProof::verify(const Commitment& from, const Commitment& to) const {
    if (from.version != old_version || to.version != new_version) return false;
    if (old_version > new_version) return false;
    try {
        return derive_old_root() == from.root && derive_new_root() == to.root;
    } catch (const IntegrityError&) {
        return false;
    }
}

void IncrementalProof::set_new_leaf(const Digest& content) {
    if (new_version == 0) throw IntegrityError("template proof has no leaf slot");
    nodes[{0, new_version - 1}] = merkle::leaf_hash(as_view(content));
}

Bytes IncrementalProof::encode() const {
    ByteWriter w;
    w.put_u64(old_version);
    w.put_u64(new_version);
    return encode_node_set(w, nodes);
}

IncrementalProof IncrementalProof::decode(ByteView in) {
    ByteReader r(in);
    IncrementalProof p;
    p.old_version = r.get_u64();
    p.new_version = r.get_u64();
    p.nodes = decode_node_set(r);
    return p;
}

bool MembershipProof::verify(std::uint64_t index, const Digest& content,
                             const Commitment& at) const {
    if (index != leaf_index || at.version != target_version) return false;
    if (index >= target_version) return false;
    NodeSet overlay = nodes;
    overlay[{0, index}] = merkle::leaf_hash(as_view(content));
    try {
        return root_from(overlay, target_version) == at.root;
    } catch (const IntegrityError&) {
        return false;
    }
}

Bytes MembershipProof::encode() const {
    ByteWriter w;
    w.put_u64(leaf_index);
    w.put_u64(target_version);
    return encode_node_set(w, nodes);
}

MembershipProof MembershipProof::decode(ByteView in) {
    ByteReader r(in);
    MembershipProof p;
    p.leaf_index = r.get_u64();
    p.target_version = r.get_u64();
    p.nodes = decode_node_set(r);
    return p;
}

Commitment Tree::add(const Digest& leaf_content) {
    leaves_.push_back(merkle::leaf_hash(as_view(leaf_content)));
    std::uint64_t n = leaves_.size();
    for (std::uint32_t r = 1; (n >> r) >= 1; ++r) {
        if (frozen_.size() < r) frozen_.emplace_back();
        auto& level = frozen_[r - 1];
        const auto& below = r == 1 ? leaves_ : frozen_[r - 2];
        while (level.size() < (n >> r)) {
            std::size_t i = level.size();
            level.push_back(merkle::interior_hash(below[2 * i], below[2 * i + 1]));
        }
    }
    return commitment();
}

Commitment Tree::commitment_at(std::uint64_t version) const {
    if (version > leaves_.size()) throw std::out_of_range("version beyond tree size");
    if (version == 0) return genesis();
    // Fold the frontier peaks right to left; a lone right part is promoted.
    std::vector<Digest> peaks;
    std::uint64_t consumed = 0;
    for (int b = 63; b >= 0; --b) {
        if (!(version & (std::uint64_t{1} << b))) continue;
        std::uint32_t level = static_cast<std::uint32_t>(b);
        std::uint64_t index = consumed >> level;
        peaks.push_back(level == 0 ? leaves_[index] : frozen_[level - 1][index]);
        consumed += std::uint64_t{1} << b;
    }
    Digest root = peaks.back();
    for (std::size_t k = peaks.size() - 1; k-- > 0;)
        root = merkle::interior_hash(peaks[k], root);
    return Commitment{version, root};
}

void Tree::validate(const Commitment& c) const {
    if (c.version > leaves_.size()) throw IntegrityError("unknown commitment version");
    if (commitment_at(c.version) != c) throw IntegrityError("commitment does not match history");
}

NodeSet Tree::collect(std::uint64_t version, const std::vector<std::uint64_t>& target_leaves,
                      std::optional<std::uint64_t> exclude_leaf) const {
    NodeSet out;
    auto frozen_digest = [&](std::uint32_t level, std::uint64_t index) {
        return level == 0 ? leaves_[index] : frozen_[level - 1][index];
    };
    auto rec = [&](auto&& self, std::uint32_t level, std::uint64_t index) -> void {
        std::uint64_t lo = index << level;
        std::uint64_t hi = lo + (std::uint64_t{1} << level);
        if (lo >= version) return;
        bool has_target = std::any_of(target_leaves.begin(), target_leaves.end(),
                                      [&](std::uint64_t t) { return lo <= t && t < hi; });
        if (!has_target && hi <= version) {
            out[{level, index}] = frozen_digest(level, index);
            return;
        }
        if (level == 0) {
            if (!exclude_leaf || *exclude_leaf != index) out[{0, index}] = leaves_[index];
            return;
        }
        self(self, level - 1, 2 * index);
        std::uint64_t mid = lo + (std::uint64_t{1} << (level - 1));
        if (version > mid) self(self, level - 1, 2 * index + 1);
    };
    if (version > 0) rec(rec, root_level(version), 0);
    return out;
}

IncrementalProof Tree::inc_proof(const Commitment& from, const Commitment& to) const {
    if (from.version > to.version) throw IntegrityError("incremental proof order reversed");
    validate(from);
    validate(to);
    IncrementalProof p;
    p.old_version = from.version;
    p.new_version = to.version;
    std::vector<std::uint64_t> targets;
    if (from.version > 0) targets.push_back(from.version - 1);
    if (to.version > 0) targets.push_back(to.version - 1);
    p.nodes = collect(to.version, targets, std::nullopt);
    return p;
}

MembershipProof Tree::mem_proof(std::uint64_t index, const Commitment& at) const {
    if (index >= at.version) throw std::out_of_range("membership index beyond version");
    validate(at);
    MembershipProof p;
    p.leaf_index = index;
    p.target_version = at.version;
    p.nodes = collect(at.version, {index, at.version - 1}, index);
    return p;
}

std::pair<IncrementalProof, Commitment> Tree::proof_template(const Digest& placeholder) {
    Commitment cur = commitment();
    Commitment tmp = add(placeholder);
    IncrementalProof proof = inc_proof(cur, tmp);
    truncate(cur.version);
    return {proof, tmp};
}

void Tree::truncate(std::uint64_t version) {
    if (version > leaves_.size()) throw std::out_of_range("truncate beyond tree size");
    leaves_.resize(version);
    for (std::uint32_t r = 1; r <= frozen_.size(); ++r)
        frozen_[r - 1].resize(version >> r);
    while (!frozen_.empty() && frozen_.back().empty()) frozen_.pop_back();
}

}  // namespace aqua::htree
