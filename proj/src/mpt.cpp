// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/mpt.hpp"

#include <algorithm>
#include <set>

namespace aqua::mpt {

Digest empty_root() {
    static const Digest d = crypto::sha256(ByteView{});
    return d;
}

Nibbles key_to_nibbles(ByteView key) {
    Nibbles out;
    out.reserve(key.size() * 2);
    for (auto b : key) {
        out.push_back(b >> 4);
        out.push_back(b & 0x0f);
    }
    return out;
}

namespace {

// Compact hex-prefix packing: flag nibble (bit0 = odd length, bit1 = leaf),
// then the fragment two nibbles per byte.
Bytes hp_encode(const Nibbles& path, bool is_leaf) {
    Bytes out;
    std::uint8_t flags = (is_leaf ? 2 : 0) | (path.size() % 2);
    std::size_t i = 0;
    if (path.size() % 2 == 1) {
        out.push_back(static_cast<std::uint8_t>((flags << 4) | path[0]));
        i = 1;
    } else {
        out.push_back(static_cast<std::uint8_t>(flags << 4));
    }
    for (; i + 1 < path.size() + 1 && i < path.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>((path[i] << 4) | path[i + 1]));
    return out;
}

std::pair<Nibbles, bool> hp_decode(ByteView in) {
    if (in.empty()) throw ParseError("empty hex-prefix fragment");
    std::uint8_t flags = in[0] >> 4;
    if (flags > 3 || (in[0] & 0x0f && !(flags & 1)))
        throw ParseError("invalid hex-prefix flags");
    Nibbles path;
    if (flags & 1) path.push_back(in[0] & 0x0f);
    for (std::size_t i = 1; i < in.size(); ++i) {
        path.push_back(in[i] >> 4);
        path.push_back(in[i] & 0x0f);
    }
    return {std::move(path), (flags & 2) != 0};
}

std::size_t common_prefix(const Nibbles& a, std::size_t a_from, const Nibbles& b,
                          std::size_t b_from) {
    std::size_t n = 0;
    while (a_from + n < a.size() && b_from + n < b.size() && a[a_from + n] == b[b_from + n]) ++n;
    return n;
}

Nibbles subnibbles(const Nibbles& v, std::size_t from) {
    return Nibbles(v.begin() + static_cast<std::ptrdiff_t>(from), v.end());
}

bool starts_with(const Nibbles& rest, std::size_t from, const Nibbles& prefix) {
    if (rest.size() - from < prefix.size()) return false;
    return std::equal(prefix.begin(), prefix.end(), rest.begin() + static_cast<std::ptrdiff_t>(from));
}

}  // namespace

Bytes Node::encode() const {
    ByteWriter w;
    w.put_u8(static_cast<std::uint8_t>(kind));
    switch (kind) {
        case NodeKind::kLeaf: {
            w.put_var(as_view(hp_encode(path, true)));
            w.put_var(as_view(value.value()));
            break;
        }
        case NodeKind::kExtension: {
            w.put_var(as_view(hp_encode(path, false)));
            w.put_digest(child.value());
            break;
        }
        case NodeKind::kBranch: {
            std::uint16_t mask = 0;
            for (std::size_t i = 0; i < 16; ++i)
                if (children[i]) mask |= static_cast<std::uint16_t>(1u << i);
            w.put_u16(mask);
            for (std::size_t i = 0; i < 16; ++i)
                if (children[i]) w.put_digest(*children[i]);
            w.put_bool(value.has_value());
            if (value) w.put_var(as_view(*value));
            break;
        }
    }
    return std::move(w).data();
}

Node Node::decode(ByteView in) {
    ByteReader r(in);
    Node n;
    std::uint8_t kind = r.get_u8();
    switch (kind) {
        case 1: {
            n.kind = NodeKind::kLeaf;
            auto [path, is_leaf] = hp_decode(as_view(r.get_var()));
            if (!is_leaf) throw ParseError("leaf node with extension fragment");
            n.path = std::move(path);
            n.value = r.get_var();
            break;
        }
        case 2: {
            n.kind = NodeKind::kExtension;
            auto [path, is_leaf] = hp_decode(as_view(r.get_var()));
            if (is_leaf) throw ParseError("extension node with leaf fragment");
            if (path.empty()) throw ParseError("extension with empty fragment");
            n.path = std::move(path);
            n.child = r.get_digest();
            break;
        }
        case 3: {
            n.kind = NodeKind::kBranch;
            std::uint16_t mask = r.get_u16();
            for (std::size_t i = 0; i < 16; ++i)
                if (mask & (1u << i)) n.children[i] = r.get_digest();
            if (r.get_bool()) n.value = r.get_var();
            break;
        }
        default:
            throw ParseError("unknown node kind");
    }
    r.expect_done();
    return n;
}

std::optional<Bytes> MemoryNodeStore::get(const Digest& digest) const {
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void MemoryNodeStore::put(const Digest& digest, Bytes encoding) {
    entries_[digest] = std::move(encoding);
}

Node Trie::load(const Digest& digest) const {
    auto enc = store_.get(digest);
    if (!enc) throw PathMissingError("trie node not in store: " + digest.hex());
    return Node::decode(as_view(*enc));
}

Digest Trie::store(const Node& node) {
    Bytes enc = node.encode();
    Digest d = crypto::sha256(as_view(enc));
    store_.put(d, std::move(enc));
    return d;
}

namespace {

Node make_leaf(Nibbles path, Bytes value) {
    Node n;
    n.kind = NodeKind::kLeaf;
    n.path = std::move(path);
    n.value = std::move(value);
    return n;
}

Node make_extension(Nibbles path, const Digest& child) {
    Node n;
    n.kind = NodeKind::kExtension;
    n.path = std::move(path);
    n.child = child;
    return n;
}

}  // namespace

Digest Trie::add(ByteView key, ByteView value) {
    Nibbles nibbles = key_to_nibbles(key);
    Bytes val = to_bytes(value);

    // Returns the digest of the replacement node.
    auto insert = [&](auto&& self, std::optional<Digest> ref, std::size_t pos) -> Digest {
        if (!ref) return store(make_leaf(subnibbles(nibbles, pos), val));
        Node node = load(*ref);
        switch (node.kind) {
            case NodeKind::kLeaf: {
                std::size_t common = common_prefix(nibbles, pos, node.path, 0);
                if (common == node.path.size() && pos + common == nibbles.size()) {
                    node.value = val;
                    return store(node);
                }
                Node branch;
                branch.kind = NodeKind::kBranch;
                if (node.path.size() > common) {
                    std::uint8_t c = node.path[common];
                    branch.children[c] =
                        store(make_leaf(subnibbles(node.path, common + 1), *node.value));
                } else {
                    branch.value = node.value;
                }
                if (pos + common < nibbles.size()) {
                    std::uint8_t c = nibbles[pos + common];
                    branch.children[c] =
                        store(make_leaf(subnibbles(nibbles, pos + common + 1), val));
                } else {
                    branch.value = val;
                }
                Digest d = store(branch);
                if (common > 0)
                    d = store(make_extension(
                        Nibbles(node.path.begin(), node.path.begin() + common), d));
                return d;
            }
            case NodeKind::kExtension: {
                std::size_t common = common_prefix(nibbles, pos, node.path, 0);
                if (common == node.path.size()) {
                    node.child = self(self, node.child, pos + common);
                    return store(node);
                }
                Node branch;
                branch.kind = NodeKind::kBranch;
                std::uint8_t ec = node.path[common];
                if (node.path.size() > common + 1)
                    branch.children[ec] =
                        store(make_extension(subnibbles(node.path, common + 1), *node.child));
                else
                    branch.children[ec] = node.child;
                if (pos + common < nibbles.size()) {
                    std::uint8_t c = nibbles[pos + common];
                    branch.children[c] =
                        store(make_leaf(subnibbles(nibbles, pos + common + 1), val));
                } else {
                    branch.value = val;
                }
                Digest d = store(branch);
                if (common > 0)
                    d = store(make_extension(
                        Nibbles(node.path.begin(), node.path.begin() + common), d));
                return d;
            }
            case NodeKind::kBranch: {
                if (pos == nibbles.size()) {
                    node.value = val;
                    return store(node);
                }
                std::uint8_t c = nibbles[pos];
                node.children[c] = self(self, node.children[c], pos + 1);
                return store(node);
            }
        }
        throw ParseError("corrupt node kind");
    };

    if (root_ == empty_root())
        root_ = insert(insert, std::nullopt, 0);
    else
        root_ = insert(insert, root_, 0);
    return root_;
}

std::optional<Bytes> Trie::get(ByteView key) const {
    if (root_ == empty_root()) return std::nullopt;
    Nibbles nibbles = key_to_nibbles(key);
    Digest cur = root_;
    std::size_t pos = 0;
    for (;;) {
        Node node = load(cur);
        switch (node.kind) {
            case NodeKind::kLeaf:
                if (starts_with(nibbles, pos, node.path) &&
                    pos + node.path.size() == nibbles.size())
                    return node.value;
                return std::nullopt;
            case NodeKind::kExtension:
                if (!starts_with(nibbles, pos, node.path)) return std::nullopt;
                pos += node.path.size();
                cur = *node.child;
                break;
            case NodeKind::kBranch: {
                if (pos == nibbles.size()) return node.value;
                std::uint8_t c = nibbles[pos];
                if (!node.children[c]) return std::nullopt;
                cur = *node.children[c];
                ++pos;
                break;
            }
        }
    }
}

bool Trie::remove(ByteView key) {
    Nibbles nibbles = key_to_nibbles(key);

    // Re-attaches a collapsed branch child under a path prefix.
    auto reattach = [&](Nibbles prefix, const Digest& child_digest) -> Digest {
        Node child = load(child_digest);
        if (child.kind == NodeKind::kBranch)
            return store(make_extension(std::move(prefix), child_digest));
        prefix.insert(prefix.end(), child.path.begin(), child.path.end());
        child.path = std::move(prefix);
        return store(child);
    };

    bool found = false;
    // Returns the digest of the replacement node, or nullopt if the subtree
    // became empty.
    auto erase = [&](auto&& self, const Digest& ref, std::size_t pos) -> std::optional<Digest> {
        Node node = load(ref);
        switch (node.kind) {
            case NodeKind::kLeaf:
                if (starts_with(nibbles, pos, node.path) &&
                    pos + node.path.size() == nibbles.size()) {
                    found = true;
                    return std::nullopt;
                }
                return ref;
            case NodeKind::kExtension: {
                if (!starts_with(nibbles, pos, node.path)) return ref;
                auto replaced = self(self, *node.child, pos + node.path.size());
                if (!found) return ref;
                if (!replaced) return std::nullopt;
                return reattach(node.path, *replaced);
            }
            case NodeKind::kBranch: {
                if (pos == nibbles.size()) {
                    if (!node.value) return ref;
                    found = true;
                    node.value.reset();
                } else {
                    std::uint8_t c = nibbles[pos];
                    if (!node.children[c]) return ref;
                    auto replaced = self(self, *node.children[c], pos + 1);
                    if (!found) return ref;
                    node.children[c] = replaced;
                }
                int child_count = 0;
                int last = -1;
                for (int i = 0; i < 16; ++i)
                    if (node.children[i]) {
                        ++child_count;
                        last = i;
                    }
                if (child_count >= 2 || (child_count == 1 && node.value)) return store(node);
                if (child_count == 1)
                    return reattach({static_cast<std::uint8_t>(last)}, *node.children[last]);
                if (node.value) return store(make_leaf({}, *node.value));
                return std::nullopt;
            }
        }
        throw ParseError("corrupt node kind");
    };

    if (root_ == empty_root()) return false;
    auto replaced = erase(erase, root_, 0);
    if (!found) return false;
    root_ = replaced ? *replaced : empty_root();
    return true;
}

Proof Trie::prove(ByteView key) const {
    Proof proof;
    if (root_ == empty_root()) {
        proof.polarity = Proof::Polarity::kExclusion;
        return proof;
    }
    Nibbles nibbles = key_to_nibbles(key);
    Digest cur = root_;
    std::size_t pos = 0;
    for (;;) {
        auto enc = store_.get(cur);
        if (!enc) throw PathMissingError("trie node not in store: " + cur.hex());
        proof.nodes.push_back(*enc);
        Node node = Node::decode(as_view(*enc));
        switch (node.kind) {
            case NodeKind::kLeaf: {
                bool hit = starts_with(nibbles, pos, node.path) &&
                           pos + node.path.size() == nibbles.size();
                proof.polarity = hit ? Proof::Polarity::kInclusion : Proof::Polarity::kExclusion;
                return proof;
            }
            case NodeKind::kExtension:
                if (!starts_with(nibbles, pos, node.path)) {
                    proof.polarity = Proof::Polarity::kExclusion;
                    return proof;
                }
                pos += node.path.size();
                cur = *node.child;
                break;
            case NodeKind::kBranch: {
                if (pos == nibbles.size()) {
                    proof.polarity = node.value ? Proof::Polarity::kInclusion
                                                : Proof::Polarity::kExclusion;
                    return proof;
                }
                std::uint8_t c = nibbles[pos];
                if (!node.children[c]) {
                    proof.polarity = Proof::Polarity::kExclusion;
                    return proof;
                }
                cur = *node.children[c];
                ++pos;
                break;
            }
        }
    }
}

namespace {

enum class Terminus { kValue, kDiverged, kInvalid };

Terminus walk_proof(const std::vector<Bytes>& nodes, ByteView key, const Digest& root,
                    std::optional<Bytes>* value_out) {
    if (nodes.empty()) return root == empty_root() ? Terminus::kDiverged : Terminus::kInvalid;
    Nibbles nibbles = key_to_nibbles(key);
    Digest expected = root;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (crypto::sha256(as_view(nodes[i])) != expected) return Terminus::kInvalid;
        Node node;
        try {
            node = Node::decode(as_view(nodes[i]));
        } catch (const ParseError&) {
            return Terminus::kInvalid;
        }
        bool last = i + 1 == nodes.size();
        switch (node.kind) {
            case NodeKind::kLeaf: {
                if (!last) return Terminus::kInvalid;
                if (starts_with(nibbles, pos, node.path) &&
                    pos + node.path.size() == nibbles.size()) {
                    if (value_out) *value_out = node.value;
                    return Terminus::kValue;
                }
                return Terminus::kDiverged;
            }
            case NodeKind::kExtension:
                if (!starts_with(nibbles, pos, node.path))
                    return last ? Terminus::kDiverged : Terminus::kInvalid;
                if (last) return Terminus::kInvalid;  // key continues below
                pos += node.path.size();
                expected = *node.child;
                break;
            case NodeKind::kBranch: {
                if (pos == nibbles.size()) {
                    if (!last) return Terminus::kInvalid;
                    if (node.value) {
                        if (value_out) *value_out = node.value;
                        return Terminus::kValue;
                    }
                    return Terminus::kDiverged;
                }
                std::uint8_t c = nibbles[pos];
                if (!node.children[c]) return last ? Terminus::kDiverged : Terminus::kInvalid;
                if (last) return Terminus::kInvalid;
                expected = *node.children[c];
                ++pos;
                break;
            }
        }
    }
    return Terminus::kInvalid;
}

}  // namespace

std::optional<Bytes> Proof::value() const {
    if (polarity != Polarity::kInclusion || nodes.empty()) return std::nullopt;
    Node last = Node::decode(as_view(nodes.back()));
    return last.value;
}

bool Proof::verify_inclusion(ByteView key, const Digest& root) const {
    if (polarity != Polarity::kInclusion) return false;
    return walk_proof(nodes, key, root, nullptr) == Terminus::kValue;
}

bool Proof::verify_exclusion(ByteView key, const Digest& root) const {
    if (polarity != Polarity::kExclusion) return false;
    return walk_proof(nodes, key, root, nullptr) == Terminus::kDiverged;
}

Bytes Proof::encode() const {
    ByteWriter w;
    w.put_u8(static_cast<std::uint8_t>(polarity));
    w.put_u32(static_cast<std::uint32_t>(nodes.size()));
    for (const auto& n : nodes) w.put_var(as_view(n));
    return std::move(w).data();
}

Proof Proof::decode(ByteView in) {
    ByteReader r(in);
    Proof p;
    std::uint8_t pol = r.get_u8();
    if (pol != 1 && pol != 2) throw ParseError("invalid proof polarity");
    p.polarity = static_cast<Polarity>(pol);
    std::uint32_t n = r.get_u32();
    p.nodes.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) p.nodes.push_back(r.get_var());
    r.expect_done();
    return p;
}

PartialState Trie::extract(std::span<const Bytes> keys) const {
    PartialState ps;
    ps.root = root_;
    for (const auto& k : keys) ps.covered_keys.push_back(k);
    if (root_ == empty_root()) return ps;

    auto add_node = [&](const Digest& d) -> std::optional<Node> {
        auto enc = store_.get(d);
        if (!enc) throw PathMissingError("trie node not in store: " + d.hex());
        ps.nodes[d] = *enc;
        return Node::decode(as_view(*enc));
    };

    // The root node is always shipped, even with no covered keys.
    add_node(root_);
    for (const auto& key : keys) {
        Nibbles nibbles = key_to_nibbles(as_view(key));
        Digest cur = root_;
        std::size_t pos = 0;
        for (bool walking = true; walking;) {
            Node node = *add_node(cur);
            switch (node.kind) {
                case NodeKind::kLeaf:
                    walking = false;
                    break;
                case NodeKind::kExtension:
                    if (!starts_with(nibbles, pos, node.path)) {
                        walking = false;
                        break;
                    }
                    pos += node.path.size();
                    cur = *node.child;
                    break;
                case NodeKind::kBranch: {
                    if (pos == nibbles.size() || !node.children[nibbles[pos]]) {
                        walking = false;
                        break;
                    }
                    cur = *node.children[nibbles[pos]];
                    ++pos;
                    break;
                }
            }
        }
    }
    return ps;
}

Bytes PartialState::encode() const {
    ByteWriter w;
    w.put_digest(root);
    w.put_u32(static_cast<std::uint32_t>(covered_keys.size()));
    for (const auto& k : covered_keys) w.put_var(as_view(k));
    w.put_u32(static_cast<std::uint32_t>(nodes.size()));
    for (const auto& [d, enc] : nodes) w.put_var(as_view(enc));
    return std::move(w).data();
}

PartialState PartialState::decode(ByteView in) {
    ByteReader r(in);
    PartialState ps;
    ps.root = r.get_digest();
    std::uint32_t nk = r.get_u32();
    for (std::uint32_t i = 0; i < nk; ++i) ps.covered_keys.push_back(r.get_var());
    std::uint32_t nn = r.get_u32();
    for (std::uint32_t i = 0; i < nn; ++i) {
        Bytes enc = r.get_var();
        ps.nodes[crypto::sha256(as_view(enc))] = std::move(enc);
    }
    r.expect_done();
    return ps;
}

PartialTrie::PartialTrie(const PartialState& ps)
    : covered_keys_(ps.covered_keys), trie_(store_, ps.root) {
    for (const auto& [digest, enc] : ps.nodes) {
        if (crypto::sha256(as_view(enc)) != digest)
            throw IntegrityError("partial state node digest mismatch");
        store_.put(digest, enc);
    }
    if (ps.root != empty_root() && !store_.get(ps.root))
        throw PathMissingError("partial state lacks its root node");
}

PartialState PartialTrie::state() const {
    PartialState ps;
    ps.root = trie_.root();
    ps.covered_keys = covered_keys_;
    ps.nodes = store_.entries();
    return ps;
}

Digest partial_apply(const PartialState& ps, std::span<const Write> writes) {
    PartialTrie trie(ps);
    for (const auto& w : writes) {
        if (w.value)
            trie.put(as_view(w.key), as_view(*w.value));
        else
            trie.remove(as_view(w.key));
    }
    return trie.root();
}

}  // namespace aqua::mpt
