// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/chain.hpp"

namespace aqua::chain {

using ledger::CensStatus;

void SimChain::tick() {
    height_ += 1;
    while (!queue_.empty() && queue_.front().apply_at <= height_) {
        Pending p = std::move(queue_.front());
        queue_.pop_front();
        results_[p.handle] = apply(p.call);
    }
}

void SimChain::tick(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) tick();
}

ContractId SimChain::deploy(const crypto::PublicKey& pk_e_pb, const crypto::PublicKey& pk_e_tee,
                            const crypto::PublicKey& pk_o) {
    deploy_count_ += 1;
    state_ = ContractState{};
    state_.pk_e_pb.push_back(pk_e_pb);
    state_.pk_e_tee.push_back(pk_e_tee);
    state_.pk_o = pk_o;

    ByteWriter w;
    w.put_u64(deploy_count_);
    w.put_var(as_view(pk_e_pb.bytes));
    w.put_var(as_view(pk_e_tee.bytes));
    w.put_var(as_view(pk_o.bytes));
    id_ = crypto::sha256(as_view(w.data()));
    deployed_ = true;
    return id_;
}

std::uint64_t SimChain::submit(Call call) {
    std::uint64_t handle = results_.size();
    results_.emplace_back();
    if (confirmation_delay_ == 0) {
        results_[handle] = apply(call);
    } else {
        queue_.push_back({height_ + confirmation_delay_, std::move(call), handle});
    }
    return handle;
}

std::optional<CallResult> SimChain::result_of(std::uint64_t handle) const {
    if (handle >= results_.size()) return std::nullopt;
    return results_[handle];
}

std::vector<Event> SimChain::events_since(std::size_t index) const {
    if (index >= events_.size()) return {};
    return std::vector<Event>(events_.begin() + static_cast<std::ptrdiff_t>(index),
                              events_.end());
}

namespace {

CallResult revert(std::string reason) {
    CallResult r;
    r.ok = false;
    r.revert_reason = std::move(reason);
    return r;
}

}  // namespace

CallResult SimChain::apply(const Call& call) {
    if (!deployed_) return revert("no contract deployed");

    return std::visit(
        [&](const auto& c) -> CallResult {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PostLRoot>) {
                // Verify the transition was made within the enclave.
                if (!crypto::verify(state_.pk_e_pb.back(),
                                    as_view(ledger::vtp_message(c.root_a, c.root_b)), c.sig))
                    return revert("transition signature invalid");
                // Verify the transition extends the anchored version.
                if (state_.lroot_pb == c.root_a) {
                    state_.lroot_pb = c.root_b;
                    events_.push_back({height_, RootPosted{c.root_a, c.root_b}});
                } else {
                    events_.push_back({height_, RootRejected{c.root_a, c.root_b}});
                }
                CallResult ok;
                ok.ok = true;
                return ok;
            } else if constexpr (std::is_same_v<T, ReplaceEnc>) {
                Bytes msg = ledger::replace_enc_message(c.pk_pb, c.pk_tee, c.root_a, c.root_b,
                                                        c.sig);
                if (!crypto::verify(state_.pk_o, as_view(msg), c.op_sig))
                    return revert("operator signature invalid");
                // The transition pair was signed by the replacement enclave.
                if (!crypto::verify(c.pk_pb, as_view(ledger::vtp_message(c.root_a, c.root_b)),
                                    c.sig))
                    return revert("replacement transition signature invalid");
                if (state_.lroot_pb != c.root_a) return revert("transition does not extend anchor");
                state_.lroot_pb = c.root_b;
                state_.pk_e_pb.push_back(c.pk_pb);
                state_.pk_e_tee.push_back(c.pk_tee);
                events_.push_back({height_, RootPosted{c.root_a, c.root_b}});
                events_.push_back({height_, EnclaveReplaced{c.pk_pb, c.pk_tee}});
                CallResult ok;
                ok.ok = true;
                return ok;
            } else if constexpr (std::is_same_v<T, SubmitCensTx> ||
                                 std::is_same_v<T, SubmitCensQry>) {
                const ledger::AccessTicket& ticket = c.ticket;
                if (ticket.expiry_height <= height_) return revert("ticket expired");
                bool ticket_ok = false;
                for (const auto& pk : state_.pk_e_pb)
                    if (crypto::verify(pk,
                                       as_view(ledger::ticket_message(ticket.client,
                                                                      ticket.expiry_height)),
                                       ticket.sig)) {
                        ticket_ok = true;
                        break;
                    }
                if (!ticket_ok) return revert("ticket signature invalid");

                CensRecord record;
                std::uint64_t index = state_.cens_reqs.size();
                if constexpr (std::is_same_v<T, SubmitCensTx>) {
                    record.is_tx = true;
                    record.request_hash = crypto::sha256(as_view(c.etx.encode()));
                    events_.push_back({height_, CensTxSubmitted{index, c.etx}});
                } else {
                    record.is_tx = false;
                    record.request_hash = crypto::sha256(as_view(c.equery.encode()));
                    events_.push_back({height_, CensQrySubmitted{index, c.equery}});
                }
                state_.cens_reqs.push_back(record);
                CallResult ok;
                ok.ok = true;
                ok.request_index = index;
                return ok;
            } else if constexpr (std::is_same_v<T, ResolveCensTx>) {
                if (c.index >= state_.cens_reqs.size()) return revert("request index out of range");
                CensRecord& record = state_.cens_reqs[c.index];
                if (record.status != CensStatus::kPending) return revert("already resolved");
                // For a query record the etx hash is the absent-payload
                // hash, so a type-confused resolution fails verification.
                Digest etx_hash = record.is_tx ? record.request_hash
                                               : ledger::absent_payload_hash();
                if (!crypto::verify(state_.pk_e_pb.back(),
                                    as_view(ledger::cens_tx_message(etx_hash, c.status)), c.sig))
                    return revert("resolution signature invalid");
                record.status = c.status;
                events_.push_back({height_, CensTxResolved{c.index, c.status, c.sig}});
                CallResult ok;
                ok.ok = true;
                return ok;
            } else if constexpr (std::is_same_v<T, ResolveCensQry>) {
                if (c.index >= state_.cens_reqs.size()) return revert("request index out of range");
                CensRecord& record = state_.cens_reqs[c.index];
                if (record.status != CensStatus::kPending) return revert("already resolved");
                Digest equery_hash = record.is_tx ? ledger::absent_payload_hash()
                                                  : record.request_hash;
                Digest edata_hash = c.edata ? crypto::sha256(as_view(c.edata->encode()))
                                            : ledger::absent_payload_hash();
                if (!crypto::verify(
                        state_.pk_e_pb.back(),
                        as_view(ledger::cens_qry_message(equery_hash, c.status, edata_hash)),
                        c.sig))
                    return revert("resolution signature invalid");
                record.status = c.status;
                record.edata_hash = c.edata ? std::optional<Digest>(edata_hash) : std::nullopt;
                events_.push_back({height_, CensQryResolved{c.index, c.status, c.edata, c.sig}});
                CallResult ok;
                ok.ok = true;
                return ok;
            }
        },
        call);
}

namespace {

nlohmann::json event_to_json(const Event& e) {
    nlohmann::json j;
    j["height"] = e.height;
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, RootPosted>) {
                j["kind"] = "root_posted";
                j["from"] = body.from.hex();
                j["to"] = body.to.hex();
            } else if constexpr (std::is_same_v<T, RootRejected>) {
                j["kind"] = "root_rejected";
                j["from"] = body.attempted_from.hex();
                j["to"] = body.attempted_to.hex();
            } else if constexpr (std::is_same_v<T, EnclaveReplaced>) {
                j["kind"] = "enclave_replaced";
                j["pk_pb"] = to_hex(as_view(body.pk_pb.bytes));
                j["pk_tee"] = to_hex(as_view(body.pk_tee.bytes));
            } else if constexpr (std::is_same_v<T, CensTxSubmitted>) {
                j["kind"] = "cens_tx_submitted";
                j["index"] = body.index;
                j["etx"] = to_hex(as_view(body.etx.encode()));
            } else if constexpr (std::is_same_v<T, CensQrySubmitted>) {
                j["kind"] = "cens_qry_submitted";
                j["index"] = body.index;
                j["equery"] = to_hex(as_view(body.equery.encode()));
            } else if constexpr (std::is_same_v<T, CensTxResolved>) {
                j["kind"] = "cens_tx_resolved";
                j["index"] = body.index;
                j["status"] = ledger::to_string(body.status);
            } else if constexpr (std::is_same_v<T, CensQryResolved>) {
                j["kind"] = "cens_qry_resolved";
                j["index"] = body.index;
                j["status"] = ledger::to_string(body.status);
                j["edata"] = body.edata ? to_hex(as_view(body.edata->encode())) : "";
            }
        },
        e.body);
    return j;
}

}  // namespace

nlohmann::json SimChain::dump() const {
    nlohmann::json j;
    j["height"] = height_;
    j["contract_id"] = id_.hex();
    j["lroot_pb"] = state_.lroot_pb.hex();
    j["pk_e_pb"] = nlohmann::json::array();
    for (const auto& pk : state_.pk_e_pb) j["pk_e_pb"].push_back(to_hex(as_view(pk.bytes)));
    j["pk_e_tee"] = nlohmann::json::array();
    for (const auto& pk : state_.pk_e_tee) j["pk_e_tee"].push_back(to_hex(as_view(pk.bytes)));
    j["cens_reqs"] = nlohmann::json::array();
    for (const auto& r : state_.cens_reqs) {
        nlohmann::json rec;
        rec["is_tx"] = r.is_tx;
        rec["request_hash"] = r.request_hash.hex();
        rec["status"] = ledger::to_string(r.status);
        if (r.edata_hash) rec["edata_hash"] = r.edata_hash->hex();
        j["cens_reqs"].push_back(rec);
    }
    j["events"] = nlohmann::json::array();
    for (const auto& e : events_) j["events"].push_back(event_to_json(e));
    return j;
}

}  // namespace aqua::chain
