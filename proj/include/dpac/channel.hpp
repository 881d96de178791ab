#pragma once
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dpac/hypothesis.hpp"
#include "dpac/sample.hpp"

namespace dpac {

// Players are 0..k-1; the center is a distinguished id. Protocols without a
// center simply never address it.
struct PartyId {
    int value = 0;

    static constexpr PartyId center() noexcept { return PartyId{-1}; }
    static constexpr PartyId player(std::size_t i) noexcept { return PartyId{static_cast<int>(i)}; }
    bool is_center() const noexcept { return value < 0; }

    friend auto operator<=>(const PartyId&, const PartyId&) = default;
};

inline constexpr PartyId kCenter = PartyId::center();

struct Broadcast {};
using Recipient = std::variant<PartyId, Broadcast>;

namespace msg {

struct Example {
    LabeledExample example;
};
struct HypothesisMsg {
    Hypothesis hypothesis;
};
// Opaque payload of an explicit bit length.
struct Bits {
    std::size_t bit_length = 0;
};
// value must fit in width bits.
struct Count {
    std::uint64_t value = 0;
    unsigned width = 32;
};
struct RuleMsg {
    Rule rule;
    std::size_t n = 0;  // number of variables, fixes the triplet width
};
struct Halt {};

} // namespace msg

using Message =
    std::variant<msg::Example, msg::HypothesisMsg, msg::Bits, msg::Count, msg::RuleMsg, msg::Halt>;

// Wire encoding of feature vectors. Boolean examples cost n+1 bits; real
// vectors cost d*precision_bits + 1 (the +1 is the label or a flag).
struct Encoding {
    bool boolean_features = true;
    unsigned precision_bits = 32;
};

std::size_t encoded_bits(const Message& m, const Encoding& enc);

// Smallest w with v < 2^w (at least 1).
unsigned count_width(std::uint64_t max_value) noexcept;

enum class SyncModel { Asynchronous, LockSynchronous };

struct CostLedger {
    std::uint64_t bits = 0;
    std::uint64_t examples = 0;
    std::uint64_t hypotheses = 0;
    std::uint64_t rounds = 0;
    std::uint64_t meta_rounds = 0;
    // Bits sent, keyed by sender (center = -1).
    std::map<int, std::uint64_t> per_player;

    CostLedger& operator+=(const CostLedger& o);
    friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

void to_json(nlohmann::json& j, const CostLedger& l);
void from_json(const nlohmann::json& j, CostLedger& l);

struct TraceEntry {
    PartyId from;
    Recipient to;
    Message message;
    std::size_t bits = 0;
    std::uint64_t round = 0;
};

/**
 * Charged message channel for one protocol run.
 *
 * A broadcast is charged once, not once per listener. In LockSynchronous mode
 * each slot (the span between two advance_round calls) admits one send; a
 * second send in the same slot raises ProtocolViolation. A slot in which no
 * one speaks still counts as a round once advanced.
 */
class Channel {
public:
    Channel(std::size_t players, bool has_center, Encoding encoding,
            SyncModel sync = SyncModel::Asynchronous, bool record_trace = true);

    void send(PartyId from, Recipient to, const Message& m);
    void advance_round();
    void advance_meta_round();

    const CostLedger& ledger() const noexcept { return ledger_; }
    const std::vector<TraceEntry>& trace() const noexcept { return trace_; }
    const Encoding& encoding() const noexcept { return encoding_; }
    std::size_t players() const noexcept { return players_; }
    bool has_center() const noexcept { return has_center_; }

private:
    void check_party(PartyId p) const;

    std::size_t players_;
    bool has_center_;
    Encoding encoding_;
    SyncModel sync_;
    bool record_trace_;
    bool slot_used_ = false;
    CostLedger ledger_;
    std::vector<TraceEntry> trace_;
};

// Ledger a trace implies: re-evaluates the per-message size formula for every
// recorded send.
CostLedger replay(const std::vector<TraceEntry>& trace, const Encoding& enc, std::uint64_t rounds,
                  std::uint64_t meta_rounds);

} // namespace dpac
