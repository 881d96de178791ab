#include "dpac/channel.hpp"

#include <bit>

#include "dpac/errors.hpp"

namespace dpac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void charge(CostLedger& l, PartyId from, const Message& m, std::size_t bits) {
    l.bits += bits;
    l.per_player[from.value] += bits;
    if (std::holds_alternative<msg::Example>(m)) ++l.examples;
    if (std::holds_alternative<msg::HypothesisMsg>(m)) ++l.hypotheses;
}

} // namespace

unsigned count_width(std::uint64_t max_value) noexcept {
    return std::max(1u, static_cast<unsigned>(std::bit_width(max_value)));
}

std::size_t encoded_bits(const Message& m, const Encoding& enc) {
    return std::visit(
        overloaded{
            [&](const msg::Example& e) -> std::size_t {
                const std::size_t d = e.example.x.size();
                return enc.boolean_features ? d + 1 : d * enc.precision_bits + 1;
            },
            [&](const msg::HypothesisMsg& h) { return encoded_bits(h.hypothesis, enc.precision_bits); },
            [](const msg::Bits& b) { return b.bit_length; },
            [](const msg::Count& c) -> std::size_t {
                if (c.width < 64 && c.value >= (1ULL << c.width)) {
                    throw ConfigurationError("Count value does not fit its declared width");
                }
                return c.width;
            },
            [](const msg::RuleMsg& r) { return rule_bits(r.n); },
            [](const msg::Halt&) -> std::size_t { return 1; },
        },
        m);
}

CostLedger& CostLedger::operator+=(const CostLedger& o) {
    bits += o.bits;
    examples += o.examples;
    hypotheses += o.hypotheses;
    rounds += o.rounds;
    meta_rounds += o.meta_rounds;
    for (const auto& [p, b] : o.per_player) per_player[p] += b;
    return *this;
}

void to_json(nlohmann::json& j, const CostLedger& l) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [p, b] : l.per_player) per[p < 0 ? std::string("center") : std::to_string(p)] = b;
    j = nlohmann::json{{"bits", l.bits},         {"examples", l.examples},
                       {"hypotheses", l.hypotheses}, {"rounds", l.rounds},
                       {"meta_rounds", l.meta_rounds}, {"per_player", per}};
}

void from_json(const nlohmann::json& j, CostLedger& l) {
    l.bits = j.at("bits").get<std::uint64_t>();
    l.examples = j.at("examples").get<std::uint64_t>();
    l.hypotheses = j.at("hypotheses").get<std::uint64_t>();
    l.rounds = j.at("rounds").get<std::uint64_t>();
    l.meta_rounds = j.at("meta_rounds").get<std::uint64_t>();
    l.per_player.clear();
    for (const auto& [key, v] : j.at("per_player").items()) {
        l.per_player[key == "center" ? -1 : std::stoi(key)] = v.get<std::uint64_t>();
    }
}

Channel::Channel(std::size_t players, bool has_center, Encoding encoding, SyncModel sync,
                 bool record_trace)
    : players_(players), has_center_(has_center), encoding_(encoding), sync_(sync),
      record_trace_(record_trace) {
    if (players == 0) throw ConfigurationError("a run needs at least one player");
}

void Channel::check_party(PartyId p) const {
    if (p.is_center() ? !has_center_ : static_cast<std::size_t>(p.value) >= players_) {
        throw ProtocolViolation("message addressed from/to a party that is not in the run");
    }
}

void Channel::send(PartyId from, Recipient to, const Message& m) {
    check_party(from);
    if (const auto* p = std::get_if<PartyId>(&to)) check_party(*p);
    if (sync_ == SyncModel::LockSynchronous) {
        if (slot_used_) throw ProtocolViolation("two sends in one lock-synchronous slot");
        slot_used_ = true;
    }
    const std::size_t bits = encoded_bits(m, encoding_);
    charge(ledger_, from, m, bits);
    if (record_trace_) trace_.push_back(TraceEntry{from, to, m, bits, ledger_.rounds});
}

void Channel::advance_round() {
    ++ledger_.rounds;
    slot_used_ = false;
}

void Channel::advance_meta_round() { ++ledger_.meta_rounds; }

CostLedger replay(const std::vector<TraceEntry>& trace, const Encoding& enc, std::uint64_t rounds,
                  std::uint64_t meta_rounds) {
    CostLedger l;
    for (const auto& e : trace) charge(l, e.from, e.message, encoded_bits(e.message, enc));
    l.rounds = rounds;
    l.meta_rounds = meta_rounds;
    return l;
}

} // namespace dpac
