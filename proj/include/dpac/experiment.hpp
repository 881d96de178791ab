#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "dpac/protocol.hpp"

namespace dpac::experiment {

/**
 * One experiment family read from YAML:
 *
 *   protocol: closed/conjunction
 *   n: 30              # or d
 *   k: 5
 *   epsilon: 0.05
 *   delta: 0.05
 *   seeds: 100         # 0..99; also "a..b" or a list
 *   target: {kind: conjunction, literals: 3}
 *   distribution: {kind: uniform_boolean}   # or players: [ ... ] with k entries
 *   params: { ... }    # protocol knobs
 *   privacy: {mode: differential, alpha: 1, delta: 0.05}
 *   m_eval: 20000
 *   output: runs/closed
 *
 * See README.md for every key.
 */
struct Config {
    YAML::Node root;
    std::string source;
    std::string protocol;
    std::size_t dim = 0;
    std::size_t k = 1;
    double epsilon = 0.1;
    double delta = 0.05;
    std::vector<std::uint64_t> seeds;
    std::string output;
    std::size_t m_eval = 20000;
    unsigned precision_bits = 32;
};

// Throws ConfigurationError with "<source>:<line>: field '<key>': ..." text.
Config parse_config(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::filesystem::path& path);

// "a..b", inclusive.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

struct ProtocolInfo {
    std::string name;
    std::string summary;
};
const std::vector<ProtocolInfo>& protocols();

struct Instance {
    std::vector<DistributionSpec> players;
    TargetFunction target;
};

// Target and player distributions for one seed (stream "instance").
Instance make_instance(const Config& cfg, std::uint64_t seed);

// Full result of one seed. Not valid for linear/appendix_c.
ProtocolResult run_protocol(const Config& cfg, std::uint64_t seed);

struct RunSettings {
    std::filesystem::path out;  // empty: config output, then $DPAC_OUT_ROOT/<stem>, then runs/<stem>
    bool timing = false;
};

struct RunReport {
    std::filesystem::path out;
    std::size_t rows = 0;
    std::size_t failures = 0;
};

// Writes results.csv, summary.json and (linear/appendix_c) trace files. Protocol
// errors of single seeds are recorded in the summary and reported on err;
// the run still writes every file.
RunReport run_config(const Config& cfg, const RunSettings& settings, std::ostream& err);

std::filesystem::path default_output(const Config& cfg);

// Ratios of medians A/B for bits, examples, hypotheses, rounds. Throws
// ConfigurationError when class, dimension or k differ.
struct Comparison {
    std::vector<std::string> currencies;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> ratio;
};
Comparison compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);
void print_comparison(std::ostream& out, const Comparison& c);

} // namespace dpac::experiment
