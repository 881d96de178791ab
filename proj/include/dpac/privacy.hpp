#pragma once
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dpac/protocol.hpp"
#include "dpac/rng.hpp"

namespace dpac::privacy {

enum class Conditioning { All, PositivesOnly };
enum class PrivacyMode { None, Differential, Distributional };

struct SQQuery {
    std::function<bool(const Features&, int)> predicate;
    std::string descriptor;
    double tau = 0.1;
    Conditioning conditioning = Conditioning::All;
};

// Per-player. Every sq_answer spends one of the M declared queries.
class PrivacyBudget {
public:
    PrivacyBudget(PrivacyMode mode, double alpha_total, double delta_total, std::size_t M);

    PrivacyMode mode() const noexcept { return mode_; }
    double alpha_total() const noexcept { return alpha_; }
    double delta_total() const noexcept { return delta_; }
    std::size_t declared() const noexcept { return M_; }
    std::size_t spent() const noexcept { return spent_; }
    std::size_t remaining() const noexcept { return M_ - spent_; }

    double alpha_prime() const noexcept;
    double delta_prime() const noexcept;

    // Throws BudgetExhausted when all M queries are used.
    void spend();

private:
    PrivacyMode mode_;
    double alpha_;
    double delta_;
    std::size_t M_;
    std::size_t spent_ = 0;
};

// Inverse-CDF Laplace(0, scale).
double laplace_noise(double scale, Rng& rng);
double laplace_density(double x, double mu, double scale);

// sqrt(2 ln(4/delta') / size)
double distributional_sensitivity(double delta_prime, double size);

// Noise scale sq_answer would use for a conditioned sample of the given size.
double noise_scale(const PrivacyBudget& budget, double size);

// Weighted empirical mean of q over the (conditioned, alive) sample plus
// Laplace noise. alive may be empty, meaning "all alive".
// Throws DegenerateConditioning on an empty conditioned sample (before spending).
double sq_answer(const Sample& sample, const SQQuery& q, PrivacyBudget& budget, Rng& rng,
                 const std::vector<bool>& alive = {});

// Differential: c_p max(M/(alpha tau), M/tau^2) ln(M/delta).
// Distributional: c_p M^2 ln^3(M/delta) / (alpha^2 tau^2).
// c_p <= 0 picks the mode default (1 differential, 4 distributional).
std::size_t private_sample_size(std::size_t M, double alpha, double tau, double delta, PrivacyMode mode,
                                double c_p = 0.0);

struct PrivateConjunctionParams {
    double epsilon = 0.1;
    double delta = 0.05;
    PrivacyMode mode = PrivacyMode::Differential;
    double alpha = 1.0;
    double c_p = 0.0;
    std::size_t sample_size = 0;  // 0: private_sample_size(n, alpha, eps/(2n), delta, mode)
};

// Exact (noise-free) reference: include j iff Pr[x_j = 0 | positive] <= threshold.
// No positives gives the all-variables mask.
Conjunction sq_threshold_conjunction(const Sample& sample, double threshold);

/**
 * Each player answers n positives-only queries [x_j = 0] from its own budget
 * and keeps j iff the answer is <= eps/n, then sends that conjunction to the
 * center, which outputs the closure. Same messages as the non-private
 * intersection-closed run, so the ledger matches it exactly.
 */
ProtocolResult private_conjunction_protocol(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                            const PrivateConjunctionParams& params, const RunOptions& opts);

// One query with tau = theta/2 on [rule fires and label != c] over the alive
// examples; consistent iff the answer is <= theta/2. No alive examples is
// vacuously consistent and spends nothing.
bool sq_rule_consistency(const Sample& sample, const std::vector<bool>& alive, const Rule& rule, double theta,
                         PrivacyBudget& budget, Rng& rng);

struct PrivateDecisionListParams {
    double epsilon = 0.1;
    double delta = 0.05;
    PrivacyMode mode = PrivacyMode::Differential;
    double alpha = 1.0;
    double theta = 0.0;           // 0: eps/(8n)
    std::size_t max_rounds = 0;   // 0: 2n + 2
    std::size_t sample_size = 0;  // 0: declist_sample_size(...)
};

/**
 * Decision-list triplet protocol where each player decides consistency with
 * sq_rule_consistency. Every round a player queries each triplet it has not
 * announced yet, so its budget declares (4n+2) * max_rounds queries.
 * Running past max_rounds throws NonConvergence.
 */
ProtocolResult run_private_decision_list(const std::vector<DistributionSpec>& players, const TargetFunction& f,
                                         const PrivateDecisionListParams& params, const RunOptions& opts);

} // namespace dpac::privacy
