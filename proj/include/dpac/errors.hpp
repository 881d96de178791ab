#pragma once
#include <stdexcept>
#include <string>

namespace dpac {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can report a diagnostic and keep going with the next seed.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DPAC_DEFINE_ERROR(Name)                \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    };

DPAC_DEFINE_ERROR(ConfigurationError)
DPAC_DEFINE_ERROR(ProtocolError)
DPAC_DEFINE_ERROR(ProtocolViolation)
DPAC_DEFINE_ERROR(RealizabilityViolation)
DPAC_DEFINE_ERROR(DegenerateEstimate)
DPAC_DEFINE_ERROR(DegenerateDistribution)
DPAC_DEFINE_ERROR(NonSeparableData)
DPAC_DEFINE_ERROR(NonConvergence)
DPAC_DEFINE_ERROR(WeakLearningFailure)
DPAC_DEFINE_ERROR(HalvingCollapse)
DPAC_DEFINE_ERROR(SearchFailure)
DPAC_DEFINE_ERROR(BudgetExhausted)
DPAC_DEFINE_ERROR(DegenerateConditioning)

#undef DPAC_DEFINE_ERROR

} // namespace dpac
