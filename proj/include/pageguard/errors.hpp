#pragma once

#include <stdexcept>
#include <string>

namespace pageguard {

// Domain errors. The CLI maps any of these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PAGEGUARD_DEFINE_ERROR(NAME)            \
  class NAME : public Error {                   \
   public:                                      \
    using Error::Error;                         \
  }

PAGEGUARD_DEFINE_ERROR(InsufficientCorpus);
PAGEGUARD_DEFINE_ERROR(InvalidSlotForMode);
PAGEGUARD_DEFINE_ERROR(MalformedPageHtml);
PAGEGUARD_DEFINE_ERROR(EmptyInput);
PAGEGUARD_DEFINE_ERROR(EmptySeeds);
PAGEGUARD_DEFINE_ERROR(NoExpandableCandidates);
PAGEGUARD_DEFINE_ERROR(SlotUnpopulated);
PAGEGUARD_DEFINE_ERROR(NoScoredReports);
PAGEGUARD_DEFINE_ERROR(GatewayTimeout);
PAGEGUARD_DEFINE_ERROR(GatewayExhausted);
PAGEGUARD_DEFINE_ERROR(MutatorEmpty);
PAGEGUARD_DEFINE_ERROR(IoFailure);

#undef PAGEGUARD_DEFINE_ERROR

}  // namespace pageguard
