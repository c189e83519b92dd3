#pragma once

#include <cstddef>

namespace focus::bench {

// One-sided exact binomial test: P(X >= successes) for
// X ~ Binomial(successes + failures, 1/2). Throws DomainError when both
// counts are zero.
double sign_test(std::size_t successes, std::size_t failures);

}  // namespace focus::bench
