#pragma once

#include <cstdint>
#include <vector>

#include "simdsl/dataset.hpp"

namespace simdsl {

// Template-generated accumulation-process examples: a starting quantity,
// a per-cycle change and a cycle count are embedded in the text and the
// reference program reads them back in that order. Deterministic under
// the seed; ids are "<split>-NNNN".
std::vector<QAExample> generate_synthetic_corpus(std::size_t count,
                                                 Split split,
                                                 std::uint64_t seed);

}  // namespace simdsl
