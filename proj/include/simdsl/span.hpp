#pragma once

#include <cstddef>

namespace simdsl {

// Half-open byte range [begin, end) into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;

  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
};

inline Span join(const Span& a, const Span& b) {
  return Span{a.begin < b.begin ? a.begin : b.begin,
              a.end > b.end ? a.end : b.end};
}

}  // namespace simdsl
