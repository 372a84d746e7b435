#pragma once

#include "fxp/errors.hpp"

namespace fxp {

template <typename Fn>
void for_each_restricted_point(const FeatureSpace& space, const Restriction& restriction,
                               std::uint64_t cap, Fn&& fn) {
  const BigInt total = restricted_point_count(space, restriction);
  if (total > cap) {
    throw CapExceededError("restricted region has " + total.str() +
                           " points, above the brute-force cap of " + std::to_string(cap));
  }
  const std::size_t m = space.size();
  Point x = restriction.anchor;
  for (std::size_t i = 0; i < m; ++i) {
    if (!restriction.fixed.contains(i)) x[i] = 0;
  }
  for (;;) {
    fn(static_cast<const Point&>(x));
    bool advanced = false;
    std::size_t i = m;
    while (i > 0) {
      --i;
      if (restriction.fixed.contains(i)) continue;
      if (++x[i] < space.feature(i).domain.size()) {
        advanced = true;
        break;
      }
      x[i] = 0;  // carry into the next free coordinate
    }
    if (!advanced) return;
  }
}

}  // namespace fxp
