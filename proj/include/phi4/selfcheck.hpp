#pragma once

// Exact-identity suite: partition of unity, Bony decomposition, heat
// semigroup, Parseval, transform round trip and P2 P1 = P1.

#include <cstdint>
#include <string>
#include <vector>

namespace phi4 {

struct SelfcheckItem {
  std::string name;
  double value = 0.0;      // worst residual observed
  double tolerance = 0.0;  // pass iff value <= tolerance
  bool pass = false;
};

std::vector<SelfcheckItem> run_selfcheck(std::uint64_t seed = 0);

}  // namespace phi4
