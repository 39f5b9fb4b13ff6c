#pragma once

#include <ostream>

namespace ncs {

/// Always-on statistical property checks: the 1-means identity, weight
/// conservation, sampling unbiasedness, noise-energy concentration, center
/// movement under subsampling and noise, the composition inequality, the
/// grid-oracle comparison, and the outlier instance. Prints one line per
/// check and returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace ncs
