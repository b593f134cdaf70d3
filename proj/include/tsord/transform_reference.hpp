#pragma once

#include "tsord/feature_matrix.hpp"
#include "tsord/transform.hpp"

namespace tsord::reference {

/// Single-threaded naive counterparts of the transform apply paths: every
/// feature is recomputed from its fitted parameters with a direct dilated
/// dot product per kernel (no shared tap sums, no OpenMP). Used by the tests
/// and the benchmark as an independent route to the same matrices.
FeatureMatrix rocket_apply(const RocketTransform& t, const OrdinalDataset& ds);
FeatureMatrix minirocket_apply(const MiniRocketTransform& t, const OrdinalDataset& ds);
FeatureMatrix multirocket_apply(const MultiRocketTransform& t, const OrdinalDataset& ds);

}  // namespace tsord::reference
