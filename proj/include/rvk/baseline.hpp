#pragma once

#include <Eigen/Dense>

#include <vector>

#include <rvk/ransac.hpp>
#include <rvk/types.hpp>

namespace rvk {

// Reference single-threaded RANSAC: clusters in order, trials in order, same
// keyed RNG and trial arithmetic as run_ransac, so the output is
// bit-identical to the parallel engine for any seed. Serves as correctness
// oracle and as the timing baseline.
std::vector<InlierMask> sequential_ransac(const std::vector<Eigen::ArrayX2d>& clusters,
                                          const RansacParams& params);

// Reference single-threaded per-cluster least-squares pass; same results as
// estimate_all, computed cluster by cluster.
std::vector<VelocityEstimate> sequential_lsq(const Frame& frame,
                                             const std::vector<Cluster>& clusters,
                                             const std::vector<InlierMask>& masks);

}  // namespace rvk
