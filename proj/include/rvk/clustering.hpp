#pragma once

#include <vector>

#include <rvk/types.hpp>

namespace rvk {

// Feature space used for neighborhood queries.
enum class ClusterFeatures { XY, XYZ };

struct ClusteringParams {
  double eps = 2.0;  // neighborhood radius, meters
  int min_pts = 3;   // neighbors (self included) required for a core point
  ClusterFeatures features = ClusterFeatures::XY;
};

// Density clustering over frame.points. Fills frame.labels with cluster ids
// 0..k-1, or kNoiseLabel for unclustered points. The induced partition is
// independent of point order: clusters are connected components of the
// core-core eps-graph, and border points join the cluster of their nearest
// core neighbor instead of the first one that happens to claim them.
// Throws std::invalid_argument for eps <= 0 or min_pts < 1.
void dbscan(Frame& frame, const ClusteringParams& params);

// Drops clusters with fewer than min_cluster_size points, relabels their
// points as noise, and compacts surviving ids to 0..m-1 (preserving relative
// order). frame.labels is rewritten accordingly. Returns the survivors with
// their member point indices in ascending order.
// Throws std::invalid_argument if frame.labels does not match frame.points.
std::vector<Cluster> extract_clusters(Frame& frame, int min_cluster_size = kMinClusterSize);

}  // namespace rvk
