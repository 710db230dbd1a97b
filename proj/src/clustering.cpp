#include <rvk/clustering.hpp>

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <utility>

namespace rvk {
namespace {

double squared_distance(const RadarPoint& a, const RadarPoint& b, ClusterFeatures features) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  double d2 = dx * dx + dy * dy;
  if (features == ClusterFeatures::XYZ) {
    const double dz = a.z - b.z;
    d2 += dz * dz;
  }
  return d2;
}

}  // namespace

void dbscan(Frame& frame, const ClusteringParams& params) {
  if (!(params.eps > 0.0)) {
    throw std::invalid_argument("dbscan: eps must be positive");
  }
  if (params.min_pts < 1) {
    throw std::invalid_argument("dbscan: min_pts must be at least 1");
  }

  const int n = static_cast<int>(frame.points.size());
  frame.labels.assign(static_cast<std::size_t>(n), kNoiseLabel);
  if (n == 0) {
    return;
  }

  const double eps2 = params.eps * params.eps;

  // Neighborhoods include the point itself, so |N_eps(p)| >= 1 always.
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    neighbors[static_cast<std::size_t>(i)].push_back(i);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (squared_distance(frame.points[static_cast<std::size_t>(i)],
                           frame.points[static_cast<std::size_t>(j)],
                           params.features) <= eps2) {
        neighbors[static_cast<std::size_t>(i)].push_back(j);
        neighbors[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }

  std::vector<bool> core(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    core[static_cast<std::size_t>(i)] =
        static_cast<int>(neighbors[static_cast<std::size_t>(i)].size()) >= params.min_pts;
  }

  // Clusters are the connected components of the graph joining core points
  // within eps of each other. Ids follow the smallest core index of each
  // component, so the labeling is canonical for a given point order while the
  // partition itself does not depend on that order.
  int next_id = 0;
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)] ||
        frame.labels[static_cast<std::size_t>(i)] != kNoiseLabel) {
      continue;
    }
    const int id = next_id++;
    std::queue<int> pending;
    frame.labels[static_cast<std::size_t>(i)] = id;
    pending.push(i);
    while (!pending.empty()) {
      const int p = pending.front();
      pending.pop();
      for (int q : neighbors[static_cast<std::size_t>(p)]) {
        if (core[static_cast<std::size_t>(q)] &&
            frame.labels[static_cast<std::size_t>(q)] == kNoiseLabel) {
          frame.labels[static_cast<std::size_t>(q)] = id;
          pending.push(q);
        }
      }
    }
  }

  // A border point (non-core within eps of some core) joins the cluster of
  // its nearest core neighbor, ties broken by lowest index. The usual
  // first-claimer rule would make the assignment depend on scan order.
  for (int i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) {
      continue;
    }
    int best = -1;
    double best_d2 = 0.0;
    for (int q : neighbors[static_cast<std::size_t>(i)]) {
      if (q == i || !core[static_cast<std::size_t>(q)]) {
        continue;
      }
      const double d2 = squared_distance(frame.points[static_cast<std::size_t>(i)],
                                         frame.points[static_cast<std::size_t>(q)],
                                         params.features);
      if (best == -1 || d2 < best_d2 || (d2 == best_d2 && q < best)) {
        best = q;
        best_d2 = d2;
      }
    }
    if (best != -1) {
      frame.labels[static_cast<std::size_t>(i)] = frame.labels[static_cast<std::size_t>(best)];
    }
  }
}

std::vector<Cluster> extract_clusters(Frame& frame, int min_cluster_size) {
  if (min_cluster_size < 1) {
    throw std::invalid_argument("extract_clusters: min_cluster_size must be at least 1");
  }
  if (frame.labels.size() != frame.points.size()) {
    throw std::invalid_argument("extract_clusters: frame labels missing; run dbscan first");
  }

  int max_label = -1;
  for (int label : frame.labels) {
    max_label = std::max(max_label, label);
  }

  std::vector<std::vector<int>> members(static_cast<std::size_t>(max_label + 1));
  for (int i = 0; i < static_cast<int>(frame.labels.size()); ++i) {
    const int label = frame.labels[static_cast<std::size_t>(i)];
    if (label >= 0) {
      members[static_cast<std::size_t>(label)].push_back(i);
    }
  }

  std::vector<int> remap(static_cast<std::size_t>(max_label + 1), kNoiseLabel);
  std::vector<Cluster> clusters;
  for (int label = 0; label <= max_label; ++label) {
    auto& group = members[static_cast<std::size_t>(label)];
    if (static_cast<int>(group.size()) < min_cluster_size) {
      continue;
    }
    const int compact_id = static_cast<int>(clusters.size());
    remap[static_cast<std::size_t>(label)] = compact_id;
    clusters.push_back(Cluster{compact_id, std::move(group)});
  }

  for (int& label : frame.labels) {
    if (label >= 0) {
      label = remap[static_cast<std::size_t>(label)];
    }
  }
  return clusters;
}

}  // namespace rvk
