#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "airbs/geometry.hpp"

namespace airbs {

struct KMeansResult {
  std::vector<Position> centroids;  // z pinned to the requested height
  std::vector<std::size_t> assignments;
  double inertia = 0.0;  // m^2, horizontal
  /// Inertia after each Lloyd pass, starting with the initial assignment.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm on horizontal coordinates.
///
/// Centroids start at `num_clusters` distinct user locations drawn with the
/// seed. Iterates until the assignment stops changing or `max_iters` passes.
/// An empty cluster is moved onto the point farthest from its centroid. Ties
/// go to the lowest cluster index.
KMeansResult kmeans_placement(std::span<const Position> users, std::size_t num_clusters, std::size_t max_iters,
                              std::uint64_t seed, double height_m = 0.0);

}  // namespace airbs
