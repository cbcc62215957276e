#include "airbs/baseline.hpp"

#include <limits>
#include <numeric>
#include <string>

#include "airbs/error.hpp"
#include "airbs/rng.hpp"

namespace airbs {

namespace {

double horizontal_sq(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::size_t nearest(const Position& p, const std::vector<Position>& centroids) {
  std::size_t best = 0;
  double best_d = horizontal_sq(p, centroids[0]);
  for (std::size_t k = 1; k < centroids.size(); ++k) {
    const double d = horizontal_sq(p, centroids[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

double inertia_of(std::span<const Position> users, const std::vector<Position>& centroids,
                  const std::vector<std::size_t>& assignments) {
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) total += horizontal_sq(users[i], centroids[assignments[i]]);
  return total;
}

}  // namespace

KMeansResult kmeans_placement(std::span<const Position> users, std::size_t num_clusters, std::size_t max_iters,
                              std::uint64_t seed, double height_m) {
  if (num_clusters < 1) throw InvalidArgument("k-means needs at least one cluster");
  if (users.size() < num_clusters) {
    throw InvalidArgument("k-means needs at least as many users (" + std::to_string(users.size()) +
                          ") as clusters (" + std::to_string(num_clusters) + ")");
  }

  // Partial Fisher-Yates: the first num_clusters entries are distinct users.
  Rng rng(seed);
  std::vector<std::size_t> order(users.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < num_clusters; ++k) {
    std::swap(order[k], order[k + rng.index(order.size() - k)]);
  }

  KMeansResult result;
  result.centroids.reserve(num_clusters);
  for (std::size_t k = 0; k < num_clusters; ++k) {
    const Position& u = users[order[k]];
    result.centroids.push_back({u.x, u.y, height_m});
  }
  result.assignments.assign(users.size(), 0);
  for (std::size_t i = 0; i < users.size(); ++i) result.assignments[i] = nearest(users[i], result.centroids);
  result.inertia_history.push_back(inertia_of(users, result.centroids, result.assignments));

  for (std::size_t pass = 0; pass < max_iters; ++pass) {
    // Update step.
    std::vector<double> sx(num_clusters, 0.0), sy(num_clusters, 0.0);
    std::vector<std::size_t> count(num_clusters, 0);
    for (std::size_t i = 0; i < users.size(); ++i) {
      const auto k = result.assignments[i];
      sx[k] += users[i].x;
      sy[k] += users[i].y;
      ++count[k];
    }
    for (std::size_t k = 0; k < num_clusters; ++k) {
      if (count[k] > 0) {
        result.centroids[k] = {sx[k] / static_cast<double>(count[k]), sy[k] / static_cast<double>(count[k]), height_m};
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < users.size(); ++i) {
        const double d = horizontal_sq(users[i], result.centroids[result.assignments[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      result.centroids[k] = {users[far].x, users[far].y, height_m};
      result.assignments[far] = k;
    }

    // Assignment step.
    bool changed = false;
    for (std::size_t i = 0; i < users.size(); ++i) {
      const auto k = nearest(users[i], result.centroids);
      if (k != result.assignments[i]) {
        result.assignments[i] = k;
        changed = true;
      }
    }
    result.inertia_history.push_back(inertia_of(users, result.centroids, result.assignments));
    result.iterations = pass + 1;
    if (!changed) break;
  }
  result.inertia = result.inertia_history.back();
  return result;
}

}  // namespace airbs
