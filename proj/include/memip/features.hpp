// Markovian feature construction.  One linear pass per realization turns an
// event stream into the sufficient statistics of the exponential-basis
// likelihood: per-event vectors A (each event stores only the block for its
// own target type) and the integrated vector Bhat, which is the same for
// every target.
//
// Conventions (k in [1..K], u = 0 is the background source):
//   A_i[u][k] = sum over past events j of type u, t_j < t_i strictly, of
//               exp(-k*alpha*(t_i - t_j))                      for u >= 1
//   A_i[0][k] = exp(-(k-1)*alpha*t_i)   (t_i from the global origin)
//   Bhat[u][k] = sum_h sum_{j: u_j = u} (1 - exp(-k*alpha*(t+ - t_j)))/(k*alpha)
//   Bhat[0][1] = total window length
//   Bhat[0][k] = sum_h (exp(-(k-1)*alpha*t-) - exp(-(k-1)*alpha*t+))/((k-1)*alpha)
// Simultaneous events do not see each other (strict past).
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "memip/types.hpp"

namespace memip {

struct FeatureSet {
  int d{0};
  int K{0};
  double alpha{1.0};

  // Rows are grouped by target type: rows of target v occupy
  // [target_offset[v], target_offset[v+1]), in (realization, event) order.
  // Each row holds the (d+1)*K block in ParamLayout order (k-major).
  std::vector<double> a;
  std::vector<std::size_t> target_offset;  // size d + 2; target_offset[0] = 0

  struct EventRef {
    std::size_t realization{0};
    std::size_t index{0};  // position within the realization
    double time{0.0};
  };
  std::vector<EventRef> event_refs;  // parallel to rows

  // Integrated features; one (d+1)*K block shared by every target.
  std::vector<double> bhat;

  std::vector<std::string> realization_ids;  // for diagnostics
  double total_window{0.0};

  [[nodiscard]] int block_dim() const { return (d + 1) * K; }
  [[nodiscard]] std::size_t rows() const { return event_refs.size(); }
  [[nodiscard]] std::size_t rows_for_target(int v) const {
    return target_offset[static_cast<std::size_t>(v) + 1] -
           target_offset[static_cast<std::size_t>(v)];
  }
  [[nodiscard]] const double* row(std::size_t r) const {
    return a.data() + r * static_cast<std::size_t>(block_dim());
  }
};

// Time grid of integrated-feature rows for the exact (clipped) objective.
// The grid covers each window with step <= dt and includes every event time;
// rows hold B_h(s) in the same block layout, with strict-past semantics at
// event times.
struct GridFeatures {
  int d{0};
  int K{0};
  double alpha{1.0};
  double dt{0.0};

  struct PerRealization {
    std::vector<double> times;
    std::vector<double> b;  // times.size() x block_dim, row-major
  };
  std::vector<PerRealization> grids;

  [[nodiscard]] int block_dim() const { return (d + 1) * K; }
};

// Single-pass construction, O(N) work and memory in the event count.
FeatureSet build_event_features(const Dataset& data, int K, double alpha);

// Quadratic-time reference: direct evaluation of the defining sums, with
// adaptive quadrature for Bhat.  Only suitable for small datasets.
FeatureSet bruteforce_event_features(const Dataset& data, int K, double alpha);

GridFeatures build_grid_features(const Dataset& data, int K, double alpha,
                                 double dt);

}  // namespace memip
