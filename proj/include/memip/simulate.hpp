// Ground-truth generators and the Ogata modified-thinning sampler.  The
// dominating rate is assembled from per-summand non-increasing envelopes
// (background majorant plus one kernel envelope per past event), so it stays
// valid over [t, infinity) and is refreshed after every candidate.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memip/rng.hpp"
#include "memip/types.hpp"

namespace memip {

enum class Scenario { Large, Toy, Poisson, ExpSum };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct SimConfig {
  Scenario scenario{Scenario::Large};
  int d{2};
  double p{1.0};  // probability of an excitatory kernel sign
  double t_minus{0.0};
  double t_plus{20.0};
  long long n_realizations{1};
  std::uint64_t seed{1};
  double mu{1.0};        // poisson scenario: constant rate per type
  double mu_max{0.001};  // large scenario: background sampled from [0, mu_max]

  void validate() const;
};

SimConfig load_sim_config(const std::string& path);
void save_sim_config(const SimConfig& cfg, const std::string& path);

// Large scenario: sinusoidal power-law kernels with omega ~ U[1,10],
// |nu| ~ U[0, 1/d), excitatory with probability p, phase parity
// (pi/2)*((u+v) mod 2); constant backgrounds mu_v ~ U[0, mu_max].
GroundTruthModel generate_synthetic(const SimConfig& cfg);

// Toy scenario: two types with oscillating decaying backgrounds
// (cos for type 1, sin for type 2, omega ~ U[5,15]) and Eq.-(11)-style
// kernels where the type-2 self-kernel is forced inhibitory.
GroundTruthModel generate_toy(std::uint64_t seed);

// Poisson scenario: constant backgrounds, zero kernels.
GroundTruthModel generate_poisson(const SimConfig& cfg);

// Fixed two-type exponential-sum process (K=3, mixed-sign coefficients,
// branching spectral radius ~0.37) used by the expsum scenario and the
// well-specified recovery checks.
ExpSumModel expsum_demo_model();

// Any-scenario dispatch.
GroundTruthModel make_truth(const SimConfig& cfg);

// Spectral radius of the branching matrix G_vu = integral of |g_vu|;
// entries by adaptive quadrature with an envelope tail bound, the radius by
// power iteration.  Divergent kernel integrals raise numeric_error.
double spectral_radius(const ProcessRef& process);
double spectral_radius(const GroundTruthModel& truth);
double spectral_radius(const ExpSumModel& model);

// One realization on [t_minus, t_plus] by modified thinning.  Event times
// are strictly inside the window and sorted; the acceptance ratio is
// asserted to stay within [0, 1].
Realization thinning_simulate(const ProcessRef& process, double t_minus,
                              double t_plus, Rng& rng, std::string id = "r0");
Realization thinning_simulate(const GroundTruthModel& truth, double t_minus,
                              double t_plus, Rng& rng, std::string id = "r0");
Realization thinning_simulate(const ExpSumModel& model, double t_minus,
                              double t_plus, Rng& rng, std::string id = "r0");

// n independent realizations with per-realization RNG substreams
// stream(seed, stream_offset + i); ids "r<stream_offset + i>".  Warns once
// on stderr when the branching radius is >= 1.
Dataset simulate_dataset(const ProcessRef& process, double t_minus,
                         double t_plus, long long n, std::uint64_t seed,
                         long long stream_offset = 0, int threads = 0);

// Scenario-level entry: builds the truth and samples cfg.n_realizations.
Dataset simulate_scenario(const SimConfig& cfg,
                          GroundTruthModel* truth_out = nullptr,
                          long long stream_offset = 0, int threads = 0);

// Deterministic oracle for all-positive exponential-sum models (no clipping):
// integrates the expected-intensity convolution system with RK4 at step dt
// and returns the expected event count per type over [0, T].
std::vector<double> ode_expected_counts(const ExpSumModel& model, double T,
                                        double dt);

}  // namespace memip
