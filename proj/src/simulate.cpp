#include "memip/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>

#include "memip/io.hpp"
#include "memip/parallel.hpp"
#include "memip/quadrature.hpp"

namespace memip {

namespace {

// Substream index reserved for drawing ground-truth parameters, far away
// from the per-realization indices.
constexpr std::uint64_t kTruthStream = 0x7472757468ULL;  // "truth"

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "large") return Scenario::Large;
  if (name == "toy") return Scenario::Toy;
  if (name == "poisson") return Scenario::Poisson;
  if (name == "expsum") return Scenario::ExpSum;
  throw config_error("unknown scenario '" + name +
                     "' (expected large|toy|poisson|expsum)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Large: return "large";
    case Scenario::Toy: return "toy";
    case Scenario::Poisson: return "poisson";
    case Scenario::ExpSum: return "expsum";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (d < 1) throw config_error("sim config: d must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw config_error("sim config: p must lie in [0,1]");
  if (!std::isfinite(t_minus) || !std::isfinite(t_plus) || !(t_minus < t_plus)) {
    throw config_error("sim config: horizon requires t_minus < t_plus");
  }
  if (n_realizations < 0) {
    throw config_error("sim config: n_realizations must be >= 0");
  }
  if (!std::isfinite(mu) || mu < 0.0) {
    throw config_error("sim config: mu must be finite and >= 0");
  }
  if (!std::isfinite(mu_max) || mu_max < 0.0) {
    throw config_error("sim config: mu_max must be finite and >= 0");
  }
  if ((scenario == Scenario::Toy || scenario == Scenario::ExpSum) && d != 2) {
    throw config_error("sim config: scenario '" + scenario_name(scenario) +
                       "' is defined for d=2");
  }
}

SimConfig load_sim_config(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  SimConfig cfg;
  std::string raw;
  std::size_t lineno = 0;
  bool have_scenario = false;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    std::string value;
    if (!(ls >> value)) {
      throw io_error(path + ":" + std::to_string(lineno) + ": missing value");
    }
    const std::string where = path + ":" + std::to_string(lineno);
    if (key == "scenario") {
      cfg.scenario = parse_scenario(value);
      have_scenario = true;
    } else if (key == "d") {
      cfg.d = static_cast<int>(parse_int(value, where));
    } else if (key == "p") {
      cfg.p = parse_double(value, where);
    } else if (key == "t_minus") {
      cfg.t_minus = parse_double(value, where);
    } else if (key == "t_plus") {
      cfg.t_plus = parse_double(value, where);
    } else if (key == "n_realizations") {
      cfg.n_realizations = parse_int(value, where);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, where));
    } else if (key == "mu") {
      cfg.mu = parse_double(value, where);
    } else if (key == "mu_max") {
      cfg.mu_max = parse_double(value, where);
    } else {
      throw io_error(where + ": unknown key '" + key + "'");
    }
  }
  if (!have_scenario) throw io_error(path + ": missing 'scenario'");
  try {
    cfg.validate();
  } catch (const config_error& err) {
    throw io_error(path + ": " + err.what());
  }
  return cfg;
}

void save_sim_config(const SimConfig& cfg, const std::string& path) {
  cfg.validate();
  std::string out;
  out += "scenario " + scenario_name(cfg.scenario) + "\n";
  out += "d " + std::to_string(cfg.d) + "\n";
  out += "p " + format_double(cfg.p) + "\n";
  out += "t_minus " + format_double(cfg.t_minus) + "\n";
  out += "t_plus " + format_double(cfg.t_plus) + "\n";
  out += "n_realizations " + std::to_string(cfg.n_realizations) + "\n";
  out += "seed " + std::to_string(cfg.seed) + "\n";
  out += "mu " + format_double(cfg.mu) + "\n";
  out += "mu_max " + format_double(cfg.mu_max) + "\n";
  write_text_file(path, out);
}

namespace {

// Draw order per kernel is fixed (omega, magnitude, sign) so truths are a
// pure function of the seed.  force_sign = +1/-1 overrides the sign draw.
Kernel sample_sinpow_kernel(Rng& rng, int d, double p, int v, int u,
                            int force_sign) {
  Kernel k;
  k.kind = Kernel::Kind::SinPowerLaw;
  k.omega = rng.uniform(1.0, 10.0);
  const double magnitude = rng.uniform(0.0, 1.0 / d);
  const double sign =
      force_sign != 0 ? force_sign : (rng.bernoulli(p) ? 1.0 : -1.0);
  k.nu = sign * magnitude;
  k.phase = (kPi / 2.0) * ((u + v) % 2);
  return k;
}

}  // namespace

GroundTruthModel generate_synthetic(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.scenario != Scenario::Large) {
    throw config_error("generate_synthetic expects the 'large' scenario");
  }
  Rng rng = Rng::stream(cfg.seed, kTruthStream);
  GroundTruthModel truth(cfg.d);
  for (int v = 1; v <= cfg.d; ++v) {
    for (int u = 1; u <= cfg.d; ++u) {
      truth.kernel(v, u) = sample_sinpow_kernel(rng, cfg.d, cfg.p, v, u, 0);
    }
  }
  for (int v = 1; v <= cfg.d; ++v) {
    Background bg;
    bg.kind = Background::Kind::Constant;
    bg.value = rng.uniform(0.0, cfg.mu_max);
    truth.background(v) = bg;
  }
  truth.validate();
  return truth;
}

GroundTruthModel generate_toy(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, kTruthStream);
  GroundTruthModel truth(2);
  for (int v = 1; v <= 2; ++v) {
    Background bg;
    bg.kind = Background::Kind::CosineDecay;
    bg.sine = (v == 2);  // cos for the first type, sin for the second
    bg.omega = rng.uniform(5.0, 15.0);
    truth.background(v) = bg;
  }
  for (int v = 1; v <= 2; ++v) {
    for (int u = 1; u <= 2; ++u) {
      // The type-2 self-kernel is the inhibitory one; the rest excite.
      const int force_sign = (v == 2 && u == 2) ? -1 : +1;
      truth.kernel(v, u) = sample_sinpow_kernel(rng, 2, 1.0, v, u, force_sign);
    }
  }
  truth.validate();
  return truth;
}

GroundTruthModel generate_poisson(const SimConfig& cfg) {
  cfg.validate();
  GroundTruthModel truth(cfg.d);
  for (int v = 1; v <= cfg.d; ++v) {
    Background bg;
    bg.kind = Background::Kind::Constant;
    bg.value = cfg.mu;
    truth.background(v) = bg;
  }
  truth.validate();
  return truth;
}

ExpSumModel expsum_demo_model() {
  ExpSumModel m(2, 3, 1.0);
  // mu_1(t) = 0.5 + 0.2 exp(-t); mu_2 = 0.5.
  m.at(1, 0, 1) = 0.5;
  m.at(1, 0, 2) = 0.2;
  m.at(2, 0, 1) = 0.5;
  // g_11 = 0.4 exp(-t) - 0.2 exp(-2t)   (non-negative, mixed coefficients)
  m.at(1, 1, 1) = 0.4;
  m.at(1, 1, 2) = -0.2;
  // g_12 = 0.3 exp(-2t)
  m.at(1, 2, 2) = 0.3;
  // g_21 = -0.08 exp(-2t)               (mild inhibition)
  m.at(2, 1, 2) = -0.08;
  // g_22 = 0.25 exp(-t) + 0.1 exp(-3t)
  m.at(2, 2, 1) = 0.25;
  m.at(2, 2, 3) = 0.1;
  return m;
}

GroundTruthModel make_truth(const SimConfig& cfg) {
  cfg.validate();
  switch (cfg.scenario) {
    case Scenario::Large:
      return generate_synthetic(cfg);
    case Scenario::Toy:
      return generate_toy(cfg.seed);
    case Scenario::Poisson:
      return generate_poisson(cfg);
    case Scenario::ExpSum: {
      // Express the fixed exponential-sum process as descriptor form.
      const ExpSumModel m = expsum_demo_model();
      GroundTruthModel truth(m.d);
      for (int v = 1; v <= m.d; ++v) {
        Background bg;
        bg.kind = Background::Kind::ExpSum;
        bg.alpha = m.alpha;
        for (int k = 1; k <= m.K; ++k) bg.coef.push_back(m.at(v, 0, k));
        truth.background(v) = bg;
        for (int u = 1; u <= m.d; ++u) {
          Kernel kr;
          kr.kind = Kernel::Kind::ExpSum;
          kr.alpha = m.alpha;
          for (int k = 1; k <= m.K; ++k) kr.coef.push_back(m.at(v, u, k));
          truth.kernel(v, u) = kr;
        }
      }
      truth.validate();
      return truth;
    }
  }
  throw config_error("sim config: unknown scenario");
}

double spectral_radius(const ProcessRef& process) {
  const int d = process.dim();
  Eigen::MatrixXd gamma(d, d);
  for (int v = 1; v <= d; ++v) {
    for (int u = 1; u <= d; ++u) {
      // Find a horizon where the envelope tail is negligible, then integrate
      // |g| piecewise (doubling panels so oscillations are resolved locally).
      const double head = std::abs(process.kernel(v, u, 0.0));
      if (head == 0.0 && process.kernel_abs_envelope(v, u, 0.0) == 0.0) {
        gamma(v - 1, u - 1) = 0.0;
        continue;
      }
      double horizon = 1.0;
      double tail = process.kernel_abs_envelope_tail(v, u, horizon);
      int doublings = 0;
      while (std::isfinite(tail) && tail > 1e-12 && doublings < 60) {
        horizon *= 2.0;
        tail = process.kernel_abs_envelope_tail(v, u, horizon);
        ++doublings;
      }
      if (!std::isfinite(tail) || tail > 1e-6) {
        throw numeric_error("spectral_radius: kernel integral does not converge");
      }
      auto abs_g = [&](double s) { return std::abs(process.kernel(v, u, s)); };
      double total = 0.0;
      double lo = 0.0, hi = 1.0;
      while (lo < horizon) {
        hi = std::min(hi, horizon);
        total += adaptive_simpson(abs_g, lo, hi, 1e-12);
        lo = hi;
        hi = 2.0 * hi;
      }
      gamma(v - 1, u - 1) = total + tail;  // envelope tail as an upper bound
    }
  }

  // Power iteration on the non-negative matrix; a diagonal shift keeps the
  // iteration primitive and moves every eigenvalue by exactly sigma.
  const double max_entry = gamma.maxCoeff();
  if (max_entry <= 0.0) return 0.0;
  const double sigma = 1e-3 * max_entry;
  Eigen::MatrixXd shifted = gamma;
  shifted.diagonal().array() += sigma;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(d) / std::sqrt(double(d));
  double rho = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::VectorXd y = shifted * x;
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    y /= norm;
    const double next = y.dot(shifted * y);
    const bool done = std::abs(next - rho) <= 1e-10 * std::max(next, 1e-30);
    rho = next;
    x.swap(y);
    if (done) break;
  }
  return std::max(rho - sigma, 0.0);
}

double spectral_radius(const GroundTruthModel& truth) {
  return spectral_radius(ProcessRef(truth));
}

double spectral_radius(const ExpSumModel& model) {
  return spectral_radius(ProcessRef(model));
}

namespace {

// Total clipped intensity over all targets at time t, plus per-target rates.
double total_intensity(const ProcessRef& process,
                       const std::vector<Event>& events, double t,
                       std::vector<double>& rates) {
  const int d = process.dim();
  rates.assign(static_cast<std::size_t>(d), 0.0);
  for (int v = 1; v <= d; ++v) {
    rates[static_cast<std::size_t>(v - 1)] = process.background(v, t);
  }
  for (const auto& e : events) {
    if (!(e.time < t)) break;
    const double lag = t - e.time;
    for (int v = 1; v <= d; ++v) {
      rates[static_cast<std::size_t>(v - 1)] += process.kernel(v, e.type, lag);
    }
  }
  double total = 0.0;
  for (auto& r : rates) {
    r = std::max(r, 0.0);
    total += r;
  }
  return total;
}

// Dominating rate valid over [t, infinity): background majorants plus one
// non-increasing envelope per past event.
double dominating_rate(const ProcessRef& process,
                       const std::vector<Event>& events, double t) {
  const int d = process.dim();
  double bar = 0.0;
  for (int v = 1; v <= d; ++v) bar += process.background_majorant(v, t);
  for (const auto& e : events) {
    const double lag = t - e.time;
    for (int v = 1; v <= d; ++v) bar += process.kernel_upper(v, e.type, lag);
  }
  return bar;
}

}  // namespace

Realization thinning_simulate(const ProcessRef& process, double t_minus,
                              double t_plus, Rng& rng, std::string id) {
  if (!std::isfinite(t_minus) || !std::isfinite(t_plus) || !(t_minus < t_plus)) {
    throw config_error("thinning: requires finite t_minus < t_plus");
  }
  Realization r;
  r.id = std::move(id);
  r.t_minus = t_minus;
  r.t_plus = t_plus;

  const int d = process.dim();
  std::vector<double> rates;
  double t = t_minus;
  for (;;) {
    const double bar = dominating_rate(process, r.events, t);
    if (!std::isfinite(bar)) {
      throw numeric_error("thinning: dominating rate is not finite");
    }
    if (bar <= 0.0) break;  // intensity is zero forever; window stays empty
    const double candidate = t + rng.exponential(bar);
    if (!(candidate < t_plus)) break;
    const double total = total_intensity(process, r.events, candidate, rates);
    if (!std::isfinite(total)) {
      throw numeric_error("thinning: intensity is not finite");
    }
    const double ratio = total / bar;
    if (ratio > 1.0 + 1e-9) {
      throw numeric_error("thinning: acceptance ratio exceeds 1; envelope bound violated");
    }
    t = candidate;
    if (rng.u01() < ratio) {
      // Accepted: draw the type proportionally to the per-target rates.
      double pick = rng.u01() * total;
      int type = d;
      for (int v = 1; v <= d; ++v) {
        pick -= rates[static_cast<std::size_t>(v - 1)];
        if (pick < 0.0) {
          type = v;
          break;
        }
      }
      r.events.push_back(Event{candidate, type});
    }
  }
  return r;
}

Realization thinning_simulate(const GroundTruthModel& truth, double t_minus,
                              double t_plus, Rng& rng, std::string id) {
  return thinning_simulate(ProcessRef(truth), t_minus, t_plus, rng,
                           std::move(id));
}

Realization thinning_simulate(const ExpSumModel& model, double t_minus,
                              double t_plus, Rng& rng, std::string id) {
  return thinning_simulate(ProcessRef(model), t_minus, t_plus, rng,
                           std::move(id));
}

Dataset simulate_dataset(const ProcessRef& process, double t_minus,
                         double t_plus, long long n, std::uint64_t seed,
                         long long stream_offset, int threads) {
  if (n < 0) throw config_error("simulate: n must be >= 0");
  const double rho = spectral_radius(process);
  if (rho >= 1.0) {
    std::fprintf(stderr,
                 "warning: branching spectral radius %.6g >= 1; "
                 "realizations may grow very large\n", rho);
  }
  Dataset data;
  data.d = process.dim();
  data.realizations.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), resolve_threads(threads),
               [&](std::size_t i) {
                 const long long global = stream_offset + static_cast<long long>(i);
                 Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(global));
                 data.realizations[i] = thinning_simulate(
                     process, t_minus, t_plus, rng,
                     "r" + std::to_string(global));
               });
  data.validate();
  return data;
}

Dataset simulate_scenario(const SimConfig& cfg, GroundTruthModel* truth_out,
                          long long stream_offset, int threads) {
  cfg.validate();
  GroundTruthModel truth = make_truth(cfg);
  Dataset data = simulate_dataset(ProcessRef(truth), cfg.t_minus, cfg.t_plus,
                                  cfg.n_realizations, cfg.seed, stream_offset,
                                  threads);
  if (truth_out) *truth_out = std::move(truth);
  return data;
}

std::vector<double> ode_expected_counts(const ExpSumModel& model, double T,
                                        double dt) {
  model.validate();
  if (!(T > 0.0) || !(dt > 0.0)) {
    throw config_error("ode oracle: T and dt must be positive");
  }
  for (double c : model.coef) {
    if (c < 0.0) {
      throw config_error("ode oracle: valid only for all-positive models "
                         "(clipping never active)");
    }
  }
  const int d = model.d;
  const int K = model.K;

  // States: I[v][u][k] = int_0^t exp(-k*alpha*(t-s)) m_u(s) ds per target v
  // is target-independent in u and k only, so store I[u][k]; plus the
  // accumulated expected counts per type.
  //   dI[u][k]/dt = -k*alpha*I[u][k] + m_u(t)
  //   m_v(t) = mu_v(t) + sum_u sum_k X[v][u][k] * I[u][k]
  const std::size_t nI = static_cast<std::size_t>(d) * K;
  std::vector<double> state(nI + static_cast<std::size_t>(d), 0.0);

  auto rates = [&](double t, const std::vector<double>& s,
                   std::vector<double>& m) {
    m.assign(static_cast<std::size_t>(d), 0.0);
    for (int v = 1; v <= d; ++v) {
      double acc = 0.0;
      for (int k = 1; k <= K; ++k) {
        acc += model.at(v, 0, k) * std::exp(-(k - 1) * model.alpha * t);
      }
      for (int u = 1; u <= d; ++u) {
        for (int k = 1; k <= K; ++k) {
          acc += model.at(v, u, k) *
                 s[static_cast<std::size_t>(u - 1) * K + (k - 1)];
        }
      }
      m[static_cast<std::size_t>(v - 1)] = acc;
    }
  };

  std::vector<double> m;
  auto derivative = [&](double t, const std::vector<double>& s,
                        std::vector<double>& ds) {
    ds.assign(s.size(), 0.0);
    rates(t, s, m);
    for (int u = 1; u <= d; ++u) {
      for (int k = 1; k <= K; ++k) {
        const std::size_t idx = static_cast<std::size_t>(u - 1) * K + (k - 1);
        ds[idx] = -k * model.alpha * s[idx] + m[static_cast<std::size_t>(u - 1)];
      }
    }
    for (int v = 1; v <= d; ++v) {
      ds[nI + static_cast<std::size_t>(v - 1)] = m[static_cast<std::size_t>(v - 1)];
    }
  };

  // Classic RK4.
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt));
  const double h = T / static_cast<double>(steps);
  std::vector<double> k1, k2, k3, k4, tmp(state.size());
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * h;
    derivative(t, state, k1);
    for (std::size_t j = 0; j < state.size(); ++j) tmp[j] = state[j] + 0.5 * h * k1[j];
    derivative(t + 0.5 * h, tmp, k2);
    for (std::size_t j = 0; j < state.size(); ++j) tmp[j] = state[j] + 0.5 * h * k2[j];
    derivative(t + 0.5 * h, tmp, k3);
    for (std::size_t j = 0; j < state.size(); ++j) tmp[j] = state[j] + h * k3[j];
    derivative(t + h, tmp, k4);
    for (std::size_t j = 0; j < state.size(); ++j) {
      state[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
  }

  std::vector<double> counts(static_cast<std::size_t>(d));
  for (int v = 1; v <= d; ++v) {
    counts[static_cast<std::size_t>(v - 1)] = state[nI + static_cast<std::size_t>(v - 1)];
  }
  return counts;
}

}  // namespace memip
