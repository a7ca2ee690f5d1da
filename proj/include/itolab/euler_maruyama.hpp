#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itolab/ito_sde.hpp"
#include "itolab/noise_expansion.hpp"

namespace itolab {

/// Initial state of every path: a point mass, a normal law or a uniform law.
struct InitialCondition {
  enum class Kind { delta, normal, uniform };
  Kind kind = Kind::delta;
  double a = 0.0;  // delta: location; normal: mean; uniform: lower edge
  double b = 0.0;  // normal: std; uniform: upper edge

  static InitialCondition delta(double x) { return {Kind::delta, x, 0.0}; }
  static InitialCondition normal(double mean, double std) { return {Kind::normal, mean, std}; }
  static InitialCondition uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
};

/// Parses "0.5", "normal:0,0.1" or "uniform:-1,1".
InitialCondition parse_initial_condition(const std::string& text);
std::string to_string(const InitialCondition& ic);

struct EmConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t n_paths = 1000;
  InitialCondition x0;
  std::uint64_t seed = 1;
  std::size_t record_stride = 1;  // steps between recorded ensemble statistics
  bool record = false;            // keep the ensemble time series
  unsigned workers = 0;           // 0: worker_count()
  std::size_t histogram_bins = 100;
  std::optional<std::pair<double, double>> histogram_range;  // default: data range
};

/// Checks dt > 0, dt <= t_final, n_paths >= 1 and record_stride >= 1.
void validate(const EmConfig& cfg);

/// Number of steps: t_final / dt rounded to the nearest integer (at least 1).
std::size_t step_count(const EmConfig& cfg);

struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct Histogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<std::uint64_t> counts;  // values outside the range land in the end bins
};

/// Ensemble mean of x, x^2 and x^4 at one recorded time.
struct EnsembleSnapshot {
  double t = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
};

struct EnsembleSummary {
  std::size_t n_paths = 0;
  std::size_t n_nonfinite = 0;  // paths frozen after a non-finite step
  std::size_t n_steps = 0;
  double final_time = 0.0;
  std::map<int, MomentEstimate> raw_moments;  // orders 1..6 over finite paths
  Histogram histogram;                        // all paths, frozen ones at their last finite value
  std::vector<EnsembleSnapshot> series;       // empty unless cfg.record

  double nonfinite_fraction() const { return n_paths ? static_cast<double>(n_nonfinite) / n_paths : 0.0; }
  const MomentEstimate& moment(int order) const;
};

/// x + F(x) dt + G(x) sqrt(dt) z. Throws NonFiniteState on inf/nan.
double em_step(double x, const ItoSde& sde, double dt, double z);

/// Euler-Maruyama ensemble. Path p draws from path_stream(seed, p), and the
/// reduction runs in path order, so the summary is bit-identical for any
/// worker count.
EnsembleSummary run_ensemble(const ItoSde& sde, const EmConfig& cfg);

/// Direct simulation of dx/dt = R(x, eta): x += R(x, eta) dt with a fresh
/// standard normal eta each step. Needs a bound sigma.
EnsembleSummary run_direct_langevin(const NoiseExpansion& rate, const EmConfig& cfg);

struct ProbeRow {
  double dt = 0.0;
  std::uint64_t seed = 0;
  EnsembleSummary summary;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  /// |mu_k(i) - mu_k(j)| / sqrt(se_i^2 + se_j^2), indexed [i][j].
  std::vector<std::vector<double>> z_mu2;
  std::vector<std::vector<double>> z_mu4;

  double max_z_mu2() const;
  double max_z_mu4() const;
};

/// Runs the ensemble once per dt. Row i uses seed cfg.seed + i so the rows are
/// statistically independent and the z-scores are meaningful.
ProbeTable timestep_independence_probe(const ItoSde& sde, const EmConfig& cfg, const std::vector<double>& dt_list);
ProbeTable direct_langevin_probe(const NoiseExpansion& rate, const EmConfig& cfg, const std::vector<double>& dt_list);

/// CSV with header `t,mean,m2,m4`.
std::string series_csv(const EnsembleSummary& summary);
/// CSV with header `order,value,standard_error` plus metadata comment-free rows.
std::string summary_csv(const EnsembleSummary& summary);
/// CSV with header `lower,upper,count`.
std::string histogram_csv(const Histogram& histogram);

}  // namespace itolab
