#include "itolab/euler_maruyama.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"
#include "itolab/parallel.hpp"
#include "itolab/rng.hpp"

namespace itolab {

namespace {

constexpr std::size_t kChunk = 4096;  // paths per work unit
constexpr std::size_t kLanes = 64;    // paths advanced together

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double sample_initial(const InitialCondition& ic, Xoshiro256pp& rng) {
  switch (ic.kind) {
    case InitialCondition::Kind::delta:
      return ic.a;
    case InitialCondition::Kind::normal:
      return ic.a + ic.b * standard_normal(rng);
    case InitialCondition::Kind::uniform:
      return ic.a + (ic.b - ic.a) * rng.uniform();
  }
  return ic.a;
}

struct ChunkOutput {
  std::vector<double> series;  // per record: sum x, sum x^2, sum x^4, finite count
};

// Advances paths [begin, end) to the final time. `step` maps a block of states
// and normal draws to new states in place.
template <class Step>
void simulate_paths(const EmConfig& cfg, std::size_t n_steps, std::size_t begin, std::size_t end, Step& step,
                    std::vector<double>& finals, std::vector<unsigned char>& alive_out, ChunkOutput& out) {
  const std::size_t n_records = cfg.record ? n_steps / cfg.record_stride + 1 : 0;
  out.series.assign(n_records * 4, 0.0);

  StreamBlock<kLanes> streams;
  std::array<double, kLanes> x{};
  std::array<double, kLanes> next{};
  std::array<double, kLanes> z{};
  std::array<unsigned char, kLanes> alive{};

  auto record = [&](std::size_t rec, std::size_t lanes) {
    double* s = &out.series[rec * 4];
    for (std::size_t l = 0; l < lanes; ++l) {
      if (!alive[l]) continue;
      const double x2 = x[l] * x[l];
      s[0] += x[l];
      s[1] += x2;
      s[2] += x2 * x2;
      s[3] += 1.0;
    }
  };

  for (std::size_t block = begin; block < end; block += kLanes) {
    const std::size_t lanes = std::min(kLanes, end - block);
    for (std::size_t l = 0; l < lanes; ++l) {
      Xoshiro256pp g = path_stream(cfg.seed, block + l);
      x[l] = sample_initial(cfg.x0, g);
      streams.set(l, g);
      alive[l] = std::isfinite(x[l]) ? 1 : 0;
    }
    if (cfg.record) record(0, lanes);
    for (std::size_t k = 1; k <= n_steps; ++k) {
      streams.normals(z.data(), lanes);
      step(std::span<const double>(x.data(), lanes), std::span<const double>(z.data(), lanes),
           std::span<double>(next.data(), lanes));
      for (std::size_t l = 0; l < lanes; ++l) {
        const bool ok = alive[l] && std::isfinite(next[l]);
        alive[l] = ok ? 1 : 0;
        x[l] = ok ? next[l] : x[l];
      }
      if (cfg.record && k % cfg.record_stride == 0) record(k / cfg.record_stride, lanes);
    }
    for (std::size_t l = 0; l < lanes; ++l) {
      finals[block + l] = x[l];
      alive_out[block + l] = alive[l];
    }
  }
}

template <class MakeStep>
EnsembleSummary run_generic(const EmConfig& cfg, MakeStep make_step) {
  validate(cfg);
  const std::size_t n_steps = step_count(cfg);
  const std::size_t n_chunks = (cfg.n_paths + kChunk - 1) / kChunk;
  std::vector<double> finals(cfg.n_paths);
  std::vector<unsigned char> alive(cfg.n_paths);
  std::vector<ChunkOutput> outputs(n_chunks);

  parallel_for(n_chunks, worker_count(cfg.workers), [&](std::size_t c) {
    auto step = make_step();
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(cfg.n_paths, begin + kChunk);
    simulate_paths(cfg, n_steps, begin, end, step, finals, alive, outputs[c]);
  });

  EnsembleSummary summary;
  summary.n_paths = cfg.n_paths;
  summary.n_steps = n_steps;
  summary.final_time = static_cast<double>(n_steps) * cfg.dt;

  std::size_t n_finite = 0;
  for (std::size_t p = 0; p < cfg.n_paths; ++p) n_finite += alive[p];
  summary.n_nonfinite = cfg.n_paths - n_finite;

  for (int order = 1; order <= 6; ++order) {
    double sum = 0.0;
    for (std::size_t p = 0; p < cfg.n_paths; ++p)
      if (alive[p]) sum += std::pow(finals[p], order);
    const double mean = n_finite ? sum / static_cast<double>(n_finite) : std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
      if (!alive[p]) continue;
      const double d = std::pow(finals[p], order) - mean;
      ss += d * d;
    }
    const double se = n_finite > 1 ? std::sqrt(ss / static_cast<double>(n_finite - 1) / static_cast<double>(n_finite))
                                   : std::numeric_limits<double>::infinity();
    summary.raw_moments[order] = MomentEstimate{mean, se};
  }

  // Histogram over every path.
  double lo;
  double hi;
  if (cfg.histogram_range) {
    lo = cfg.histogram_range->first;
    hi = cfg.histogram_range->second;
  } else {
    const auto [mn, mx] = std::minmax_element(finals.begin(), finals.end());
    lo = *mn;
    hi = *mx;
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const std::size_t bins = std::max<std::size_t>(1, cfg.histogram_bins);
  summary.histogram.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    summary.histogram.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  summary.histogram.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double v : finals) {
    double pos = std::floor((v - lo) * scale);
    if (!(pos >= 0.0)) pos = 0.0;  // also catches nan
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::min(pos, static_cast<double>(bins - 1))));
    ++summary.histogram.counts[b];
  }

  if (cfg.record) {
    const std::size_t n_records = n_steps / cfg.record_stride + 1;
    summary.series.resize(n_records);
    for (std::size_t r = 0; r < n_records; ++r) {
      double s[4] = {0.0, 0.0, 0.0, 0.0};
      for (const auto& out : outputs)
        for (int i = 0; i < 4; ++i) s[i] += out.series[r * 4 + static_cast<std::size_t>(i)];
      auto& snap = summary.series[r];
      snap.t = static_cast<double>(r * cfg.record_stride) * cfg.dt;
      const double n = s[3] > 0 ? s[3] : std::numeric_limits<double>::quiet_NaN();
      snap.mean = s[0] / n;
      snap.m2 = s[1] / n;
      snap.m4 = s[2] / n;
    }
  }
  return summary;
}

template <class Runner>
ProbeTable probe(const EmConfig& cfg, const std::vector<double>& dt_list, Runner run) {
  ProbeTable table;
  for (std::size_t i = 0; i < dt_list.size(); ++i) {
    EmConfig c = cfg;
    c.dt = dt_list[i];
    c.seed = cfg.seed + i;
    table.rows.push_back(ProbeRow{c.dt, c.seed, run(c)});
  }
  const std::size_t n = table.rows.size();
  table.z_mu2.assign(n, std::vector<double>(n, 0.0));
  table.z_mu4.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (int order : {2, 4}) {
        const auto& a = table.rows[i].summary.moment(order);
        const auto& b = table.rows[j].summary.moment(order);
        const double se = std::hypot(a.standard_error, b.standard_error);
        const double z = i == j ? 0.0 : std::abs(a.value - b.value) / se;
        (order == 2 ? table.z_mu2 : table.z_mu4)[i][j] = z;
      }
    }
  }
  return table;
}

double max_entry(const std::vector<std::vector<double>>& m) {
  double best = 0.0;
  for (const auto& row : m)
    for (double v : row) best = std::max(best, v);
  return best;
}

}  // namespace

InitialCondition parse_initial_condition(const std::string& text) {
  auto parse_pair = [&](const std::string& body) {
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("initial condition needs two parameters: " + text);
    return std::pair<double, double>{std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1))};
  };
  try {
    if (text.rfind("normal:", 0) == 0) {
      const auto [m, s] = parse_pair(text.substr(7));
      if (!(s > 0)) throw std::invalid_argument("normal initial condition needs std > 0");
      return InitialCondition::normal(m, s);
    }
    if (text.rfind("uniform:", 0) == 0) {
      const auto [lo, hi] = parse_pair(text.substr(8));
      if (!(hi > lo)) throw std::invalid_argument("uniform initial condition needs lo < hi");
      return InitialCondition::uniform(lo, hi);
    }
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return InitialCondition::delta(x);
  } catch (const std::logic_error& e) {
    throw std::invalid_argument("bad initial condition '" + text + "': " + e.what());
  }
}

std::string to_string(const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::delta:
      return format_double(ic.a);
    case InitialCondition::Kind::normal:
      return "normal:" + format_double(ic.a) + "," + format_double(ic.b);
    case InitialCondition::Kind::uniform:
      return "uniform:" + format_double(ic.a) + "," + format_double(ic.b);
  }
  return {};
}

void validate(const EmConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("EmConfig: dt must be positive");
  if (!(cfg.t_final >= cfg.dt)) throw std::invalid_argument("EmConfig: dt must not exceed t_final");
  if (cfg.n_paths < 1) throw std::invalid_argument("EmConfig: n_paths must be >= 1");
  if (cfg.record_stride < 1) throw std::invalid_argument("EmConfig: record_stride must be >= 1");
  if (cfg.histogram_range && !(cfg.histogram_range->second > cfg.histogram_range->first))
    throw std::invalid_argument("EmConfig: empty histogram range");
}

std::size_t step_count(const EmConfig& cfg) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt)));
}

const MomentEstimate& EnsembleSummary::moment(int order) const {
  const auto it = raw_moments.find(order);
  if (it == raw_moments.end()) throw MissingMoment("ensemble summary has no moment of order " + std::to_string(order));
  return it->second;
}

double em_step(double x, const ItoSde& sde, double dt, double z) {
  if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be positive");
  const auto [f, g] = sde.evaluate(x);
  const double next = x + f * dt + g * std::sqrt(dt) * z;
  if (!std::isfinite(next)) throw NonFiniteState("Euler-Maruyama step left the finite range from x=" + format_double(x));
  return next;
}

EnsembleSummary run_ensemble(const ItoSde& sde, const EmConfig& cfg) {
  if (!sde.is_evaluable()) throw UnboundSymbol("run_ensemble: SDE '" + sde.label() + "' has an unbound sigma");
  const double dt = cfg.dt;
  const double sqdt = std::sqrt(cfg.dt);
  return run_generic(cfg, [&] {
    return [&sde, dt, sqdt, f = std::array<double, kLanes>{}, g = std::array<double, kLanes>{}](
               std::span<const double> x, std::span<const double> z, std::span<double> next) mutable {
      const std::size_t n = x.size();
      sde.evaluate(x, std::span<double>(f.data(), n), std::span<double>(g.data(), n));
      for (std::size_t l = 0; l < n; ++l) next[l] = x[l] + f[l] * dt + g[l] * sqdt * z[l];
    };
  });
}

EnsembleSummary run_direct_langevin(const NoiseExpansion& rate, const EmConfig& cfg) {
  (void)rate.sigma_value();
  const double dt = cfg.dt;
  return run_generic(cfg, [&] {
    return [&rate, dt](std::span<const double> x, std::span<const double> z, std::span<double> next) {
      for (std::size_t l = 0; l < x.size(); ++l) next[l] = x[l] + rate.rate(x[l], z[l]) * dt;
    };
  });
}

double ProbeTable::max_z_mu2() const { return max_entry(z_mu2); }
double ProbeTable::max_z_mu4() const { return max_entry(z_mu4); }

ProbeTable timestep_independence_probe(const ItoSde& sde, const EmConfig& cfg, const std::vector<double>& dt_list) {
  return probe(cfg, dt_list, [&](const EmConfig& c) { return run_ensemble(sde, c); });
}

ProbeTable direct_langevin_probe(const NoiseExpansion& rate, const EmConfig& cfg, const std::vector<double>& dt_list) {
  return probe(cfg, dt_list, [&](const EmConfig& c) { return run_direct_langevin(rate, c); });
}

std::string series_csv(const EnsembleSummary& summary) {
  std::ostringstream os;
  os.precision(17);
  os << "t,mean,m2,m4\n";
  for (const auto& s : summary.series) os << s.t << ',' << s.mean << ',' << s.m2 << ',' << s.m4 << '\n';
  return os.str();
}

std::string summary_csv(const EnsembleSummary& summary) {
  std::ostringstream os;
  os.precision(17);
  os << "order,value,standard_error\n";
  for (const auto& [order, m] : summary.raw_moments) os << order << ',' << m.value << ',' << m.standard_error << '\n';
  return os.str();
}

std::string histogram_csv(const Histogram& histogram) {
  std::ostringstream os;
  os.precision(17);
  os << "lower,upper,count\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b)
    os << histogram.edges[b] << ',' << histogram.edges[b + 1] << ',' << histogram.counts[b] << '\n';
  return os.str();
}

}  // namespace itolab
