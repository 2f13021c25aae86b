#pragma once

// Scripted experiments: replicated baselines, one-parameter sweeps and the
// citation-diversity-statement scenario. Runs are independent and may be
// spread over worker threads; results are always folded in
// (value, replicate) order.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "citesim/config_io.hpp"
#include "citesim/error.hpp"
#include "citesim/graph.hpp"
#include "citesim/metrics.hpp"
#include "citesim/simulation.hpp"
#include "citesim/stats.hpp"

namespace citesim {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown (by task index) is rethrown after all workers finish.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

enum class SweepParameter { BetaMeanMen, GammaMeanMen, MeetingsPerYear, CdsAdoptionFraction };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::BetaMeanMen: return "beta_mean_men";
    case SweepParameter::GammaMeanMen: return "gamma_mean_men";
    case SweepParameter::MeetingsPerYear: return "meetings_per_year";
    case SweepParameter::CdsAdoptionFraction: return "cds_adoption_fraction";
  }
  return "";
}

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view s) {
  for (auto p : {SweepParameter::BetaMeanMen, SweepParameter::GammaMeanMen, SweepParameter::MeetingsPerYear,
                 SweepParameter::CdsAdoptionFraction})
    if (s == to_string(p)) return p;
  return std::nullopt;
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::BetaMeanMen;
  std::vector<double> values;
  std::size_t replicates = 5;
  SimConfig base;
};

inline void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep values must be non-empty");
  if (!std::is_sorted(spec.values.begin(), spec.values.end())) throw ConfigError("sweep values must be sorted");
  if (spec.replicates < 1) throw ConfigError("replicates must be >= 1");
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    if (spec.parameter == SweepParameter::MeetingsPerYear && (v < 0 || v != std::floor(v)))
      throw ConfigError("meetings_per_year values must be non-negative integers");
    if (spec.parameter == SweepParameter::CdsAdoptionFraction && (v < 0 || v > 1))
      throw ConfigError("cds_adoption_fraction values must lie in [0, 1]");
  }
}

/// CDS parameters: skew-normal beta for adopters, optional gamma override.
inline CdsAdoption cds_adopter_params(double fraction, std::optional<double> gamma_mean) {
  CdsAdoption a;
  a.fraction = fraction;
  a.gamma_mean = gamma_mean;
  return a;
}

inline constexpr double kCdsMenGamma = 0.01;

/// Both genders adopt; men also take the CDS gamma.
inline CdsConfig full_adoption_cds() {
  return {cds_adopter_params(1.0, std::nullopt), cds_adopter_params(1.0, kCdsMenGamma)};
}

/// Only a fraction of men adopt.
inline CdsConfig men_adoption_cds(double fraction) {
  return {cds_adopter_params(0.0, std::nullopt), cds_adopter_params(fraction, kCdsMenGamma)};
}

inline void apply_sweep_value(SimConfig& config, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::BetaMeanMen: config.dists.men.beta_mean = value; break;
    case SweepParameter::GammaMeanMen: config.dists.men.gamma_mean = value; break;
    case SweepParameter::MeetingsPerYear: config.meetings_per_year = static_cast<int>(std::llround(value)); break;
    case SweepParameter::CdsAdoptionFraction:
      if (!config.cds) config.cds = men_adoption_cds(value);
      config.cds->men.fraction = value;
      break;
  }
}

inline SimConfig replicate_config(const SimConfig& base, std::size_t replicate) {
  SimConfig c = base;
  c.master_seed = base.master_seed + replicate;
  return c;
}

/// FNV-1a over the canonical JSON of the full config (seed included).
inline std::string config_fingerprint(const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunOutcome {
  double sweep_value = 0.0;
  std::size_t replicate = 0;
  SimConfig config;
  std::string fingerprint;
  RunSummary summary;  // woman-overcitation
};

/// One row per (value, replicate, citer gender).
struct ExperimentRow {
  double sweep_value = 0.0;
  std::size_t replicate = 0;
  Gender citer = Gender::Woman;
  double mean_overcitation_w = 0.0;
  double slope = 0.0;
  double t_stat = 0.0;  // one-sample t of agent means vs 0
  double p_value = 1.0;
  double slope_t_stat = 0.0;
  double slope_p_value = 1.0;
  double final_year_mean = 0.0;
  std::size_t n_agents = 0;
  std::string fingerprint;
};

struct ExperimentResult {
  std::string parameter;  // empty for a baseline
  std::vector<RunOutcome> runs;
  std::vector<ExperimentRow> rows;

  /// Replicate-averaged value of `field` for one citer gender, per sweep value.
  std::vector<double> replicate_means(Gender citer, double ExperimentRow::*field) const {
    std::vector<double> out;
    std::vector<std::size_t> counts;
    std::optional<double> current;
    for (const auto& r : rows) {
      if (r.citer != citer) continue;
      if (!current || r.sweep_value != *current) {
        out.push_back(0.0);
        counts.push_back(0);
        current = r.sweep_value;
      }
      out.back() += r.*field;
      ++counts.back();
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= static_cast<double>(counts[i]);
    return out;
  }

  std::vector<double> values() const {
    std::vector<double> out;
    for (const auto& r : runs)
      if (out.empty() || out.back() != r.sweep_value) out.push_back(r.sweep_value);
    return out;
  }
};

/// Runs one simulation and summarizes woman-overcitation.
inline RunSummary run_and_summarize(const CoauthorGraph& graph, const SimConfig& config) {
  const auto sim = run_simulation(graph, config);
  return summarize_run(yearly_overcitation(sim.records, graph), Gender::Woman);
}

inline ExperimentRow make_row(const RunOutcome& run, Gender citer) {
  const auto& g = run.summary.of(citer);
  ExperimentRow row;
  row.sweep_value = run.sweep_value;
  row.replicate = run.replicate;
  row.citer = citer;
  row.mean_overcitation_w = g.mean;
  row.n_agents = g.n_agents;
  row.final_year_mean = g.final_year_mean;
  row.fingerprint = run.fingerprint;
  if (g.mean_test) {
    row.t_stat = g.mean_test->statistic;
    row.p_value = g.mean_test->p_value;
  }
  if (g.trend) {
    row.slope = g.trend->estimate;
    row.slope_t_stat = g.trend->statistic;
    row.slope_p_value = g.trend->p_value;
  }
  return row;
}

/// Runs every (value, replicate) config and assembles rows in order.
inline ExperimentResult run_configs(const CoauthorGraph& graph, std::vector<RunOutcome> runs, std::size_t jobs,
                                    std::string parameter) {
  for (const auto& r : runs) validate(r.config);
  parallel_for(runs.size(), jobs, [&](std::size_t i) { runs[i].summary = run_and_summarize(graph, runs[i].config); });
  ExperimentResult result;
  result.parameter = std::move(parameter);
  for (const auto& run : runs)
    for (Gender citer : {Gender::Woman, Gender::Man}) result.rows.push_back(make_row(run, citer));
  result.runs = std::move(runs);
  return result;
}

inline RunOutcome make_run(const SimConfig& config, double value, std::size_t replicate) {
  RunOutcome r;
  r.sweep_value = value;
  r.replicate = replicate;
  r.config = replicate_config(config, replicate);
  r.fingerprint = config_fingerprint(r.config);
  return r;
}

inline ExperimentResult run_baseline(const CoauthorGraph& graph, const SimConfig& base, std::size_t replicates,
                                     std::size_t jobs = 1) {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  std::vector<RunOutcome> runs;
  for (std::size_t r = 0; r < replicates; ++r) runs.push_back(make_run(base, 0.0, r));
  return run_configs(graph, std::move(runs), jobs, "");
}

inline ExperimentResult run_sweep(const CoauthorGraph& graph, const SweepSpec& spec, std::size_t jobs = 1) {
  validate(spec);
  std::vector<RunOutcome> runs;
  for (double v : spec.values) {
    SimConfig c = spec.base;
    apply_sweep_value(c, spec.parameter, v);
    for (std::size_t r = 0; r < spec.replicates; ++r) runs.push_back(make_run(c, v, r));
  }
  return run_configs(graph, std::move(runs), jobs, to_string(spec.parameter));
}

struct CdsScenarioResult {
  ExperimentResult meetings;  // full adoption, one value per meetings variant
  ExperimentResult adoption;  // men-only adoption sweep
  std::vector<double> adoption_means;  // men's mean woman-overcitation per fraction
  std::optional<double> min_equitable_fraction;
};

inline CdsScenarioResult run_cds_scenario(const CoauthorGraph& graph, const SimConfig& base,
                                          const std::vector<int>& meetings_variants,
                                          const std::vector<double>& adoption_fractions, std::size_t replicates,
                                          std::size_t jobs = 1) {
  if (meetings_variants.empty() && adoption_fractions.empty())
    throw ConfigError("cds scenario needs meetings variants or adoption fractions");
  CdsScenarioResult out;

  // Both sweeps share one job pool.
  SweepSpec meetings{SweepParameter::MeetingsPerYear, {}, replicates, base};
  meetings.base.cds = full_adoption_cds();
  for (int m : meetings_variants) meetings.values.push_back(m);
  SweepSpec adoption{SweepParameter::CdsAdoptionFraction, adoption_fractions, replicates, base};
  adoption.base.cds = men_adoption_cds(0.0);

  std::vector<RunOutcome> runs;
  std::size_t n_meeting_runs = 0;
  if (!meetings.values.empty()) {
    validate(meetings);
    for (double v : meetings.values) {
      SimConfig c = meetings.base;
      apply_sweep_value(c, meetings.parameter, v);
      for (std::size_t r = 0; r < replicates; ++r) runs.push_back(make_run(c, v, r));
    }
    n_meeting_runs = runs.size();
  }
  if (!adoption.values.empty()) {
    validate(adoption);
    for (double v : adoption.values) {
      SimConfig c = adoption.base;
      apply_sweep_value(c, adoption.parameter, v);
      for (std::size_t r = 0; r < replicates; ++r) runs.push_back(make_run(c, v, r));
    }
  }
  auto all = run_configs(graph, std::move(runs), jobs, "");

  auto split = [&](std::size_t begin, std::size_t end, SweepParameter p) {
    ExperimentResult r;
    r.parameter = to_string(p);
    r.runs.assign(all.runs.begin() + static_cast<std::ptrdiff_t>(begin), all.runs.begin() + static_cast<std::ptrdiff_t>(end));
    r.rows.assign(all.rows.begin() + static_cast<std::ptrdiff_t>(2 * begin), all.rows.begin() + static_cast<std::ptrdiff_t>(2 * end));
    return r;
  };
  out.meetings = split(0, n_meeting_runs, SweepParameter::MeetingsPerYear);
  out.adoption = split(n_meeting_runs, all.runs.size(), SweepParameter::CdsAdoptionFraction);
  if (!adoption.values.empty()) {
    out.adoption_means = out.adoption.replicate_means(Gender::Man, &ExperimentRow::mean_overcitation_w);
    for (std::size_t i = 0; i < out.adoption_means.size(); ++i)
      if (out.adoption_means[i] >= 0.0) {
        out.min_equitable_fraction = adoption.values[i];
        break;
      }
  }
  return out;
}

/// Sweep value where a piecewise-linear interpolation of `y` first reaches 0
/// from below.
inline std::optional<double> zero_crossing(const std::vector<double>& x, const std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (y[i] < 0.0) continue;
    if (i == 0) return x[0];
    return x[i - 1] + (x[i] - x[i - 1]) * (0.0 - y[i - 1]) / (y[i] - y[i - 1]);
  }
  return std::nullopt;
}

}  // namespace citesim
