#pragma once

// Tabular outputs and experiment specs. Numbers are written with %.10g and
// LF line endings so files are byte-stable across platforms.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "citesim/config_io.hpp"
#include "citesim/experiments.hpp"
#include "citesim/metrics.hpp"
#include "citesim/simulation.hpp"

namespace citesim {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_citations_csv(std::ostream& out, const YearRecord& record, const CoauthorGraph& graph) {
  out << "agent_id,agent_gender,position,cited_author_id,cited_gender\n";
  for (const auto& a : record.agents)
    for (std::size_t k = 0; k < a.references.size(); ++k)
      out << a.id << ',' << gender_code(a.gender) << ',' << k << ',' << a.references[k] << ','
          << gender_code(graph.gender(a.references[k])) << '\n';
}

inline void write_population_csv(std::ostream& out, const YearRecord& record, const std::vector<Agent>& agents) {
  out << "agent_id,agent_gender,cds_adopter,alpha,beta,gamma,zeta,estimate_size,n_learned\n";
  for (const auto& a : record.agents) {
    const auto& agent = agents.at(a.id);
    out << a.id << ',' << gender_code(a.gender) << ',' << (a.cds_adopter ? 1 : 0) << ',' << fmt(agent.params.alpha)
        << ',' << fmt(agent.params.beta) << ',' << fmt(agent.params.gamma) << ',' << fmt(agent.params.zeta) << ','
        << agent.estimate.size() << ',' << a.n_learned << '\n';
  }
}

inline void write_overcitation_csv(std::ostream& out, const std::vector<OvercitationRecord>& rows) {
  out << "agent_id,agent_gender,year,cited_gender,obs,exp,overcitation\n";
  for (const auto& r : rows)
    out << r.agent_id << ',' << gender_code(r.agent_gender) << ',' << r.year << ',' << gender_code(r.cited_gender)
        << ',' << fmt(r.observed) << ',' << fmt(r.expected) << ',' << fmt(r.overcitation) << '\n';
}

inline Json to_json(const stats::TestResult& t) {
  return {{"statistic", t.statistic}, {"df", t.df}, {"p_value", t.p_value}, {"estimate", t.estimate}};
}

inline Json to_json(const GroupSummary& g) {
  Json j;
  j["n_agents"] = g.n_agents;
  j["mean"] = g.mean;
  j["standard_error"] = g.standard_error;
  j["mean_test"] = g.mean_test ? to_json(*g.mean_test) : Json(nullptr);
  j["trend"] = g.trend ? to_json(*g.trend) : Json(nullptr);
  j["final_year_mean"] = g.final_year_mean;
  j["year_means"] = g.year_means;
  return j;
}

/// Tests for each cited gender and citer group.
inline Json tests_json(const std::vector<OvercitationRecord>& rows) {
  Json j;
  for (Gender cited : {Gender::Woman, Gender::Man}) {
    const auto s = summarize_run(rows, cited);
    const std::string key = cited == Gender::Woman ? "cited_women" : "cited_men";
    j[key] = {{"all", to_json(s.all)}, {"women_citers", to_json(s.women)}, {"men_citers", to_json(s.men)}};
  }
  return j;
}

inline void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "sweep_value,replicate,citer_gender,mean_overcitation_w,slope,t_stat,p_value,slope_t_stat,slope_p_value,"
         "final_year_mean,n_agents,fingerprint\n";
  for (const auto& r : result.rows)
    out << fmt(r.sweep_value) << ',' << r.replicate << ',' << gender_code(r.citer) << ',' << fmt(r.mean_overcitation_w)
        << ',' << fmt(r.slope) << ',' << fmt(r.t_stat) << ',' << fmt(r.p_value) << ',' << fmt(r.slope_t_stat) << ','
        << fmt(r.slope_p_value) << ',' << fmt(r.final_year_mean) << ',' << r.n_agents << ',' << r.fingerprint << '\n';
}

/// Per-year woman-overcitation for each run and citer gender.
inline void write_series_csv(std::ostream& out, const ExperimentResult& result) {
  out << "sweep_value,replicate,citer_gender,year,mean_overcitation_w\n";
  for (const auto& run : result.runs)
    for (Gender citer : {Gender::Woman, Gender::Man}) {
      const auto& ym = run.summary.of(citer).year_means;
      for (std::size_t y = 0; y < ym.size(); ++y)
        out << fmt(run.sweep_value) << ',' << run.replicate << ',' << gender_code(citer) << ',' << y << ','
            << fmt(ym[y]) << '\n';
    }
}

/// Synthetic graph used by the bundled experiments and the acceptance suite.
inline GeneratorParams reference_graph_params() {
  GeneratorParams p;
  p.n_authors = 20000;
  p.woman_fraction = 0.27;
  p.mean_degree = 10.0;
  p.gender_assortativity = 0.1;
  p.seed = 1;
  return p;
}

struct ExperimentSpec {
  enum class Kind { Baseline, Sweep, Cds };

  std::string name;
  Kind kind = Kind::Sweep;
  std::optional<GeneratorParams> generate;    // used when graph_dir is empty
  std::optional<std::filesystem::path> graph_dir;
  SimConfig base;
  std::size_t replicates = 5;
  SweepParameter parameter = SweepParameter::BetaMeanMen;
  std::vector<double> values;
  std::vector<int> meetings_variants;
  std::vector<double> adoption_fractions;

  SweepSpec sweep() const { return {parameter, values, replicates, base}; }
};

/// Parses an experiment document. Relative graph paths resolve against
/// `spec_dir`.
inline ExperimentSpec experiment_spec_from_json(const Json& j, const std::filesystem::path& spec_dir = {}) {
  ExperimentSpec s;
  io::ObjectReader r(j, "");
  r.string("name", s.name);
  if (s.name.empty()) io::ObjectReader::fail("/name", "required");
  for (char ch : s.name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
      io::ObjectReader::fail("/name", "may only contain letters, digits, '_' and '-'");

  std::string kind = "sweep";
  r.string("kind", kind);
  if (kind == "baseline")
    s.kind = ExperimentSpec::Kind::Baseline;
  else if (kind == "sweep")
    s.kind = ExperimentSpec::Kind::Sweep;
  else if (kind == "cds")
    s.kind = ExperimentSpec::Kind::Cds;
  else
    io::ObjectReader::fail("/kind", "expected \"baseline\", \"sweep\" or \"cds\"");

  if (r.has("graph")) {
    io::ObjectReader g(r.object("graph"), "/graph");
    if (g.has("path")) {
      std::string p;
      g.string("path", p);
      std::filesystem::path path(p);
      s.graph_dir = path.is_absolute() ? path : spec_dir / path;
    }
    if (g.has("generate")) s.generate = generator_params_from_json(g.object("generate"), "/graph/generate");
    if (s.graph_dir && s.generate) io::ObjectReader::fail("/graph", "give either path or generate, not both");
  }
  if (!s.graph_dir && !s.generate) s.generate = reference_graph_params();

  if (r.has("base")) s.base = sim_config_from_json(r.object("base"), "/base");
  r.integer("replicates", s.replicates);
  if (s.replicates < 1) io::ObjectReader::fail("/replicates", "must be >= 1");

  auto number_list = [&](const std::string& key, std::vector<double>& out) {
    if (!r.has(key)) return;
    const auto& arr = r.object(key);
    if (!arr.is_array()) io::ObjectReader::fail("/" + key, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) io::ObjectReader::fail("/" + key + "/" + std::to_string(i), "expected a number");
      out.push_back(arr[i].get<double>());
    }
  };

  if (s.kind == ExperimentSpec::Kind::Sweep) {
    std::string param;
    r.string("parameter", param);
    auto p = parse_sweep_parameter(param);
    if (!p) io::ObjectReader::fail("/parameter", "unknown sweep parameter \"" + param + "\"");
    s.parameter = *p;
    number_list("values", s.values);
    try {
      validate(s.sweep());
    } catch (const ConfigError& e) {
      io::ObjectReader::fail("/values", e.what());
    }
  } else if (s.kind == ExperimentSpec::Kind::Cds) {
    std::vector<double> meetings;
    number_list("meetings_variants", meetings);
    for (std::size_t i = 0; i < meetings.size(); ++i) {
      if (meetings[i] < 0 || meetings[i] != std::floor(meetings[i]))
        io::ObjectReader::fail("/meetings_variants/" + std::to_string(i), "expected a non-negative integer");
      s.meetings_variants.push_back(static_cast<int>(meetings[i]));
    }
    number_list("adoption_fractions", s.adoption_fractions);
    for (std::size_t i = 0; i < s.adoption_fractions.size(); ++i)
      if (s.adoption_fractions[i] < 0 || s.adoption_fractions[i] > 1)
        io::ObjectReader::fail("/adoption_fractions/" + std::to_string(i), "must lie in [0, 1]");
    if (!std::is_sorted(s.adoption_fractions.begin(), s.adoption_fractions.end()))
      io::ObjectReader::fail("/adoption_fractions", "must be sorted");
    if (s.meetings_variants.empty() && s.adoption_fractions.empty())
      io::ObjectReader::fail("", "cds experiments need meetings_variants or adoption_fractions");
  }
  try {
    validate(s.base);
  } catch (const ConfigError& e) {
    io::ObjectReader::fail("/base", e.what());
  }
  return s;
}

}  // namespace citesim
