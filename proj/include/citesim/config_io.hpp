#pragma once

// JSON documents for run configurations, generator parameters and agent
// snapshots. Readers accept partial documents (missing keys keep their
// defaults) but reject unknown keys and wrong types, naming the offending
// JSON pointer.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include "citesim/agents.hpp"
#include "citesim/error.hpp"
#include "citesim/graph.hpp"
#include "citesim/simulation.hpp"
#include "json.hpp"

namespace citesim {

using Json = nlohmann::json;

namespace io {

/// Reads fields out of one JSON object, tracking which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string pointer) : obj_(obj), pointer_(std::move(pointer)) {
    if (!obj_.is_object()) fail(pointer_.empty() ? "/" : pointer_, "expected an object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    out = v.get<double>();
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == std::floor(v.get<double>())))
      fail(child(key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.get<double>() < 0) fail(child(key), "expected a non-negative integer");
      out = static_cast<Int>(v.get<std::uint64_t>());
    } else {
      out = static_cast<Int>(v.get<std::int64_t>());
    }
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    out = v.get<std::string>();
  }

  const Json& object(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string child(const std::string& key) const { return pointer_ + "/" + key; }

  [[noreturn]] static void fail(const std::string& pointer, const std::string& what) {
    throw ConfigError(pointer + ": " + what);
  }

 private:
  const Json& obj_;
  std::string pointer_;
  std::set<std::string> seen_;
};

}  // namespace io

inline Json to_json(const GenderDists& d) {
  return {{"alpha_mean", d.alpha_mean}, {"alpha_sd", d.alpha_sd}, {"beta_mean", d.beta_mean},
          {"beta_sd", d.beta_sd},       {"beta_skew", d.beta_skew}, {"gamma_mean", d.gamma_mean},
          {"gamma_sd", d.gamma_sd},     {"zeta_mean", d.zeta_mean}};
}

inline void read_json(const Json& j, const std::string& ptr, GenderDists& d) {
  io::ObjectReader r(j, ptr);
  r.number("alpha_mean", d.alpha_mean);
  r.number("alpha_sd", d.alpha_sd);
  r.number("beta_mean", d.beta_mean);
  r.number("beta_sd", d.beta_sd);
  r.number("beta_skew", d.beta_skew);
  r.number("gamma_mean", d.gamma_mean);
  r.number("gamma_sd", d.gamma_sd);
  r.number("zeta_mean", d.zeta_mean);
}

inline Json to_json(const CdsAdoption& a) {
  Json j = {{"fraction", a.fraction}, {"beta_mean", a.beta_mean}, {"beta_sd", a.beta_sd},
            {"beta_skew", a.beta_skew}, {"gamma_sd", a.gamma_sd}};
  j["gamma_mean"] = a.gamma_mean ? Json(*a.gamma_mean) : Json(nullptr);
  return j;
}

inline void read_json(const Json& j, const std::string& ptr, CdsAdoption& a) {
  io::ObjectReader r(j, ptr);
  r.number("fraction", a.fraction);
  r.number("beta_mean", a.beta_mean);
  r.number("beta_sd", a.beta_sd);
  r.number("beta_skew", a.beta_skew);
  r.number("gamma_sd", a.gamma_sd);
  if (r.has("gamma_mean")) {
    double g = 0.0;
    r.number("gamma_mean", g);
    a.gamma_mean = g;
  } else {
    a.gamma_mean.reset();
  }
}

inline const char* to_string(OverlapMode m) { return m == OverlapMode::Jaccard ? "jaccard" : "own_fraction"; }
inline const char* to_string(PairingPolicy p) { return p == PairingPolicy::Random ? "random" : "round_robin"; }

inline Json to_json(const SimConfig& c) {
  Json j;
  j["years"] = c.years;
  j["meetings_per_year"] = c.meetings_per_year;
  j["list_length"] = c.list_length;
  j["n_initial_agents"] = c.n_initial_agents;
  j["initial_woman_fraction"] = c.initial_woman_fraction;
  j["target_final_woman_fraction"] = c.target_final_woman_fraction;
  j["final_agent_count"] = c.final_agent_count;
  j["diffusion"] = {{"mu", c.diffusion.mu}, {"d", c.diffusion.max_step}, {"length", c.diffusion.length}};
  j["dists"] = {{"women", to_json(c.dists.women)}, {"men", to_json(c.dists.men)}};
  j["learning_threshold"] = c.learning_threshold;
  j["master_seed"] = c.master_seed;
  j["overlap"] = to_string(c.overlap);
  j["pairing"] = to_string(c.pairing);
  j["cds"] = c.cds ? Json{{"women", to_json(c.cds->women)}, {"men", to_json(c.cds->men)}} : Json(nullptr);
  return j;
}

/// Parses a run configuration. `ptr` prefixes error locations.
inline SimConfig sim_config_from_json(const Json& j, const std::string& ptr = "") {
  SimConfig c;
  io::ObjectReader r(j, ptr);
  r.integer("years", c.years);
  r.integer("meetings_per_year", c.meetings_per_year);
  r.integer("list_length", c.list_length);
  r.integer("n_initial_agents", c.n_initial_agents);
  r.number("initial_woman_fraction", c.initial_woman_fraction);
  r.number("target_final_woman_fraction", c.target_final_woman_fraction);
  r.integer("final_agent_count", c.final_agent_count);
  if (r.has("diffusion")) {
    io::ObjectReader d(r.object("diffusion"), r.child("diffusion"));
    d.number("mu", c.diffusion.mu);
    d.integer("d", c.diffusion.max_step);
    d.integer("length", c.diffusion.length);
  }
  if (r.has("dists")) {
    const auto dptr = r.child("dists");
    io::ObjectReader d(r.object("dists"), dptr);
    if (d.has("women")) read_json(d.object("women"), dptr + "/women", c.dists.women);
    if (d.has("men")) read_json(d.object("men"), dptr + "/men", c.dists.men);
  }
  r.number("learning_threshold", c.learning_threshold);
  r.integer("master_seed", c.master_seed);
  std::string s;
  if (r.has("overlap")) {
    r.string("overlap", s);
    if (s == "jaccard")
      c.overlap = OverlapMode::Jaccard;
    else if (s == "own_fraction")
      c.overlap = OverlapMode::OwnFraction;
    else
      io::ObjectReader::fail(r.child("overlap"), "expected \"jaccard\" or \"own_fraction\"");
  }
  if (r.has("pairing")) {
    r.string("pairing", s);
    if (s == "random")
      c.pairing = PairingPolicy::Random;
    else if (s == "round_robin")
      c.pairing = PairingPolicy::RoundRobin;
    else
      io::ObjectReader::fail(r.child("pairing"), "expected \"random\" or \"round_robin\"");
  }
  if (r.has("cds")) {
    const auto cptr = r.child("cds");
    io::ObjectReader cr(r.object("cds"), cptr);
    CdsConfig cds;
    if (cr.has("women")) read_json(cr.object("women"), cptr + "/women", cds.women);
    if (cr.has("men")) read_json(cr.object("men"), cptr + "/men", cds.men);
    c.cds = cds;
  }
  return c;
}

inline Json to_json(const GeneratorParams& p) {
  return {{"n_authors", p.n_authors},
          {"woman_fraction", p.woman_fraction},
          {"mean_degree", p.mean_degree},
          {"gender_assortativity", p.gender_assortativity},
          {"seed", p.seed}};
}

inline GeneratorParams generator_params_from_json(const Json& j, const std::string& ptr = "") {
  GeneratorParams p;
  io::ObjectReader r(j, ptr);
  r.integer("n_authors", p.n_authors);
  r.number("woman_fraction", p.woman_fraction);
  r.number("mean_degree", p.mean_degree);
  r.number("gender_assortativity", p.gender_assortativity);
  r.integer("seed", p.seed);
  return p;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Population snapshot: ids, genders, parameters, estimate nodes, history.
inline Json to_json(const Agent& a) {
  Json hist = Json::array();
  for (const auto& [id, n] : a.history.counts()) hist.push_back({id, n});
  return {{"id", a.id},
          {"gender", std::string(1, gender_code(a.gender))},
          {"cds_adopter", a.cds_adopter},
          {"params", {{"alpha", a.params.alpha}, {"beta", a.params.beta}, {"gamma", a.params.gamma}, {"zeta", a.params.zeta}}},
          {"estimate", a.estimate.nodes()},
          {"history", hist}};
}

inline Json population_to_json(const std::vector<Agent>& agents) {
  Json arr = Json::array();
  for (const auto& a : agents) arr.push_back(to_json(a));
  return arr;
}

/// Rebuilds agents from a snapshot; estimate edges are re-induced from `graph`.
inline std::vector<Agent> population_from_json(const Json& j, const CoauthorGraph& graph) {
  if (!j.is_array()) throw ConfigError("/: expected an array of agents");
  std::vector<Agent> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto ptr = "/" + std::to_string(i);
    io::ObjectReader r(j[i], ptr);
    Agent a;
    r.integer("id", a.id);
    std::string g;
    r.string("gender", g);
    auto gender = parse_gender(g);
    if (!gender) io::ObjectReader::fail(r.child("gender"), "expected \"W\" or \"M\"");
    a.gender = *gender;
    if (r.has("cds_adopter")) a.cds_adopter = r.object("cds_adopter").get<bool>();
    if (r.has("params")) {
      io::ObjectReader p(r.object("params"), r.child("params"));
      p.number("alpha", a.params.alpha);
      p.number("beta", a.params.beta);
      p.number("gamma", a.params.gamma);
      p.number("zeta", a.params.zeta);
    }
    std::vector<AuthorId> nodes;
    if (r.has("estimate")) nodes = r.object("estimate").get<std::vector<AuthorId>>();
    for (auto n : nodes)
      if (n >= graph.n_authors()) io::ObjectReader::fail(r.child("estimate"), "author id out of range");
    a.estimate = Estimate::induce(graph, std::move(nodes));
    if (r.has("history")) {
      std::vector<AuthorId> expanded;
      for (const auto& e : r.object("history")) {
        const auto id = e.at(0).get<AuthorId>();
        const auto n = e.at(1).get<std::uint64_t>();
        expanded.insert(expanded.end(), n, id);
      }
      a.history.add(expanded);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace citesim
