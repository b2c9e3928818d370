#include "blocklab/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blocklab {

using nlohmann::json;

json model_spec_to_json(const ModelSpec& spec) {
  json j;
  j["k"] = spec.k;
  j["q"] = spec.q;
  j["pi"] = spec.pi;
  j["d"] = spec.d;
  json ws = json::array();
  for (size_t i = 0; i < spec.weights.psis.size(); ++i) {
    json w;
    w["id"] = spec.weights.psis[i].id;
    w["table"] = spec.weights.psis[i].table;
    w["p"] = spec.weights.probs[i];
    ws.push_back(w);
  }
  j["weights"] = ws;
  return j;
}

json hsbm_spec_to_json(const HsbmSpec& h) {
  json j;
  j["k"] = h.k;
  j["q"] = h.q;
  j["pi"] = h.pi;
  j["d"] = h.d;
  j["m0"] = h.m0;
  return j;
}

LoadedSpec load_spec_json(const json& j) {
  LoadedSpec out;
  if (j.contains("a") && j.contains("b")) {
    int q = j.at("q").get<int>();
    int k = j.value("k", 2);
    HsbmSpec h = symmetric_sbm(q, j.at("a").get<double>(), j.at("b").get<double>(), k);
    if (j.contains("d")) {
      // rescale to the requested average degree, keeping M0
      h.d = j.at("d").get<double>();
      h.validate();
    }
    out.hsbm = h;
    out.spec = hsbm_to_factor_spec(h);
    out.sbm_a = j.at("a").get<double>();
    out.sbm_b = j.at("b").get<double>();
    return out;
  }
  if (j.contains("m0")) {
    HsbmSpec h;
    h.k = j.at("k").get<int>();
    h.q = j.at("q").get<int>();
    h.pi = j.at("pi").get<std::vector<double>>();
    h.m0 = j.at("m0").get<std::vector<double>>();
    h.d = j.at("d").get<double>();
    h.validate();
    out.hsbm = h;
    out.spec = hsbm_to_factor_spec(h);
    return out;
  }
  if (j.contains("weights")) {
    ModelSpec spec;
    spec.k = j.at("k").get<int>();
    spec.q = j.at("q").get<int>();
    spec.pi = j.at("pi").get<std::vector<double>>();
    spec.d = j.at("d").get<double>();
    int next_id = 0;
    for (const auto& w : j.at("weights")) {
      WeightFunction psi;
      psi.k = spec.k;
      psi.q = spec.q;
      psi.id = w.contains("id") ? w.at("id").get<int>() : next_id;
      psi.table = w.at("table").get<std::vector<double>>();
      spec.weights.psis.push_back(psi);
      spec.weights.probs.push_back(w.at("p").get<double>());
      ++next_id;
    }
    spec.validate();
    out.spec = spec;
    return out;
  }
  throw std::invalid_argument("spec json: expected one of keys \"weights\", \"m0\", or \"a\"/\"b\"");
}

LoadedSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  json j;
  in >> j;
  return load_spec_json(j);
}

std::string factor_graph_to_text(const FactorGraph& g) {
  std::ostringstream os;
  os << g.n << ' ' << g.m() << ' ' << g.k << '\n';
  for (const auto& cl : g.clauses) {
    os << cl.wid;
    for (int v : cl.vars) os << ' ' << (v + 1);
    os << '\n';
  }
  return os.str();
}

FactorGraph factor_graph_from_text(const std::string& text) {
  std::istringstream is(text);
  FactorGraph g;
  long m = 0;
  if (!(is >> g.n >> m >> g.k)) throw std::runtime_error("factor graph text: bad header");
  if (g.n < 1 || m < 0 || g.k < 1) throw std::runtime_error("factor graph text: invalid header");
  g.clauses.resize(m);
  for (long a = 0; a < m; ++a) {
    Clause& cl = g.clauses[a];
    if (!(is >> cl.wid)) throw std::runtime_error("factor graph text: truncated clause list");
    cl.vars.resize(g.k);
    for (int s = 0; s < g.k; ++s) {
      long v;
      if (!(is >> v) || v < 1 || v > g.n)
        throw std::runtime_error("factor graph text: variable index out of range");
      cl.vars[s] = static_cast<int>(v - 1);
    }
  }
  g.simple_flag = is_simple(g);
  return g;
}

void write_factor_graph(const FactorGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << factor_graph_to_text(g);
}

FactorGraph read_factor_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return factor_graph_from_text(ss.str());
}

json assignment_to_json(const CommunityAssignment& sigma) {
  std::vector<int> one_based(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i) one_based[i] = sigma[i] + 1;
  return json{{"sigma", one_based}};
}

CommunityAssignment assignment_from_json(const json& j) {
  auto v = j.at("sigma").get<std::vector<int>>();
  for (int& x : v) {
    if (x < 1) throw std::runtime_error("assignment json: labels are 1-based");
    x -= 1;
  }
  return v;
}

}  // namespace blocklab
