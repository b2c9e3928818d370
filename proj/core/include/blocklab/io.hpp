#pragma once

#include <optional>
#include <string>

#include "blocklab/model.hpp"

#include "json.hpp"

namespace blocklab {

// A loaded model description. `spec` is always usable (for HSBM inputs it is the
// point-mass factor form); `hsbm` is present when the input was tensor-form or
// symmetric (a,b) form.
struct LoadedSpec {
  ModelSpec spec;
  std::optional<HsbmSpec> hsbm;
  std::optional<double> sbm_a, sbm_b;  // set for the symmetric parametrization
};

nlohmann::json model_spec_to_json(const ModelSpec& spec);
nlohmann::json hsbm_spec_to_json(const HsbmSpec& h);
LoadedSpec load_spec_json(const nlohmann::json& j);
LoadedSpec load_spec_file(const std::string& path);

// Text format: header "n m k", then one line per clause: "wid v1 ... vk" (1-based).
std::string factor_graph_to_text(const FactorGraph& g);
FactorGraph factor_graph_from_text(const std::string& text);
void write_factor_graph(const FactorGraph& g, const std::string& path);
FactorGraph read_factor_graph(const std::string& path);

nlohmann::json assignment_to_json(const CommunityAssignment& sigma);  // 1-based labels
CommunityAssignment assignment_from_json(const nlohmann::json& j);

}  // namespace blocklab
