#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "qcomb/combs.hpp"
#include "qcomb/entropy.hpp"
#include "qcomb/gflow.hpp"

namespace qcomb::io {

using json = nlohmann::json;

json to_json(const SpaceLayout& l);
json to_json(const TimeStepStructure& s);
json to_json(const Comb& c);            // "kind": "quantum", matrix as rows of [re, im]
json to_json(const ClassicalComb& c);   // "kind": "classical", diagonal
json to_json(const ClassicalQuantumComb& cq);
json to_json(const ClassicalCqComb& cq);
json to_json(const OpenGraph& g);
json to_json(const Gflow& g);
json to_json(const ValidationReport& r);
json to_json(const MinEntropyResult& r);
json dag_to_json(const DirectedEdges& e, int n);

SpaceLayout layout_from_json(const json& j);
TimeStepStructure structure_from_json(const json& j);
Comb comb_from_json(const json& j);
ClassicalComb classical_comb_from_json(const json& j);
ClassicalQuantumComb cq_from_json(const json& j);
ClassicalCqComb classical_cq_from_json(const json& j);
OpenGraph graph_from_json(const json& j);
Gflow gflow_from_json(const json& j);

using AnyComb = std::variant<Comb, ClassicalComb, ClassicalQuantumComb, ClassicalCqComb>;
AnyComb any_from_json(const json& j);

// Throws InvalidInput with the parser's location on malformed input.
json parse(const std::string& text);
json read_file(const std::string& path);
void write_file(const std::string& path, const json& j);

}  // namespace qcomb::io
