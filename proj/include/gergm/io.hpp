// File formats: graph JSON/CSV, base-measure and motif config JSON,
// model-spec configs, and CSV helpers for traces and scans.
#pragma once

#include <string>
#include <vector>

#include "gergm/graph.hpp"
#include "gergm/sampler.hpp"
#include "gergm/variational.hpp"

namespace gergm::io {

// {"n": int, "edges": [[i, j, w], ...], "node_weights": [...]} with
// 0-based indices, i < j, unlisted pairs zero. CSV alternative: one
// "i,j,weight" line per edge (optional header).
WeightedGraph read_graph(const std::string& path);
WeightedGraph parse_graph_json(const std::string& text);
WeightedGraph parse_graph_csv(const std::string& text);
void write_graph_json(const WeightedGraph& g, const std::string& path);
std::string graph_to_json(const WeightedGraph& g);

// {"kind": "gaussian", "mean": .., "variance": ..} | {"kind": "quartic"}
// | {"kind": "bernoulli", "p": ..} | {"kind": "poisson", "rate": ..}
BaseMeasure parse_base_measure(const std::string& json_text);
std::string base_measure_to_json(const BaseMeasure& m);

// {"family": "edge"} | {"family": "j_star", "j": 3} | {"family":
// "general", "edges": [[0,1,1],...], "node_weights": [...]}
Motif parse_motif(const std::string& json_text);

// {"base": {...}, "convention": "all_maps", "motifs": [{"family": ...,
// "beta": ...}, ...]}
ModelSpec parse_model_spec(const std::string& json_text);
ModelSpec read_model_spec(const std::string& path);
std::string model_spec_to_json(const ModelSpec& spec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Trace CSV: sweep, stat_1..stat_s, edge_mean.
std::string trace_to_csv(const ChainTrace& trace);

// Scan CSV: beta..., psi, u_star_list (|-separated), degenerate, jump.
std::string scan_to_csv(const PhaseScanResult& scan,
                        const std::vector<std::string>& beta_names);
std::string scan_summary_json(const PhaseScanResult& scan);

}  // namespace gergm::io
