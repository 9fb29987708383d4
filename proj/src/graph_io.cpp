#include "gergm/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gergm/errors.hpp"

namespace gergm::io {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ConfigError(std::string("malformed JSON in ") + what);
    return j;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

WeightedGraph parse_graph_json(const std::string& text) {
    const json j = parse(text, "graph file");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw ConfigError("graph JSON: missing integer field \"n\"");
    const int n = j["n"].get<int>();
    std::vector<std::tuple<int, int, double>> edges;
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 3)
                throw ConfigError("graph JSON: each edge must be [i, j, weight]");
            const int a = e[0].get<int>(), b = e[1].get<int>();
            if (a >= b)
                throw ConfigError("graph JSON: edges must have i < j (got " +
                                  std::to_string(a) + "," + std::to_string(b) + ")");
            edges.emplace_back(a, b, e[2].get<double>());
        }
    }
    std::optional<Eigen::VectorXd> nw;
    if (j.contains("node_weights") && !j["node_weights"].is_null()) {
        const auto& arr = j["node_weights"];
        Eigen::VectorXd v(arr.size());
        for (size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
        nw = std::move(v);
    }
    return WeightedGraph::from_edges(n, edges, std::move(nw));
}

WeightedGraph parse_graph_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::tuple<int, int, double>> edges;
    int max_node = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.find_first_not_of("ijweight, \t") == std::string::npos)
            continue;  // header row
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> toks;
        while (std::getline(ls, tok, ',')) toks.push_back(tok);
        if (toks.size() != 3)
            throw ConfigError("graph CSV line " + std::to_string(line_no) +
                              ": expected i,j,weight");
        try {
            const int a = std::stoi(toks[0]);
            const int b = std::stoi(toks[1]);
            const double w = std::stod(toks[2]);
            edges.emplace_back(std::min(a, b), std::max(a, b), w);
            max_node = std::max({max_node, a, b});
        } catch (const std::exception&) {
            throw ConfigError("graph CSV line " + std::to_string(line_no) +
                              ": parse failure");
        }
    }
    if (max_node < 0) throw ConfigError("graph CSV: no edges found");
    return WeightedGraph::from_edges(max_node + 1, edges);
}

WeightedGraph read_graph(const std::string& path) {
    const std::string text = read_file(path);
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        return parse_graph_csv(text);
    return parse_graph_json(text);
}

std::string graph_to_json(const WeightedGraph& g) {
    json j;
    j["n"] = g.n();
    json edges = json::array();
    for (int i = 0; i < g.n(); ++i)
        for (int k = i + 1; k < g.n(); ++k)
            if (g.weight(i, k) != 0.0) edges.push_back({i, k, g.weight(i, k)});
    j["edges"] = std::move(edges);
    if (g.has_node_weights()) {
        json nw = json::array();
        for (int i = 0; i < g.n(); ++i) nw.push_back(g.node_weights()(i));
        j["node_weights"] = std::move(nw);
    }
    return j.dump(2);
}

void write_graph_json(const WeightedGraph& g, const std::string& path) {
    write_file(path, graph_to_json(g));
}

namespace {

BaseMeasure base_from_json(const json& j) {
    if (!j.contains("kind")) throw ConfigError("base measure: missing \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "gaussian")
        return BaseMeasure::gaussian(j.value("mean", 0.0), j.value("variance", 1.0));
    if (kind == "quartic") return BaseMeasure::quartic();
    if (kind == "bernoulli") return BaseMeasure::bernoulli(j.value("p", 0.5));
    if (kind == "poisson") return BaseMeasure::poisson(j.value("rate", 1.0));
    throw ConfigError("base measure: unknown kind \"" + kind + "\"");
}

json base_to_json(const BaseMeasure& m) {
    json j;
    switch (m.kind()) {
        case MeasureKind::gaussian:
            j["kind"] = "gaussian";
            j["mean"] = m.param1();
            j["variance"] = m.param2();
            break;
        case MeasureKind::quartic:
            j["kind"] = "quartic";
            break;
        case MeasureKind::bernoulli:
            j["kind"] = "bernoulli";
            j["p"] = m.param1();
            break;
        case MeasureKind::poisson:
            j["kind"] = "poisson";
            j["rate"] = m.param1();
            break;
    }
    return j;
}

Motif motif_from_json(const json& j) {
    if (!j.contains("family")) throw ConfigError("motif: missing \"family\"");
    const std::string fam = j["family"].get<std::string>();
    if (fam == "edge") return Motif::edge();
    if (fam == "two_star") return Motif::two_star();
    if (fam == "triangle") return Motif::triangle();
    if (fam == "j_star") {
        if (!j.contains("j")) throw ConfigError("motif: j_star needs \"j\"");
        return Motif::j_star(j["j"].get<int>());
    }
    if (fam == "general") {
        std::vector<MotifEdge> edges;
        int verts = 0;
        for (const auto& e : j.value("edges", json::array())) {
            if (!e.is_array() || e.size() < 2)
                throw ConfigError("motif: general edges must be [i, j(, weight)]");
            MotifEdge me{e[0].get<int>(), e[1].get<int>(),
                         e.size() > 2 ? e[2].get<double>() : 1.0};
            verts = std::max({verts, me.i + 1, me.j + 1});
            edges.push_back(me);
        }
        std::vector<double> nw;
        for (const auto& a : j.value("node_weights", json::array()))
            nw.push_back(a.get<double>());
        if (j.contains("vertices")) verts = j["vertices"].get<int>();
        else if (!nw.empty()) verts = std::max(verts, static_cast<int>(nw.size()));
        return Motif::general(verts, std::move(edges), std::move(nw));
    }
    throw ConfigError("motif: unknown family \"" + fam + "\"");
}

json motif_to_json(const Motif& m) {
    json j;
    switch (m.family()) {
        case MotifFamily::edge: j["family"] = "edge"; break;
        case MotifFamily::two_star: j["family"] = "two_star"; break;
        case MotifFamily::triangle: j["family"] = "triangle"; break;
        case MotifFamily::j_star:
            j["family"] = "j_star";
            j["j"] = m.star_order();
            break;
        case MotifFamily::general: {
            j["family"] = "general";
            j["vertices"] = m.vertices();
            json es = json::array();
            for (const auto& e : m.edges()) es.push_back({e.i, e.j, e.weight});
            j["edges"] = std::move(es);
            j["node_weights"] = m.node_weights();
            break;
        }
    }
    return j;
}

}  // namespace

BaseMeasure parse_base_measure(const std::string& text) {
    return base_from_json(parse(text, "base measure config"));
}

std::string base_measure_to_json(const BaseMeasure& m) { return base_to_json(m).dump(2); }

Motif parse_motif(const std::string& text) {
    return motif_from_json(parse(text, "motif config"));
}

ModelSpec parse_model_spec(const std::string& text) {
    const json j = parse(text, "model config");
    if (!j.contains("base")) throw ConfigError("model config: missing \"base\"");
    if (!j.contains("motifs") || !j["motifs"].is_array() || j["motifs"].empty())
        throw ConfigError("model config: needs a nonempty \"motifs\" array");
    ModelSpec spec{{}, base_from_json(j["base"]), MapConvention::all_maps};
    const std::string conv = j.value("convention", "all_maps");
    if (conv == "all_maps")
        spec.convention = MapConvention::all_maps;
    else if (conv == "distinct_indices")
        spec.convention = MapConvention::distinct_indices;
    else
        throw ConfigError("model config: unknown convention \"" + conv + "\"");
    for (const auto& m : j["motifs"])
        spec.terms.push_back({motif_from_json(m), m.value("beta", 0.0)});
    return spec;
}

ModelSpec read_model_spec(const std::string& path) {
    return parse_model_spec(read_file(path));
}

std::string model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["base"] = base_to_json(spec.base);
    j["convention"] = spec.convention == MapConvention::all_maps
                          ? "all_maps"
                          : "distinct_indices";
    json motifs = json::array();
    for (const auto& t : spec.terms) {
        json m = motif_to_json(t.motif);
        m["beta"] = t.beta;
        motifs.push_back(std::move(m));
    }
    j["motifs"] = std::move(motifs);
    return j.dump(2);
}

std::string trace_to_csv(const ChainTrace& trace) {
    std::ostringstream out;
    out.precision(17);
    const size_t s = trace.statistics.empty() ? 0 : trace.statistics.front().size();
    out << "sweep";
    for (size_t k = 0; k < s; ++k) out << ",stat_" << (k + 1);
    out << ",edge_mean\n";
    for (size_t row = 0; row < trace.statistics.size(); ++row) {
        out << row;
        for (size_t k = 0; k < s; ++k) out << "," << trace.statistics[row][k];
        out << "," << trace.edge_mean[row] << "\n";
    }
    return out.str();
}

std::string scan_to_csv(const PhaseScanResult& scan,
                        const std::vector<std::string>& beta_names) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& name : beta_names) out << name << ",";
    out << "psi,u_star_list,degenerate_flag,jump_flag,error\n";
    for (const auto& p : scan.points) {
        for (double b : p.beta) out << b << ",";
        if (p.solution) {
            out << p.solution->psi << ",";
            for (size_t k = 0; k < p.solution->maximizers.size(); ++k)
                out << (k ? "|" : "") << p.solution->maximizers[k];
            out << "," << (p.degenerate_flag ? 1 : 0) << ","
                << (p.jump_flag ? 1 : 0) << ",\n";
        } else {
            out << ",,,," << p.error << "\n";
        }
    }
    return out.str();
}

std::string scan_summary_json(const PhaseScanResult& scan) {
    json j;
    j["points"] = scan.points.size();
    j["flags"] = scan.flag_count();
    json segs = json::array();
    for (const auto& s : scan.boundaries) {
        json e;
        e["index_lo"] = s.index_lo;
        e["beta_lo"] = s.beta_lo;
        e["beta_hi"] = s.beta_hi;
        e["beta_star"] = s.beta_star;
        e["u_low"] = s.u_low;
        e["u_high"] = s.u_high;
        e["g_low"] = s.g_low;
        e["g_high"] = s.g_high;
        segs.push_back(std::move(e));
    }
    j["boundaries"] = std::move(segs);
    return j.dump(2);
}

}  // namespace gergm::io
