#include "ghznet/topology.hpp"

#include "ghznet/errors.hpp"
#include "ghznet/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ghznet {

double edge_success_probability(double length_km, double p_op, double attenuation_db_per_km)
{
    if (!(length_km >= 0.0))
        throw std::domain_error("edge length must be non-negative");
    if (!(p_op >= 0.0 && p_op <= 1.0))
        throw std::domain_error("p_op must lie in [0, 1]");
    if (!(attenuation_db_per_km >= 0.0))
        throw std::domain_error("attenuation must be non-negative");
    return p_op * std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
}

Topology::Topology(std::string name, std::size_t node_count, std::vector<Edge> edges,
                   double attenuation_db_per_km)
    : name_(std::move(name)), node_count_(node_count), attenuation_(attenuation_db_per_km),
      edges_(std::move(edges)), adjacency_(node_count)
{
    if (!(attenuation_ >= 0.0))
        throw ValidationError("attenuation must be non-negative");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        Edge& e = edges_[i];
        const std::string tag = "edge " + std::to_string(i);
        if (e.u == e.v)
            throw ValidationError(tag + ": self-loop at node " + std::to_string(e.u));
        if (e.u > e.v)
            std::swap(e.u, e.v);
        if (e.u < 0 || static_cast<std::size_t>(e.v) >= node_count_)
            throw ValidationError(tag + ": endpoint out of range");
        if (!(e.length_km >= 0.0))
            throw ValidationError(tag + ": negative length");
        if (!(e.p_op >= 0.0 && e.p_op <= 1.0) || !(e.p_e >= 0.0 && e.p_e <= e.p_op))
            throw ValidationError(tag + ": probability outside [0, p_op]");
        adjacency_[static_cast<std::size_t>(e.u)].push_back({e.v, static_cast<EdgeId>(i)});
        adjacency_[static_cast<std::size_t>(e.v)].push_back({e.u, static_cast<EdgeId>(i)});
    }
    for (std::size_t n = 0; n < node_count_; ++n) {
        auto& adj = adjacency_[n];
        std::sort(adj.begin(), adj.end(),
                  [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
        for (std::size_t k = 1; k < adj.size(); ++k)
            if (adj[k].neighbor == adj[k - 1].neighbor)
                throw ValidationError("duplicate edge " + std::to_string(n) + "-" +
                                      std::to_string(adj[k].neighbor) + " (edge " +
                                      std::to_string(adj[k].edge) + ")");
    }
}

std::optional<EdgeId> Topology::find_edge(NodeId a, NodeId b) const
{
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= node_count_ ||
        static_cast<std::size_t>(b) >= node_count_)
        return std::nullopt;
    auto adj = neighbors(a);
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Incidence& inc, NodeId x) { return inc.neighbor < x; });
    if (it != adj.end() && it->neighbor == b)
        return it->edge;
    return std::nullopt;
}

bool Topology::is_connected() const
{
    if (node_count_ <= 1)
        return true;
    std::vector<char> seen(node_count_, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (const Incidence& inc : neighbors(n)) {
            auto k = static_cast<std::size_t>(inc.neighbor);
            if (!seen[k]) {
                seen[k] = 1;
                ++reached;
                stack.push_back(inc.neighbor);
            }
        }
    }
    return reached == node_count_;
}

double Topology::max_p_e() const
{
    double m = 0.0;
    for (const Edge& e : edges_)
        m = std::max(m, e.p_e);
    return m;
}

double Topology::mean_p_e() const
{
    if (edges_.empty())
        return 0.0;
    double s = 0.0;
    for (const Edge& e : edges_)
        s += e.p_e;
    return s / static_cast<double>(edges_.size());
}

Topology Topology::with_p_op(double p_op) const
{
    std::vector<Edge> edges = edges_;
    for (Edge& e : edges) {
        e.p_op = p_op;
        e.p_e = edge_success_probability(e.length_km, p_op, attenuation_);
    }
    Topology t(name_, node_count_, std::move(edges), attenuation_);
    t.declared = declared;
    return t;
}

Topology Topology::with_uniform_p(double p) const
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("probability must lie in [0, 1]");
    std::vector<Edge> edges = edges_;
    for (Edge& e : edges) {
        e.p_op = p;
        e.p_e = p;
    }
    Topology t(name_, node_count_, std::move(edges), 0.0);
    t.declared = declared;
    return t;
}

Topology build_grid(int width, double p)
{
    if (width < 2)
        throw ValidationError("grid width must be at least 2, got " + std::to_string(width));
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("probability must lie in [0, 1]");
    const auto m = static_cast<NodeId>(width);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2 * m * (m - 1)));
    for (NodeId r = 0; r < m; ++r) {
        for (NodeId c = 0; c < m; ++c) {
            NodeId n = r * m + c;
            if (c + 1 < m)
                edges.push_back({n, n + 1, 1.0, p, p});
            if (r + 1 < m)
                edges.push_back({n, n + m, 1.0, p, p});
        }
    }
    return Topology("grid" + std::to_string(width) + "x" + std::to_string(width),
                    static_cast<std::size_t>(m * m), std::move(edges), 0.0);
}

std::vector<NodeId> grid_corners(int width)
{
    if (width < 2)
        throw ValidationError("grid width must be at least 2");
    const auto m = static_cast<NodeId>(width);
    return {0, m - 1, m * (m - 1), m * m - 1};
}

Topology scale_lengths(const Topology& t, double factor)
{
    if (!(factor > 0.0))
        throw std::domain_error("length scale factor must be positive");
    std::vector<Edge> edges(t.edges().begin(), t.edges().end());
    for (Edge& e : edges) {
        e.length_km *= factor;
        e.p_e = edge_success_probability(e.length_km, e.p_op, t.attenuation_db_per_km());
    }
    Topology out(t.name(), t.node_count(), std::move(edges), t.attenuation_db_per_km());
    out.declared = t.declared;
    if (out.declared.mean_length_km)
        *out.declared.mean_length_km *= factor;
    return out;
}

CatalogStats catalog_stats(const Topology& t)
{
    CatalogStats s;
    s.node_count = t.node_count();
    s.edge_count = t.edge_count();
    double total = 0.0;
    for (const Edge& e : t.edges())
        total += e.length_km;
    s.mean_edge_length_km = s.edge_count ? total / static_cast<double>(s.edge_count) : 0.0;
    s.mean_nodal_degree =
        s.node_count ? 2.0 * static_cast<double>(s.edge_count) / static_cast<double>(s.node_count)
                     : 0.0;
    return s;
}

namespace {

struct RawEdge
{
    NodeId u;
    NodeId v;
    double length;
    std::optional<double> p_op;
    int line;
};

struct RawDocument
{
    std::string name = "unnamed";
    double p_op = 1.0;
    double attenuation = kDefaultAttenuationDbPerKm;
    std::optional<std::size_t> nodes;
    DeclaredStats declared;
    std::vector<RawEdge> edges;
};

Topology assemble(const RawDocument& doc)
{
    std::size_t node_count = doc.nodes.value_or(0);
    for (const RawEdge& r : doc.edges) {
        if (r.u < 0 || r.v < 0)
            throw ValidationError("negative node id", r.line);
        if (r.u == r.v)
            throw ValidationError("self-loop at node " + std::to_string(r.u), r.line);
        if (!(r.length >= 0.0))
            throw ValidationError("negative edge length", r.line);
        if (!doc.nodes)
            node_count = std::max(node_count, static_cast<std::size_t>(std::max(r.u, r.v)) + 1);
        else if (static_cast<std::size_t>(std::max(r.u, r.v)) >= node_count)
            throw ValidationError("node id exceeds declared node count", r.line);
    }
    if (node_count < 2)
        throw ValidationError("topology needs at least two nodes");

    std::vector<std::pair<NodeId, NodeId>> seen;
    std::vector<Edge> edges;
    edges.reserve(doc.edges.size());
    for (const RawEdge& r : doc.edges) {
        const std::pair<NodeId, NodeId> key{std::min(r.u, r.v), std::max(r.u, r.v)};
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ValidationError("duplicate edge " + std::to_string(key.first) + "-" +
                                      std::to_string(key.second),
                                  r.line);
        seen.emplace_back(key);
        double p_op = r.p_op.value_or(doc.p_op);
        if (!(p_op >= 0.0 && p_op <= 1.0))
            throw ValidationError("p_op outside [0, 1]", r.line);
        edges.push_back({key.first, key.second, r.length, p_op,
                         edge_success_probability(r.length, p_op, doc.attenuation)});
    }

    Topology t(doc.name, node_count, std::move(edges), doc.attenuation);
    if (!t.is_connected())
        throw ValidationError("topology '" + doc.name + "' is disconnected");

    const CatalogStats stats = catalog_stats(t);
    if (doc.declared.nodes && *doc.declared.nodes != stats.node_count)
        throw ValidationError("expected " + std::to_string(*doc.declared.nodes) + " nodes, found " +
                              std::to_string(stats.node_count));
    if (doc.declared.edges && *doc.declared.edges != stats.edge_count)
        throw ValidationError("expected " + std::to_string(*doc.declared.edges) + " edges, found " +
                              std::to_string(stats.edge_count));
    if (doc.declared.mean_length_km) {
        double want = *doc.declared.mean_length_km;
        if (std::abs(stats.mean_edge_length_km - want) > 0.01 * std::abs(want))
            throw ValidationError("mean edge length " + format_double(stats.mean_edge_length_km) +
                                  " km differs from declared " + format_double(want) +
                                  " km by more than 1%");
    }
    t.declared = doc.declared;
    return t;
}

RawDocument parse_text(std::string_view document)
{
    RawDocument doc;
    int line_no = 0;
    for (std::string_view line : split_lines(document)) {
        ++line_no;
        std::vector<std::string_view> tok = split_ws(strip_comment(line));
        if (tok.empty())
            continue;
        const std::string_view key = tok[0];
        auto need_value = [&]() {
            if (tok.size() != 2)
                throw ValidationError("expected '" + std::string(key) + " <value>'", line_no);
            return tok[1];
        };
        auto number = [&](std::string_view s) {
            auto v = parse_double(s);
            if (!v)
                throw ValidationError("not a number: '" + std::string(s) + "'", line_no);
            return *v;
        };
        auto count = [&](std::string_view s) {
            auto v = parse_int(s);
            if (!v || *v < 0)
                throw ValidationError("not a non-negative integer: '" + std::string(s) + "'",
                                      line_no);
            return static_cast<std::size_t>(*v);
        };

        if (parse_int(key)) {
            if (tok.size() < 3 || tok.size() > 4)
                throw ValidationError("edge record must be 'u v length_km [p_op]'", line_no);
            auto u = parse_int(tok[0]);
            auto v = parse_int(tok[1]);
            if (!v)
                throw ValidationError("bad node id '" + std::string(tok[1]) + "'", line_no);
            RawEdge r{static_cast<NodeId>(*u), static_cast<NodeId>(*v), number(tok[2]),
                      std::nullopt, line_no};
            if (tok.size() == 4)
                r.p_op = number(tok[3]);
            doc.edges.push_back(r);
        } else if (key == "name") {
            if (tok.size() < 2)
                throw ValidationError("expected 'name <label>'", line_no);
            doc.name = std::string(tok[1]);
        } else if (key == "p_op") {
            doc.p_op = number(need_value());
            if (!(doc.p_op >= 0.0 && doc.p_op <= 1.0))
                throw ValidationError("p_op outside [0, 1]", line_no);
        } else if (key == "attenuation_db_per_km") {
            doc.attenuation = number(need_value());
        } else if (key == "nodes") {
            doc.nodes = count(need_value());
        } else if (key == "expected_nodes") {
            doc.declared.nodes = count(need_value());
        } else if (key == "expected_edges") {
            doc.declared.edges = count(need_value());
        } else if (key == "expected_mean_length_km") {
            doc.declared.mean_length_km = number(need_value());
        } else {
            throw ValidationError("unknown key '" + std::string(key) + "'", line_no);
        }
    }
    return doc;
}

RawDocument parse_json(std::string_view document)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON topology: ") + e.what());
    }
    RawDocument doc;
    try {
        doc.name = j.value("name", doc.name);
        doc.p_op = j.value("p_op", doc.p_op);
        doc.attenuation = j.value("attenuation_db_per_km", doc.attenuation);
        if (j.contains("nodes"))
            doc.nodes = j.at("nodes").get<std::size_t>();
        if (j.contains("expected_nodes"))
            doc.declared.nodes = j.at("expected_nodes").get<std::size_t>();
        if (j.contains("expected_edges"))
            doc.declared.edges = j.at("expected_edges").get<std::size_t>();
        if (j.contains("expected_mean_length_km"))
            doc.declared.mean_length_km = j.at("expected_mean_length_km").get<double>();
        int index = 0;
        for (const json& e : j.at("edges")) {
            ++index;
            RawEdge r{};
            r.line = index;
            if (e.is_array()) {
                if (e.size() < 3 || e.size() > 4)
                    throw ValidationError("edge record must be [u, v, length_km, (p_op)]", index);
                r.u = e[0].get<NodeId>();
                r.v = e[1].get<NodeId>();
                r.length = e[2].get<double>();
                if (e.size() == 4)
                    r.p_op = e[3].get<double>();
            } else {
                r.u = e.at("u").get<NodeId>();
                r.v = e.at("v").get<NodeId>();
                r.length = e.at("length_km").get<double>();
                if (e.contains("p_op"))
                    r.p_op = e.at("p_op").get<double>();
            }
            doc.edges.push_back(r);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid JSON topology: ") + e.what());
    }
    return doc;
}

} // namespace

Topology load_topology(std::string_view document)
{
    auto first = document.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && document[first] == '{')
        return assemble(parse_json(document));
    return assemble(parse_text(document));
}

Topology load_topology_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open topology file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_topology(buf.str());
}

std::string serialize_topology(const Topology& t)
{
    std::string out;
    out += "name " + (t.name().empty() ? std::string("unnamed") : t.name()) + "\n";
    out += "nodes " + std::to_string(t.node_count()) + "\n";
    out += "attenuation_db_per_km " + format_double(t.attenuation_db_per_km()) + "\n";
    if (t.declared.nodes)
        out += "expected_nodes " + std::to_string(*t.declared.nodes) + "\n";
    if (t.declared.edges)
        out += "expected_edges " + std::to_string(*t.declared.edges) + "\n";
    if (t.declared.mean_length_km)
        out += "expected_mean_length_km " + format_double(*t.declared.mean_length_km) + "\n";
    out += "# u v length_km p_op\n";
    for (const Edge& e : t.edges())
        out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + format_double(e.length_km) +
               " " + format_double(e.p_op) + "\n";
    return out;
}

std::string serialize_topology_json(const Topology& t)
{
    nlohmann::ordered_json j;
    j["name"] = t.name();
    j["nodes"] = t.node_count();
    j["attenuation_db_per_km"] = t.attenuation_db_per_km();
    if (t.declared.nodes)
        j["expected_nodes"] = *t.declared.nodes;
    if (t.declared.edges)
        j["expected_edges"] = *t.declared.edges;
    if (t.declared.mean_length_km)
        j["expected_mean_length_km"] = *t.declared.mean_length_km;
    j["edges"] = nlohmann::ordered_json::array();
    for (const Edge& e : t.edges())
        j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"length_km", e.length_km}, {"p_op", e.p_op}});
    return j.dump(2) + "\n";
}

} // namespace ghznet
