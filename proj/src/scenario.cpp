#include "ghznet/scenario.hpp"

#include "ghznet/errors.hpp"
#include "ghznet/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ghznet {

UserSpec UserSpec::parse(std::string_view text)
{
    text = trim(text);
    UserSpec spec;
    if (text == "corners") {
        spec.kind = Kind::kCorners;
        spec.count = 4;
        return spec;
    }
    if (text.starts_with("random:")) {
        auto k = parse_int(text.substr(7));
        if (!k || *k < 2)
            throw ValidationError("random user count must be an integer >= 2");
        spec.kind = Kind::kRandom;
        spec.count = static_cast<int>(*k);
        return spec;
    }
    spec.kind = Kind::kExplicit;
    for (std::string_view item : split_on(text, ',')) {
        auto n = parse_int(item);
        if (!n || *n < 0)
            throw ValidationError("bad user node '" + std::string(item) + "'");
        spec.nodes.push_back(static_cast<NodeId>(*n));
    }
    spec.count = static_cast<int>(spec.nodes.size());
    return spec;
}

std::string UserSpec::to_string() const
{
    switch (kind) {
    case Kind::kCorners: return "corners";
    case Kind::kRandom: return "random:" + std::to_string(count);
    case Kind::kExplicit: break;
    }
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out += (i ? "," : "") + std::to_string(nodes[i]);
    return out;
}

std::size_t UserSpec::size() const
{
    return kind == Kind::kExplicit ? nodes.size() : static_cast<std::size_t>(count);
}

int parse_cutoff(std::string_view text)
{
    text = trim(text);
    if (text == "inf" || text == "unbounded")
        return kUnboundedCutoff;
    auto v = parse_int(text);
    if (!v || *v < 1 || *v >= kUnboundedCutoff)
        throw ValidationError("Q_c must be a positive integer or 'inf', got '" + std::string(text) +
                              "'");
    return static_cast<int>(*v);
}

std::string format_cutoff(int q_c)
{
    return q_c == kUnboundedCutoff ? "inf" : std::to_string(q_c);
}

void Scenario::validate() const
{
    if (is_grid() && grid_m < 2)
        throw ValidationError("grid_m must be at least 2");
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("p must lie in [0, 1]");
    if (p_op && !(*p_op >= 0.0 && *p_op <= 1.0))
        throw ValidationError("p_op must lie in [0, 1]");
    if (!(length_scale > 0.0))
        throw ValidationError("length_scale must be positive");
    if (trials < 1)
        throw ValidationError("trials must be at least 1");
    if (max_timeslots < 1)
        throw ValidationError("max_timeslots must be at least 1");
    if (q_c < 1)
        throw ValidationError("q_c must be at least 1");
    if (users.kind == UserSpec::Kind::kCorners && !is_grid())
        throw ValidationError("'corners' users need a grid topology");
    if (users.size() < 2)
        throw ValidationError("at least two users are required");
}

namespace {

void apply_field(Scenario& s, std::string_view key, std::string_view value,
                 const std::string& base_dir, int line)
{
    auto number = [&]() {
        auto v = parse_double(value);
        if (!v)
            throw ValidationError("'" + std::string(key) + "' needs a number", line);
        return *v;
    };
    auto integer = [&]() {
        auto v = parse_int(value);
        if (!v)
            throw ValidationError("'" + std::string(key) + "' needs an integer", line);
        return *v;
    };
    try {
        if (key == "topology") {
            if (value == "grid") {
                s.topology_file.clear();
            } else {
                std::filesystem::path path{std::string(value)};
                if (path.is_relative() && !base_dir.empty())
                    path = std::filesystem::path(base_dir) / path;
                s.topology_file = path.string();
            }
        } else if (key == "grid_m") {
            s.grid_m = static_cast<int>(integer());
        } else if (key == "p") {
            s.p = number();
        } else if (key == "p_op") {
            s.p_op = number();
        } else if (key == "length_scale") {
            s.length_scale = number();
        } else if (key == "protocol") {
            s.protocol = parse_protocol(value);
        } else if (key == "users") {
            s.users = UserSpec::parse(value);
        } else if (key == "q_c") {
            s.q_c = parse_cutoff(value);
        } else if (key == "trials") {
            s.trials = static_cast<int>(integer());
        } else if (key == "max_timeslots") {
            s.max_timeslots = static_cast<int>(integer());
        } else if (key == "seed") {
            s.seed = static_cast<std::uint64_t>(integer());
        } else if (key == "bell_pair_lifetime") {
            if (value == "cutoff")
                s.bell_pairs = BellPairLifetime::kCutoff;
            else if (value == "unlimited")
                s.bell_pairs = BellPairLifetime::kUnlimited;
            else
                throw ValidationError("bell_pair_lifetime must be 'cutoff' or 'unlimited'");
        } else {
            throw ValidationError("unknown scenario key '" + std::string(key) + "'");
        }
    } catch (const ValidationError& e) {
        if (e.line() == 0 && line > 0)
            throw ValidationError(e.what(), line);
        throw;
    }
}

} // namespace

Scenario parse_scenario(std::string_view document, const std::string& base_dir)
{
    Scenario s;
    auto first = document.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && document[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(document);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(std::string("malformed JSON scenario: ") + e.what());
        }
        for (const auto& [key, v] : j.items()) {
            std::string text;
            if (v.is_string())
                text = v.get<std::string>();
            else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i)
                    text += (i ? "," : "") + v[i].dump();
            } else
                text = v.dump();
            apply_field(s, key, text, base_dir, 0);
        }
    } else {
        int line_no = 0;
        for (std::string_view line : split_lines(document)) {
            ++line_no;
            std::string_view body = trim(strip_comment(line));
            if (body.empty())
                continue;
            auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw ValidationError("expected 'key = value'", line_no);
            apply_field(s, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), base_dir,
                        line_no);
        }
    }
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_scenario(const Scenario& s)
{
    std::string out;
    out += "topology = " + (s.is_grid() ? std::string("grid") : s.topology_file) + "\n";
    if (s.is_grid()) {
        out += "grid_m = " + std::to_string(s.grid_m) + "\n";
        out += "p = " + format_double(s.p) + "\n";
    } else {
        if (s.p_op)
            out += "p_op = " + format_double(*s.p_op) + "\n";
        out += "length_scale = " + format_double(s.length_scale) + "\n";
    }
    out += "protocol = " + std::string(to_string(s.protocol)) + "\n";
    out += "users = " + s.users.to_string() + "\n";
    out += "q_c = " + format_cutoff(s.q_c) + "\n";
    out += "trials = " + std::to_string(s.trials) + "\n";
    out += "max_timeslots = " + std::to_string(s.max_timeslots) + "\n";
    out += "seed = " + std::to_string(s.seed) + "\n";
    out += std::string("bell_pair_lifetime = ") +
           (s.bell_pairs == BellPairLifetime::kCutoff ? "cutoff" : "unlimited") + "\n";
    return out;
}

Topology build_topology(const Scenario& s)
{
    if (s.is_grid())
        return build_grid(s.grid_m, s.p);
    Topology t = load_topology_file(s.topology_file);
    if (s.length_scale != 1.0)
        t = scale_lengths(t, s.length_scale);
    if (s.p_op)
        t = t.with_p_op(*s.p_op);
    return t;
}

std::vector<NodeId> resolve_users(const UserSpec& spec, const Scenario& s, const Topology& t,
                                  Rng& rng)
{
    switch (spec.kind) {
    case UserSpec::Kind::kCorners:
        return grid_corners(s.grid_m);
    case UserSpec::Kind::kExplicit:
        for (NodeId n : spec.nodes)
            if (static_cast<std::size_t>(n) >= t.node_count())
                throw ValidationError("user node " + std::to_string(n) + " outside the topology");
        return spec.nodes;
    case UserSpec::Kind::kRandom:
        break;
    }
    const auto n = t.node_count();
    const auto k = static_cast<std::size_t>(spec.count);
    if (k > n)
        throw ValidationError("cannot place " + std::to_string(k) + " users on " +
                              std::to_string(n) + " nodes");
    // Partial Fisher-Yates over the node ids.
    std::vector<NodeId> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace ghznet
