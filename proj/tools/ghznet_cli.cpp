#include "ghznet/analytics.hpp"
#include "ghznet/errors.hpp"
#include "ghznet/harness.hpp"
#include "ghznet/scenario.hpp"
#include "ghznet/table.hpp"
#include "ghznet/text.hpp"
#include "ghznet/topology.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace ghznet;

namespace {

struct Common
{
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    std::string format = "csv";
    bool serial = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--seed", c.seed, "Root seed (overrides the scenario)");
    cmd->add_option("--trials", c.trials, "Trials per datapoint (overrides the scenario)");
    cmd->add_option("--out", c.out, "Output file (default: stdout)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--serial", c.serial, "Run trials on one thread");
}

Scenario load_with_overrides(const std::string& path, const Common& c)
{
    Scenario s = load_scenario_file(path);
    if (c.seed)
        s.seed = *c.seed;
    if (c.trials)
        s.trials = *c.trials;
    s.validate();
    return s;
}

Execution execution(const Common& c)
{
    return c.serial ? Execution::kSerial : Execution::kParallel;
}

void emit_text(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw std::runtime_error("cannot write '" + path + "'");
}

void emit(const Table& t, const Common& c)
{
    const TableFormat fmt = parse_table_format(c.format);
    if (c.out.empty())
        std::cout << render(t, fmt);
    else
        write_table(t, fmt, c.out);
}

std::vector<std::string> split_values(const std::string& text)
{
    std::vector<std::string> out;
    for (std::string_view v : split_on(text, ','))
        if (!trim(v).empty())
            out.emplace_back(trim(v));
    if (out.empty())
        throw ValidationError("--values needs at least one value");
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo simulator for GHZ-state distribution over quantum networks"};
    app.require_subcommand(1);

    // topo
    auto* topo = app.add_subcommand("topo", "Topology utilities");
    topo->require_subcommand(1);
    int grid_m = 6;
    double grid_p = 0.75;
    std::string topo_out, topo_format = "text";
    auto* gen = topo->add_subcommand("gen-grid", "Write an MxM grid topology");
    gen->add_option("--m", grid_m, "Grid width")->required();
    gen->add_option("--p", grid_p, "Uniform link probability");
    gen->add_option("--out", topo_out, "Output file (default: stdout)");
    gen->add_option("--format", topo_format)->check(CLI::IsMember({"text", "json"}));

    std::string topo_file;
    Common validate_opts;
    auto* validate = topo->add_subcommand("validate", "Load a topology and print its statistics");
    validate->add_option("file", topo_file)->required();
    validate->add_option("--out", validate_opts.out);
    validate->add_option("--format", validate_opts.format)->check(CLI::IsMember({"csv", "json"}));

    // run
    std::string scenario_file;
    Common run_opts;
    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("scenario", scenario_file)->required();
    add_common(run, run_opts);

    // sweep
    Common sweep_opts;
    std::string axis, values;
    auto* sw = app.add_subcommand("sweep", "Vary one scenario parameter");
    sw->add_option("scenario", scenario_file)->required();
    sw->add_option("--axis", axis, "p, p_op, q_c, users, grid_M or protocol")->required();
    sw->add_option("--values", values, "Comma-separated values")->required();
    add_common(sw, sweep_opts);

    // speedup
    Common speed_opts;
    std::string p_range, qc_range, proto_a = "MP-P", proto_b = "SP";
    bool analytic_sp = false;
    auto* sp = app.add_subcommand("speedup", "Rate ratio of two protocols over p x Q_c");
    sp->add_option("scenario", scenario_file)->required();
    sp->add_option("--p-range", p_range, "start:stop:step or a comma list")->required();
    sp->add_option("--qc-range", qc_range, "Comma list of Q_c values (integers or inf)")
        ->required();
    sp->add_option("--protocol-a", proto_a, "Numerator protocol");
    sp->add_option("--protocol-b", proto_b, "Denominator protocol");
    sp->add_flag("--analytic-sp", analytic_sp, "Use the product formula for SP at Q_c = 1");
    add_common(sp, speed_opts);

    // analyze
    Common an_opts;
    std::size_t samples = 10000;
    auto* an = app.add_subcommand("analyze", "Closed-form rate estimators for a scenario");
    an->add_option("scenario", scenario_file)->required();
    an->add_option("--samples", samples, "Component-distribution samples");
    add_common(an, an_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            Topology t = build_grid(grid_m, grid_p);
            emit_text(topo_format == "json" ? serialize_topology_json(t) + "\n"
                                            : serialize_topology(t),
                      topo_out);
        } else if (validate->parsed()) {
            Topology t = load_topology_file(topo_file);
            CatalogStats cs = catalog_stats(t);
            Table tbl;
            tbl.columns = {"name", "nodes", "edges", "mean_length_km", "mean_degree"};
            tbl.rows.push_back({t.name(), static_cast<std::int64_t>(cs.node_count),
                                static_cast<std::int64_t>(cs.edge_count), cs.mean_edge_length_km,
                                cs.mean_nodal_degree});
            emit(tbl, validate_opts);
        } else if (run->parsed()) {
            Scenario s = load_with_overrides(scenario_file, run_opts);
            ScenarioResult r = run_scenario(s, execution(run_opts));
            if (!r.ok())
                throw InfeasibleError(r.reason);
            emit(stats_table(s, r), run_opts);
        } else if (sw->parsed()) {
            Scenario s = load_with_overrides(scenario_file, sweep_opts);
            auto points = sweep(s, axis, split_values(values), execution(sweep_opts));
            emit(sweep_table(axis, points), sweep_opts);
        } else if (sp->parsed()) {
            Scenario s = load_with_overrides(scenario_file, speed_opts);
            SpeedupRequest req;
            req.p_values = parse_range(p_range);
            for (const std::string& q : split_values(qc_range))
                req.q_c_values.push_back(parse_cutoff(q));
            req.protocol_a = parse_protocol(proto_a);
            req.protocol_b = parse_protocol(proto_b);
            req.analytic_sp = analytic_sp;
            auto cells = speedup_report(s, req, execution(speed_opts));
            emit(speedup_table(req, cells), speed_opts);
        } else if (an->parsed()) {
            Scenario s = load_with_overrides(scenario_file, an_opts);
            emit(analyze_scenario(s, samples), an_opts);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
