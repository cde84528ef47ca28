#include "ghznet/harness.hpp"

#include "ghznet/analytics.hpp"
#include "ghznet/errors.hpp"
#include "ghznet/routing.hpp"
#include "ghznet/text.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace ghznet {

namespace {

// Salt for the bootstrap stream, kept apart from every trial index.
constexpr std::uint64_t kBootstrapSalt = 0xB0075747ULL;

double reference_probability(const Topology& t)
{
    return t.edge_count() == 0 ? 0.0 : t.max_p_e();
}

TrialRecord run_one(const Scenario& s, const Topology& t, std::uint64_t stream, std::size_t trial,
                    double presence, std::optional<double> fixed_bound)
{
    TrialRecord rec;
    Rng rng = make_stream(s.seed, stream, trial);
    rec.users = resolve_users(s.users, s, t, rng);
    rec.upper_bound = fixed_bound
                          ? *fixed_bound
                          : static_cast<double>(min_user_cut_bound(t, rec.users)) * presence;
    ProtocolConfig cfg{rec.users, s.max_timeslots, s.q_c, s.bell_pairs};
    try {
        rec.outcome = run_protocol(s.protocol, t, cfg, std::move(rng));
    } catch (const InfeasibleError& e) {
        rec.infeasible = true;
        rec.error = e.what();
    }
    return rec;
}

} // namespace

std::vector<TrialRecord> run_trials(const Scenario& s, const Topology& t, std::uint64_t stream,
                                    Execution exec)
{
    s.validate();
    const double presence = expected_link_presence(reference_probability(t), s.q_c);
    std::optional<double> fixed_bound;
    if (s.users.kind != UserSpec::Kind::kRandom) {
        Rng unused(0);
        auto users = resolve_users(s.users, s, t, unused);
        fixed_bound = static_cast<double>(min_user_cut_bound(t, users)) * presence;
    }

    const auto n = static_cast<std::size_t>(s.trials);
    std::vector<TrialRecord> records(n);
    if (exec == Execution::kSerial) {
        for (std::size_t i = 0; i < n; ++i)
            records[i] = run_one(s, t, stream, i, presence, fixed_bound);
        return records;
    }

    // Exceptions cannot cross the parallel region; keep the one from the lowest
    // trial index so the error reported matches the serial loop.
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            records[k] = run_one(s, t, stream, k, presence, fixed_bound);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return records;
}

ScenarioResult summarize_trials(const Scenario& s, const std::vector<TrialRecord>& records,
                                std::uint64_t stream)
{
    ScenarioResult r;
    std::vector<RateSample> samples;
    samples.reserve(records.size());
    for (const TrialRecord& rec : records) {
        if (rec.infeasible) {
            ++r.infeasible_trials;
            if (r.reason.empty())
                r.reason = rec.error;
            continue;
        }
        samples.push_back({static_cast<double>(rec.outcome.ghz_count),
                           static_cast<double>(rec.outcome.timeslots_used), rec.outcome.succeeded});
        r.er_upper_bound = std::max(r.er_upper_bound, rec.upper_bound);
    }
    if (samples.empty()) {
        r.status = ScenarioResult::Status::kInfeasible;
        if (r.reason.empty())
            r.reason = "no trials";
        return r;
    }
    r.stats = summarize(samples, derive_seed(s.seed, stream, kBootstrapSalt));
    if (r.infeasible_trials == 0)
        r.reason.clear();
    return r;
}

ScenarioResult run_scenario(const Scenario& s, Execution exec, std::uint64_t stream)
{
    const Topology t = build_topology(s);
    return summarize_trials(s, run_trials(s, t, stream, exec), stream);
}

Scenario apply_axis(const Scenario& base, const std::string& axis, const std::string& value)
{
    Scenario s = base;
    auto number = [&]() {
        auto v = parse_double(value);
        if (!v)
            throw ValidationError("axis '" + axis + "' needs numeric values, got '" + value + "'");
        return *v;
    };
    if (axis == "p") {
        s.p = number();
        if (!s.is_grid())
            s.p_op = s.p;
    } else if (axis == "p_op") {
        s.p_op = number();
        if (s.is_grid())
            s.p = *s.p_op;
    } else if (axis == "q_c") {
        s.q_c = parse_cutoff(value);
    } else if (axis == "users") {
        // A bare count keeps the placement rule random, anything else is parsed.
        auto k = parse_int(value);
        s.users = k ? UserSpec::parse("random:" + value) : UserSpec::parse(value);
    } else if (axis == "grid_M" || axis == "grid_m") {
        auto m = parse_int(value);
        if (!m)
            throw ValidationError("axis grid_M needs integer values");
        s.grid_m = static_cast<int>(*m);
    } else if (axis == "protocol") {
        s.protocol = parse_protocol(value);
    } else {
        throw ValidationError("unknown sweep axis '" + axis +
                              "' (expected p, p_op, q_c, users, grid_M or protocol)");
    }
    s.validate();
    return s;
}

std::vector<SweepPoint> sweep(const Scenario& base, const std::string& axis,
                              const std::vector<std::string>& values, Execution exec)
{
    // Validate every value before spending time on trials.
    std::vector<SweepPoint> points;
    for (const std::string& v : values)
        points.push_back({v, apply_axis(base, axis, v), {}});
    for (std::size_t i = 0; i < points.size(); ++i)
        points[i].result = run_scenario(points[i].scenario, exec, i);
    return points;
}

double analytic_sp_rate(const Scenario& s, const Topology& t, std::uint64_t stream)
{
    const ProtocolKind kind =
        s.protocol == ProtocolKind::kSpTree ? ProtocolKind::kSpTree : ProtocolKind::kSp;
    if (s.users.kind != UserSpec::Kind::kRandom) {
        Rng unused(0);
        auto users = resolve_users(s.users, s, t, unused);
        return sp_analytic_er(t, sp_route(t, users, kind));
    }
    // Each trial waits a geometric number of slots with mean 1/q for its own route,
    // so sum(ghz) / sum(slots) tends to trials / sum(1/q).
    double waiting = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.trials); ++i) {
        Rng rng = make_stream(s.seed, stream, i);
        auto users = resolve_users(s.users, s, t, rng);
        std::vector<EdgeId> route;
        try {
            route = sp_route(t, users, kind);
        } catch (const InfeasibleError&) {
            continue;
        }
        const double q = sp_analytic_er(t, route);
        if (q <= 0.0)
            return 0.0;
        waiting += 1.0 / q;
        ++counted;
    }
    if (counted == 0)
        throw InfeasibleError("no feasible SP routing for any trial");
    return static_cast<double>(counted) / waiting;
}

std::vector<SpeedupCell> speedup_report(const Scenario& base, const SpeedupRequest& req,
                                        Execution exec)
{
    std::vector<SpeedupCell> cells;
    std::uint64_t stream = 0;
    const bool b_is_sp =
        req.protocol_b == ProtocolKind::kSp || req.protocol_b == ProtocolKind::kSpTree;
    for (double p : req.p_values) {
        for (int q_c : req.q_c_values) {
            SpeedupCell cell;
            cell.p = p;
            cell.q_c = q_c;
            Scenario sa = apply_axis(base, "p", format_double(p));
            sa.q_c = q_c;
            Scenario sb = sa;
            sa.protocol = req.protocol_a;
            sb.protocol = req.protocol_b;
            const Topology t = build_topology(sa);

            cell.a = summarize_trials(sa, run_trials(sa, t, stream, exec), stream);
            if (req.analytic_sp && b_is_sp && q_c == 1) {
                cell.b_analytic = true;
                try {
                    cell.b.stats.er = analytic_sp_rate(sb, t, stream);
                    cell.b.stats.ci95_low = cell.b.stats.ci95_high = cell.b.stats.er;
                    cell.b.stats.valid = true;
                } catch (const InfeasibleError& e) {
                    cell.b.status = ScenarioResult::Status::kInfeasible;
                    cell.b.reason = e.what();
                }
            } else {
                cell.b = summarize_trials(sb, run_trials(sb, t, stream, exec), stream);
            }
            ++stream;

            if (!cell.a.ok())
                cell.reason = std::string(to_string(req.protocol_a)) + " infeasible";
            else if (!cell.b.ok())
                cell.reason = std::string(to_string(req.protocol_b)) + " infeasible";
            else if (!cell.a.stats.valid)
                cell.reason = std::string(to_string(req.protocol_a)) + " failed > 5% of runs";
            else if (!cell.b.stats.valid)
                cell.reason = std::string(to_string(req.protocol_b)) + " failed > 5% of runs";
            else if (cell.b.stats.er <= 0.0)
                cell.reason = "zero denominator";
            else
                cell.ratio = cell.a.stats.er / cell.b.stats.er;
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

namespace {

Cell cutoff_cell(int q_c)
{
    if (q_c == kUnboundedCutoff)
        return std::string("inf");
    return std::int64_t{q_c};
}

std::vector<std::string> stats_columns()
{
    return {"status",       "er",       "ci95_low", "ci95_high", "std_error",
            "fail_fraction", "valid",   "trials",   "succeeded", "failed",
            "infeasible_trials", "mean_ghz_per_success", "er_upper_bound"};
}

std::vector<Cell> stats_cells(const ScenarioResult& r)
{
    const ErStats& st = r.stats;
    return {std::string(r.ok() ? "ok" : "infeasible"),
            st.er,
            st.ci95_low,
            st.ci95_high,
            st.std_error,
            st.fail_fraction,
            std::int64_t{st.valid ? 1 : 0},
            static_cast<std::int64_t>(st.trials),
            static_cast<std::int64_t>(st.succeeded),
            static_cast<std::int64_t>(st.failed),
            static_cast<std::int64_t>(r.infeasible_trials),
            st.mean_ghz_per_success,
            r.er_upper_bound};
}

} // namespace

Table stats_table(const Scenario& s, const ScenarioResult& r)
{
    Table out;
    out.columns = {"protocol", "users", "q_c"};
    for (auto& c : stats_columns())
        out.columns.push_back(c);
    std::vector<Cell> row{std::string(to_string(s.protocol)), s.users.to_string(),
                          cutoff_cell(s.q_c)};
    for (auto& c : stats_cells(r))
        row.push_back(std::move(c));
    out.rows.push_back(std::move(row));
    return out;
}

Table sweep_table(const std::string& axis, const std::vector<SweepPoint>& points)
{
    Table out;
    out.columns = {"axis", "value", "protocol"};
    for (auto& c : stats_columns())
        out.columns.push_back(c);
    for (const SweepPoint& pt : points) {
        std::vector<Cell> row{axis, pt.value, std::string(to_string(pt.scenario.protocol))};
        for (auto& c : stats_cells(pt.result))
            row.push_back(std::move(c));
        out.rows.push_back(std::move(row));
    }
    return out;
}

Table speedup_table(const SpeedupRequest& req, const std::vector<SpeedupCell>& cells)
{
    Table out;
    out.columns = {"p",    "q_c",   "protocol_a", "protocol_b", "er_a",  "er_b",
                   "b_analytic", "ratio", "valid", "reason"};
    for (const SpeedupCell& c : cells) {
        out.rows.push_back({c.p, cutoff_cell(c.q_c), std::string(to_string(req.protocol_a)),
                            std::string(to_string(req.protocol_b)), c.a.stats.er, c.b.stats.er,
                            std::int64_t{c.b_analytic ? 1 : 0},
                            c.ratio ? Cell{*c.ratio} : Cell{std::string()},
                            std::int64_t{c.ratio ? 1 : 0}, c.reason});
    }
    return out;
}

Table analyze_scenario(const Scenario& s, std::size_t samples)
{
    s.validate();
    const Topology t = build_topology(s);
    const double p_ref = reference_probability(t);
    Table out;
    out.columns = {"quantity", "value", "note"};
    auto add = [&](const std::string& name, double v, const std::string& note) {
        out.rows.push_back({name, v, note});
    };

    add("link_presence", expected_link_presence(p_ref, s.q_c),
        "steady-state presence of the best edge");
    if (s.users.kind != UserSpec::Kind::kRandom) {
        Rng unused(0);
        auto users = resolve_users(s.users, s, t, unused);
        add("min_user_cut", min_user_cut_bound(t, users), "edge-disjoint trees cannot exceed it");
        add("er_upper_bound", er_upper_bound(t, users, p_ref, s.q_c), "cut x presence");
        for (ProtocolKind kind : {ProtocolKind::kSp, ProtocolKind::kSpTree}) {
            try {
                add(std::string("analytic_er_") + std::string(to_string(kind)),
                    sp_analytic_er(t, sp_route(t, users, kind)), "exact only for q_c = 1");
            } catch (const InfeasibleError& e) {
                out.rows.push_back({std::string("analytic_er_") + std::string(to_string(kind)),
                                    std::string(), std::string(e.what())});
            }
        }
    } else {
        add("analytic_er_SP", analytic_sp_rate(s, t, 0), "random users, exact only for q_c = 1");
        if (s.q_c == kUnboundedCutoff) {
            out.rows.push_back({std::string("analytic_er_MP-C"), std::string(),
                                std::string("needs a finite q_c")});
        } else {
            ComponentDistribution dist = estimate_component_distribution(t, s.q_c, samples, s.seed);
            add("analytic_er_MP-C", analytic_er_estimate(t, s.users.count, dist),
                "largest-component estimate, " + std::to_string(samples) + " samples");
            double mean = 0.0;
            for (std::size_t c = 0; c < dist.probabilities.size(); ++c)
                mean += static_cast<double>(c) * dist.probabilities[c];
            add("mean_largest_component", mean, "nodes");
        }
    }
    return out;
}

std::vector<double> parse_range(const std::string& text)
{
    std::vector<double> out;
    auto parts = split_on(text, ':');
    if (parts.size() == 3) {
        auto a = parse_double(parts[0]), b = parse_double(parts[1]), step = parse_double(parts[2]);
        if (!a || !b || !step || !(*step > 0.0) || *b < *a)
            throw ValidationError("range must be 'start:stop:step' with step > 0");
        const auto n = static_cast<std::size_t>(std::floor((*b - *a) / *step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i)
            // Rounded so 0.1:0.3:0.1 yields 0.3 rather than 0.30000000000000004.
            out.push_back(std::round((*a + static_cast<double>(i) * *step) * 1e12) / 1e12);
        return out;
    }
    for (std::string_view item : split_on(text, ',')) {
        auto v = parse_double(item);
        if (!v)
            throw ValidationError("bad number '" + std::string(item) + "' in list");
        out.push_back(*v);
    }
    if (out.empty())
        throw ValidationError("empty value list");
    return out;
}

} // namespace ghznet
