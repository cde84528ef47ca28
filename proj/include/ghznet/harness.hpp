#pragma once

#include "ghznet/protocols.hpp"
#include "ghznet/scenario.hpp"
#include "ghznet/stats.hpp"
#include "ghznet/table.hpp"
#include "ghznet/topology.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ghznet {

enum class Execution
{
    kSerial,    // reference loop, one trial after another
    kParallel,  // OpenMP worker pool
};

/// One protocol run inside a scenario.
struct TrialRecord
{
    std::vector<NodeId> users;
    ProtocolOutcome outcome;
    bool infeasible = false;  // centre selection rejected this user set
    std::string error;
    double upper_bound = 0.0;  // er_upper_bound for this trial's users
};

/// Trial i draws everything (random users first, then link generation) from
/// make_stream(s.seed, stream, i), so the records do not depend on scheduling.
std::vector<TrialRecord> run_trials(const Scenario& s, const Topology& t, std::uint64_t stream,
                                    Execution exec = Execution::kParallel);

struct ScenarioResult
{
    enum class Status
    {
        kOk,
        kInfeasible,
    };
    Status status = Status::kOk;
    std::string reason;
    ErStats stats;
    double er_upper_bound = 0.0;  // largest per-trial bound
    std::size_t infeasible_trials = 0;

    bool ok() const { return status == Status::kOk; }
};

/// Runs every trial and aggregates. Trials whose user set admits no feasible
/// centre are left out of the statistics and counted separately; the scenario is
/// infeasible only when no trial was feasible.
ScenarioResult run_scenario(const Scenario& s, Execution exec = Execution::kParallel,
                            std::uint64_t stream = 0);
ScenarioResult summarize_trials(const Scenario& s, const std::vector<TrialRecord>& records,
                                std::uint64_t stream);

/// Returns a copy of `base` with one parameter changed. Axes: p, p_op, q_c,
/// users, grid_M, protocol. Throws ValidationError for anything else.
Scenario apply_axis(const Scenario& base, const std::string& axis, const std::string& value);

struct SweepPoint
{
    std::string value;
    Scenario scenario;
    ScenarioResult result;
};

/// One run_scenario per value; value i uses stream index i.
std::vector<SweepPoint> sweep(const Scenario& base, const std::string& axis,
                              const std::vector<std::string>& values,
                              Execution exec = Execution::kParallel);

struct SpeedupCell
{
    double p = 0.0;
    int q_c = 1;
    ScenarioResult a;
    ScenarioResult b;
    bool b_analytic = false;
    std::optional<double> ratio;  // empty for a blank cell
    std::string reason;           // why the cell is blank
};

struct SpeedupRequest
{
    std::vector<double> p_values;
    std::vector<int> q_c_values;
    ProtocolKind protocol_a = ProtocolKind::kMpP;
    ProtocolKind protocol_b = ProtocolKind::kSp;
    // Replace the SP side by the product formula where it is exact (Q_c = 1).
    bool analytic_sp = false;
};

std::vector<SpeedupCell> speedup_report(const Scenario& base, const SpeedupRequest& req,
                                        Execution exec = Execution::kParallel);

/// Analytic SP rate for a scenario at Q_c = 1. Random users are averaged the way
/// the simulated estimator would: trials / sum of expected waiting times.
double analytic_sp_rate(const Scenario& s, const Topology& t, std::uint64_t stream);

Table stats_table(const Scenario& s, const ScenarioResult& r);
Table sweep_table(const std::string& axis, const std::vector<SweepPoint>& points);
Table speedup_table(const SpeedupRequest& req, const std::vector<SpeedupCell>& cells);

/// Closed-form quantities for a scenario: link presence, the cut bound, the SP
/// product (fixed users) and the component-based estimate (random users).
Table analyze_scenario(const Scenario& s, std::size_t samples);

/// Parses "a:b:step" (inclusive, tolerant to rounding) or a comma list.
std::vector<double> parse_range(const std::string& text);

} // namespace ghznet
