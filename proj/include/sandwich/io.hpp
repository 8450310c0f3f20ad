#pragma once

// File formats and CLI entry points. All interchange values are USD.
//
// Pool snapshot JSON:
//   {"type": "cpmm", "fee": 0.003, "reserves": {"x": 1e6, "y": 1e6}}
//   {"type": "clmm", "fee": 0.0005, "boundaries": [...], "liquidities": [...],
//    "sqrt_price": 1.0}
// Scenario JSON mirrors econ::SandwichScenario field names; a null or
// missing frontrun_cap means uncapped.
// Sequencer config / attacker strategy JSON mirror the seq:: structs.
// Swap events arrive as CSV (header-named columns) or JSON-lines.
// Registry JSON: {"system_contracts": [...], "shared_routers": [...]}.
// Liquidity snapshots JSON: array of {chain?, pool_address, block_start,
// block_end, fee, tick_width, depth_usd | pool}.
// Actor activity CSV: chain,actor_id,total_tx,days.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sandwich/detect.hpp"
#include "sandwich/econ.hpp"
#include "sandwich/seq.hpp"

namespace sandwich::io {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

amm::Pool load_pool(const std::string& path);
// slippage_cost_given reports whether the file carried the field; when it
// did not, optimize derives the cost from the attacker's own round trip.
econ::SandwichScenario load_scenario(const std::string& path,
                                     bool* slippage_cost_given = nullptr);
seq::SequencerConfig load_sequencer_config(const std::string& path);
seq::AttackerStrategy load_attacker_strategy(const std::string& path);
detect::ActorRegistry load_registry(const std::string& path);
std::vector<detect::SnapshotEntry> load_snapshots(const std::string& path);
std::vector<detect::ActorActivity> load_actor_activity(const std::string& path);

struct EventLoadResult {
    std::vector<detect::SwapEvent> events;
    long skipped_rows = 0;
    long total_rows = 0;
    std::vector<std::string> warnings;
};

// CSV when the file ends in .csv, JSON-lines otherwise.
EventLoadResult load_events(const std::string& path);

// Timestamp for run reports: SOURCE_DATE_EPOCH when set (reproducible
// runs), otherwise empty. Outputs stay byte-identical for identical inputs.
std::string report_timestamp();

struct InputDigest {
    std::string path;
    std::string sha256;
};

struct OptimizeArgs {
    std::string scenario_path;
    std::string pool_path;
    std::string out_dir;                   // empty: print to stdout only
    std::optional<double> slippage_tolerance;  // derive the cap when set
};

struct SimulateArgs {
    std::string config_path;
    std::string strategy_path;
    std::string out_dir;
    long trials = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    bool sweep = false;  // also emit the documented parameter sweep CSV
};

struct DetectArgs {
    std::string events_path;
    std::string registry_path;    // empty: degraded tx_to-only attribution
    std::string snapshots_path;   // empty: PnL left unavailable
    std::string tx_counts_path;   // empty: no efficiency table
    std::string out_dir;
    double tolerance = 0.10;      // strong-signature threshold
    double default_gas_cost = 0.45;
    double max_skip_fraction = 0.10;
};

struct MinsizeArgs {
    std::string config_path;  // empty: documented default grid
    std::string out_dir;
};

int cmd_optimize(const OptimizeArgs& args, std::ostream& out, std::ostream& diag);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& diag);
int cmd_detect(const DetectArgs& args, std::ostream& out, std::ostream& diag);
int cmd_minsize(const MinsizeArgs& args, std::ostream& out, std::ostream& diag);

}  // namespace sandwich::io
