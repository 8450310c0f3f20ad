#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sandwich/io.hpp"
#include "sandwich/sha256.hpp"

namespace sandwich::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string{};
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

json base_report(const char* subcommand, const std::vector<InputDigest>& inputs) {
    json report;
    report["tool"] = "sandwich";
    report["version"] = kVersion;
    report["subcommand"] = subcommand;
    report["timestamp"] = report_timestamp();
    json in = json::array();
    for (const InputDigest& d : inputs) {
        in.push_back({{"path", d.path}, {"sha256", d.sha256}});
    }
    report["inputs"] = in;
    return report;
}

json report_to_json(const seq::CoInclusionReport& r) {
    return {{"p_batch", r.p_batch},
            {"p_priority", r.p_priority},
            {"p_arrival", r.p_arrival},
            {"p_co_inclusion", r.p_co_inclusion},
            {"method", r.method},
            {"std_error", r.std_error},
            {"structurally_valid", r.structurally_valid}};
}

json event_to_json(const detect::SwapEvent& e) {
    json j = {{"tx_hash", e.tx_hash},
              {"tx_index", e.tx_index},
              {"direction", amm::to_string(e.direction)},
              {"amount_in_usd", e.amount_in_usd}};
    if (e.gas_cost_usd) j["gas_cost_usd"] = *e.gas_cost_usd;
    return j;
}

json triple_to_json(const detect::CandidateTriple& t) {
    json victims = json::array();
    for (const detect::SwapEvent& v : t.victims) victims.push_back(event_to_json(v));
    json j = {{"chain", t.front.chain},
              {"block_number", t.front.block_number},
              {"pool_address", t.front.pool_address},
              {"actor_id", t.actor_id},
              {"front", event_to_json(t.front)},
              {"victims", victims},
              {"back", event_to_json(t.back)},
              {"victim_total_usd", t.victim_total_usd()},
              {"strong_signature", t.metrics.strong_signature}};
    if (!t.front.currency_pair.empty()) j["currency_pair"] = t.front.currency_pair;
    j["back_front_ratio"] =
        t.metrics.back_front_ratio ? json(*t.metrics.back_front_ratio) : json(nullptr);
    if (t.metrics.pnl) {
        j["pnl"] = {{"gross_usd", t.metrics.pnl->gross},
                    {"net_slippage_usd", t.metrics.pnl->net_slippage},
                    {"net_usd", t.metrics.pnl->net}};
    } else {
        j["pnl"] = nullptr;
    }
    return j;
}

std::string summary_csv(const std::vector<detect::ChainSummary>& rows) {
    std::ostringstream out;
    out << "chain,count,front_median,front_q1,front_q3,victim_median,victim_q1,victim_q3,"
           "back_median,back_q1,back_q3,strong_signature_share,ratio_median,ratio_q1,ratio_q3,"
           "corr_victim_front,corr_victim_back,corr_front_back,pnl_gross_median,pnl_gross_q1,"
           "pnl_gross_q3,pnl_net_slippage_median,pnl_net_slippage_q1,pnl_net_slippage_q3,"
           "pnl_net_median,pnl_net_q1,pnl_net_q3\n";
    for (const detect::ChainSummary& r : rows) {
        out << r.chain << ',' << r.count << ',' << opt_cell(r.front_median) << ','
            << opt_cell(r.front_q1) << ',' << opt_cell(r.front_q3) << ','
            << opt_cell(r.victim_median) << ',' << opt_cell(r.victim_q1) << ','
            << opt_cell(r.victim_q3) << ',' << opt_cell(r.back_median) << ','
            << opt_cell(r.back_q1) << ',' << opt_cell(r.back_q3) << ','
            << opt_cell(r.strong_signature_share) << ',' << opt_cell(r.ratio_median) << ','
            << opt_cell(r.ratio_q1) << ',' << opt_cell(r.ratio_q3) << ','
            << opt_cell(r.corr_victim_front) << ',' << opt_cell(r.corr_victim_back) << ','
            << opt_cell(r.corr_front_back) << ',' << opt_cell(r.pnl_gross_median) << ','
            << opt_cell(r.pnl_gross_q1) << ',' << opt_cell(r.pnl_gross_q3) << ','
            << opt_cell(r.pnl_net_slippage_median) << ',' << opt_cell(r.pnl_net_slippage_q1) << ','
            << opt_cell(r.pnl_net_slippage_q3) << ',' << opt_cell(r.pnl_net_median) << ','
            << opt_cell(r.pnl_net_q1) << ',' << opt_cell(r.pnl_net_q3) << '\n';
    }
    return out.str();
}

std::string md_cell(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string{"-"};
}

std::string summary_markdown(const std::vector<detect::ChainSummary>& rows) {
    std::ostringstream out;
    out << "| Chain | Count | Strong Sig. | Median b/f | IQR b/f | V<->F | V<->B | F<->B | "
           "Gross PnL | Net Slip. | Net PnL |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const detect::ChainSummary& r : rows) {
        std::string iqr = "-";
        if (r.ratio_q1 && r.ratio_q3) {
            iqr = "[" + fmt(*r.ratio_q1) + ", " + fmt(*r.ratio_q3) + "]";
        }
        std::string strong = "-";
        if (r.strong_signature_share) {
            strong = fmt(*r.strong_signature_share * 100.0) + "%";
        }
        out << "| " << r.chain << " | " << r.count << " | " << strong << " | "
            << md_cell(r.ratio_median) << " | " << iqr << " | " << md_cell(r.corr_victim_front)
            << " | " << md_cell(r.corr_victim_back) << " | " << md_cell(r.corr_front_back)
            << " | " << md_cell(r.pnl_gross_median) << " | "
            << md_cell(r.pnl_net_slippage_median) << " | " << md_cell(r.pnl_net_median)
            << " |\n";
    }
    return out.str();
}

std::string efficiency_csv(const detect::EfficiencyReport& report) {
    std::ostringstream out;
    out << "chain,actor_id,sandwich_count,total_tx,avg_daily_tx,efficiency\n";
    for (const detect::EfficiencyRecord& r : report.actors) {
        out << r.chain << ',' << r.actor_id << ',' << r.sandwich_count << ','
            << opt_cell(r.total_tx) << ',' << opt_cell(r.avg_daily_tx) << ','
            << opt_cell(r.efficiency) << '\n';
    }
    out << "\nchain,bot_count,sandwich_min,sandwich_median,sandwich_max,daily_tx_min,"
           "daily_tx_median,daily_tx_max\n";
    for (const detect::ChainBotSummary& r : report.chains) {
        out << r.chain << ',' << r.bot_count << ',' << r.sandwich_min << ','
            << fmt(r.sandwich_median) << ',' << r.sandwich_max << ','
            << opt_cell(r.daily_tx_min) << ',' << opt_cell(r.daily_tx_median) << ','
            << opt_cell(r.daily_tx_max) << '\n';
    }
    return out.str();
}

}  // namespace

int cmd_optimize(const OptimizeArgs& args, std::ostream& out, std::ostream& diag) {
    econ::SandwichScenario scenario;
    amm::Pool pool;
    std::vector<InputDigest> inputs;
    bool slippage_cost_given = false;
    try {
        scenario = load_scenario(args.scenario_path, &slippage_cost_given);
        pool = load_pool(args.pool_path);
        inputs = {{args.scenario_path, sha256_hex_file(args.scenario_path)},
                  {args.pool_path, sha256_hex_file(args.pool_path)}};
        // The pool is authoritative for depth and fee.
        const double depth = amm::effective_depth(pool);
        const double fee = amm::pool_fee(pool);
        if (scenario.depth > 0.0 && std::abs(scenario.depth - depth) > 1e-9 * depth) {
            diag << "warning: scenario depth " << fmt(scenario.depth)
                 << " overridden by pool depth " << fmt(depth) << "\n";
        }
        scenario.depth = depth;
        scenario.fee = fee;
        scenario.validate();
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        const bool clmm = std::holds_alternative<amm::ClmmPool>(pool);
        econ::AttackPlan plan;
        if (clmm) {
            plan = econ::optimal_frontrun_clmm(std::get<amm::ClmmPool>(pool), scenario);
        } else {
            plan = econ::optimal_frontrun_cpmm(scenario);
        }
        const double quadratic = econ::incremental_profit_quadratic(
            plan.frontrun_size, scenario.victim_input, scenario.fee, scenario.depth);
        const double oracle = econ::exact_sandwich_profit(
            pool, plan.frontrun_size, scenario.victim_input, scenario.fee, scenario.gas_cost);
        if (!slippage_cost_given) {
            scenario.slippage_cost =
                econ::attacker_roundtrip_cost(pool, plan.frontrun_size, scenario.fee);
        }
        const double ev = econ::expected_value(scenario, plan.frontrun_size);

        json result;
        result["plan"] = {{"frontrun_size_usd", plan.frontrun_size},
                          {"regime", econ::to_string(plan.regime)},
                          {"objective_value_usd", plan.expected_profit}};
        result["profit_at_plan"] = {{"quadratic_model_usd", quadratic},
                                    {"exact_replay_usd", oracle}};
        json ev_breakdown = {{"success_prob", scenario.success_prob},
                             {"gas_cost_usd", scenario.gas_cost},
                             {"slippage_cost_usd", scenario.slippage_cost},
                             {"slippage_cost_derived", !slippage_cost_given},
                             {"expected_value_usd", ev}};
        if (scenario.success_prob > 0.0) {
            ev_breakdown["min_victim_size_usd"] =
                econ::min_victim_size(scenario.depth, scenario.gas_cost,
                                      scenario.slippage_cost, scenario.success_prob);
        }
        result["expected_value"] = ev_breakdown;
        result["pool"] = {{"type", clmm ? "clmm" : "cpmm"},
                          {"depth_usd", scenario.depth},
                          {"fee", scenario.fee}};
        if (args.slippage_tolerance) {
            const econ::SlippageCap cap =
                econ::slippage_cap(pool, scenario.victim_input, *args.slippage_tolerance);
            result["slippage_cap"] = {{"tolerance", *args.slippage_tolerance},
                                      {"cap_usd", cap.cap},
                                      {"capacity_bounded", cap.capacity_bounded}};
        }

        json report = base_report("optimize", inputs);
        report["parameters"] = {{"victim_input_usd", scenario.victim_input},
                                {"frontrun_cap_usd",
                                 std::isfinite(scenario.frontrun_cap)
                                     ? json(scenario.frontrun_cap)
                                     : json(nullptr)},
                                {"tick_width", scenario.tick_width}};
        report["results"] = result;

        out << "plan: frontrun " << fmt(plan.frontrun_size) << " USD (" << econ::to_string(plan.regime)
            << ")\n"
            << "profit at plan: quadratic " << fmt(quadratic) << " USD, exact replay "
            << fmt(oracle) << " USD\n"
            << "expected value: " << fmt(ev) << " USD (success prob "
            << fmt(scenario.success_prob) << ")\n";
        if (!args.out_dir.empty()) {
            write_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
        }
        return kExitOk;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& diag) {
    seq::SequencerConfig config;
    seq::AttackerStrategy strategy;
    std::vector<InputDigest> inputs;
    try {
        config = load_sequencer_config(args.config_path);
        strategy = load_attacker_strategy(args.strategy_path);
        if (args.trials < 1) throw ValidationError("trials must be at least 1");
        inputs = {{args.config_path, sha256_hex_file(args.config_path)},
                  {args.strategy_path, sha256_hex_file(args.strategy_path)}};
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        const seq::CoInclusionReport analytic = seq::co_inclusion(strategy, config);
        const seq::CoInclusionReport mc =
            seq::simulate_co_inclusion(strategy, config, args.trials, args.seed, args.threads);
        const double difference = std::abs(mc.p_co_inclusion - analytic.p_co_inclusion);
        const bool agree = difference <= 3.0 * mc.std_error;

        json report = base_report("simulate", inputs);
        report["seed"] = args.seed;
        report["parameters"] = {{"trials", args.trials},
                                {"threads", args.threads},
                                {"policy", seq::to_string(config.policy)}};
        report["results"] = {{"analytic", report_to_json(analytic)},
                             {"monte_carlo", report_to_json(mc)},
                             {"agreement", {{"difference", difference},
                                            {"three_std_errors", 3.0 * mc.std_error},
                                            {"within_three_std_errors", agree}}}};

        out << "analytic co-inclusion:    " << fmt(analytic.p_co_inclusion) << "\n"
            << "monte-carlo co-inclusion: " << fmt(mc.p_co_inclusion) << " (std err "
            << fmt(mc.std_error) << ", " << args.trials << " trials)\n"
            << "agreement: " << (agree ? "within" : "OUTSIDE") << " 3 standard errors\n";
        if (!analytic.structurally_valid) {
            diag << "warning: tip_front <= tip_back cannot order a sandwich under PGA\n";
        }

        if (!args.out_dir.empty()) {
            write_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
            if (args.sweep) {
                std::ostringstream csv;
                csv << "policy,batch_window,background_rate,delay,tip_front,tip_back,central,"
                       "p_batch,p_priority,p_arrival,p_co_inclusion\n";
                for (const seq::SweepRow& row : seq::central_parameter_sweep()) {
                    csv << seq::to_string(row.policy) << ',' << fmt(row.batch_window) << ','
                        << fmt(row.background_rate) << ',' << fmt(row.delay) << ','
                        << fmt(row.tip_front) << ',' << fmt(row.tip_back) << ','
                        << (row.central ? "true" : "false") << ',' << fmt(row.report.p_batch)
                        << ',' << fmt(row.report.p_priority) << ',' << fmt(row.report.p_arrival)
                        << ',' << fmt(row.report.p_co_inclusion) << '\n';
                }
                write_file(fs::path(args.out_dir) / "sweep.csv", csv.str());
            }
        }
        return kExitOk;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_detect(const DetectArgs& args, std::ostream& out, std::ostream& diag) {
    EventLoadResult loaded;
    detect::ActorRegistry registry;
    std::vector<detect::SnapshotEntry> snapshots;
    std::vector<detect::ActorActivity> activity;
    std::vector<InputDigest> inputs;
    bool degraded_attribution = false;
    try {
        loaded = load_events(args.events_path);
        inputs.push_back({args.events_path, sha256_hex_file(args.events_path)});
        if (loaded.total_rows > 0 &&
            static_cast<double>(loaded.skipped_rows) >
                args.max_skip_fraction * static_cast<double>(loaded.total_rows)) {
            for (const std::string& w : loaded.warnings) diag << w << "\n";
            diag << "error: " << loaded.skipped_rows << " of " << loaded.total_rows
                 << " rows unreadable, above the " << fmt(args.max_skip_fraction * 100.0)
                 << "% limit\n";
            return kExitValidation;
        }
        if (!args.registry_path.empty()) {
            registry = load_registry(args.registry_path);
            inputs.push_back({args.registry_path, sha256_hex_file(args.registry_path)});
        } else {
            degraded_attribution = true;
            diag << "WARNING: no actor registry given; falling back to tx_to-only attribution, "
                    "shared-router traffic will collapse into single actors\n";
        }
        if (!args.snapshots_path.empty()) {
            snapshots = load_snapshots(args.snapshots_path);
            inputs.push_back({args.snapshots_path, sha256_hex_file(args.snapshots_path)});
        }
        if (!args.tx_counts_path.empty()) {
            activity = load_actor_activity(args.tx_counts_path);
            inputs.push_back({args.tx_counts_path, sha256_hex_file(args.tx_counts_path)});
        }
        if (args.out_dir.empty()) throw ValidationError("detect needs an output directory");
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        detect::DetectOptions options;
        options.strong_signature_tolerance = args.tolerance;
        options.default_gas_cost = args.default_gas_cost;
        std::set<std::string> chain_set;
        for (const detect::SwapEvent& e : loaded.events) chain_set.insert(e.chain);
        detect::DetectResult result =
            detect::run_detection(std::move(loaded.events), registry, snapshots, options);

        for (const std::string& w : loaded.warnings) diag << "warning: " << w << "\n";
        for (const std::string& w : result.warnings) diag << "warning: " << w << "\n";

        std::ostringstream jsonl;
        for (const detect::CandidateTriple& t : result.triples) {
            chain_set.insert(t.front.chain);
            jsonl << triple_to_json(t).dump() << "\n";
        }
        const std::vector<std::string> chains(chain_set.begin(), chain_set.end());
        const std::vector<detect::ChainSummary> summary =
            detect::summary_stats(result.triples, chains);

        write_file(fs::path(args.out_dir) / "triples.jsonl", jsonl.str());
        write_file(fs::path(args.out_dir) / "summary.csv", summary_csv(summary));
        write_file(fs::path(args.out_dir) / "summary.md", summary_markdown(summary));
        if (!activity.empty()) {
            write_file(fs::path(args.out_dir) / "efficiency.csv",
                       efficiency_csv(detect::bot_efficiency(result.triples, activity)));
        }

        json report = base_report("detect", inputs);
        report["parameters"] = {{"strong_signature_tolerance", args.tolerance},
                                {"default_gas_cost_usd", args.default_gas_cost},
                                {"degraded_attribution", degraded_attribution}};
        report["results"] = {{"events_read", loaded.total_rows},
                             {"rows_skipped", loaded.skipped_rows},
                             {"events_dropped", static_cast<long>(result.warnings.size())},
                             {"atomic_arbitrage_txs_removed", result.removed_arbitrage_txs},
                             {"triples_found", static_cast<long>(result.triples.size())}};
        write_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");

        out << "events: " << loaded.total_rows << " rows, " << loaded.skipped_rows
            << " skipped; arbitrage txs removed: " << result.removed_arbitrage_txs.size()
            << "; triples: " << result.triples.size() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_minsize(const MinsizeArgs& args, std::ostream& out, std::ostream& diag) {
    std::vector<double> depths = {5e4, 1e5, 2e5, 3e5};
    std::vector<double> probs = {0.05, 0.1, 0.2};
    std::vector<double> costs = {0.2, 0.45, 0.7};
    std::vector<InputDigest> inputs;
    try {
        if (!args.config_path.empty()) {
            std::ifstream in(args.config_path);
            if (!in) throw ParseError("cannot open " + args.config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ParseError(args.config_path + ": " + e.what());
            }
            if (j.contains("depths")) depths = j.at("depths").get<std::vector<double>>();
            if (j.contains("probs")) probs = j.at("probs").get<std::vector<double>>();
            if (j.contains("costs")) costs = j.at("costs").get<std::vector<double>>();
            inputs.push_back({args.config_path, sha256_hex_file(args.config_path)});
        }
        for (double d : depths) {
            if (!std::isfinite(d) || d <= 0.0) throw ValidationError("depths must be positive");
        }
        for (double c : costs) {
            if (!std::isfinite(c) || c < 0.0) throw ValidationError("costs must be non-negative");
        }
        for (double p : probs) {
            if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
                throw ValidationError("probabilities must lie in [0, 1]");
            }
        }
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        std::ostringstream csv;
        csv << "depth_usd,success_prob,cost_usd,min_victim_usd\n";
        for (double depth : depths) {
            for (double prob : probs) {
                for (double cost : costs) {
                    csv << fmt(depth) << ',' << fmt(prob) << ',' << fmt(cost) << ',';
                    if (prob <= 0.0) {
                        csv << "infeasible";
                    } else {
                        csv << fmt(econ::min_victim_size(depth, cost, 0.0, prob));
                    }
                    csv << '\n';
                }
            }
        }
        out << csv.str();
        if (!args.out_dir.empty()) {
            write_file(fs::path(args.out_dir) / "minsize.csv", csv.str());
            json report = base_report("minsize", inputs);
            report["parameters"] = {{"depths", depths}, {"probs", probs}, {"costs", costs}};
            write_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
        }
        return kExitOk;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace sandwich::io
