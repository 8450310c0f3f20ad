#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sandwich/io.hpp"

namespace sandwich::io {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ParseError(where + ": missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

seq::Distribution parse_distribution(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ParseError(where + ": distribution needs a 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") {
        return seq::Distribution::exponential(require_number(j, "mean", where));
    }
    if (kind == "lognormal") {
        return seq::Distribution::lognormal(require_number(j, "log_mean", where),
                                            require_number(j, "log_std", where));
    }
    if (kind == "point") {
        return seq::Distribution::point(require_number(j, "value", where));
    }
    if (kind == "histogram") {
        if (!j.contains("values") || !j.contains("weights")) {
            throw ParseError(where + ": histogram needs 'values' and 'weights'");
        }
        return seq::Distribution::histogram(j.at("values").get<std::vector<double>>(),
                                            j.at("weights").get<std::vector<double>>());
    }
    throw ParseError(where + ": unknown distribution kind '" + kind + "'");
}

amm::Direction parse_direction(const std::string& raw, const std::string& where) {
    const std::string d = lower(raw);
    if (d == "xtoy" || d == "x_to_y") return amm::Direction::x_to_y;
    if (d == "ytox" || d == "y_to_x") return amm::Direction::y_to_x;
    throw ParseError(where + ": direction must be XtoY or YtoX, got '" + raw + "'");
}

bool parse_bool(const std::string& raw, const std::string& where) {
    const std::string b = lower(raw);
    if (b == "true" || b == "1" || b == "yes") return true;
    if (b == "false" || b == "0" || b == "no" || b.empty()) return false;
    throw ParseError(where + ": expected a boolean, got '" + raw + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    for (std::string& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
        size_t start = 0;
        while (start < f.size() && f[start] == ' ') ++start;
        f.erase(0, start);
    }
    return fields;
}

detect::SwapEvent event_from_json(const json& j, const std::string& where) {
    detect::SwapEvent e;
    e.chain = j.at("chain").get<std::string>();
    e.block_number = j.at("block_number").get<long long>();
    e.tx_hash = j.at("tx_hash").get<std::string>();
    e.tx_index = j.at("tx_index").get<long>();
    if (j.contains("log_index")) e.log_index = j.at("log_index").get<long>();
    e.pool_address = lower(j.at("pool_address").get<std::string>());
    if (j.contains("router_pool")) e.router_pool = j.at("router_pool").get<bool>();
    if (j.contains("currency_pair") && j.at("currency_pair").is_string()) {
        e.currency_pair = j.at("currency_pair").get<std::string>();
    }
    e.tx_from = lower(j.value("tx_from", std::string{}));
    e.tx_to = lower(j.value("tx_to", std::string{}));
    e.taker = lower(j.value("taker", std::string{}));
    e.direction = parse_direction(j.at("direction").get<std::string>(), where);
    e.amount_in_usd = require_number(j, "amount_in_usd", where);
    if (j.contains("amount_out_usd")) e.amount_out_usd = j.at("amount_out_usd").get<double>();
    if (j.contains("gas_cost_usd") && j.at("gas_cost_usd").is_number()) {
        e.gas_cost_usd = j.at("gas_cost_usd").get<double>();
    }
    e.validate();
    return e;
}

}  // namespace

amm::Pool load_pool(const std::string& path) {
    const json j = load_json_file(path);
    const std::string type = j.value("type", std::string{});
    if (type == "cpmm") {
        amm::CpmmPool pool;
        pool.fee = require_number(j, "fee", path);
        if (!j.contains("reserves")) throw ParseError(path + ": cpmm pool needs 'reserves'");
        pool.reserve_x = require_number(j.at("reserves"), "x", path);
        pool.reserve_y = require_number(j.at("reserves"), "y", path);
        pool.validate();
        return pool;
    }
    if (type == "clmm") {
        amm::ClmmPool pool;
        pool.fee = require_number(j, "fee", path);
        if (!j.contains("boundaries") || !j.contains("liquidities")) {
            throw ParseError(path + ": clmm pool needs 'boundaries' and 'liquidities'");
        }
        pool.tick_boundaries = j.at("boundaries").get<std::vector<double>>();
        pool.tick_liquidity = j.at("liquidities").get<std::vector<double>>();
        pool.sqrt_price = require_number(j, "sqrt_price", path);
        pool.validate();
        return pool;
    }
    throw ParseError(path + ": pool 'type' must be cpmm or clmm");
}

econ::SandwichScenario load_scenario(const std::string& path, bool* slippage_cost_given) {
    const json j = load_json_file(path);
    econ::SandwichScenario s;
    s.victim_input = require_number(j, "victim_input", path);
    if (j.contains("frontrun_cap") && j.at("frontrun_cap").is_number()) {
        s.frontrun_cap = j.at("frontrun_cap").get<double>();
    }
    if (j.contains("fee")) s.fee = j.at("fee").get<double>();
    if (j.contains("depth")) s.depth = j.at("depth").get<double>();
    if (j.contains("tick_width")) s.tick_width = j.at("tick_width").get<int>();
    if (j.contains("gas_cost")) s.gas_cost = j.at("gas_cost").get<double>();
    if (j.contains("slippage_cost")) s.slippage_cost = j.at("slippage_cost").get<double>();
    if (slippage_cost_given != nullptr) *slippage_cost_given = j.contains("slippage_cost");
    if (j.contains("success_prob")) s.success_prob = j.at("success_prob").get<double>();
    return s;
}

seq::SequencerConfig load_sequencer_config(const std::string& path) {
    const json j = load_json_file(path);
    seq::SequencerConfig c;
    const std::string policy = lower(j.value("policy", std::string{"fcfs"}));
    if (policy == "fcfs") {
        c.policy = seq::Policy::fcfs;
    } else if (policy == "pga") {
        c.policy = seq::Policy::pga;
    } else {
        throw ParseError(path + ": policy must be fcfs or pga");
    }
    if (j.contains("block_time")) c.block_time = j.at("block_time").get<double>();
    if (j.contains("batch_window")) c.batch_window = j.at("batch_window").get<double>();
    if (j.contains("latency_std")) c.latency_std = j.at("latency_std").get<double>();
    if (j.contains("background_rate")) c.background_rate = j.at("background_rate").get<double>();
    if (j.contains("tip_distribution")) {
        c.tip_distribution = parse_distribution(j.at("tip_distribution"), path);
    }
    if (j.contains("batch_size_model")) {
        const json& m = j.at("batch_size_model");
        const std::string kind = lower(m.value("kind", std::string{"poisson"}));
        if (kind == "poisson") {
            c.batch_size_model.kind = seq::BatchSizeModel::Kind::poisson;
            if (m.contains("mean") && m.at("mean").is_number()) {
                c.batch_size_model.mean = m.at("mean").get<double>();
            }
        } else if (kind == "fixed") {
            c.batch_size_model.kind = seq::BatchSizeModel::Kind::fixed;
            c.batch_size_model.fixed_k = m.value("k", 0L);
        } else {
            throw ParseError(path + ": batch size model kind must be poisson or fixed");
        }
    }
    c.validate();
    return c;
}

seq::AttackerStrategy load_attacker_strategy(const std::string& path) {
    const json j = load_json_file(path);
    seq::AttackerStrategy s;
    if (j.contains("delay")) s.delay = j.at("delay").get<double>();
    if (j.contains("tip_front")) s.tip_front = j.at("tip_front").get<double>();
    if (j.contains("tip_back")) s.tip_back = j.at("tip_back").get<double>();
    if (j.contains("victim_tip_prior")) {
        s.victim_tip_prior = parse_distribution(j.at("victim_tip_prior"), path);
    }
    s.validate();
    return s;
}

detect::ActorRegistry load_registry(const std::string& path) {
    const json j = load_json_file(path);
    detect::ActorRegistry r;
    for (const auto& a : j.value("system_contracts", std::vector<std::string>{})) {
        r.system_contracts.insert(lower(a));
    }
    for (const auto& a : j.value("shared_routers", std::vector<std::string>{})) {
        r.shared_routers.insert(lower(a));
    }
    return r;
}

std::vector<detect::SnapshotEntry> load_snapshots(const std::string& path) {
    const json j = load_json_file(path);
    if (!j.is_array()) throw ParseError(path + ": snapshot file must be a JSON array");
    std::vector<detect::SnapshotEntry> out;
    for (const json& row : j) {
        detect::SnapshotEntry e;
        e.chain = lower(row.value("chain", std::string{}));
        e.pool_address = lower(row.at("pool_address").get<std::string>());
        e.block_start = row.value("block_start", 0LL);
        e.block_end = row.value("block_end", std::numeric_limits<long long>::max());
        e.context.fee = require_number(row, "fee", path);
        e.context.tick_width = row.value("tick_width", 1);
        if (row.contains("depth_usd")) {
            e.context.depth = row.at("depth_usd").get<double>();
        } else if (row.contains("pool")) {
            // Derive the depth from an embedded pool snapshot.
            const json p = row.at("pool");
            amm::Pool pool = [&]() -> amm::Pool {
                const std::string type = p.value("type", std::string{});
                if (type == "cpmm") {
                    amm::CpmmPool cp;
                    cp.fee = require_number(p, "fee", path);
                    cp.reserve_x = require_number(p.at("reserves"), "x", path);
                    cp.reserve_y = require_number(p.at("reserves"), "y", path);
                    return cp;
                }
                if (type == "clmm") {
                    amm::ClmmPool cl;
                    cl.fee = require_number(p, "fee", path);
                    cl.tick_boundaries = p.at("boundaries").get<std::vector<double>>();
                    cl.tick_liquidity = p.at("liquidities").get<std::vector<double>>();
                    cl.sqrt_price = require_number(p, "sqrt_price", path);
                    return cl;
                }
                throw ParseError(path + ": embedded pool 'type' must be cpmm or clmm");
            }();
            e.context.depth = amm::effective_depth(pool);
        } else {
            throw ParseError(path + ": snapshot rows need 'depth_usd' or 'pool'");
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<detect::ActorActivity> load_actor_activity(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty activity file");
    const std::vector<std::string> header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        for (size_t i = 0; i < header.size(); ++i) {
            if (lower(header[i]) == name) return static_cast<long>(i);
        }
        return -1L;
    };
    const long c_chain = column("chain");
    const long c_actor = column("actor_id");
    const long c_tx = column("total_tx");
    const long c_days = column("days");
    if (c_chain < 0 || c_actor < 0 || c_tx < 0) {
        throw ParseError(path + ": activity CSV needs chain, actor_id, total_tx columns");
    }
    std::vector<detect::ActorActivity> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        detect::ActorActivity a;
        a.chain = f.at(static_cast<size_t>(c_chain));
        a.actor_id = lower(f.at(static_cast<size_t>(c_actor)));
        a.total_tx = std::stod(f.at(static_cast<size_t>(c_tx)));
        if (c_days >= 0 && static_cast<size_t>(c_days) < f.size() && !f[static_cast<size_t>(c_days)].empty()) {
            a.days = std::stod(f[static_cast<size_t>(c_days)]);
        }
        out.push_back(std::move(a));
    }
    return out;
}

EventLoadResult load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    EventLoadResult result;

    const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
    std::string line;
    if (csv) {
        if (!std::getline(in, line)) return result;  // empty file: no events
        const std::vector<std::string> header = split_csv_line(line);
        std::map<std::string, size_t> col;
        for (size_t i = 0; i < header.size(); ++i) col[lower(header[i])] = i;
        auto need = [&](const char* name) {
            auto it = col.find(name);
            if (it == col.end()) throw ParseError(path + ": missing CSV column '" + name + "'");
            return it->second;
        };
        const size_t c_chain = need("chain");
        const size_t c_block = need("block_number");
        const size_t c_hash = need("tx_hash");
        const size_t c_index = need("tx_index");
        const size_t c_pool = need("pool_address");
        const size_t c_from = need("tx_from");
        const size_t c_to = need("tx_to");
        const size_t c_dir = need("direction");
        const size_t c_in = need("amount_in_usd");
        auto optional_col = [&](const char* name) -> std::optional<size_t> {
            auto it = col.find(name);
            if (it == col.end()) return std::nullopt;
            return it->second;
        };
        const auto c_log = optional_col("log_index");
        const auto c_router = optional_col("router_pool");
        const auto c_pair = optional_col("currency_pair");
        const auto c_taker = optional_col("taker");
        const auto c_out = optional_col("amount_out_usd");
        const auto c_gas = optional_col("gas_cost_usd");

        long row_number = 1;
        while (std::getline(in, line)) {
            ++row_number;
            if (line.empty() || line == "\r") continue;
            ++result.total_rows;
            try {
                const std::vector<std::string> f = split_csv_line(line);
                auto field = [&](size_t i) -> const std::string& {
                    if (i >= f.size()) throw ParseError("row too short");
                    return f[i];
                };
                detect::SwapEvent e;
                e.chain = field(c_chain);
                e.block_number = std::stoll(field(c_block));
                e.tx_hash = lower(field(c_hash));
                e.tx_index = std::stol(field(c_index));
                e.pool_address = lower(field(c_pool));
                e.tx_from = lower(field(c_from));
                e.tx_to = lower(field(c_to));
                e.direction = parse_direction(field(c_dir), path);
                e.amount_in_usd = std::stod(field(c_in));
                if (c_log && *c_log < f.size() && !f[*c_log].empty()) e.log_index = std::stol(f[*c_log]);
                if (c_router && *c_router < f.size()) e.router_pool = parse_bool(f[*c_router], path);
                if (c_pair && *c_pair < f.size()) e.currency_pair = f[*c_pair];
                if (c_taker && *c_taker < f.size()) e.taker = lower(f[*c_taker]);
                if (c_out && *c_out < f.size() && !f[*c_out].empty()) {
                    e.amount_out_usd = std::stod(f[*c_out]);
                }
                if (c_gas && *c_gas < f.size() && !f[*c_gas].empty()) {
                    e.gas_cost_usd = std::stod(f[*c_gas]);
                }
                e.validate();
                result.events.push_back(std::move(e));
            } catch (const std::exception& ex) {
                ++result.skipped_rows;
                result.warnings.push_back(path + ":" + std::to_string(row_number) + ": " + ex.what());
            }
        }
    } else {
        long row_number = 0;
        while (std::getline(in, line)) {
            ++row_number;
            if (line.empty() || line == "\r") continue;
            ++result.total_rows;
            try {
                result.events.push_back(event_from_json(json::parse(line), path));
            } catch (const std::exception& ex) {
                ++result.skipped_rows;
                result.warnings.push_back(path + ":" + std::to_string(row_number) + ": " + ex.what());
            }
        }
    }
    return result;
}

std::string report_timestamp() {
    const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
    if (epoch == nullptr || *epoch == '\0') return {};
    char* end = nullptr;
    const long long seconds = std::strtoll(epoch, &end, 10);
    if (end == epoch) return {};
    const time_t t = static_cast<time_t>(seconds);
    tm utc{};
    gmtime_r(&t, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

}  // namespace sandwich::io
