#include "ncsched/config.hpp"

#include <set>

namespace ncsched {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

const json& require_object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected an object");
    return v;
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

template <typename Fn>
auto parse_enum(const json& v, const std::string& path, Fn fn) {
    const std::string s = get_string(v, path);
    try {
        return fn(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

double probability(const json& v, const std::string& path) {
    const double e = get_number(v, path);
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError(path, "erasure probability must lie in [0, 1)");
    return e;
}

ChannelModel parse_channel(const json& ch, int n_users) {
    require_object(ch, "channel");
    reject_unknown(ch, "channel", {"mode", "eps", "eps_range"});
    ChannelModel model;
    const std::string mode = ch.contains("mode") ? get_string(ch["mode"], "channel.mode") : "fixed";
    if (mode == "fixed") {
        model.mode = ChannelMode::fixed;
        if (ch.contains("eps_range"))
            throw ConfigError("channel.eps_range", "only valid with mode uniform-fading");
        if (!ch.contains("eps")) throw ConfigError("channel.eps", "required for mode fixed");
        const json& eps = ch["eps"];
        if (!eps.is_array()) throw ConfigError("channel.eps", "expected an array");
        if (static_cast<int>(eps.size()) != n_users)
            throw ConfigError("channel.eps", "expected " + std::to_string(n_users) + " entries");
        for (std::size_t u = 0; u < eps.size(); ++u)
            model.eps_fixed.push_back(probability(eps[u], "channel.eps[" + std::to_string(u) + "]"));
    } else if (mode == "uniform-fading") {
        model.mode = ChannelMode::uniform_fading;
        if (ch.contains("eps")) throw ConfigError("channel.eps", "only valid with mode fixed");
        if (!ch.contains("eps_range"))
            throw ConfigError("channel.eps_range", "required for mode uniform-fading");
        const json& range = ch["eps_range"];
        if (!range.is_array()) throw ConfigError("channel.eps_range", "expected an array");
        if (static_cast<int>(range.size()) != n_users)
            throw ConfigError("channel.eps_range",
                              "expected " + std::to_string(n_users) + " entries");
        for (std::size_t u = 0; u < range.size(); ++u) {
            const std::string path = "channel.eps_range[" + std::to_string(u) + "]";
            if (!range[u].is_array() || range[u].size() != 2)
                throw ConfigError(path, "expected [lo, hi]");
            const double lo = probability(range[u][0], path + "[0]");
            const double hi = probability(range[u][1], path + "[1]");
            if (lo > hi) throw ConfigError(path, "lo must not exceed hi");
            model.eps_range.emplace_back(lo, hi);
        }
    } else {
        throw ConfigError("channel.mode", "unknown mode '" + mode + "' (fixed|uniform-fading)");
    }
    return model;
}

SchedulerConfig parse_scheduler(const json& sc) {
    SchedulerConfig cfg;
    if (sc.is_string()) {
        cfg.kind = parse_enum(sc, "scheduler", parse_scheduler_kind);
        return cfg;
    }
    require_object(sc, "scheduler");
    reject_unknown(sc, "scheduler", {"kind", "beta", "dv_mode", "age_sign", "lps_refresh", "eps_view"});
    if (sc.contains("kind")) cfg.kind = parse_enum(sc["kind"], "scheduler.kind", parse_scheduler_kind);
    if (sc.contains("beta")) {
        if (cfg.kind != SchedulerKind::lys_beta)
            throw ConfigError("scheduler.beta", "beta requires kind lys-beta");
        cfg.beta = get_number(sc["beta"], "scheduler.beta");
        if (cfg.beta < 0.0) throw ConfigError("scheduler.beta", "must be non-negative");
    }
    if (sc.contains("lps_refresh")) {
        if (cfg.kind != SchedulerKind::lps)
            throw ConfigError("scheduler.lps_refresh", "lps_refresh requires kind lps");
        cfg.lps_refresh = parse_enum(sc["lps_refresh"], "scheduler.lps_refresh", parse_lps_refresh);
    }
    if (sc.contains("dv_mode"))
        cfg.dv_mode = parse_enum(sc["dv_mode"], "scheduler.dv_mode", parse_dv_mode);
    if (sc.contains("age_sign"))
        cfg.age_sign = parse_enum(sc["age_sign"], "scheduler.age_sign", parse_age_sign);
    if (sc.contains("eps_view"))
        cfg.eps_view = parse_enum(sc["eps_view"], "scheduler.eps_view", parse_eps_view);
    return cfg;
}

}  // namespace

json expand_shorthands(const json& input) {
    json doc = input;
    if (!doc.is_object()) return doc;
    if (doc.contains("eps")) {
        if (doc.contains("channel") && doc["channel"].is_object() && doc["channel"].contains("eps"))
            throw ConfigError("eps", "given both at top level and as channel.eps");
        doc["channel"]["eps"] = doc["eps"];
        doc.erase("eps");
    }
    if (doc.contains("scheduler") && doc["scheduler"].is_string())
        doc["scheduler"] = json{{"kind", doc["scheduler"]}};
    return doc;
}

RunSpec parse_config(const json& input) {
    require_object(input, "");
    json doc = input;
    reject_unknown(doc, "", {"n_users", "lambda", "slots", "seed", "deadline", "warmup_fraction",
                             "move_insertion", "schedule_cap", "channel", "scheduler", "eps",
                             "out_dir", "threads"});
    doc = expand_shorthands(doc);

    RunSpec spec;
    SimConfig& sim = spec.sim;

    if (doc.contains("schedule_cap")) {
        const auto cap = get_integer(doc["schedule_cap"], "schedule_cap");
        if (cap < 1 || cap > kMaxUsers)
            throw ConfigError("schedule_cap", "must lie in [1, " + std::to_string(kMaxUsers) + "]");
        sim.schedule_cap = static_cast<int>(cap);
    }
    if (!doc.contains("n_users")) throw ConfigError("n_users", "required");
    const auto n = get_integer(doc["n_users"], "n_users");
    if (n < 1) throw ConfigError("n_users", "must be at least 1");
    if (n > sim.schedule_cap)
        throw ConfigError("n_users", "exceeds the schedule cap of " + std::to_string(sim.schedule_cap) +
                                         " (Bell(N) schedules are scored every slot)");
    sim.n_users = static_cast<int>(n);

    if (!doc.contains("channel")) throw ConfigError("channel.eps", "required");
    sim.channel = parse_channel(doc["channel"], sim.n_users);

    sim.lambda = doc.contains("lambda") ? get_number(doc["lambda"], "lambda") : 0.0;
    if (!(sim.lambda >= 0.0 && sim.lambda <= 1.0)) throw ConfigError("lambda", "must lie in [0, 1]");

    if (doc.contains("scheduler")) sim.scheduler = parse_scheduler(doc["scheduler"]);

    if (doc.contains("deadline") && !doc["deadline"].is_null()) {
        const auto h = get_integer(doc["deadline"], "deadline");
        if (h < 1) throw ConfigError("deadline", "must be at least 1");
        sim.deadline = h;
    }
    if (doc.contains("slots")) {
        sim.slots = get_integer(doc["slots"], "slots");
        if (sim.slots < 1) throw ConfigError("slots", "must be at least 1");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
            throw ConfigError("seed", "expected a non-negative integer");
        sim.seed = doc["seed"].get<std::uint64_t>();
    }
    sim.channel.seed = sim.seed;
    if (doc.contains("warmup_fraction")) {
        sim.warmup_fraction = get_number(doc["warmup_fraction"], "warmup_fraction");
        if (!(sim.warmup_fraction >= 0.0 && sim.warmup_fraction < 1.0))
            throw ConfigError("warmup_fraction", "must lie in [0, 1)");
    }
    if (doc.contains("move_insertion")) {
        const auto s = get_string(doc["move_insertion"], "move_insertion");
        if (s == "tail")
            sim.move_insertion = MoveInsertion::tail;
        else if (s == "head")
            sim.move_insertion = MoveInsertion::head;
        else
            throw ConfigError("move_insertion", "expected tail or head");
    }
    if (doc.contains("out_dir")) spec.out_dir = get_string(doc["out_dir"], "out_dir");
    if (doc.contains("threads")) {
        const auto k = get_integer(doc["threads"], "threads");
        if (k < 1) throw ConfigError("threads", "must be at least 1");
        spec.threads = static_cast<int>(k);
    }
    return spec;
}

RunSpec parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunSpec& spec) {
    const SimConfig& sim = spec.sim;
    json channel;
    if (sim.channel.mode == ChannelMode::fixed) {
        channel["mode"] = "fixed";
        channel["eps"] = sim.channel.eps_fixed;
    } else {
        channel["mode"] = "uniform-fading";
        json range = json::array();
        for (const auto& [lo, hi] : sim.channel.eps_range) range.push_back({lo, hi});
        channel["eps_range"] = range;
    }

    json sched;
    sched["kind"] = to_string(sim.scheduler.kind);
    sched["dv_mode"] = to_string(sim.scheduler.dv_mode);
    sched["age_sign"] = to_string(sim.scheduler.age_sign);
    sched["eps_view"] = to_string(sim.scheduler.eps_view);
    if (sim.scheduler.kind == SchedulerKind::lys_beta) sched["beta"] = sim.scheduler.beta;
    if (sim.scheduler.kind == SchedulerKind::lps)
        sched["lps_refresh"] = to_string(sim.scheduler.lps_refresh);

    json doc;
    doc["n_users"] = sim.n_users;
    doc["lambda"] = sim.lambda;
    doc["slots"] = sim.slots;
    doc["seed"] = sim.seed;
    doc["deadline"] = sim.deadline ? json(*sim.deadline) : json(nullptr);
    doc["warmup_fraction"] = sim.warmup_fraction;
    doc["move_insertion"] = sim.move_insertion == MoveInsertion::tail ? "tail" : "head";
    doc["schedule_cap"] = sim.schedule_cap;
    doc["channel"] = channel;
    doc["scheduler"] = sched;
    doc["out_dir"] = spec.out_dir;
    doc["threads"] = spec.threads;
    return doc;
}

void merge_overrides(json& doc, const json& patch) {
    if (!patch.is_object() || !doc.is_object()) {
        doc = patch;
        return;
    }
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && doc.contains(key) && doc[key].is_object())
            merge_overrides(doc[key], value);
        else
            doc[key] = value;
    }
}

}  // namespace ncsched
