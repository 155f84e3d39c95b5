// Command-line front end: simulate | sweep | capacity | lambda-max | schedules.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ncsched/config.hpp"
#include "ncsched/engine.hpp"
#include "ncsched/lp.hpp"
#include "ncsched/output.hpp"
#include "ncsched/schedule.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<int> n_users;
    std::optional<double> lambda;
    std::vector<double> eps;
    std::vector<double> fading;
    std::optional<double> beta;
    std::optional<std::int64_t> deadline;
    std::optional<std::int64_t> slots;
    std::optional<std::string> scheduler;
    std::optional<std::string> dv_mode;
    std::optional<std::string> age_sign;
    std::optional<std::string> lps_refresh;
    std::optional<std::string> eps_view;
};

void add_common(CLI::App& app, CommonFlags& f) {
    app.add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", f.seed, "master seed (default 0)");
    app.add_option("--out", f.out_dir, "output directory");
    app.add_option("--threads", f.threads, "worker threads for sweeps and bisection");
    app.add_option("--n", f.n_users, "number of receivers");
    app.add_option("--lambda", f.lambda, "arrival probability per slot");
    app.add_option("--eps", f.eps, "fixed erasure probabilities, one per user")->delimiter(',');
    app.add_option("--fading", f.fading, "LO,HI uniform fading interval applied to every user")
        ->delimiter(',')
        ->expected(2);
    app.add_option("--beta", f.beta, "importance weight (lys-beta only)");
    app.add_option("--deadline", f.deadline, "hard deadline H in slots");
    app.add_option("--slots", f.slots, "horizon T in slots");
    app.add_option("--scheduler", f.scheduler, "arq | lps | lys | lys-beta");
    app.add_option("--dv-mode", f.dv_mode, "reduced | full");
    app.add_option("--age-sign", f.age_sign, "prioritize-aged | literal");
    app.add_option("--lps-refresh", f.lps_refresh, "static | per-slot");
    app.add_option("--eps-view", f.eps_view, "current | mean");
}

json load_document(const CommonFlags& f) {
    json doc = json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            doc = json::parse(buf.str());
        } catch (const json::parse_error& e) {
            throw ncsched::ConfigError(f.config_path, std::string("malformed JSON: ") + e.what());
        }
    }
    doc = ncsched::expand_shorthands(doc);

    json patch = json::object();
    if (f.seed) patch["seed"] = *f.seed;
    if (f.out_dir) patch["out_dir"] = *f.out_dir;
    if (f.threads) patch["threads"] = *f.threads;
    if (f.n_users) patch["n_users"] = *f.n_users;
    if (f.lambda) patch["lambda"] = *f.lambda;
    if (f.deadline) patch["deadline"] = *f.deadline;
    if (f.slots) patch["slots"] = *f.slots;
    if (f.scheduler) patch["scheduler"]["kind"] = *f.scheduler;
    if (f.beta) patch["scheduler"]["beta"] = *f.beta;
    if (f.dv_mode) patch["scheduler"]["dv_mode"] = *f.dv_mode;
    if (f.age_sign) patch["scheduler"]["age_sign"] = *f.age_sign;
    if (f.lps_refresh) patch["scheduler"]["lps_refresh"] = *f.lps_refresh;
    if (f.eps_view) patch["scheduler"]["eps_view"] = *f.eps_view;
    ncsched::merge_overrides(doc, patch);

    // Channel flags replace the channel block wholesale.
    if (!f.eps.empty()) doc["channel"] = json{{"mode", "fixed"}, {"eps", f.eps}};
    if (!f.fading.empty()) {
        const int n = doc.value("n_users", 0);
        json range = json::array();
        for (int u = 0; u < n; ++u) range.push_back({f.fading[0], f.fading[1]});
        doc["channel"] = json{{"mode", "uniform-fading"}, {"eps_range", range}};
    }
    return doc;
}

ncsched::RunSpec resolve(const CommonFlags& f) { return ncsched::parse_config(load_document(f)); }

void write_effective_config(const ncsched::RunSpec& spec) {
    fs::create_directories(spec.out_dir);
    std::ofstream(fs::path(spec.out_dir) / "effective_config.json")
        << ncsched::to_json(spec).dump(2) << '\n';
}

int cmd_simulate(const CommonFlags& f, bool no_trace) {
    const auto spec = resolve(f);
    write_effective_config(spec);
    const fs::path out(spec.out_dir);

    std::ofstream trace;
    ncsched::SlotObserver observer;
    if (!no_trace) {
        trace.open(out / "trace.csv");
        // ARQ keeps a single FIFO, reported as Q_0.
        const int m = spec.sim.scheduler.kind == ncsched::SchedulerKind::arq
                          ? 1
                          : ncsched::SubQueueLayout(spec.sim.n_users).size();
        trace << ncsched::trace_csv_header(m) << '\n';
        observer = [&trace](const ncsched::SlotRecord& r) { ncsched::write_trace_row(trace, r); };
    }
    const auto metrics = ncsched::run(spec.sim, observer);
    const json summary = ncsched::summary_json(metrics);
    std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& param, const std::vector<double>& grid,
              int replicates) {
    const auto spec = resolve(f);
    write_effective_config(spec);
    const auto parameter = ncsched::parse_sweep_parameter(param);
    const auto rows = ncsched::sweep(spec.sim, parameter, grid, replicates, spec.threads);
    const fs::path path = fs::path(spec.out_dir) / "sweep.csv";
    std::ofstream out(path);
    ncsched::write_sweep_csv(out, parameter, rows);
    ncsched::write_sweep_csv(std::cout, parameter, rows);
    return 0;
}

int cmd_capacity(const CommonFlags& f) {
    if (!f.n_users) throw ncsched::ConfigError("n", "--n is required");
    if (static_cast<int>(f.eps.size()) != *f.n_users)
        throw ncsched::ConfigError("eps", "--eps needs one value per user");
    for (std::size_t u = 0; u < f.eps.size(); ++u)
        if (!(f.eps[u] >= 0.0 && f.eps[u] < 1.0))
            throw ncsched::ConfigError("eps[" + std::to_string(u) + "]", "must lie in [0, 1)");
    std::optional<ncsched::StabilitySolution> sol;
    if (f.lambda) sol = ncsched::solve_stability(*f.n_users, f.eps, *f.lambda);
    const json out =
        ncsched::capacity_json(*f.n_users, f.eps, sol ? &*sol : nullptr, f.lambda.value_or(0.0));
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_lambda_max(const CommonFlags& f, double tolerance, int seeds) {
    auto spec = resolve(f);
    ncsched::LambdaSearch search;
    search.tolerance = tolerance;
    search.seeds = seeds;
    search.threads = spec.threads;
    const double lambda_max = ncsched::estimate_lambda_max(spec.sim, search);
    json out = ncsched::to_json(spec);
    out.erase("lambda");
    const json result{{"lambda_max", lambda_max},
                      {"tolerance", tolerance},
                      {"seeds", seeds},
                      {"config", out}};
    std::cout << result.dump(2) << '\n';
    return 0;
}

int cmd_schedules(int n) {
    ncsched::write_schedules_csv(std::cout, n, ncsched::enumerate_schedules(n));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network-coded multicast scheduling simulator"};
    app.require_subcommand(1);

    CommonFlags sim_flags, sweep_flags, cap_flags, lmax_flags;
    bool no_trace = false;
    auto* simulate = app.add_subcommand("simulate", "run one simulation");
    add_common(*simulate, sim_flags);
    simulate->add_flag("--no-trace", no_trace, "skip the per-slot trace CSV");

    std::string param;
    std::vector<double> grid;
    int replicates = 1;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(*sweep, sweep_flags);
    sweep->add_option("--param", param, "lambda | eps | deadline | beta")->required();
    sweep->add_option("--grid", grid, "comma-separated grid values")->delimiter(',')->required();
    sweep->add_option("--replicates", replicates, "seeds averaged per grid point");

    auto* capacity = app.add_subcommand("capacity", "solve the stability LP");
    add_common(*capacity, cap_flags);

    double tolerance = 0.01;
    int seeds = 3;
    auto* lmax = app.add_subcommand("lambda-max", "estimate the largest stable arrival rate");
    add_common(*lmax, lmax_flags);
    lmax->add_option("--tolerance", tolerance, "bisection tolerance (>= 0.01)");
    lmax->add_option("--seeds", seeds, "seeds per bisection point (majority vote)");

    int n_sched = 3;
    auto* schedules = app.add_subcommand("schedules", "dump the schedule incidence matrix");
    schedules->add_option("--n", n_sched, "number of receivers");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(sim_flags, no_trace);
        if (*sweep) return cmd_sweep(sweep_flags, param, grid, replicates);
        if (*capacity) return cmd_capacity(cap_flags);
        if (*lmax) return cmd_lambda_max(lmax_flags, tolerance, seeds);
        if (*schedules) return cmd_schedules(n_sched);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
