#include "ncsched/output.hpp"

#include <iomanip>

namespace ncsched {

std::string trace_csv_header(int m) {
    std::string h = "slot";
    for (int i = 0; i < m; ++i) h += ",Q_" + std::to_string(i);
    return h + ",total,lyapunov,schedule_id,delivered,dropped";
}

void write_trace_row(std::ostream& os, const SlotRecord& r) {
    os << r.slot;
    for (auto q : r.backlog) os << ',' << q;
    os << ',' << r.total << ',' << r.lyapunov << ',' << r.schedule_id << ',' << r.delivered << ','
       << r.dropped << '\n';
}

std::string sweep_csv_header(SweepParameter parameter) {
    return to_string(parameter) +
           ",replicates,avg_total_backlog,throughput_pct,throughput_per_slot,drop_pct,arrived,"
           "delivered,dropped,idle_slots";
}

void write_sweep_csv(std::ostream& os, SweepParameter parameter, std::span<const SweepRow> rows) {
    os << sweep_csv_header(parameter) << '\n' << std::setprecision(10);
    for (const auto& r : rows)
        os << r.value << ',' << r.replicates << ',' << r.avg_total_backlog << ',' << r.throughput_pct
           << ',' << r.throughput_per_slot << ',' << r.drop_pct << ',' << r.arrived << ','
           << r.delivered << ',' << r.dropped << ',' << r.idle_slots << '\n';
}

void write_schedules_csv(std::ostream& os, int n_users, const std::vector<Schedule>& schedules) {
    const int m = SubQueueLayout(n_users).size();
    os << "schedule";
    for (int i = 0; i < m; ++i) os << ",q_" << i;
    os << '\n';
    const auto grid = incidence_matrix(schedules, m);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        os << "S_" << j;
        for (int v : grid[j]) os << ',' << v;
        os << '\n';
    }
}

nlohmann::json summary_json(const Metrics& m) {
    return {
        {"slots", m.slots},
        {"avg_total_backlog", m.avg_total_backlog},
        {"arrived", m.arrived},
        {"delivered", m.delivered},
        {"dropped", m.dropped},
        {"residual", m.residual},
        {"idle_slots", m.idle_slots},
        {"throughput_pct", m.throughput_pct},
        {"throughput_per_slot", m.throughput_per_slot},
        {"drop_pct", m.drop_pct},
    };
}

nlohmann::json capacity_json(int n_users, std::span<const double> eps,
                             const StabilitySolution* at_lambda, double lambda) {
    nlohmann::json out;
    out["n_users"] = n_users;
    out["eps"] = std::vector<double>(eps.begin(), eps.end());
    out["threshold"] = capacity_threshold(eps);
    out["lp_threshold"] = lp_threshold_bisection(eps);
    if (at_lambda) {
        out["lambda"] = lambda;
        out["status"] = to_string(at_lambda->status);
        out["delta_max"] = at_lambda->delta_max;
        out["p"] = at_lambda->p;
    }
    return out;
}

}  // namespace ncsched
