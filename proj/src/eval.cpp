#include "cfrl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cfrl/errors.hpp"

namespace cfrl {

namespace {

EventMetrics metrics_from_rollout(const CfEvent& event,
                                  const std::vector<RolloutStep>& log) {
    EventMetrics m;
    m.event_id = event.event_id;
    m.steps = log.size();
    m.headways.reserve(log.size());
    m.jerks.reserve(log.size());
    double reward_sum = 0.0;
    double min_ttc = std::numeric_limits<double>::infinity();
    bool ttc_defined = false;
    for (const auto& step : log) {
        m.headways.push_back(step.follower_speed > 0.0
                                 ? step.gap / step.follower_speed
                                 : std::numeric_limits<double>::infinity());
        m.jerks.push_back(step.jerk);
        reward_sum += step.reward.total;
        if (step.gap > 0.0 && step.follower_speed > step.leader_speed) {
            const double ttc = step.gap / (step.follower_speed - step.leader_speed);
            min_ttc = std::min(min_ttc, ttc);
            ttc_defined = true;
        }
    }
    if (ttc_defined) m.min_ttc = min_ttc;
    m.collided = !log.empty() && log.back().gap <= 0.0;
    m.mean_step_reward = log.empty() ? 0.0 : reward_sum / static_cast<double>(log.size());
    return m;
}

}  // namespace

std::vector<EventMetrics> rollout_metrics_serial(const Policy& policy,
                                                 const std::vector<CfEvent>& events,
                                                 const EnvConfig& config) {
    std::vector<EventMetrics> metrics(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        metrics[i] = metrics_from_rollout(events[i], run_event(policy, events[i], config));
    }
    return metrics;
}

std::vector<EventMetrics> rollout_metrics(const Policy& policy,
                                          const std::vector<CfEvent>& events,
                                          const EnvConfig& config) {
#ifdef _OPENMP
    std::vector<EventMetrics> metrics(events.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(events.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        metrics[k] = metrics_from_rollout(events[k], run_event(policy, events[k], config));
    }
    return metrics;
#else
    return rollout_metrics_serial(policy, events, config);
#endif
}

std::vector<EventMetrics> recorded_metrics(const std::vector<CfEvent>& events,
                                           const RewardSpec& spec, double dt) {
    std::vector<EventMetrics> metrics(events.size());
    for (std::size_t k = 0; k < events.size(); ++k) {
        const CfEvent& e = events[k];
        EventMetrics m;
        m.event_id = e.event_id;
        if (e.size() >= 2) {
            const std::size_t n = e.size();
            m.steps = n - 1;
            m.headways.reserve(n - 1);
            m.jerks.reserve(n - 1);
            double reward_sum = 0.0;
            double min_ttc = std::numeric_limits<double>::infinity();
            bool ttc_defined = false;
            for (std::size_t i = 1; i < n; ++i) {
                const double vf = e.follower[i].speed;
                const double vl = e.leader[i].speed;
                const double gap = e.gap(i);
                const double jerk =
                    (e.follower[i].acceleration - e.follower[i - 1].acceleration) / dt;
                m.headways.push_back(vf > 0.0 ? gap / vf
                                              : std::numeric_limits<double>::infinity());
                m.jerks.push_back(jerk);
                if (gap > 0.0 && vf > vl) {
                    min_ttc = std::min(min_ttc, gap / (vf - vl));
                    ttc_defined = true;
                }
                reward_sum += gap > 0.0
                                  ? step_reward(gap, vf, vl, jerk, spec).total
                                  : collision_reward(jerk, spec).total;
            }
            if (ttc_defined) m.min_ttc = min_ttc;
            m.mean_step_reward = reward_sum / static_cast<double>(n - 1);
        }
        metrics[k] = std::move(m);
    }
    return metrics;
}

std::vector<CdfRow> min_ttc_cdf(const std::vector<EventMetrics>& metrics,
                                std::span<const double> thresholds) {
    if (metrics.empty()) throw DataError("min_ttc_cdf: no event metrics");
    std::vector<CdfRow> rows;
    rows.reserve(thresholds.size());
    const double denom = static_cast<double>(metrics.size());
    for (double th : thresholds) {
        std::size_t count = 0;
        for (const auto& m : metrics) {
            if (m.min_ttc.has_value() && *m.min_ttc < th) ++count;
        }
        rows.push_back(CdfRow{th, static_cast<double>(count) / denom});
    }
    return rows;
}

std::vector<HistogramRow> histogram(std::span<const double> values, double bin_width,
                                    double lo, double hi) {
    if (!(bin_width > 0.0)) throw ConfigError("histogram: bin width must be positive");
    if (!(hi > lo)) throw ConfigError("histogram: empty range");

    const auto n_bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - 1e-9));
    std::vector<std::size_t> counts(n_bins + 2, 0);  // [underflow, bins..., overflow]
    for (double v : values) {
        std::size_t slot;
        if (std::isnan(v)) {
            slot = n_bins + 1;
        } else if (v < lo) {
            slot = 0;
        } else {
            const double rel = (v - lo) / bin_width;
            slot = rel >= static_cast<double>(n_bins)
                       ? n_bins + 1
                       : static_cast<std::size_t>(rel) + 1;
        }
        ++counts[slot];
    }

    std::vector<HistogramRow> rows(n_bins + 2);
    const double total = static_cast<double>(values.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        double center;
        if (k == 0) {
            center = lo - 0.5 * bin_width;
        } else if (k == n_bins + 1) {
            center = hi + 0.5 * bin_width;
        } else {
            center = lo + (static_cast<double>(k - 1) + 0.5) * bin_width;
        }
        rows[k] = HistogramRow{center, counts[k],
                               total > 0.0 ? static_cast<double>(counts[k]) / total : 0.0};
    }
    return rows;
}

ReportConfig ReportConfig::defaults() {
    ReportConfig c;
    for (int i = 1; i <= 30; ++i) c.ttc_thresholds.push_back(0.5 * i);
    return c;
}

double share_in_range(std::span<const double> values, double lo, double hi) {
    if (values.empty()) return 0.0;
    std::size_t count = 0;
    for (double v : values) {
        if (v >= lo && v < hi) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(values.size());
}

namespace {

void pool_metrics(const std::vector<EventMetrics>& metrics, bool skip_collided,
                  std::size_t warmup_steps, std::vector<double>& headways,
                  std::vector<double>& jerks) {
    for (const auto& m : metrics) {
        if (skip_collided && m.collided) continue;
        for (std::size_t i = warmup_steps; i < m.headways.size(); ++i) {
            headways.push_back(m.headways[i]);
        }
        for (std::size_t i = warmup_steps; i < m.jerks.size(); ++i) {
            jerks.push_back(m.jerks[i]);
        }
    }
}

double fraction_below(const std::vector<EventMetrics>& metrics, double threshold) {
    if (metrics.empty()) return 0.0;
    std::size_t count = 0;
    for (const auto& m : metrics) {
        if (m.min_ttc.has_value() && *m.min_ttc < threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(metrics.size());
}

double mean_reward(const std::vector<EventMetrics>& metrics) {
    double sum = 0.0;
    std::size_t steps = 0;
    for (const auto& m : metrics) {
        sum += m.mean_step_reward * static_cast<double>(m.steps);
        steps += m.steps;
    }
    return steps > 0 ? sum / static_cast<double>(steps) : 0.0;
}

}  // namespace

ComparisonReport build_report(const Policy& policy, const std::vector<CfEvent>& events,
                              const EnvConfig& env_config,
                              const ReportConfig& report_config) {
    if (events.empty()) throw DataError("build_report: no events to evaluate");

    ComparisonReport report;
    report.config = report_config;
    report.simulated = rollout_metrics(policy, events, env_config);
    report.recorded = recorded_metrics(events, env_config.reward, env_config.dt);

    for (const auto& m : report.simulated) {
        if (m.collided) ++report.collided_events;
    }

    std::vector<double> sim_headways, sim_jerks, rec_headways, rec_jerks;
    pool_metrics(report.simulated, true, 0, sim_headways, sim_jerks);
    pool_metrics(report.recorded, false, 0, rec_headways, rec_jerks);

    report.cdf_simulated = min_ttc_cdf(report.simulated, report_config.ttc_thresholds);
    report.cdf_recorded = min_ttc_cdf(report.recorded, report_config.ttc_thresholds);
    report.headway_hist_simulated =
        histogram(sim_headways, report_config.headway_bin, report_config.headway_lo,
                  report_config.headway_hi);
    report.headway_hist_recorded =
        histogram(rec_headways, report_config.headway_bin, report_config.headway_lo,
                  report_config.headway_hi);
    report.jerk_hist_simulated = histogram(sim_jerks, report_config.jerk_bin,
                                           report_config.jerk_lo, report_config.jerk_hi);
    report.jerk_hist_recorded = histogram(rec_jerks, report_config.jerk_bin,
                                          report_config.jerk_lo, report_config.jerk_hi);

    const auto warmup_steps = static_cast<std::size_t>(
        std::llround(report_config.warmup_seconds / env_config.dt));
    std::vector<double> sim_headways_warm, sim_jerks_warm;
    pool_metrics(report.simulated, true, warmup_steps, sim_headways_warm, sim_jerks_warm);

    const int n_traces =
        std::min<int>(report_config.example_events, static_cast<int>(events.size()));
    for (int k = 0; k < n_traces; ++k) {
        const CfEvent& e = events[static_cast<std::size_t>(k)];
        const auto log = run_event(policy, e, env_config);
        ComparisonReport::Trace tr;
        tr.event_id = e.event_id;
        for (std::size_t i = 0; i < log.size(); ++i) {
            const std::size_t idx = i + 1;  // post-update sample index
            tr.time.push_back(e.follower[idx].time);
            tr.leader_speed.push_back(e.leader[idx].speed);
            tr.recorded_speed.push_back(e.follower[idx].speed);
            tr.simulated_speed.push_back(log[i].follower_speed);
            tr.recorded_gap.push_back(e.gap(idx));
            tr.simulated_gap.push_back(log[i].gap);
            tr.recorded_acceleration.push_back(e.follower[idx - 1].acceleration);
            tr.simulated_acceleration.push_back(log[i].action);
        }
        report.traces.push_back(std::move(tr));
    }

    auto jerk_extent = [](const std::vector<double>& jerks) {
        double lo = 0.0, hi = 0.0;
        for (double j : jerks) {
            lo = std::min(lo, j);
            hi = std::max(hi, j);
        }
        return std::pair{lo, hi};
    };
    const auto [sim_jlo, sim_jhi] = jerk_extent(sim_jerks);
    const auto [rec_jlo, rec_jhi] = jerk_extent(rec_jerks);

    report.summary = {
        {"events", static_cast<double>(events.size())},
        {"collided_events", static_cast<double>(report.collided_events)},
        {"min_ttc_below_5s_recorded", fraction_below(report.recorded, 5.0)},
        {"min_ttc_below_5s_simulated", fraction_below(report.simulated, 5.0)},
        {"headway_share_1_2_recorded", share_in_range(rec_headways, 1.0, 2.0)},
        {"headway_share_1_2_simulated", share_in_range(sim_headways, 1.0, 2.0)},
        {"headway_share_1_2_simulated_after_warmup",
         share_in_range(sim_headways_warm, 1.0, 2.0)},
        {"jerk_min_recorded", rec_jlo},
        {"jerk_max_recorded", rec_jhi},
        {"jerk_min_simulated", sim_jlo},
        {"jerk_max_simulated", sim_jhi},
        {"mean_step_reward_recorded", mean_reward(report.recorded)},
        {"mean_step_reward_simulated", mean_reward(report.simulated)},
    };
    return report;
}

namespace {

std::FILE* open_table(const std::filesystem::path& dir, const char* name) {
    const auto path = dir / name;
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw DataError("cannot write report file: " + path.string());
    return f;
}

void write_histogram_table(const std::filesystem::path& dir, const char* name,
                           const std::vector<HistogramRow>& rows) {
    std::FILE* f = open_table(dir, name);
    std::fprintf(f, "bin_center count fraction\n");
    for (const auto& r : rows) {
        std::fprintf(f, "%.17g %zu %.17g\n", r.bin_center, r.count, r.fraction);
    }
    std::fclose(f);
}

}  // namespace

void write_report(const ComparisonReport& report, const std::filesystem::path& out_dir) {
    if (report.simulated.empty()) {
        throw DataError("refusing to write a report over an empty event set");
    }
    std::filesystem::create_directories(out_dir);

    {
        std::FILE* f = open_table(out_dir, "min_ttc_cdf.txt");
        std::fprintf(f, "threshold cdf_recorded cdf_simulated\n");
        for (std::size_t i = 0; i < report.cdf_simulated.size(); ++i) {
            std::fprintf(f, "%.17g %.17g %.17g\n", report.cdf_simulated[i].threshold,
                         report.cdf_recorded[i].fraction, report.cdf_simulated[i].fraction);
        }
        std::fclose(f);
    }

    write_histogram_table(out_dir, "headway_hist_recorded.txt", report.headway_hist_recorded);
    write_histogram_table(out_dir, "headway_hist_simulated.txt", report.headway_hist_simulated);
    write_histogram_table(out_dir, "jerk_hist_recorded.txt", report.jerk_hist_recorded);
    write_histogram_table(out_dir, "jerk_hist_simulated.txt", report.jerk_hist_simulated);

    {
        std::FILE* f = open_table(out_dir, "example_traces.txt");
        std::fprintf(f, "event_id time leader_speed recorded_speed simulated_speed "
                        "recorded_gap simulated_gap recorded_acc simulated_acc\n");
        for (const auto& tr : report.traces) {
            for (std::size_t i = 0; i < tr.time.size(); ++i) {
                std::fprintf(f, "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                             tr.event_id, tr.time[i], tr.leader_speed[i],
                             tr.recorded_speed[i], tr.simulated_speed[i],
                             tr.recorded_gap[i], tr.simulated_gap[i],
                             tr.recorded_acceleration[i], tr.simulated_acceleration[i]);
            }
        }
        std::fclose(f);
    }

    {
        std::FILE* f = open_table(out_dir, "summary.txt");
        for (const auto& [key, value] : report.summary) {
            std::fprintf(f, "%s: %.17g\n", key.c_str(), value);
        }
        std::fclose(f);
    }
}

}  // namespace cfrl
