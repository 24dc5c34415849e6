#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfrl/env.hpp"

namespace cfrl {

struct EventMetrics {
    int event_id = 0;
    std::optional<double> min_ttc;   // empty when the follower never closes
    std::vector<double> headways;    // one per rollout step
    std::vector<double> jerks;       // one per rollout step
    bool collided = false;
    double mean_step_reward = 0.0;
    std::size_t steps = 0;
};

// Rolls the policy over every event and aggregates per-event safety,
// efficiency and comfort measures. The parallel variant distributes events
// over threads; both produce identical results in identical order.
std::vector<EventMetrics> rollout_metrics(const Policy& policy,
                                          const std::vector<CfEvent>& events,
                                          const EnvConfig& config = {});
std::vector<EventMetrics> rollout_metrics_serial(const Policy& policy,
                                                 const std::vector<CfEvent>& events,
                                                 const EnvConfig& config = {});

// Metrics of the recorded follower, computed directly from the event arrays
// (no simulation); jerk is the first difference of recorded acceleration.
std::vector<EventMetrics> recorded_metrics(const std::vector<CfEvent>& events,
                                           const RewardSpec& spec,
                                           double dt = kSampleInterval);

struct CdfRow {
    double threshold = 0.0;
    double fraction = 0.0;
};

// Fraction of events whose (defined) minimum TTC falls below each threshold;
// events that never close count in the denominator only.
std::vector<CdfRow> min_ttc_cdf(const std::vector<EventMetrics>& metrics,
                                std::span<const double> thresholds);

struct HistogramRow {
    double bin_center = 0.0;
    std::size_t count = 0;
    double fraction = 0.0;
};

// Fixed-width, left-closed bins over [lo, hi); the first and last rows are
// underflow and overflow bins so fractions always sum to one.
std::vector<HistogramRow> histogram(std::span<const double> values, double bin_width,
                                    double lo, double hi);

struct ReportConfig {
    double headway_bin = 0.25;
    double headway_lo = 0.0;
    double headway_hi = 6.0;
    double jerk_bin = 0.5;
    double jerk_lo = -10.0;
    double jerk_hi = 10.0;
    std::vector<double> ttc_thresholds;  // default: 0.5 s grid up to 15 s
    int example_events = 3;
    double warmup_seconds = 5.0;

    static ReportConfig defaults();
};

struct ComparisonReport {
    ReportConfig config;
    std::vector<EventMetrics> simulated;
    std::vector<EventMetrics> recorded;
    std::vector<CdfRow> cdf_simulated;
    std::vector<CdfRow> cdf_recorded;
    std::vector<HistogramRow> headway_hist_simulated;
    std::vector<HistogramRow> headway_hist_recorded;
    std::vector<HistogramRow> jerk_hist_simulated;
    std::vector<HistogramRow> jerk_hist_recorded;

    struct Trace {
        int event_id = 0;
        std::vector<double> time;
        std::vector<double> leader_speed;
        std::vector<double> recorded_speed;
        std::vector<double> simulated_speed;
        std::vector<double> recorded_gap;
        std::vector<double> simulated_gap;
        std::vector<double> recorded_acceleration;
        std::vector<double> simulated_acceleration;
    };
    std::vector<Trace> traces;

    std::vector<std::pair<std::string, double>> summary;
    std::size_t collided_events = 0;
};

// Rolls out the policy, computes recorded-driver baselines over the same
// events, and assembles every aggregate the report files need. Collided
// rollouts are excluded from the headway/jerk histograms and reported
// separately.
ComparisonReport build_report(const Policy& policy, const std::vector<CfEvent>& events,
                              const EnvConfig& env_config = {},
                              const ReportConfig& report_config = ReportConfig::defaults());

// Writes the six delimited tables plus summary.txt into out_dir; refuses to
// write a report over an empty event set.
void write_report(const ComparisonReport& report, const std::filesystem::path& out_dir);

// Share of values lying inside [lo, hi); helper shared by the summary and
// the acceptance checks.
double share_in_range(std::span<const double> values, double lo, double hi);

}  // namespace cfrl
