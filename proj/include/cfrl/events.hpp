#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cfrl/lognormal.hpp"
#include "cfrl/trajectory.hpp"

namespace cfrl {

// A leader-follower trajectory pair that passed the car-following filter:
// same lane throughout, constant leader identity, aligned 10 Hz timestamps,
// positive gap, long enough to analyze.
struct CfEvent {
    int event_id = 0;
    std::vector<TrajectorySample> leader;
    std::vector<TrajectorySample> follower;
    double duration = 0.0;  // seconds: sample count times the 0.1 s interval

    std::size_t size() const { return follower.size(); }

    // bumper-to-bumper gap at aligned sample i (leader rear to follower front)
    double gap(std::size_t i) const {
        return leader[i].position - follower[i].position - leader[i].vehicle_length;
    }
};

struct ExtractionConfig {
    double min_duration = 15.0;  // strict lower bound, seconds
    double min_gap = 0.0;        // strict lower bound on gap, meters
    double dt = kSampleInterval;
};

// Maximal same-lane, same-leader segments longer than min_duration.
// The parallel variant partitions the work per follower track; both return
// identical events in identical order.
std::vector<CfEvent> extract_cf_events(const std::vector<VehicleTrack>& tracks,
                                       const ExtractionConfig& config = {});
std::vector<CfEvent> extract_cf_events_serial(const std::vector<VehicleTrack>& tracks,
                                              const ExtractionConfig& config = {});

// Re-checks every event invariant from scratch: alignment and 0.1 s spacing,
// lane constancy, leader identity, duration, gap bound, speed sign. Returns
// the first violation message, or an empty string when the event is valid.
std::string validate_event(const CfEvent& event, const ExtractionConfig& config = {});

struct SplitResult {
    std::vector<CfEvent> train;
    std::vector<CfEvent> test;
};

// Seeded shuffle, then floor(train_fraction * n) events for training and the
// remainder for testing. Throws DataError for fewer than 2 events.
SplitResult split_events(std::vector<CfEvent> events, double train_fraction,
                         std::uint64_t seed);

// Per-timestep headway samples (gap / follower speed) pooled over all events;
// samples with follower speed below min_speed are excluded.
std::vector<double> collect_headways(const std::vector<CfEvent>& events,
                                     double min_speed = 0.1);

LognormalParams fit_headway_lognormal(const std::vector<CfEvent>& events,
                                      double min_speed = 0.1);

// Plain-text interchange format, one block per event (see README for the
// field list). Numbers round-trip bit-exactly.
void write_events_file(const std::filesystem::path& path,
                       const std::vector<CfEvent>& events);
std::vector<CfEvent> read_events_file(const std::filesystem::path& path);

}  // namespace cfrl
