#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace cfrl {

// 10 Hz sampling interval of the trajectory data and the simulation.
constexpr double kSampleInterval = 0.1;

// Integer tick at 10 Hz; comparing ticks avoids float drift in time columns.
inline long long time_tick(double time_s) { return std::llround(time_s * 10.0); }

struct TrajectorySample {
    double time = 0.0;            // seconds, multiple of 0.1
    double position = 0.0;        // meters along the roadway (front bumper)
    double speed = 0.0;           // m/s, >= 0
    double acceleration = 0.0;    // m/s^2
    int lane_id = 0;
    int vehicle_id = 0;
    int leader_id = 0;            // 0 = no leader recorded
    double vehicle_length = 0.0;  // meters
};

struct VehicleTrack {
    int vehicle_id = 0;
    std::vector<TrajectorySample> samples;  // sorted by time
};

// 0-based column indices into the delimited table.
struct ColumnSchema {
    int vehicle_id = -1;
    int time = -1;
    int position = -1;
    int speed = -1;
    int acceleration = -1;
    int lane_id = -1;
    int leader_id = -1;
    int vehicle_length = -1;

    // throws ConfigError naming the first missing field
    void validate() const;
};

struct ParseLimits {
    double max_abs_acceleration = 8.0;  // raw-data sanity bound
};

struct ParseStats {
    std::size_t rows_total = 0;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;
    std::vector<std::string> sample_rejects;  // first few, for diagnostics
};

struct ParsedTrajectories {
    std::vector<VehicleTrack> tracks;  // sorted by vehicle_id
    ParseStats stats;
};

// Reads a comma/tab/space delimited trajectory table. Rows violating the
// sample invariants are rejected and counted; duplicate timestamps within
// one vehicle raise a DataError naming the vehicle. Header lines and lines
// starting with '#' are skipped.
ParsedTrajectories parse_trajectory_file(const std::filesystem::path& path,
                                         const ColumnSchema& schema,
                                         const ParseLimits& limits = {});

// Same parser over an in-memory table; used by tests and fixtures.
ParsedTrajectories parse_trajectory_text(const std::string& text,
                                         const ColumnSchema& schema,
                                         const ParseLimits& limits = {});

}  // namespace cfrl
