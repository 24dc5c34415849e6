#include "cfrl/trajectory.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "cfrl/errors.hpp"

namespace cfrl {

void ColumnSchema::validate() const {
    const std::pair<const char*, int> fields[] = {
        {"vehicle_id", vehicle_id}, {"time", time},
        {"position", position},     {"speed", speed},
        {"acceleration", acceleration}, {"lane_id", lane_id},
        {"leader_id", leader_id},   {"vehicle_length", vehicle_length}};
    for (const auto& [name, idx] : fields) {
        if (idx < 0) {
            throw ConfigError(std::string("column mapping missing required field: ") + name);
        }
    }
}

namespace {

void split_fields(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == '\t' || c == ' ' || c == ';') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
}

bool to_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

}  // namespace

ParsedTrajectories parse_trajectory_text(const std::string& text,
                                         const ColumnSchema& schema,
                                         const ParseLimits& limits) {
    schema.validate();

    const int max_col = std::max({schema.vehicle_id, schema.time, schema.position,
                                  schema.speed, schema.acceleration, schema.lane_id,
                                  schema.leader_id, schema.vehicle_length});

    std::map<int, std::vector<TrajectorySample>> by_vehicle;
    ParseStats stats;

    std::istringstream in(text);
    std::string line;
    std::vector<std::string> fields;
    bool first_data_line = true;

    auto reject = [&](const std::string& why) {
        ++stats.rows_rejected;
        if (stats.sample_rejects.size() < 10) stats.sample_rejects.push_back(why);
    };

    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        split_fields(line, fields);
        if (fields.empty()) continue;

        // A non-numeric first data line is treated as a header row.
        double probe;
        if (first_data_line && !to_double(fields[0], probe)) {
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        ++stats.rows_total;

        if (static_cast<int>(fields.size()) <= max_col) {
            reject("line " + std::to_string(line_no) + ": too few columns");
            continue;
        }

        double vid, t, pos, spd, acc, lane, lead, len;
        if (!to_double(fields[schema.vehicle_id], vid) || !to_double(fields[schema.time], t) ||
            !to_double(fields[schema.position], pos) || !to_double(fields[schema.speed], spd) ||
            !to_double(fields[schema.acceleration], acc) || !to_double(fields[schema.lane_id], lane) ||
            !to_double(fields[schema.leader_id], lead) || !to_double(fields[schema.vehicle_length], len)) {
            reject("line " + std::to_string(line_no) + ": non-numeric field");
            continue;
        }
        if (spd < 0.0) {
            reject("line " + std::to_string(line_no) + ": negative speed");
            continue;
        }
        if (std::abs(acc) > limits.max_abs_acceleration) {
            reject("line " + std::to_string(line_no) + ": |acceleration| above sanity bound");
            continue;
        }
        if (len < 0.0) {
            reject("line " + std::to_string(line_no) + ": negative vehicle length");
            continue;
        }

        TrajectorySample s;
        s.time = t;
        s.position = pos;
        s.speed = spd;
        s.acceleration = acc;
        s.lane_id = static_cast<int>(lane);
        s.vehicle_id = static_cast<int>(vid);
        s.leader_id = static_cast<int>(lead);
        s.vehicle_length = len;
        by_vehicle[s.vehicle_id].push_back(s);
        ++stats.rows_accepted;
    }

    ParsedTrajectories result;
    result.stats = stats;
    result.tracks.reserve(by_vehicle.size());
    for (auto& [vid, samples] : by_vehicle) {
        std::stable_sort(samples.begin(), samples.end(),
                         [](const TrajectorySample& a, const TrajectorySample& b) {
                             return time_tick(a.time) < time_tick(b.time);
                         });
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (time_tick(samples[i].time) == time_tick(samples[i - 1].time)) {
                throw DataError("non-monotone time for vehicle " + std::to_string(vid) +
                                " at t=" + std::to_string(samples[i].time));
            }
        }
        result.tracks.push_back(VehicleTrack{vid, std::move(samples)});
    }
    return result;
}

ParsedTrajectories parse_trajectory_file(const std::filesystem::path& path,
                                         const ColumnSchema& schema,
                                         const ParseLimits& limits) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open trajectory file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trajectory_text(buf.str(), schema, limits);
}

}  // namespace cfrl
