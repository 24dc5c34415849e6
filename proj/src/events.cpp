#include "cfrl/events.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "cfrl/errors.hpp"
#include "cfrl/rng.hpp"

namespace cfrl {

namespace {

constexpr std::uint64_t kSplitStream = 0x5117;

using TrackIndex = std::unordered_map<int, const VehicleTrack*>;

// Smallest sample count whose duration (n * dt) strictly exceeds
// min_duration; integer arithmetic avoids float-boundary surprises
// like 150 * 0.1 > 15.0 being true in doubles.
std::size_t min_samples_for(const ExtractionConfig& config) {
    return static_cast<std::size_t>(
               std::floor(config.min_duration / config.dt + 1e-9)) + 1;
}

const TrajectorySample* sample_at_tick(const VehicleTrack& track, long long tick) {
    auto it = std::lower_bound(track.samples.begin(), track.samples.end(), tick,
                               [](const TrajectorySample& s, long long v) {
                                   return time_tick(s.time) < v;
                               });
    if (it == track.samples.end() || time_tick(it->time) != tick) return nullptr;
    return &*it;
}

struct PairedSample {
    const TrajectorySample* leader = nullptr;
    bool ok = false;
};

PairedSample pair_sample(const TrajectorySample& f, const TrackIndex& index,
                         const ExtractionConfig& config) {
    PairedSample p;
    if (f.leader_id <= 0) return p;
    auto it = index.find(f.leader_id);
    if (it == index.end()) return p;
    const TrajectorySample* l = sample_at_tick(*it->second, time_tick(f.time));
    if (l == nullptr) return p;
    if (l->lane_id != f.lane_id) return p;
    const double gap = l->position - f.position - l->vehicle_length;
    if (!(gap > config.min_gap)) return p;
    p.leader = l;
    p.ok = true;
    return p;
}

// Maximal runs over one follower track; events carry no ids yet.
std::vector<CfEvent> scan_track(const VehicleTrack& follower, const TrackIndex& index,
                                const ExtractionConfig& config) {
    std::vector<CfEvent> events;
    const auto& fs = follower.samples;
    const std::size_t min_samples = min_samples_for(config);

    std::size_t run_start = 0;
    std::vector<const TrajectorySample*> run_leaders;

    auto flush = [&](std::size_t run_end) {
        const std::size_t n = run_end - run_start;
        if (n >= min_samples) {
            CfEvent e;
            e.follower.assign(fs.begin() + static_cast<std::ptrdiff_t>(run_start),
                              fs.begin() + static_cast<std::ptrdiff_t>(run_end));
            e.leader.reserve(n);
            for (const TrajectorySample* l : run_leaders) e.leader.push_back(*l);
            e.duration = static_cast<double>(n) * config.dt;
            events.push_back(std::move(e));
        }
        run_leaders.clear();
    };

    bool in_run = false;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        PairedSample p = pair_sample(fs[i], index, config);
        bool extends = p.ok;
        if (extends && in_run) {
            const TrajectorySample& prev = fs[i - 1];
            extends = fs[i].leader_id == prev.leader_id &&
                      fs[i].lane_id == prev.lane_id &&
                      time_tick(fs[i].time) == time_tick(prev.time) + 1;
        }
        if (in_run && !extends) {
            flush(i);
            in_run = false;
        }
        if (p.ok && !in_run) {
            run_start = i;
            in_run = true;
        }
        if (in_run) run_leaders.push_back(p.leader);
    }
    if (in_run) flush(fs.size());
    return events;
}

TrackIndex build_index(const std::vector<VehicleTrack>& tracks) {
    TrackIndex index;
    index.reserve(tracks.size());
    for (const auto& t : tracks) index.emplace(t.vehicle_id, &t);
    return index;
}

std::vector<CfEvent> assign_ids(std::vector<std::vector<CfEvent>>&& per_track) {
    std::vector<CfEvent> all;
    for (auto& v : per_track) {
        for (auto& e : v) all.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < all.size(); ++i) all[i].event_id = static_cast<int>(i);
    return all;
}

}  // namespace

std::vector<CfEvent> extract_cf_events_serial(const std::vector<VehicleTrack>& tracks,
                                              const ExtractionConfig& config) {
    const TrackIndex index = build_index(tracks);
    std::vector<std::vector<CfEvent>> per_track(tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        per_track[i] = scan_track(tracks[i], index, config);
    }
    return assign_ids(std::move(per_track));
}

std::vector<CfEvent> extract_cf_events(const std::vector<VehicleTrack>& tracks,
                                       const ExtractionConfig& config) {
#ifdef _OPENMP
    const TrackIndex index = build_index(tracks);
    std::vector<std::vector<CfEvent>> per_track(tracks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tracks.size()); ++i) {
        per_track[static_cast<std::size_t>(i)] =
            scan_track(tracks[static_cast<std::size_t>(i)], index, config);
    }
    return assign_ids(std::move(per_track));
#else
    return extract_cf_events_serial(tracks, config);
#endif
}

std::string validate_event(const CfEvent& event, const ExtractionConfig& config) {
    const std::size_t n = event.follower.size();
    if (n == 0) return "event has no samples";
    if (event.leader.size() != n) return "leader/follower length mismatch";
    if (n < min_samples_for(config)) return "duration below minimum";
    if (std::abs(event.duration - static_cast<double>(n) * config.dt) > 1e-9) {
        return "duration inconsistent with sample count";
    }
    const int lane = event.follower[0].lane_id;
    const int leader_vid = event.leader[0].vehicle_id;
    const int follower_vid = event.follower[0].vehicle_id;
    for (std::size_t i = 0; i < n; ++i) {
        const TrajectorySample& l = event.leader[i];
        const TrajectorySample& f = event.follower[i];
        if (time_tick(l.time) != time_tick(f.time)) return "misaligned timestamps";
        if (i > 0 && time_tick(f.time) != time_tick(event.follower[i - 1].time) + 1) {
            return "non-consecutive timestamps";
        }
        if (l.lane_id != lane || f.lane_id != lane) return "lane change within event";
        if (l.vehicle_id != leader_vid) return "leader identity changes";
        if (f.vehicle_id != follower_vid) return "follower identity changes";
        if (f.leader_id != leader_vid) return "follower not following this leader";
        if (!(event.gap(i) > config.min_gap)) return "gap at or below minimum";
        if (l.speed < 0.0 || f.speed < 0.0) return "negative speed";
    }
    return {};
}

SplitResult split_events(std::vector<CfEvent> events, double train_fraction,
                         std::uint64_t seed) {
    if (events.size() < 2) {
        throw DataError("split requires at least 2 events");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must be in (0, 1)");
    }
    Rng rng = Rng::stream(seed, kSplitStream);
    for (std::size_t i = events.size() - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_index(i + 1);
        std::swap(events[i], events[j]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(events.size()) + 1e-9));
    SplitResult result;
    result.train.assign(std::make_move_iterator(events.begin()),
                        std::make_move_iterator(events.begin() + static_cast<std::ptrdiff_t>(n_train)));
    result.test.assign(std::make_move_iterator(events.begin() + static_cast<std::ptrdiff_t>(n_train)),
                       std::make_move_iterator(events.end()));
    return result;
}

std::vector<double> collect_headways(const std::vector<CfEvent>& events, double min_speed) {
    std::vector<double> headways;
    for (const auto& e : events) {
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double v = e.follower[i].speed;
            if (v < min_speed) continue;
            headways.push_back(e.gap(i) / v);
        }
    }
    return headways;
}

LognormalParams fit_headway_lognormal(const std::vector<CfEvent>& events, double min_speed) {
    const std::vector<double> headways = collect_headways(events, min_speed);
    if (headways.empty()) {
        throw NumericError("no valid headway samples to fit");
    }
    return fit_lognormal(headways);
}

namespace {

void print_double(std::FILE* f, double v, char sep) {
    std::fprintf(f, "%.17g%c", v, sep);
}

}  // namespace

void write_events_file(const std::filesystem::path& path, const std::vector<CfEvent>& events) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) {
        throw DataError("cannot open events file for writing: " + path.string());
    }
    std::fprintf(f, "# cfrl-events 1\n");
    std::fprintf(f, "# event <id> <n_samples> <lane_id> <leader_vid> <follower_vid> "
                    "<leader_length> <follower_length>\n");
    std::fprintf(f, "# row: time leader_pos leader_speed leader_acc follower_pos "
                    "follower_speed follower_acc gap\n");
    for (const auto& e : events) {
        std::fprintf(f, "event %d %zu %d %d %d %.17g %.17g\n", e.event_id, e.size(),
                     e.follower[0].lane_id, e.leader[0].vehicle_id,
                     e.follower[0].vehicle_id, e.leader[0].vehicle_length,
                     e.follower[0].vehicle_length);
        for (std::size_t i = 0; i < e.size(); ++i) {
            const TrajectorySample& l = e.leader[i];
            const TrajectorySample& fo = e.follower[i];
            print_double(f, fo.time, ' ');
            print_double(f, l.position, ' ');
            print_double(f, l.speed, ' ');
            print_double(f, l.acceleration, ' ');
            print_double(f, fo.position, ' ');
            print_double(f, fo.speed, ' ');
            print_double(f, fo.acceleration, ' ');
            print_double(f, e.gap(i), '\n');
        }
    }
    std::fclose(f);
}

std::vector<CfEvent> read_events_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open events file: " + path.string());
    }
    std::vector<CfEvent> events;
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& why) -> DataError {
        return DataError(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;

        int id, lane, leader_vid, follower_vid;
        std::size_t n;
        double leader_len, follower_len;
        if (std::sscanf(line.c_str(), "event %d %zu %d %d %d %lg %lg", &id, &n, &lane,
                        &leader_vid, &follower_vid, &leader_len, &follower_len) != 7) {
            throw fail("expected event header");
        }
        if (n == 0) throw fail("event with zero samples");

        CfEvent e;
        e.event_id = id;
        e.leader.reserve(n);
        e.follower.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::getline(in, line)) throw fail("unexpected end of file inside event");
            ++line_no;
            double t, lp, lv, la, fp, fv, fa, gap;
            if (std::sscanf(line.c_str(), "%lg %lg %lg %lg %lg %lg %lg %lg", &t, &lp, &lv,
                            &la, &fp, &fv, &fa, &gap) != 8) {
                throw fail("expected 8 numeric columns");
            }
            TrajectorySample l{t, lp, lv, la, lane, leader_vid, 0, leader_len};
            TrajectorySample fo{t, fp, fv, fa, lane, follower_vid, leader_vid, follower_len};
            e.leader.push_back(l);
            e.follower.push_back(fo);
            const double recomputed = e.gap(i);
            if (std::abs(recomputed - gap) > 1e-9 * std::max(1.0, std::abs(gap))) {
                throw fail("gap column inconsistent with positions");
            }
        }
        e.duration = static_cast<double>(n) * kSampleInterval;
        events.push_back(std::move(e));
    }
    return events;
}

}  // namespace cfrl
