// On-disk dataset layout, config files, and the text-table helpers shared by
// every emitter. All text is UTF-8 with LF line endings.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "emosig/types.hpp"

namespace emosig {

enum class DatasetFlavor { EmoWearLike, DeapLike, Synthetic };

std::string flavor_name(DatasetFlavor flavor);
DatasetFlavor parse_flavor(const std::string& text);

struct Dataset {
    std::vector<TrialRecord> trials;  // sorted by (subject_id, video_id)
    DatasetFlavor flavor = DatasetFlavor::Synthetic;
};

// Layout under `root`:
//   <subject>/ratings.csv            one row per video
//   <subject>/<video>/<channel>.csv  header line, then timestamp,value rows
//   exclusions.csv                   optional (subject_id,video_id,reason)
//
// A channel file starts with `channel=<kind> units=<units> rate=<hz>`. The
// samples are stored as uniform when the timestamps sit on the nominal grid
// (within 0.1% of the period) and as timestamp/value pairs otherwise.
// Malformed content raises ParseError naming file and line; signal-quality
// judgments (zero length, non-finite values, ...) are left to validate_trial.
Dataset load_dataset(const std::string& root, DatasetFlavor flavor);

// Writes the same layout (creates directories, overwrites files).
void write_dataset(const std::string& root, const std::vector<TrialRecord>& trials);

// Conventional units written into channel headers.
std::string channel_units(Channel channel);

// Flat key-value text: `section.key = value` lines, '#' comments, blank lines
// ignored. First-appearance order is retained; duplicate keys keep the last
// value.
struct KvFile {
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    const std::string* find(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    void set(const std::string& key, const std::string& value);
};

KvFile parse_kv_text(const std::string& text, const std::string& origin);
KvFile load_kv_file(const std::string& path);
void write_kv_file(const std::string& path, const KvFile& kv);

// Typed accessors; a present-but-unparsable value raises ConfigError naming
// the key.
double kv_double(const KvFile& kv, const std::string& key, double fallback);
std::int64_t kv_int(const KvFile& kv, const std::string& key, std::int64_t fallback);
bool kv_bool(const KvFile& kv, const std::string& key, bool fallback);

// Tab-delimited report tables.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

void write_table(const std::string& path, const Table& table);
Table read_table(const std::string& path);

// "%.3f"-style fixed formatting (reports) and shortest-round-trip formatting
// (full-precision companions). NaN prints as "nan".
std::string fmt_fixed(double v, int decimals = 3);
std::string fmt_full(double v);

}  // namespace emosig
