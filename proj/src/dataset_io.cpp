#include "emosig/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace emosig {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split(const std::string& s, char delim, std::size_t max_fields = 0) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        if (max_fields != 0 && out.size() + 1 == max_fields) {
            out.push_back(s.substr(start));
            break;
        }
        std::size_t pos = s.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& token, const std::string& path, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
        if (used != token.size()) parse_fail(path, line, "trailing junk in number '" + token + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(path, line, "expected a number, got '" + token + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::string text = read_text(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::string line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
        start = pos + 1;
    }
    return lines;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) throw Error(ErrorCode::ParseError, path + ": cannot open for writing");
    return out;
}

bool on_uniform_grid(const std::vector<double>& ts, double rate) {
    if (ts.size() < 2) return true;
    double period = 1.0 / rate;
    double tol = period * 1e-3;
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (std::fabs(ts[i] - ts[i - 1] - period) > tol) return false;
    return true;
}

SignalData load_channel_file(const std::string& path, Channel* out_channel) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) parse_fail(path, 1, "missing header line");

    // Header: channel=<kind> units=<units> rate=<hz>
    std::string kind, units, rate_text;
    std::istringstream head(lines[0]);
    std::string token;
    while (head >> token) {
        std::size_t eq = token.find('=');
        if (eq == std::string::npos) parse_fail(path, 1, "bad header token '" + token + "'");
        std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        if (key == "channel")
            kind = value;
        else if (key == "units")
            units = value;
        else if (key == "rate")
            rate_text = value;
        else
            parse_fail(path, 1, "unknown header key '" + key + "'");
    }
    if (kind.empty() || units.empty() || rate_text.empty())
        parse_fail(path, 1, "header needs channel=, units= and rate=");

    std::optional<Channel> channel = parse_channel(kind);
    if (!channel) parse_fail(path, 1, "unknown channel kind '" + kind + "'");
    double rate = parse_double(rate_text, path, 1);
    if (!(rate > 0.0)) parse_fail(path, 1, "nominal rate must be positive");

    std::vector<double> ts, vals;
    ts.reserve(lines.size());
    vals.reserve(lines.size());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != 2)
            parse_fail(path, i + 1, "expected 2 columns (timestamp_seconds,value)");
        ts.push_back(parse_double(trim(cells[0]), path, i + 1));
        vals.push_back(parse_double(trim(cells[1]), path, i + 1));
    }

    *out_channel = *channel;
    if (on_uniform_grid(ts, rate)) {
        UniformSignal u;
        u.samples = std::move(vals);
        u.rate = rate;
        u.start_time = ts.empty() ? 0.0 : ts.front();
        return u;
    }
    IrregularSignal irr;
    irr.timestamps = std::move(ts);
    irr.values = std::move(vals);
    return irr;
}

struct RatingsRow {
    SamRatings ratings;
};

std::map<std::string, RatingsRow> load_ratings_file(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) parse_fail(path, 1, "empty ratings file");
    std::vector<std::string> header = split(trim(lines[0]), ',');
    const char* expect[] = {"video_id", "valence", "arousal", "dominance", "liking", "familiarity"};
    if (header.size() != 6) parse_fail(path, 1, "ratings header needs 6 columns");
    for (std::size_t i = 0; i < 6; ++i)
        if (trim(header[i]) != expect[i])
            parse_fail(path, 1, "ratings column " + std::to_string(i + 1) + " must be '" +
                                    expect[i] + "'");

    std::map<std::string, RatingsRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != 6) parse_fail(path, i + 1, "expected 6 columns");
        std::string video = trim(cells[0]);
        if (video.empty()) parse_fail(path, i + 1, "empty video_id");
        if (rows.count(video)) parse_fail(path, i + 1, "duplicate video_id '" + video + "'");

        RatingsRow row;
        row.ratings.valence = parse_double(trim(cells[1]), path, i + 1);
        row.ratings.arousal = parse_double(trim(cells[2]), path, i + 1);
        auto optional_cell = [&](const std::string& cell) -> std::optional<double> {
            std::string t = trim(cell);
            if (t.empty()) return std::nullopt;
            return parse_double(t, path, i + 1);
        };
        row.ratings.dominance = optional_cell(cells[3]);
        row.ratings.liking = optional_cell(cells[4]);
        row.ratings.familiarity = optional_cell(cells[5]);
        rows.emplace(std::move(video), std::move(row));
    }
    return rows;
}

std::vector<std::string> sorted_entries(const fs::path& dir, bool directories) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (directories ? entry.is_directory() : entry.is_regular_file())
            names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

std::string flavor_name(DatasetFlavor flavor) {
    switch (flavor) {
        case DatasetFlavor::EmoWearLike: return "emowear";
        case DatasetFlavor::DeapLike: return "deap";
        case DatasetFlavor::Synthetic: return "synthetic";
    }
    throw Error(ErrorCode::ConfigError, "unknown flavor");
}

DatasetFlavor parse_flavor(const std::string& text) {
    std::string t = lower(trim(text));
    if (t == "emowear" || t == "emowear_like") return DatasetFlavor::EmoWearLike;
    if (t == "deap" || t == "deap_like") return DatasetFlavor::DeapLike;
    if (t == "synthetic" || t == "synth") return DatasetFlavor::Synthetic;
    throw Error(ErrorCode::ConfigError, "unknown dataset flavor '" + text + "'");
}

Dataset load_dataset(const std::string& root, DatasetFlavor flavor) {
    fs::path base(root);
    if (!fs::is_directory(base))
        throw Error(ErrorCode::ParseError, root + ": dataset root is not a directory");

    Dataset ds;
    ds.flavor = flavor;

    for (const std::string& subject : sorted_entries(base, true)) {
        fs::path sdir = base / subject;
        fs::path ratings_path = sdir / "ratings.csv";
        if (!fs::is_regular_file(ratings_path)) continue;  // not a subject directory

        std::map<std::string, RatingsRow> ratings = load_ratings_file(ratings_path.string());

        for (const std::string& video : sorted_entries(sdir, true)) {
            fs::path vdir = sdir / video;
            TrialRecord trial;
            trial.subject_id = subject;
            trial.video_id = video;

            auto rit = ratings.find(video);
            if (rit == ratings.end())
                throw Error(ErrorCode::ParseError, ratings_path.string() + ": no ratings row for " +
                                                       subject + "/" + video);
            trial.ratings = rit->second.ratings;

            for (const std::string& file : sorted_entries(vdir, false)) {
                if (file.size() < 5 || file.substr(file.size() - 4) != ".csv") continue;
                Channel channel;
                SignalData data = load_channel_file((vdir / file).string(), &channel);
                if (trial.channels.count(channel))
                    throw Error(ErrorCode::ParseError, (vdir / file).string() +
                                                           ": duplicate channel " +
                                                           channel_name(channel));
                trial.channels.emplace(channel, std::move(data));
            }
            ds.trials.push_back(std::move(trial));
        }
    }

    if (ds.trials.empty())
        throw Error(ErrorCode::ParseError, root + ": no trials found (expected "
                                                  "<subject>/ratings.csv and <subject>/<video>/ "
                                                  "directories)");

    // Optional faulty-trial sidecar.
    fs::path excl = base / "exclusions.csv";
    if (fs::is_regular_file(excl)) {
        std::vector<std::string> lines = read_lines(excl.string());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string line = trim(lines[i]);
            if (line.empty()) continue;
            std::vector<std::string> cells = split(line, ',', 3);
            if (cells.size() != 3)
                parse_fail(excl.string(), i + 1, "expected subject_id,video_id,reason");
            if (i == 0 && trim(cells[0]) == "subject_id") continue;  // header row
            std::string subject = trim(cells[0]), video = trim(cells[1]);
            for (TrialRecord& t : ds.trials)
                if (t.subject_id == subject && t.video_id == video) t.faulty = true;
        }
    }

    std::sort(ds.trials.begin(), ds.trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
        if (a.subject_id != b.subject_id) return a.subject_id < b.subject_id;
        return a.video_id < b.video_id;
    });
    return ds;
}

std::string channel_units(Channel channel) {
    switch (channel) {
        case Channel::Ecg: return "mV";
        case Channel::Bvp: return "au";
        case Channel::AccZ: return "m/s^2";
        case Channel::Scg: return "m/s^2";
        case Channel::Rsp: return "au";
        case Channel::Adr: return "au";
        case Channel::Eda: return "uS";
        case Channel::Skt: return "degC";
        case Channel::Emg: return "mV";
        case Channel::Eog: return "mV";
    }
    throw Error(ErrorCode::ConfigError, "unknown channel");
}

namespace {

std::string fmt_time(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    return buf;
}

std::string fmt_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.8g", v);
    return buf;
}

void write_channel_file(const std::string& path, Channel channel, const SignalData& data) {
    std::ofstream out = open_out(path);
    double rate;
    if (const auto* u = std::get_if<UniformSignal>(&data)) {
        rate = u->rate;
    } else {
        const auto& irr = std::get<IrregularSignal>(data);
        double span = irr.timestamps.size() >= 2
                          ? irr.timestamps.back() - irr.timestamps.front()
                          : 0.0;
        rate = span > 0.0 ? std::round((static_cast<double>(irr.timestamps.size()) - 1.0) / span)
                          : 1.0;
        if (!(rate > 0.0)) rate = 1.0;
    }
    out << "channel=" << channel_name(channel) << " units=" << channel_units(channel)
        << " rate=" << fmt_value(rate) << "\n";

    if (const auto* u = std::get_if<UniformSignal>(&data)) {
        for (std::size_t i = 0; i < u->size(); ++i)
            out << fmt_time(u->time_at(i)) << "," << fmt_value(u->samples[i]) << "\n";
    } else {
        const auto& irr = std::get<IrregularSignal>(data);
        for (std::size_t i = 0; i < irr.timestamps.size(); ++i)
            out << fmt_time(irr.timestamps[i]) << "," << fmt_value(irr.values[i]) << "\n";
    }
}

}  // namespace

void write_dataset(const std::string& root, const std::vector<TrialRecord>& trials) {
    if (trials.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to write");
    fs::path base(root);
    fs::create_directories(base);

    std::map<std::string, std::vector<const TrialRecord*>> by_subject;
    for (const TrialRecord& t : trials) by_subject[t.subject_id].push_back(&t);

    std::vector<const TrialRecord*> faulty;
    for (auto& [subject, list] : by_subject) {
        std::sort(list.begin(), list.end(), [](const TrialRecord* a, const TrialRecord* b) {
            return a->video_id < b->video_id;
        });
        fs::path sdir = base / subject;
        fs::create_directories(sdir);

        std::ofstream ratings = open_out((sdir / "ratings.csv").string());
        ratings << "video_id,valence,arousal,dominance,liking,familiarity\n";
        for (const TrialRecord* t : list) {
            auto opt = [](const std::optional<double>& v) {
                return v ? fmt_value(*v) : std::string();
            };
            ratings << t->video_id << "," << fmt_value(t->ratings.valence) << ","
                    << fmt_value(t->ratings.arousal) << "," << opt(t->ratings.dominance) << ","
                    << opt(t->ratings.liking) << "," << opt(t->ratings.familiarity) << "\n";

            fs::path vdir = sdir / t->video_id;
            fs::create_directories(vdir);
            for (const auto& [channel, data] : t->channels)
                write_channel_file((vdir / (channel_name(channel) + ".csv")).string(), channel,
                                   data);
            if (t->faulty) faulty.push_back(t);
        }
    }

    if (!faulty.empty()) {
        std::ofstream out = open_out((base / "exclusions.csv").string());
        out << "subject_id,video_id,reason\n";
        for (const TrialRecord* t : faulty)
            out << t->subject_id << "," << t->video_id << ",marked faulty at acquisition\n";
    }
}

// ---- key-value config files ----

bool KvFile::has(const std::string& key) const { return find(key) != nullptr; }

const std::string* KvFile::find(const std::string& key) const {
    const std::string* hit = nullptr;
    for (const auto& [k, v] : entries)
        if (k == key) hit = &v;  // last one wins
    return hit;
}

std::string KvFile::get(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

void KvFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries)
        if (k == key) {
            v = value;
            return;
        }
    entries.emplace_back(key, value);
}

KvFile parse_kv_text(const std::string& text, const std::string& origin) {
    KvFile kv;
    std::size_t lineno = 0, start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string raw = pos == std::string::npos ? text.substr(start)
                                                   : text.substr(start, pos - start);
        start = pos == std::string::npos ? text.size() + 1 : pos + 1;
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            parse_fail(origin, lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(origin, lineno, "empty key");
        kv.set(key, value);
    }
    return kv;
}

KvFile load_kv_file(const std::string& path) { return parse_kv_text(read_text(path), path); }

void write_kv_file(const std::string& path, const KvFile& kv) {
    std::ofstream out = open_out(path);
    for (const auto& [k, v] : kv.entries) out << k << " = " << v << "\n";
}

double kv_double(const KvFile& kv, const std::string& key, double fallback) {
    const std::string* v = kv.find(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        double d = std::stod(*v, &used);
        if (trim(v->substr(used)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ConfigError, "config key '" + key + "': expected a number, got '" +
                                            *v + "'");
}

std::int64_t kv_int(const KvFile& kv, const std::string& key, std::int64_t fallback) {
    const std::string* v = kv.find(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        long long i = std::stoll(*v, &used);
        if (trim(v->substr(used)).empty()) return i;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ConfigError, "config key '" + key + "': expected an integer, got '" +
                                            *v + "'");
}

bool kv_bool(const KvFile& kv, const std::string& key, bool fallback) {
    const std::string* v = kv.find(key);
    if (!v) return fallback;
    std::string t = lower(trim(*v));
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw Error(ErrorCode::ConfigError, "config key '" + key + "': expected a boolean, got '" +
                                            *v + "'");
}

// ---- report tables ----

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size())
        throw Error(ErrorCode::ShapeMismatch, "table row has " + std::to_string(row.size()) +
                                                  " cells, expected " +
                                                  std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

void write_table(const std::string& path, const Table& table) {
    std::ofstream out = open_out(path);
    for (std::size_t j = 0; j < table.columns.size(); ++j)
        out << (j ? "\t" : "") << table.columns[j];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "\t" : "") << row[j];
        out << "\n";
    }
}

Table read_table(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) parse_fail(path, 1, "empty table");
    Table t;
    t.columns = split(lines[0], '\t');
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> cells = split(lines[i], '\t');
        if (cells.size() != t.columns.size())
            parse_fail(path, i + 1, "row has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(t.columns.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::string fmt_fixed(double v, int decimals) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string fmt_full(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace emosig
