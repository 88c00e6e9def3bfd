// Copyright 2026 The Timebin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "timebin/config_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace timebin {

using nlohmann::json;

namespace {

/// Value given in a key's unit to SI. Sub-unit scales divide by the exact
/// power of ten, so "10" microseconds parses to the same double as 10e-6.
double from_unit(double v, double scale) { return scale < 1 ? v / std::round(1 / scale) : v * scale; }

/// Reads keys from one JSON object and rejects any it was not asked about.
class Section {
   public:
    Section(const json &doc, std::string name) : name_(std::move(name)) {
        if (doc.contains(name_)) {
            obj_ = &doc.at(name_);
            if (!obj_->is_object()) throw ConfigParseError("section '" + name_ + "' must be an object");
        }
    }
    Section(const json *obj, std::string name) : obj_(obj), name_(std::move(name)) {}

    bool present() const { return obj_ != nullptr; }

    void number(const char *key, double &value, double scale = 1.0) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return;
        const json &v = obj_->at(key);
        if (!v.is_number()) throw ConfigParseError(name_ + "." + key + " must be a number");
        value = from_unit(v.get<double>(), scale);
    }

    void integer(const char *key, std::uint64_t &value) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return;
        const json &v = obj_->at(key);
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            value = v.get<std::uint64_t>();
        } else if (v.is_number_float() && v.get<double>() >= 0 && std::floor(v.get<double>()) == v.get<double>() &&
                   v.get<double>() < 1.8e19) {
            value = static_cast<std::uint64_t>(v.get<double>());
        } else {
            throw ConfigParseError(name_ + "." + key + " must be a non-negative integer");
        }
    }

    void string(const char *key, std::string &value) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return;
        const json &v = obj_->at(key);
        if (!v.is_string()) throw ConfigParseError(name_ + "." + key + " must be a string");
        value = v.get<std::string>();
    }

    const json *child(const char *key) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return nullptr;
        return &obj_->at(key);
    }

    void finish() const {
        if (!obj_) return;
        for (const auto &[key, _] : obj_->items()) {
            if (!seen_.count(key)) throw ConfigParseError("unknown key '" + name_ + "." + key + "'");
        }
    }

   private:
    const json *obj_ = nullptr;
    std::string name_;
    std::set<std::string> seen_;
};

void read_fiber(const json &doc, const char *name, FiberSpec &f) {
    Section s(doc, name);
    s.number("length_km", f.length_km);
    s.number("attenuation_db_per_km", f.attenuation_db_per_km);
    s.number("dispersion_slope_ps_per_nm2_km", f.dispersion_slope);
    s.number("zero_dispersion_wavelength_nm", f.zero_dispersion_wavelength);
    s.number("center_wavelength_nm", f.center_wavelength);
    s.number("filter_bandwidth_nm", f.filter_bandwidth);
    s.number("phase_jitter_rms_rad", f.phase_jitter_rms);
    s.finish();
}

void read_detector(const json &doc, const char *name, DetectorSpec &d) {
    Section s(doc, name);
    s.number("efficiency", d.efficiency);
    s.number("dark_rate_hz", d.dark_rate);
    s.number("dead_time_us", d.dead_time, 1e-6);
    s.number("jitter_rms_ps", d.jitter_rms, 1e-12);
    s.finish();
}

void read_analyzer(const json &doc, const char *name, InterferometerSpec &a, bool allow_arrangement) {
    Section s(doc, name);
    s.number("delay_ns", a.delay, 1e-9);
    s.number("phi_analyzer_rad", a.phi_analyzer);
    s.number("excess_loss_db", a.excess_loss_db);
    s.number("circulator_loss_db", a.circulator_loss_db);
    if (allow_arrangement) {
        std::string arrangement(arrangement_name(a.arrangement));
        s.string("arrangement", arrangement);
        auto parsed = parse_arrangement(arrangement);
        if (!parsed) throw ConfigParseError("analyzer.arrangement must be 'folded' or 'two_independent'");
        a.arrangement = *parsed;
    }
    s.finish();
    a.phi_analyzer = wrap_phase(a.phi_analyzer);
}

json fiber_json(const FiberSpec &f) {
    return {{"length_km", f.length_km},
            {"attenuation_db_per_km", f.attenuation_db_per_km},
            {"dispersion_slope_ps_per_nm2_km", f.dispersion_slope},
            {"zero_dispersion_wavelength_nm", f.zero_dispersion_wavelength},
            {"center_wavelength_nm", f.center_wavelength},
            {"filter_bandwidth_nm", f.filter_bandwidth},
            {"phase_jitter_rms_rad", f.phase_jitter_rms}};
}

/// Value in the key's unit that parses back to exactly `si`; `scale` is the
/// factor applied on parsing.
double in_unit(double si, double scale) {
    const double v = scale < 1 ? si * std::round(1 / scale) : si / scale;
    double lo = v, hi = v;
    for (int i = 0; i < 4; i++) {
        if (from_unit(lo, scale) == si) return lo;
        if (from_unit(hi, scale) == si) return hi;
        lo = std::nextafter(lo, -HUGE_VAL);
        hi = std::nextafter(hi, HUGE_VAL);
    }
    return v;
}

json detector_json(const DetectorSpec &d) {
    return {{"efficiency", d.efficiency},
            {"dark_rate_hz", d.dark_rate},
            {"dead_time_us", in_unit(d.dead_time, 1e-6)},
            {"jitter_rms_ps", in_unit(d.jitter_rms, 1e-12)}};
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> uniform_phases(int n) {
    std::vector<double> out;
    for (int i = 0; i < n; i++) out.push_back(2 * std::numbers::pi * i / n);
    return out;
}

ConfigFile parse_config(const json &doc) {
    if (!doc.is_object()) throw ConfigParseError("configuration must be a JSON object");
    static const std::set<std::string> sections = {"source",     "fiber_a",    "fiber_b", "analyzer",
                                                   "analyzer_b", "detector_a", "detector_b", "windows",
                                                   "run",        "scan",       "output"};
    for (const auto &[key, _] : doc.items()) {
        if (!sections.count(key)) throw ConfigParseError("unknown section '" + key + "'");
    }

    ConfigFile out;
    ExperimentConfig &c = out.experiment;
    {
        Section s(doc, "source");
        s.number("rep_rate_hz", c.source.rep_rate);
        s.number("mean_pairs", c.source.mean_pairs);
        s.number("arm_transmission_a", c.source.arm_transmission_a);
        s.number("arm_transmission_b", c.source.arm_transmission_b);
        s.number("phi_pump_rad", c.source.phi_pump);
        s.number("bin_separation_ns", c.source.bin_separation, 1e-9);
        s.number("pulse_width_rms_ps", c.source.pulse_width, 1e-12);
        s.number("collection_loss_db", c.source.collection_loss_db);
        s.finish();
    }
    read_fiber(doc, "fiber_a", c.fiber_a);
    read_fiber(doc, "fiber_b", c.fiber_b);
    c.analyzer.delay = c.source.bin_separation;
    c.analyzer_b.delay = c.source.bin_separation;
    read_analyzer(doc, "analyzer", c.analyzer, true);
    read_analyzer(doc, "analyzer_b", c.analyzer_b, false);
    c.analyzer_b.arrangement = c.analyzer.arrangement;
    read_detector(doc, "detector_a", c.detector_a);
    read_detector(doc, "detector_b", c.detector_b);
    {
        Section s(doc, "windows");
        s.number("window_width_ps", c.windows.window_width, 1e-12);
        s.finish();
        c.windows.delay = c.source.bin_separation;
    }
    {
        Section s(doc, "run");
        double integration = -1;
        s.number("integration_s", integration);
        s.integer("n_pulses", c.n_pulses);
        s.integer("rng_seed", c.rng_seed);
        s.integer("batch_pulses", c.batch_pulses);
        s.number("histogram_bin_ps", c.histogram_bin_width, 1e-12);
        s.finish();
        if (integration >= 0) {
            if (s.present() && doc.at("run").contains("n_pulses")) {
                throw ConfigParseError("run: give either n_pulses or integration_s, not both");
            }
            c.n_pulses = static_cast<std::uint64_t>(std::llround(integration * c.source.rep_rate));
        }
    }
    {
        Section s(doc, "scan");
        out.has_scan = s.present();
        std::uint64_t reps = 1;
        s.integer("repetitions", reps);
        const json *list = s.child("phases_rad");
        const json *lin = s.child("linspace_rad");
        s.finish();
        if (list && lin) throw ConfigParseError("scan: give either phases_rad or linspace_rad, not both");
        if (list) {
            if (!list->is_array()) throw ConfigParseError("scan.phases_rad must be an array");
            for (const auto &v : *list) {
                if (!v.is_number()) throw ConfigParseError("scan.phases_rad entries must be numbers");
                out.phases.push_back(v.get<double>());
            }
        } else if (lin) {
            if (!lin->is_object()) throw ConfigParseError("scan.linspace_rad must be an object");
            Section l(lin, "scan.linspace_rad");
            double start = 0, stop = 2 * std::numbers::pi;
            std::uint64_t count = 16;
            l.number("start", start);
            l.number("stop", stop);
            l.integer("count", count);
            l.finish();
            // stop is excluded so a full period does not repeat its endpoint
            for (std::uint64_t i = 0; i < count; i++) {
                out.phases.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count));
            }
        } else {
            out.phases = uniform_phases(16);
        }
        if (reps == 0 || reps > 100000) throw ConfigParseError("scan.repetitions must lie in [1, 100000]");
        out.repetitions = static_cast<int>(reps);
    }
    {
        Section s(doc, "output");
        s.string("directory", out.output_directory);
        s.finish();
    }
    return out;
}

ConfigFile parse_config_text(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigParseError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const ConfigFile &config) {
    const ExperimentConfig &c = config.experiment;
    json doc;
    doc["source"] = {{"rep_rate_hz", c.source.rep_rate},
                     {"mean_pairs", c.source.mean_pairs},
                     {"arm_transmission_a", c.source.arm_transmission_a},
                     {"arm_transmission_b", c.source.arm_transmission_b},
                     {"phi_pump_rad", c.source.phi_pump},
                     {"bin_separation_ns", in_unit(c.source.bin_separation, 1e-9)},
                     {"pulse_width_rms_ps", in_unit(c.source.pulse_width, 1e-12)},
                     {"collection_loss_db", c.source.collection_loss_db}};
    doc["fiber_a"] = fiber_json(c.fiber_a);
    doc["fiber_b"] = fiber_json(c.fiber_b);
    doc["analyzer"] = {{"arrangement", std::string(arrangement_name(c.analyzer.arrangement))},
                       {"delay_ns", in_unit(c.analyzer.delay, 1e-9)},
                       {"phi_analyzer_rad", c.analyzer.phi_analyzer},
                       {"excess_loss_db", c.analyzer.excess_loss_db},
                       {"circulator_loss_db", c.analyzer.circulator_loss_db}};
    doc["analyzer_b"] = {{"delay_ns", in_unit(c.analyzer_b.delay, 1e-9)},
                         {"phi_analyzer_rad", c.analyzer_b.phi_analyzer},
                         {"excess_loss_db", c.analyzer_b.excess_loss_db},
                         {"circulator_loss_db", c.analyzer_b.circulator_loss_db}};
    doc["detector_a"] = detector_json(c.detector_a);
    doc["detector_b"] = detector_json(c.detector_b);
    doc["windows"] = {{"window_width_ps", in_unit(c.windows.window_width, 1e-12)}};
    doc["run"] = {{"n_pulses", c.n_pulses},
                  {"rng_seed", c.rng_seed},
                  {"batch_pulses", c.batch_pulses},
                  {"histogram_bin_ps", in_unit(c.histogram_bin_width, 1e-12)}};
    doc["scan"] = {{"phases_rad", config.phases}, {"repetitions", config.repetitions}};
    if (!config.output_directory.empty()) doc["output"] = {{"directory", config.output_directory}};
    return doc;
}

std::string config_hash(const ConfigFile &config) { return fnv1a_hex(config_to_json(config).dump()); }

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_provenance(std::ostream &out, const Provenance &prov) {
    out << "# timebin " << kVersion << "\n";
    out << "# config_hash=" << prov.config_hash << "\n";
    out << "# seed=" << prov.seed << "\n";
}

void write_histogram_csv(std::ostream &out, const RunResult &result, const Provenance &prov) {
    write_provenance(out, prov);
    out << "time_ns,counts_a,counts_b\n";
    for (std::size_t k = 0; k < result.histogram_a.counts.size(); k++) {
        out << fmt_double(result.histogram_a.bin_center(k) * 1e9) << "," << result.histogram_a.counts[k] << ","
            << (k < result.histogram_b.counts.size() ? result.histogram_b.counts[k] : 0) << "\n";
    }
}

void write_run_summary(std::ostream &out, const RunResult &result, const ExperimentConfig &config,
                       const Provenance &prov) {
    write_provenance(out, prov);
    const double acc = accidental_estimate(result, config);
    out << "key,value\n";
    out << "n_pulses," << result.n_pulses << "\n";
    out << "duration_s," << fmt_double(result.duration) << "\n";
    out << "singles_a," << result.singles_a << "\n";
    out << "singles_b," << result.singles_b << "\n";
    out << "middle_singles_a," << result.middle_singles_a << "\n";
    out << "middle_singles_b," << result.middle_singles_b << "\n";
    out << "middle_pulses_a," << result.middle_pulses_a << "\n";
    out << "middle_pulses_b," << result.middle_pulses_b << "\n";
    out << "triple_coincidences," << result.triple_coincidences << "\n";
    out << "accidental_estimate," << fmt_double(acc) << "\n";
    out << "phase_offset_rad," << fmt_double(result.phase_offset) << "\n";
}

void write_scan_csv(std::ostream &out, const FringeScan &scan, const Provenance &prov) {
    write_provenance(out, prov);
    if (!scan.points.empty()) out << "# integration_s=" << fmt_double(scan.points.front().integration) << "\n";
    out << "phase_rad,raw,accidental,net\n";
    for (const auto &p : scan.points) {
        out << fmt_double(p.phase) << "," << fmt_double(p.raw_count) << "," << fmt_double(p.accidental_estimate)
            << "," << fmt_double(p.net_count) << "\n";
    }
}

FringeScan read_scan_csv(std::istream &in, Provenance *prov) {
    FringeScan scan;
    std::string line;
    std::size_t row = 0;
    bool header = false;
    double integration = 0;
    auto parse = [&](std::string_view field, const char *name) {
        double v = 0;
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
            throw CsvError(std::string("row ") + std::to_string(row) + ": bad " + name + " value", row);
        }
        return v;
    };
    while (std::getline(in, line)) {
        row++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto value_of = [&](const std::string &key) -> std::optional<std::string> {
                const std::string tag = "# " + key + "=";
                if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
                return std::nullopt;
            };
            if (auto v = value_of("integration_s")) integration = std::strtod(v->c_str(), nullptr);
            if (prov) {
                if (auto v = value_of("seed")) prov->seed = std::strtoull(v->c_str(), nullptr, 10);
                if (auto v = value_of("config_hash")) prov->config_hash = *v;
            }
            continue;
        }
        if (!header) {
            if (line != "phase_rad,raw,accidental,net") {
                throw CsvError("row " + std::to_string(row) + ": expected header phase_rad,raw,accidental,net", row);
            }
            header = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 4) {
            throw CsvError("row " + std::to_string(row) + ": expected 4 columns", row);
        }
        const double phase = parse(fields[0], "phase_rad");
        const double raw = parse(fields[1], "raw");
        const double acc = parse(fields[2], "accidental");
        parse(fields[3], "net");
        if (raw < 0) throw CsvError("row " + std::to_string(row) + ": negative raw count", row);
        if (acc < 0) throw CsvError("row " + std::to_string(row) + ": negative accidental estimate", row);
        scan.add(phase, raw, acc, integration);
    }
    if (!header) throw CsvError("missing header phase_rad,raw,accidental,net", row + 1);
    return scan;
}

FitReport analyze_scan(const FringeScan &scan, const FitOptions &options) {
    FringeScan raw = scan;
    for (auto &p : raw.points) p.net_count = p.raw_count;
    raw.accidentals_subtracted = false;
    FitReport report;
    report.raw = fit_fringe(raw, options);
    const FringeScan net = subtract_accidentals(raw);
    report.net = fit_fringe(net, options);
    report.accidentals_clamped = net.clamped;
    return report;
}

void write_fit_report(std::ostream &out, const std::vector<FitReport> &reports,
                      const std::vector<Provenance> &provs) {
    if (!provs.empty()) write_provenance(out, provs.front());
    out << "repetition,v_raw,v_raw_sigma,v_net,v_net_sigma,v_net_unclamped,chi2_net,offset_net,amplitude_net,"
           "phase_origin_rad,clamped,seed,config_hash\n";
    for (std::size_t i = 0; i < reports.size(); i++) {
        const auto &r = reports[i];
        const Provenance prov = i < provs.size() ? provs[i] : Provenance{};
        out << i << "," << fmt_double(r.raw.visibility) << "," << fmt_double(r.raw.visibility_sigma) << ","
            << fmt_double(r.net.visibility) << "," << fmt_double(r.net.visibility_sigma) << ","
            << fmt_double(r.net.raw_visibility) << "," << fmt_double(r.net.residual_chi2) << ","
            << fmt_double(r.net.offset) << "," << fmt_double(r.net.amplitude) << ","
            << fmt_double(r.net.phase_origin) << "," << (r.net.clamped || r.accidentals_clamped ? 1 : 0) << ","
            << prov.seed << "," << prov.config_hash << "\n";
    }
}

}  // namespace timebin
