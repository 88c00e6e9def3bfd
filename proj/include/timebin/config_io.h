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

#ifndef TIMEBIN_CONFIG_IO_H
#define TIMEBIN_CONFIG_IO_H

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "timebin/analysis.h"
#include "timebin/engine.h"

namespace timebin {

inline constexpr const char *kVersion = "0.1.0";

/// Malformed document: bad JSON, unknown key, wrong type.
struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed CSV; `row` is the 1-based line number in the file.
struct CsvError : std::runtime_error {
    CsvError(const std::string &what, std::size_t row) : std::runtime_error(what), row(row) {}
    std::size_t row;
};

struct ConfigFile {
    ExperimentConfig experiment;
    std::vector<double> phases;
    int repetitions = 1;
    bool has_scan = false;
    std::string output_directory;
};

/// Parses a JSON configuration. Physical quantities carry their unit in the key
/// name; missing keys take the library defaults and unknown keys are rejected.
/// Throws ConfigParseError. Physical validation is left to
/// ExperimentConfig::validate.
ConfigFile parse_config(const nlohmann::json &doc);
ConfigFile parse_config_text(const std::string &text);

/// Inverse of parse_config; every key is written.
nlohmann::json config_to_json(const ConfigFile &config);

/// FNV-1a 64 of the canonical (sorted, compact) JSON, as 16 hex digits.
std::string config_hash(const ConfigFile &config);
std::string fnv1a_hex(std::string_view text);

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
};

void write_provenance(std::ostream &out, const Provenance &prov);

/// Columns: time_ns,counts_a,counts_b.
void write_histogram_csv(std::ostream &out, const RunResult &result, const Provenance &prov);

/// key,value rows summarizing a run.
void write_run_summary(std::ostream &out, const RunResult &result, const ExperimentConfig &config,
                       const Provenance &prov);

/// Columns: phase_rad,raw,accidental,net. Integration time goes into the
/// header comment. Doubles are written round-trip exact.
void write_scan_csv(std::ostream &out, const FringeScan &scan, const Provenance &prov);

/// Reads the scan schema. Lines starting with '#' are comments; a
/// "# integration_s=" / "# seed=" / "# config_hash=" comment is picked up when
/// present. The net column is recomputed by subtract_accidentals downstream.
FringeScan read_scan_csv(std::istream &in, Provenance *prov = nullptr);

struct FitReport {
    FitResult raw;
    FitResult net;
    bool accidentals_clamped = false;
};

FitReport analyze_scan(const FringeScan &scan, const FitOptions &options = {});

/// Columns: repetition,v_raw,v_raw_sigma,v_net,v_net_sigma,v_net_unclamped,
/// chi2_net,offset_net,amplitude_net,phase_origin_rad,clamped,seed,config_hash.
void write_fit_report(std::ostream &out, const std::vector<FitReport> &reports,
                      const std::vector<Provenance> &provs);

/// Uniform grid of n phases over [0, 2 pi).
std::vector<double> uniform_phases(int n);

}  // namespace timebin

#endif
