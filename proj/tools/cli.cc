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

#include "cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "timebin/analysis.h"
#include "timebin/config_io.h"
#include "timebin/engine.h"
#include "timebin/source_model.h"

namespace timebin {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return ss.str();
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    out.close();
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

fs::path ensure_directory(const std::string &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
    return fs::path(dir);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Common {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

ConfigFile load(const Common &c) {
    ConfigFile cfg = c.config_path.empty() ? parse_config_text("{}") : parse_config_text(read_file(c.config_path));
    if (c.seed) cfg.experiment.rng_seed = *c.seed;
    cfg.experiment.validate();
    return cfg;
}

std::string output_dir(const Common &c, const ConfigFile &cfg) {
    if (!c.out_path.empty()) return c.out_path;
    if (!cfg.output_directory.empty()) return cfg.output_directory;
    throw BadParams("no output directory: pass --out or set output.directory");
}

int cmd_run(const Common &c, std::ostream &out) {
    const ConfigFile cfg = load(c);
    const fs::path dir = ensure_directory(output_dir(c, cfg));
    const Provenance prov{config_hash(cfg), cfg.experiment.rng_seed};
    const RunResult result = run_pulses(cfg.experiment, {c.threads});

    std::ostringstream hist, summary;
    write_histogram_csv(hist, result, prov);
    write_run_summary(summary, result, cfg.experiment, prov);
    write_file(dir / "histogram.csv", hist.str());
    write_file(dir / "summary.csv", summary.str());
    out << "pulses " << result.n_pulses << "  singles " << result.singles_a << "/" << result.singles_b
        << "  triples " << result.triple_coincidences << "\n";
    return kExitOk;
}

int cmd_scan(const Common &c, std::ostream &out) {
    const ConfigFile cfg = load(c);
    if (!cfg.has_scan) throw ConfigError("scan section missing");
    const fs::path dir = ensure_directory(output_dir(c, cfg));

    std::vector<FitReport> reports;
    std::vector<Provenance> provs;
    const std::string hash = config_hash(cfg);
    for (int r = 0; r < cfg.repetitions; r++) {
        ExperimentConfig exp = cfg.experiment;
        if (r > 0) exp.rng_seed = derive_seed(cfg.experiment.rng_seed, 0x5ca40000ULL + static_cast<std::uint64_t>(r));
        const Provenance prov{hash, exp.rng_seed};
        const FringeScan scan = run_phase_scan(exp, cfg.phases, {c.threads});

        std::ostringstream csv;
        write_scan_csv(csv, scan, prov);
        const std::string name =
            cfg.repetitions == 1 ? std::string("scan.csv") : "scan_" + std::to_string(r) + ".csv";
        write_file(dir / name, csv.str());

        reports.push_back(analyze_scan(scan));
        provs.push_back(prov);
        out << "rep " << r << "  V_raw " << fmt(reports.back().raw.visibility) << "  V_net "
            << fmt(reports.back().net.visibility) << " +- " << fmt(reports.back().net.visibility_sigma) << "\n";
    }
    std::ostringstream report;
    write_fit_report(report, reports, provs);
    write_file(dir / "fit_report.csv", report.str());
    return kExitOk;
}

int cmd_fit(const std::string &scan_path, const std::string &out_path, std::ostream &out) {
    std::ifstream in(scan_path);
    if (!in) throw IoError("cannot read '" + scan_path + "'");
    Provenance prov;
    const FringeScan scan = read_scan_csv(in, &prov);
    const FitReport report = analyze_scan(scan);
    std::ostringstream text;
    write_fit_report(text, {report}, {prov});
    write_file(out_path, text.str());
    out << "V_raw " << fmt(report.raw.visibility) << "  V_net " << fmt(report.net.visibility) << " +- "
        << fmt(report.net.visibility_sigma) << "\n";
    return kExitOk;
}

struct CurveParams {
    std::string kind;
    int points = 101;
    std::optional<double> scale;
    double v_max = 1.0;
    double mu_min = 0.0;
    double mu_max = 2.0;
    std::vector<double> mu;
    std::string out_path;
};

int cmd_curve(const CurveParams &p, std::ostream &out) {
    std::ostringstream csv;
    std::ostringstream params;
    params << p.kind << " points=" << p.points;
    if (p.kind == "v_vs_e") {
        if (p.points < 2) throw BadParams("--points must be >= 2");
        if (p.scale && !(*p.scale >= 0 && *p.scale <= 1)) throw BadParams("--scale must lie in [0, 1]");
        if (p.scale) params << " scale=" << fmt(*p.scale);
        write_provenance(csv, {fnv1a_hex(params.str()), 0});
        csv << "alpha_sq,entropy_bits,visibility" << (p.scale ? ",visibility_scaled" : "") << "\n";
        for (const auto &pt : visibility_vs_entanglement_curve(p.points)) {
            csv << fmt(pt.alpha_sq) << "," << fmt(pt.entropy) << "," << fmt(pt.visibility);
            if (p.scale) csv << "," << fmt(*p.scale * pt.visibility);
            csv << "\n";
        }
    } else {
        if (!(p.v_max >= 0 && p.v_max <= 1)) throw BadParams("--v-max must lie in [0, 1]");
        std::vector<double> grid = p.mu;
        if (grid.empty()) {
            if (p.points < 2) throw BadParams("--points must be >= 2");
            if (!(p.mu_min >= 0 && p.mu_max > p.mu_min)) throw BadParams("need 0 <= --mu-min < --mu-max");
            for (int i = 0; i < p.points; i++) {
                grid.push_back(p.mu_min + (p.mu_max - p.mu_min) * i / (p.points - 1.0));
            }
        }
        for (double mu : grid) {
            if (!(mu >= 0) || !std::isfinite(mu)) throw BadParams("mu values must be finite and >= 0");
        }
        params << " v_max=" << fmt(p.v_max);
        for (double mu : grid) params << " " << fmt(mu);
        write_provenance(csv, {fnv1a_hex(params.str()), 0});
        csv << "mu,visibility\n";
        for (const auto &[mu, v] : visibility_vs_mu_curve(grid, p.v_max)) csv << fmt(mu) << "," << fmt(v) << "\n";
    }
    write_file(p.out_path, csv.str());
    out << "wrote " << p.out_path << "\n";
    return kExitOk;
}

int cmd_config(const Common &c, std::ostream &out) {
    const ConfigFile cfg = load(c);
    const std::string text = config_to_json(cfg).dump(2) + "\n";
    if (c.out_path.empty()) {
        out << text;
    } else {
        write_file(c.out_path, text);
    }
    return kExitOk;
}

void add_common(CLI::App *cmd, Common &c, const char *out_help) {
    cmd->add_option("--config", c.config_path, "JSON configuration file");
    cmd->add_option("--out", c.out_path, out_help);
    cmd->add_option("--seed", c.seed, "RNG seed, overrides run.rng_seed");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Monte Carlo simulator for time-bin entangled photon pairs", "timebin"};
    app.require_subcommand(1);

    Common run_opts, scan_opts, config_opts;
    auto *run = app.add_subcommand("run", "simulate pulses; write summary.csv and histogram.csv");
    add_common(run, run_opts, "output directory");
    auto *scan = app.add_subcommand("scan", "phase scan and fit; write scan.csv and fit_report.csv");
    add_common(scan, scan_opts, "output directory");

    CurveParams curve_params;
    auto *curve = app.add_subcommand("curve", "analytic curve CSV");
    curve->add_option("kind", curve_params.kind, "v_vs_e or v_vs_mu")
        ->required()
        ->check(CLI::IsMember({"v_vs_e", "v_vs_mu"}));
    curve->add_option("--points", curve_params.points, "grid points");
    curve->add_option("--scale", curve_params.scale, "v_vs_e: extra column scaled to this maximum");
    curve->add_option("--v-max", curve_params.v_max, "v_vs_mu: single-pair visibility");
    curve->add_option("--mu-min", curve_params.mu_min, "v_vs_mu: grid start");
    curve->add_option("--mu-max", curve_params.mu_max, "v_vs_mu: grid end");
    curve->add_option("--mu", curve_params.mu, "v_vs_mu: explicit mean pair numbers")->delimiter(',');
    curve->add_option("--out", curve_params.out_path, "output CSV file")->required();

    std::string fit_in, fit_out;
    auto *fit = app.add_subcommand("fit", "fit an existing scan CSV");
    fit->add_option("scan_csv", fit_in, "scan CSV (phase_rad,raw,accidental,net)")->required();
    fit->add_option("--out", fit_out, "fit report CSV file")->required();

    auto *config = app.add_subcommand("config", "print the effective configuration as JSON");
    add_common(config, config_opts, "output file (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (*run) return cmd_run(run_opts, out);
        if (*scan) return cmd_scan(scan_opts, out);
        if (*curve) return cmd_curve(curve_params, out);
        if (*fit) return cmd_fit(fit_in, fit_out, out);
        if (*config) return cmd_config(config_opts, out);
    } catch (const ConfigParseError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitParse;
    } catch (const CsvError &e) {
        err << "csv error: " << e.what() << "\n";
        return kExitParse;
    } catch (const BadParams &e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ConfigError &e) {
        err << "invalid config: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError &e) {
        err << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DegenerateFitError &e) {
        err << "fit error: " << e.what() << "\n";
        return kExitDegenerate;
    }
    return kExitParse;
}

}  // namespace timebin
