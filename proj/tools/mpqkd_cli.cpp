// Copyright 2026 The mpqkd Authors
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

// mpqkd: figure sweeps, protocol sessions and the oracle validation suite.
//
// Exit codes: 0 success, 1 configuration error, 2 validation failure,
// 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mpqkd/harness.hpp"
#include "mpqkd/protocol.hpp"
#include "mpqkd/validation.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Flags {
    std::optional<double> gain, n_total, bit_amplitude, loss, detector_nen, tap_fraction, sample_fraction, detect_k;
    std::optional<std::string> attack, dual_basis_rule, grid, config_path;
    std::optional<std::uint64_t> pulses, seed;
    bool eve_knows_basis = false;
    std::string out;
    std::string format;
    unsigned threads = 1;
    double tolerance = 1e-6;
};

void add_source_flags(CLI::App *cmd, Flags &f) {
    cmd->add_option("--gain", f.gain, "Photon-number gain G of the amplifier (default 10)");
    cmd->add_option("--n-total", f.n_total, "Total mean photon number of the amplified pulse (default 2e6)");
    cmd->add_option("--bit-amplitude", f.bit_amplitude, "Mean difference number N encoding a bit (default 2460)");
    cmd->add_option("--detector-nen", f.detector_nen, "Detector noise-equivalent photon number");
    cmd->add_option("--out", f.out, "Output path (default: stdout)");
}

void apply(const Flags &f, mpqkd::SessionConfig &c) {
    if (f.gain) c.source.gain = *f.gain;
    if (f.n_total) c.source.n_total_amp = *f.n_total;
    if (f.bit_amplitude) c.source.bit_amplitude = *f.bit_amplitude;
    if (f.loss) c.channel_loss = *f.loss;
    if (f.detector_nen) c.detector.noise_equivalent_number = *f.detector_nen;
    if (f.attack) c.attack.kind = mpqkd::parse_attack_kind(*f.attack);
    if (f.tap_fraction) c.attack.tap_fraction = *f.tap_fraction;
    if (f.eve_knows_basis) c.attack.eve_knows_basis = true;
    if (f.dual_basis_rule) c.attack.dual_basis_rule = mpqkd::parse_dual_basis_rule(*f.dual_basis_rule);
    if (f.pulses) c.num_pulses = *f.pulses;
    if (f.sample_fraction) c.sample_fraction = *f.sample_fraction;
    if (f.detect_k) c.detection_sigma_k = *f.detect_k;
    if (f.seed) c.seed = *f.seed;
}

void emit(const Flags &f, const std::string &text) {
    if (f.out.empty() || f.out == "-") {
        std::cout << text;
    } else {
        mpqkd::write_text_file(f.out, text);
    }
}

void require_csv(const Flags &f) {
    if (!f.format.empty() && f.format != "csv") throw mpqkd::ConfigError("this command only emits --format csv");
}

// Figure sweeps default to noiseless detectors: the curves show the optics alone.
mpqkd::SessionConfig figure_config(const Flags &f) {
    mpqkd::SessionConfig c;
    c.detector.noise_equivalent_number = 0.0;
    apply(f, c);
    c.source.validate();
    c.detector.validate();
    return c;
}

int cmd_fig1(const Flags &f) {
    require_csv(f);
    auto c = figure_config(f);
    const auto grid = f.grid ? mpqkd::Grid::parse(*f.grid)
                             : mpqkd::fig1_default_grid(c.source, c.detector, c.channel_loss);
    emit(f, mpqkd::fig1_csv(c.source, c.detector, c.channel_loss, grid.points()));
    return 0;
}

int cmd_fig2(const Flags &f) {
    require_csv(f);
    auto c = figure_config(f);
    const auto grid = mpqkd::Grid::parse(f.grid.value_or("0:0.9:91"));
    emit(f, mpqkd::fig2_csv(c.source, c.detector, grid.points()));
    return 0;
}

int cmd_fig3(const Flags &f) {
    require_csv(f);
    auto c = figure_config(f);
    const auto grid = mpqkd::Grid::parse(f.grid.value_or("0:1:101"));
    emit(f, mpqkd::fig3_csv(c.source, grid.points()));
    return 0;
}

int cmd_run(const Flags &f) {
    mpqkd::SessionConfig c;
    if (f.config_path) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(mpqkd::read_text_file(*f.config_path));
        } catch (const nlohmann::json::parse_error &e) {
            throw mpqkd::ConfigError("cannot parse '" + *f.config_path + "': " + e.what());
        }
        c = mpqkd::config_from_json(doc);
    }
    apply(f, c);
    c.validate();
    const auto report = mpqkd::run_session(c, {f.threads});
    if (f.format.empty() || f.format == "report") {
        emit(f, mpqkd::run_report_document(c, report));
    } else if (f.format == "csv") {
        emit(f, mpqkd::run_report_csv(c, report));
    } else {
        throw mpqkd::ConfigError("unknown --format '" + f.format + "'");
    }
    return 0;
}

int cmd_validate(const Flags &f) {
    require_csv(f);
    mpqkd::ValidationOptions opt;
    opt.tolerance = f.tolerance;
    const auto result = mpqkd::run_validation(opt);
    emit(f, mpqkd::validation_csv(result));
    for (const auto &row : result.rows) {
        if (!row.error.empty()) std::cerr << "error: r=" << row.r << " alpha_sq=" << row.alpha_sq << ": " << row.error << '\n';
    }
    std::cerr << result.rows.size() - result.failures() << '/' << result.rows.size() << " comparisons within "
              << opt.tolerance << '\n';
    return result.all_passed() ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Macroscopic-pulse QKD simulator"};
    app.require_subcommand(1);
    Flags flags;

    auto *fig1 = app.add_subcommand("fig1", "Difference-number distributions (correct bit 1/0, incorrect basis)");
    add_source_flags(fig1, flags);
    fig1->add_option("--loss", flags.loss, "Channel loss eta (default 0)");
    fig1->add_option("--grid", flags.grid, "n grid start:stop:steps (default +/-8 sigma, 2001 points)");
    fig1->add_option("--format", flags.format, "csv");

    auto *fig2 = app.add_subcommand("fig2", "Bob's error rate versus loss");
    add_source_flags(fig2, flags);
    fig2->add_option("--grid", flags.grid, "eta grid start:stop:steps (default 0:0.9:91)");
    fig2->add_option("--format", flags.format, "csv");

    auto *fig3 = app.add_subcommand("fig3", "Eve's bit inference probability versus sampled fraction");
    add_source_flags(fig3, flags);
    fig3->add_option("--grid", flags.grid, "eta grid start:stop:steps (default 0:1:101)");
    fig3->add_option("--format", flags.format, "csv");

    auto *run = app.add_subcommand("run", "Run a full protocol session and write its report");
    add_source_flags(run, flags);
    run->add_option("--config", flags.config_path, "Session config JSON (a previous report works too)");
    run->add_option("--loss", flags.loss, "Characterized channel loss eta in [0, 1)");
    run->add_option("--attack", flags.attack,
                    "none | intercept_resend | beamsplitter_tap | dual_basis | superior_channel");
    run->add_option("--tap-fraction", flags.tap_fraction, "Eve's sampled fraction for beamsplitter_tap");
    run->add_flag("--eve-knows-basis", flags.eve_knows_basis, "Diagnostic: tapping Eve measures in Alice's basis");
    run->add_option("--dual-basis-rule", flags.dual_basis_rule, "normalized_magnitude | likelihood_ratio");
    run->add_option("--pulses", flags.pulses, "Number of pulses (default 100000)");
    run->add_option("--sample-fraction", flags.sample_fraction, "Fraction of sifted bits compared publicly (default 0.1)");
    run->add_option("--detect-k", flags.detect_k, "Detection threshold in standard errors (default 5)");
    run->add_option("--seed", flags.seed, "Session seed (default 42)");
    run->add_option("--threads", flags.threads, "Worker threads; results do not depend on it");
    run->add_option("--format", flags.format, "report (JSON) | csv");

    auto *validate = app.add_subcommand("validate", "Compare Gaussian moments against the exact Fock oracle");
    validate->add_option("--tolerance", flags.tolerance, "Relative tolerance (default 1e-6)");
    validate->add_option("--out", flags.out, "Output path (default: stdout)");
    validate->add_option("--format", flags.format, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*fig1) return cmd_fig1(flags);
        if (*fig2) return cmd_fig2(flags);
        if (*fig3) return cmd_fig3(flags);
        if (*run) return cmd_run(flags);
        if (*validate) return cmd_validate(flags);
    } catch (const mpqkd::IoError &e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument &e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
