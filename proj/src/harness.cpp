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

#include "mpqkd/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mpqkd {

using nlohmann::json;

namespace {

constexpr const char *kReportFormat = "mpqkd-run-report/1";

double parse_number(std::string_view text, const char *what) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("invalid grid: " + std::string(what) + " '" + std::string(text) + "' is not a number");
    }
    return v;
}

json detector_to_json(const DetectorModel &d) {
    return {{"noise_equivalent_number", d.noise_equivalent_number}, {"quantum_efficiency", d.quantum_efficiency}};
}

template <class T>
void read_field(const json &obj, const char *key, T &out, std::vector<std::string> &problems, const std::string &path) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception &) {
        problems.push_back(path + key + " has the wrong type");
    }
}

void read_detector(const json &obj, DetectorModel &d, std::vector<std::string> &problems, const std::string &path) {
    if (!obj.is_object()) {
        problems.push_back(path + " must be an object");
        return;
    }
    read_field(obj, "noise_equivalent_number", d.noise_equivalent_number, problems, path + ".");
    read_field(obj, "quantum_efficiency", d.quantum_efficiency, problems, path + ".");
}

}  // namespace

Grid Grid::parse(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw ConfigError("invalid grid '" + std::string(text) + "': expected start:stop:steps");
    }
    Grid g;
    g.start = parse_number(text.substr(0, first), "start");
    g.stop = parse_number(text.substr(first + 1, second - first - 1), "stop");
    const auto steps_text = text.substr(second + 1);
    auto [ptr, ec] = std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), g.steps);
    if (ec != std::errc() || ptr != steps_text.data() + steps_text.size() || g.steps < 1) {
        throw ConfigError("invalid grid '" + std::string(text) + "': steps must be a positive integer");
    }
    if (g.steps > 1 && !(g.stop > g.start)) {
        throw ConfigError("invalid grid '" + std::string(text) + "': stop must exceed start");
    }
    if (g.steps == 1 && g.stop != g.start) {
        throw ConfigError("invalid grid '" + std::string(text) + "': a single step needs start == stop");
    }
    return g;
}

std::vector<double> Grid::points() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(steps));
    if (steps == 1) {
        out.push_back(start);
        return out;
    }
    for (int i = 0; i < steps; ++i) {
        // Pin the last point exactly to `stop`.
        out.push_back(i == steps - 1 ? stop : start + (stop - start) * i / (steps - 1));
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Grid fig1_default_grid(const SourceParams &source, const DetectorModel &detector, double eta) {
    const Source src(source);
    const double total_loss = 1.0 - (1.0 - eta) * detector.quantum_efficiency;
    const auto wrong = diff_number_moments(apply_loss(src.pulse(Bit::kOne, Basis::kVH), total_loss), Basis::kDiag);
    const double sigma = std::sqrt(wrong.variance + detector.difference_noise_variance());
    const double half = std::ceil(8.0 * sigma);
    return Grid{-half, half, 2001};
}

std::string fig1_csv(const SourceParams &source, const DetectorModel &detector, double eta,
                     const std::vector<double> &grid) {
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("fig1: loss must lie in [0, 1)");
    detector.validate();
    const Source src(source);
    const double total_loss = 1.0 - (1.0 - eta) * detector.quantum_efficiency;
    const auto one = apply_loss(src.pulse(Bit::kOne, Basis::kVH), total_loss);
    const auto zero = apply_loss(src.pulse(Bit::kZero, Basis::kVH), total_loss);
    const auto c1 = distribution_curve(one, Basis::kVH, detector, grid);
    const auto c0 = distribution_curve(zero, Basis::kVH, detector, grid);
    const auto cw = distribution_curve(one, Basis::kDiag, detector, grid);
    std::string out = "n,pdf_correct_bit1,pdf_correct_bit0,pdf_incorrect\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        out += format_double(grid[i]) + ',' + format_double(c1[i].density) + ',' + format_double(c0[i].density) +
               ',' + format_double(cw[i].density) + '\n';
    }
    return out;
}

std::string fig2_csv(const SourceParams &source, const DetectorModel &detector, const std::vector<double> &etas) {
    std::string out = "eta,p_err\n";
    for (double eta : etas) {
        if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("fig2: every eta must lie in [0, 1)");
        out += format_double(eta) + ',' + format_double(bob_error_vs_loss(source, eta, detector)) + '\n';
    }
    return out;
}

std::string fig3_csv(const SourceParams &source, const std::vector<double> &etas) {
    std::string out = "eta,p_eta\n";
    for (double eta : etas) {
        if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("fig3: every eta must lie in [0, 1]");
        out += format_double(eta) + ',' + format_double(eve_tap_probability(source, eta)) + '\n';
    }
    return out;
}

json config_to_json(const SessionConfig &c) {
    json attack = {{"kind", to_string(c.attack.kind)},
                   {"tap_fraction", c.attack.tap_fraction ? json(*c.attack.tap_fraction) : json(nullptr)},
                   {"eve_detector", detector_to_json(c.attack.eve_detector)},
                   {"eve_knows_basis", c.attack.eve_knows_basis},
                   {"dual_basis_rule", to_string(c.attack.dual_basis_rule)}};
    return {{"source",
             {{"gain", c.source.gain},
              {"n_total_amp", c.source.n_total_amp},
              {"bit_amplitude", c.source.bit_amplitude},
              {"squeeze_phase", c.source.squeeze_phase}}},
            {"channel_loss", c.channel_loss},
            {"detector", detector_to_json(c.detector)},
            {"attack", attack},
            {"num_pulses", c.num_pulses},
            {"sample_fraction", c.sample_fraction},
            {"detection_sigma_k", c.detection_sigma_k},
            {"seed", c.seed}};
}

SessionConfig config_from_json(const json &doc) {
    const json &obj = doc.is_object() && doc.contains("config") ? doc.at("config") : doc;
    if (!obj.is_object()) throw ConfigError("invalid session config:\n  - expected a JSON object");
    SessionConfig c;
    std::vector<std::string> problems;
    if (obj.contains("source")) {
        const auto &s = obj.at("source");
        read_field(s, "gain", c.source.gain, problems, "source.");
        read_field(s, "n_total_amp", c.source.n_total_amp, problems, "source.");
        read_field(s, "bit_amplitude", c.source.bit_amplitude, problems, "source.");
        read_field(s, "squeeze_phase", c.source.squeeze_phase, problems, "source.");
    }
    read_field(obj, "channel_loss", c.channel_loss, problems, "");
    if (obj.contains("detector")) read_detector(obj.at("detector"), c.detector, problems, "detector");
    if (obj.contains("attack")) {
        const auto &a = obj.at("attack");
        std::string kind = to_string(c.attack.kind);
        read_field(a, "kind", kind, problems, "attack.");
        try {
            c.attack.kind = parse_attack_kind(kind);
        } catch (const std::invalid_argument &e) {
            problems.push_back(std::string("attack.kind: ") + e.what());
        }
        if (a.contains("tap_fraction") && !a.at("tap_fraction").is_null()) {
            double f = 0;
            read_field(a, "tap_fraction", f, problems, "attack.");
            c.attack.tap_fraction = f;
        }
        if (a.contains("eve_detector")) read_detector(a.at("eve_detector"), c.attack.eve_detector, problems, "attack.eve_detector");
        read_field(a, "eve_knows_basis", c.attack.eve_knows_basis, problems, "attack.");
        std::string rule = to_string(c.attack.dual_basis_rule);
        read_field(a, "dual_basis_rule", rule, problems, "attack.");
        try {
            c.attack.dual_basis_rule = parse_dual_basis_rule(rule);
        } catch (const std::invalid_argument &e) {
            problems.push_back(std::string("attack.dual_basis_rule: ") + e.what());
        }
    }
    read_field(obj, "num_pulses", c.num_pulses, problems, "");
    read_field(obj, "sample_fraction", c.sample_fraction, problems, "");
    read_field(obj, "detection_sigma_k", c.detection_sigma_k, problems, "");
    read_field(obj, "seed", c.seed, problems, "");
    if (!problems.empty()) {
        std::string msg = "invalid session config:";
        for (const auto &p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return c;
}

json report_to_json(const RunReport &r) {
    auto opt = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
    return {{"pulses_sent", r.pulses_sent},
            {"sifted_count", r.sifted_count},
            {"sampled_count", r.sampled_count},
            {"final_key_bits", r.final_key_bits},
            {"estimated_error_rate", r.estimated_error_rate},
            {"sifted_error_rate", r.sifted_error_rate},
            {"bob_bit_accuracy", r.bob_bit_accuracy},
            {"expected_systematic_error", r.expected_systematic_error},
            {"detection_threshold", r.detection_threshold},
            {"detection_verdict", to_string(r.detection_verdict)},
            {"attack", to_string(r.attack)},
            {"eve_bit_accuracy", opt(r.eve_bit_accuracy)},
            {"eve_basis_accuracy", opt(r.eve_basis_accuracy)},
            {"eve_correct_arm_accuracy", opt(r.eve_correct_arm_accuracy)}};
}

std::string run_report_document(const SessionConfig &config, const RunReport &report) {
    json doc = {{"format", kReportFormat},
                {"config", config_to_json(config)},
                {"rng", {{"seed", config.seed}, {"derivation", kStreamDerivation}}},
                {"report", report_to_json(report)}};
    return doc.dump(2) + '\n';
}

std::string run_report_csv(const SessionConfig &config, const RunReport &report) {
    std::string out = "key,value\n";
    auto emit = [&](const std::string &prefix, const json &obj, auto &&self) -> void {
        for (const auto &[k, v] : obj.items()) {
            const std::string key = prefix.empty() ? k : prefix + "." + k;
            if (v.is_object()) {
                self(key, v, self);
            } else if (v.is_number_float()) {
                out += key + ',' + format_double(v.template get<double>()) + '\n';
            } else if (v.is_string()) {
                out += key + ',' + v.template get<std::string>() + '\n';
            } else {
                out += key + ',' + v.dump() + '\n';
            }
        }
    };
    emit("config", config_to_json(config), emit);
    emit("report", report_to_json(report), emit);
    return out;
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace mpqkd
