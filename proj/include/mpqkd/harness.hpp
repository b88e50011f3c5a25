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

// Text outputs of the command-line harness: figure sweeps as CSV and
// session reports as JSON. Everything here is deterministic so outputs can be
// compared byte for byte.

#ifndef MPQKD_HARNESS_HPP
#define MPQKD_HARNESS_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mpqkd/protocol.hpp"

namespace mpqkd {

/// Evenly spaced sweep, parsed from "start:stop:steps".
struct Grid {
    double start = 0;
    double stop = 0;
    int steps = 1;

    /// Throws ConfigError for malformed text, steps < 1, or stop <= start
    /// with more than one step.
    static Grid parse(std::string_view text);
    std::vector<double> points() const;
};

/// Formats with 17 significant digits.
std::string format_double(double v);

/// n,pdf_correct_bit1,pdf_correct_bit0,pdf_incorrect at channel loss eta.
std::string fig1_csv(const SourceParams &source, const DetectorModel &detector, double eta,
                     const std::vector<double> &grid);
/// Default fig1 grid: +/-8 sigma of the widest curve, 2001 points.
Grid fig1_default_grid(const SourceParams &source, const DetectorModel &detector, double eta);

/// eta,p_err
std::string fig2_csv(const SourceParams &source, const DetectorModel &detector, const std::vector<double> &etas);
/// eta,p_eta
std::string fig3_csv(const SourceParams &source, const std::vector<double> &etas);

nlohmann::json config_to_json(const SessionConfig &config);
/// Accepts a bare config object or a full report document (uses its
/// "config" member). Missing fields keep their defaults. Throws ConfigError.
SessionConfig config_from_json(const nlohmann::json &doc);

nlohmann::json report_to_json(const RunReport &report);
/// Config echo, seed derivation and report, as indented JSON text.
std::string run_report_document(const SessionConfig &config, const RunReport &report);
/// The same content as key,value CSV rows.
std::string run_report_csv(const SessionConfig &config, const RunReport &report);

class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Writes atomically enough for our purposes; throws IoError with the path.
void write_text_file(const std::filesystem::path &path, const std::string &text);
std::string read_text_file(const std::filesystem::path &path);

}  // namespace mpqkd

#endif
