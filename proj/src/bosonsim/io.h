// Copyright 2026 The BosonSim Authors
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

#ifndef BOSONSIM_IO_H
#define BOSONSIM_IO_H

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bosonsim/fock.h"
#include "bosonsim/lossy.h"
#include "bosonsim/noise.h"
#include "bosonsim/sampling.h"
#include "bosonsim/tomography.h"

// File formats. Every reader throws std::invalid_argument naming the offending field or
// line; every writer is deterministic, and reading then writing reproduces the input
// byte for byte. Doubles are written in shortest round-trip form. Indices are 0-based.
//
// CSV files open with "# key=value" metadata lines followed by a header row.

namespace bosonsim {

constexpr int kSchemaVersion = 1;

std::string format_double(double value);
double parse_double(std::string_view text, std::string_view what);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

/// {"schema_version": 1, "m": M, "re": [[...]], "im": [[...]]}, rows indexed by input.
/// Optional "sigma": {"magnitude": [[...]], "phase": [[...]]}, per-element standard deviations.
std::string matrix_to_json(const TransferMatrix &lambda);
TransferMatrix matrix_from_json(std::string_view text);

/// "fnv1a64:" followed by 16 hex digits of the FNV-1a hash of matrix_to_json.
std::string matrix_hash(const TransferMatrix &lambda);

/// Metadata keys schema_version, kind (occupation | clicks), input, matrix_id,
/// postselection; columns outcome,probability.
std::string distribution_to_csv(const OutcomeDistribution &dist);
OutcomeDistribution distribution_from_csv(std::string_view text);

/// {"schema_version", "kind", "input", "matrix_id", "postselection",
///  "outcomes": [{"outcome": "...", "probability": p}, ...]}
std::string distribution_to_json(const OutcomeDistribution &dist);
OutcomeDistribution distribution_from_json(std::string_view text);

struct SampleFile {
    SampleRecord record;
    ModeOccupation input;
    std::string matrix_hash;
    OutcomeKind kind = OutcomeKind::kOccupation;
};

/// Metadata keys schema_version, kind, input, seed, n, matrix_hash; columns outcome,count.
/// Outcomes never drawn are omitted.
std::string samples_to_csv(const SampleFile &samples);
SampleFile samples_from_csv(std::string_view text);
std::string samples_to_json(const SampleFile &samples);
SampleFile samples_from_json(std::string_view text);

/// {"schema_version", "modes", "accessible": [...], "elements": [{"a", "b", "r", "theta"}, ...]}
std::string topology_to_json(const CircuitTopology &topo);
CircuitTopology topology_from_json(std::string_view text);

/// {"schema_version", "sources": [{"lambda2", "modes", "pairs", "truncation"}], "alpha",
///  "dark_rate", "postselect_N"}. On input "pairs" defaults to 1, "truncation" to 0,
/// "alpha" to 1, and "dark_rate" may be a number or a per-mode array.
std::string noise_params_to_json(const NoiseParams &params);
NoiseParams noise_params_from_json(std::string_view text);

/// Columns input_i,output_j,frequency,variance; one row per entry.
std::string one_photon_to_csv(const OnePhotonData &data);
OnePhotonData one_photon_from_csv(std::string_view text);

/// Columns i1,i2,j1,j2,visibility,variance.
std::string two_photon_to_csv(const TwoPhotonData &data);
TwoPhotonData two_photon_from_csv(std::string_view text);

/// {"schema_version", "m", "mask": [[0/1, ...], ...]}
std::string mask_to_json(const PhaseModel &model);
PhaseModel mask_from_json(std::string_view text);

struct Reconstruction {
    Eigen::MatrixXd tau;
    Eigen::MatrixXd phases;
    double residual = 0;
    size_t rank = 0;
    size_t free_phases = 0;
    std::vector<std::pair<size_t, size_t>> fixed;
    std::string gauge_note;

    TransferMatrix matrix() const;
};

/// {"schema_version", "m", "tau", "phi", "residual", "rank", "free_phases",
///  "gauge": {"fixed": [[i, j], ...], "note": "..."}}
std::string reconstruction_to_json(const Reconstruction &rec);
Reconstruction reconstruction_from_json(std::string_view text);

}  // namespace bosonsim

#endif
