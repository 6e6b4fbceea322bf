/*
 Copyright 2026 The tablefuse Authors
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablefuse/documents.hpp"
#include "tablefuse/grid.hpp"

namespace tablefuse
{

struct SynthConfig
{
    std::size_t rows = 2;
    std::size_t cols = 2;
    double cell_w = 120.0;
    double cell_h = 40.0;
    /// Text centroid offset as a fraction of the cell half-extent; 1.0 reaches
    /// the edge of the assignment gate.
    double centroid_jitter = 0.0;
    /// Detected cell box offset as a fraction of the cell half-extent. Values
    /// below 0.5 keep the lattice recoverable at the default tolerances.
    double cell_jitter = 0.0;
    double cell_dropout = 0.0;
    double text_dropout = 0.0;
    double char_noise = 0.0;
    std::uint64_t seed = 42;

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;

    friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

/// Token bookkeeping kept by the generator.
struct TokenCounts
{
    /// Words in the ground truth.
    std::size_t total = 0;
    /// Words whose text box survived text dropout.
    std::size_t retained = 0;
    /// Retained words that escaped character corruption.
    std::size_t intact = 0;
};

struct SynthInstance
{
    DetectionDocument detections;
    TruthDocument truth;
    TableGrid truth_grid;
    std::vector<BBoxd> truth_tables;
    TokenCounts tokens;
};

/// Deterministic in `cfg.seed`. Every cell of a regular lattice receives a
/// single text line of 1-3 words; noise is then applied per cell. The random
/// stream consumes the same draws whatever the noise levels, so raising a
/// dropout probability only ever removes more items. If cell dropout would
/// remove every cell, the first one is kept.
SynthInstance generate(const SynthConfig& cfg);

struct ManifestEntry
{
    std::string id;
    SynthConfig config;
    /// Relative to the manifest's directory.
    std::string detection_file;
    std::string truth_file;
    TokenCounts tokens;
};

struct Manifest
{
    std::vector<ManifestEntry> entries;
};

inline constexpr const char* manifest_filename = "manifest.json";

/// Writes <id>.detection.json and <id>.truth.json per config and a
/// manifest.json into `out_dir`, creating it when needed.
Manifest corpus(std::span<const SynthConfig> configs, const std::filesystem::path& out_dir);

std::string dump_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text, const std::string& source = {});

/// Accepts one config object, an array of them, or {"configs": [...]}.
/// Missing fields take their defaults.
std::vector<SynthConfig> parse_synth_configs(std::string_view text, const std::string& source = {});

} // namespace tablefuse
