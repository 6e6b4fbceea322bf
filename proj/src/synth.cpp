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

#include "tablefuse/synth.hpp"

#include <array>
#include <cstdio>
#include <random>

#include "json.hpp"

namespace tablefuse
{

namespace
{

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<const char*, 64> wordlist = {
    "alpha",  "amber",  "anchor", "apple",  "atlas",  "basin",  "birch",  "bridge",
    "cable",  "canyon", "cedar",  "cobalt", "copper", "delta",  "denim",  "ember",
    "falcon", "fern",   "fjord",  "garnet", "glacier", "granite", "harbor", "hazel",
    "indigo", "iris",   "jasper", "juniper", "kelp",   "kernel", "lagoon", "lemon",
    "linen",  "maple",  "meadow", "nickel", "north",  "oasis",  "olive",  "onyx",
    "orchid", "pebble", "pepper", "quartz", "quill",  "raven",  "ridge",  "river",
    "saffron", "silver", "slate",  "summit", "thistle", "timber", "topaz", "tundra",
    "umber",  "valley", "velvet", "walnut", "willow", "yarrow", "zenith", "zinc"};

constexpr std::string_view noise_alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::size_t words_per_cell_max = 3;
constexpr std::size_t noise_slots_per_word = 12;

// mt19937_64 output is fixed by the standard; the distribution helpers below
// are spelled out so instances are identical across standard libraries.
class Rng
{
public:
    explicit Rng(std::uint64_t seed)
        : m_engine(seed)
    {
    }

    double uniform() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * uniform() - 1.0; }
    std::size_t below(std::size_t n)
    {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

private:
    std::mt19937_64 m_engine;
};

struct CellDraws
{
    std::size_t n_words = 1;
    std::array<std::size_t, words_per_cell_max> words{};
    double text_dx = 0, text_dy = 0, cell_dx = 0, cell_dy = 0;
    double text_drop = 1, cell_drop = 1;
    std::array<std::array<double, noise_slots_per_word>, words_per_cell_max> noise_u{};
    std::array<std::array<std::size_t, noise_slots_per_word>, words_per_cell_max> noise_char{};
};

CellDraws draw_cell(Rng& rng)
{
    CellDraws d;
    d.n_words = 1 + rng.below(words_per_cell_max);
    for (auto& w : d.words)
        w = rng.below(wordlist.size());
    d.text_dx = rng.symmetric();
    d.text_dy = rng.symmetric();
    d.cell_dx = rng.symmetric();
    d.cell_dy = rng.symmetric();
    d.text_drop = rng.uniform();
    d.cell_drop = rng.uniform();
    for (std::size_t w = 0; w < words_per_cell_max; ++w)
    {
        for (std::size_t k = 0; k < noise_slots_per_word; ++k)
        {
            d.noise_u[w][k] = rng.uniform();
            d.noise_char[w][k] = rng.below(noise_alphabet.size() - 1);
        }
    }
    return d;
}

/// Substitutes characters with a different one from [a-z0-9]. Returns true
/// when the word came through untouched.
bool corrupt(std::string& word, const std::array<double, noise_slots_per_word>& u,
             const std::array<std::size_t, noise_slots_per_word>& pick, double p)
{
    bool intact = true;
    for (std::size_t k = 0; k < word.size() && k < noise_slots_per_word; ++k)
    {
        if (!(u[k] < p))
            continue;
        const std::size_t orig = noise_alphabet.find(word[k]);
        std::size_t idx = pick[k];
        if (orig != std::string_view::npos && idx >= orig)
            ++idx;
        word[k] = noise_alphabet[idx];
        intact = false;
    }
    return intact;
}

ordered_json config_json(const SynthConfig& c)
{
    ordered_json j;
    j["rows"] = c.rows;
    j["cols"] = c.cols;
    j["cell_w"] = c.cell_w;
    j["cell_h"] = c.cell_h;
    j["centroid_jitter"] = c.centroid_jitter;
    j["cell_jitter"] = c.cell_jitter;
    j["cell_dropout"] = c.cell_dropout;
    j["text_dropout"] = c.text_dropout;
    j["char_noise"] = c.char_noise;
    j["seed"] = c.seed;
    return j;
}

SynthConfig config_from_json(const json& j, const std::string& source, const std::string& path)
{
    if (!j.is_object())
        throw ParseError(source, 0, path, "expected a config object");
    SynthConfig c;
    auto num = [&](const char* key, double& field) {
        if (auto it = j.find(key); it != j.end())
        {
            if (!it->is_number())
                throw ParseError(source, 0, path + "." + key, "expected a number");
            field = it->get<double>();
        }
    };
    auto count = [&](const char* key, auto& field) {
        if (auto it = j.find(key); it != j.end())
        {
            if (!it->is_number_unsigned())
                throw ParseError(source, 0, path + "." + key, "expected a non-negative integer");
            field = it->get<std::remove_reference_t<decltype(field)>>();
        }
    };
    count("rows", c.rows);
    count("cols", c.cols);
    num("cell_w", c.cell_w);
    num("cell_h", c.cell_h);
    num("centroid_jitter", c.centroid_jitter);
    num("cell_jitter", c.cell_jitter);
    num("cell_dropout", c.cell_dropout);
    num("text_dropout", c.text_dropout);
    num("char_noise", c.char_noise);
    count("seed", c.seed);
    try
    {
        c.validate();
    }
    catch (const InvalidArgument& e)
    {
        throw ParseError(source, 0, path, e.what());
    }
    return c;
}

TokenCounts counts_from_json(const json& j)
{
    TokenCounts t;
    t.total = j.at("total").get<std::size_t>();
    t.retained = j.at("retained").get<std::size_t>();
    t.intact = j.at("intact").get<std::size_t>();
    return t;
}

} // namespace

void SynthConfig::validate() const
{
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (rows == 0 || cols == 0)
        throw InvalidArgument("synthetic table needs at least one row and column");
    if (!(cell_w > 0.0) || !(cell_h > 0.0))
        throw InvalidArgument("cell dimensions must be positive");
    if (!(centroid_jitter >= 0.0) || !(cell_jitter >= 0.0))
        throw InvalidArgument("jitter must be non-negative");
    if (!prob(cell_dropout) || !prob(text_dropout) || !prob(char_noise))
        throw InvalidArgument("probabilities must lie in [0,1]");
}

SynthInstance generate(const SynthConfig& cfg)
{
    cfg.validate();
    Rng rng(cfg.seed);

    const double margin_x = cfg.cell_w + 40.0 * rng.uniform();
    const double margin_y = cfg.cell_h + 40.0 * rng.uniform();
    const CellSource source = rng.uniform() < 0.5 ? CellSource::bordered : CellSource::borderless;
    const double table_w = cfg.cell_w * static_cast<double>(cfg.cols);
    const double table_h = cfg.cell_h * static_cast<double>(cfg.rows);
    const BBoxd table_box(margin_x, margin_y, margin_x + table_w, margin_y + table_h);

    TruthTable truth;
    truth.box = table_box;
    truth.table_class = source;
    truth.n_rows = cfg.rows;
    truth.n_cols = cfg.cols;
    truth.cell_texts.reserve(cfg.rows * cfg.cols);

    DetectedTable detected;
    detected.box = table_box;
    detected.table_class = source;
    detected.score = 1.0;
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(3);
    probs[source == CellSource::bordered ? 0 : 1] = 1.0;
    detected.class_probs = probs;

    TokenCounts tokens;
    std::vector<CellBox> dropped_cells;
    for (std::size_t r = 0; r < cfg.rows; ++r)
    {
        for (std::size_t c = 0; c < cfg.cols; ++c)
        {
            const CellDraws d = draw_cell(rng);
            const double x1 = margin_x + cfg.cell_w * static_cast<double>(c);
            const double y1 = margin_y + cfg.cell_h * static_cast<double>(r);
            const BBoxd lattice(x1, y1, x1 + cfg.cell_w, y1 + cfg.cell_h);

            std::string line, noisy;
            std::size_t intact = 0;
            for (std::size_t w = 0; w < d.n_words; ++w)
            {
                std::string word = wordlist[d.words[w]];
                if (!line.empty())
                {
                    line += ' ';
                    noisy += ' ';
                }
                line += word;
                if (corrupt(word, d.noise_u[w], d.noise_char[w], cfg.char_noise))
                    ++intact;
                noisy += word;
            }
            truth.cell_texts.push_back(line);
            tokens.total += d.n_words;

            const CellBox cell(lattice.translated(d.cell_dx * cfg.cell_jitter * cfg.cell_w / 2.0,
                                                  d.cell_dy * cfg.cell_jitter * cfg.cell_h / 2.0),
                               1.0, source);
            if (d.cell_drop < cfg.cell_dropout)
                dropped_cells.push_back(cell);
            else
                detected.cells.push_back(cell);

            if (!(d.text_drop < cfg.text_dropout))
            {
                const Point2d center = centroid(lattice) +
                                       Point2d(d.text_dx * cfg.centroid_jitter * cfg.cell_w / 2.0,
                                               d.text_dy * cfg.centroid_jitter * cfg.cell_h / 2.0);
                const double half_w =
                    std::min(0.9 * cfg.cell_w, 8.0 * static_cast<double>(noisy.size())) / 2.0;
                const double half_h = 0.25 * cfg.cell_h;
                detected.texts.emplace_back(BBoxd(center.x() - half_w, center.y() - half_h,
                                                  center.x() + half_w, center.y() + half_h),
                                            noisy, 1.0);
                tokens.retained += d.n_words;
                tokens.intact += intact;
            }
        }
    }
    if (detected.cells.empty())
        detected.cells.push_back(dropped_cells.front());

    SynthInstance inst{DetectionDocument{}, TruthDocument{}, to_grid(truth), {table_box}, tokens};
    // lattice boxes coincide with the uniform partition of the table box
    inst.detections.image_w = table_w + 2.0 * margin_x;
    inst.detections.image_h = table_h + 2.0 * margin_y;
    inst.detections.tables.push_back(std::move(detected));
    inst.truth.image_w = inst.detections.image_w;
    inst.truth.image_h = inst.detections.image_h;
    inst.truth.tables.push_back(std::move(truth));
    return inst;
}

Manifest corpus(std::span<const SynthConfig> configs, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    Manifest manifest;
    for (std::size_t i = 0; i < configs.size(); ++i)
    {
        char id[32];
        std::snprintf(id, sizeof id, "inst_%04zu", i);
        const SynthInstance inst = generate(configs[i]);

        ManifestEntry entry;
        entry.id = id;
        entry.config = configs[i];
        entry.detection_file = entry.id + ".detection.json";
        entry.truth_file = entry.id + ".truth.json";
        entry.tokens = inst.tokens;
        write_file(out_dir / entry.detection_file, dump_detection(inst.detections));
        write_file(out_dir / entry.truth_file, dump_truth(inst.truth));
        manifest.entries.push_back(std::move(entry));
    }
    write_file(out_dir / manifest_filename, dump_manifest(manifest));
    return manifest;
}

std::string dump_manifest(const Manifest& manifest)
{
    ordered_json root;
    root["version"] = document_version;
    ordered_json entries = ordered_json::array();
    for (const auto& e : manifest.entries)
    {
        ordered_json j;
        j["id"] = e.id;
        j["seed"] = e.config.seed;
        j["detection"] = e.detection_file;
        j["truth"] = e.truth_file;
        j["config"] = config_json(e.config);
        j["tokens"] = {{"total", e.tokens.total}, {"retained", e.tokens.retained}, {"intact", e.tokens.intact}};
        entries.push_back(std::move(j));
    }
    root["instances"] = entries;
    return root.dump(1) + "\n";
}

Manifest parse_manifest(std::string_view text, const std::string& source)
{
    json root;
    try
    {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        throw ParseError(source, 0, "", e.what());
    }
    Manifest manifest;
    try
    {
        if (root.at("version").get<int>() != document_version)
            throw ParseError(source, 0, "version", "unsupported manifest version");
        const json& instances = root.at("instances");
        for (std::size_t i = 0; i < instances.size(); ++i)
        {
            const json& j = instances[i];
            const std::string path = "instances[" + std::to_string(i) + "]";
            ManifestEntry e;
            e.id = j.at("id").get<std::string>();
            e.detection_file = j.at("detection").get<std::string>();
            e.truth_file = j.at("truth").get<std::string>();
            if (auto it = j.find("config"); it != j.end())
                e.config = config_from_json(*it, source, path + ".config");
            if (auto it = j.find("tokens"); it != j.end())
                e.tokens = counts_from_json(*it);
            manifest.entries.push_back(std::move(e));
        }
    }
    catch (const json::exception& e)
    {
        throw ParseError(source, 0, "", e.what());
    }
    return manifest;
}

std::vector<SynthConfig> parse_synth_configs(std::string_view text, const std::string& source)
{
    json root;
    try
    {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        throw ParseError(source, 0, "", e.what());
    }
    std::vector<SynthConfig> configs;
    const json* list = &root;
    std::string prefix;
    if (root.is_object() && root.contains("configs"))
    {
        list = &root["configs"];
        prefix = "configs";
    }
    if (list->is_array())
    {
        for (std::size_t i = 0; i < list->size(); ++i)
            configs.push_back(config_from_json((*list)[i], source, prefix + "[" + std::to_string(i) + "]"));
    }
    else
    {
        configs.push_back(config_from_json(*list, source, prefix));
    }
    return configs;
}

} // namespace tablefuse
