// SPDX-License-Identifier: Apache-2.0
//
// refcal - reference-path calibration for bistatic OFDM sensing
// Copyright (C) 2026 The refcal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "refcal/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "refcal/error.hpp"

namespace refcal::harness {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"meta", {"schema_version", "name"}},
        {"grid", {"num_rs_subcarriers", "rs_spacing_hz", "num_rs_symbols", "rs_interval_s", "carrier_frequency_hz"}},
        {"array", {"num_antennas", "spacing_wavelengths"}},
        {"scene",
         {"tx_position_m", "rx_position_m", "rx_normal", "los_blocked", "los_gain", "reflector_position_m",
          "reflector_gain"}},
        {"targets",
         {"placements", "region_x_m", "region_y_m", "gain", "velocity_mps", "min_range_separation_m",
          "min_aoa_separation_deg"}},
        {"impairments", {"cfo_residual_hz", "phase_jitter", "sto_max_s", "sto_integer_bins"}},
        {"processing",
         {"ifft_size", "angle_step_deg", "num_peaks", "aoa_tolerance_deg", "weak_reference_db",
          "reference_variation_threshold"}},
        {"run", {"num_trials", "seed", "snr_db", "no_noise"}},
        {"doppler", {"enabled", "window_frames", "window", "notch_bins", "combine"}},
    };
    return keys;
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const
    {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return std::nullopt;
        const auto value = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!value) return std::nullopt;
        return trim(*value);
    }

    double number(const std::string& section, const std::string& key, double fallback) const
    {
        const auto text = raw(section, key);
        return text ? parse_double(*text, section + "." + key) : fallback;
    }

    std::size_t count(const std::string& section, const std::string& key, std::size_t fallback) const
    {
        const auto text = raw(section, key);
        return text ? static_cast<std::size_t>(parse_unsigned(*text, section + "." + key)) : fallback;
    }

    std::uint64_t u64(const std::string& section, const std::string& key, std::uint64_t fallback) const
    {
        const auto text = raw(section, key);
        return text ? parse_unsigned(*text, section + "." + key) : fallback;
    }

    bool flag(const std::string& section, const std::string& key, bool fallback) const
    {
        const auto text = raw(section, key);
        if (!text) return fallback;
        if (*text == "true" || *text == "yes" || *text == "1") return true;
        if (*text == "false" || *text == "no" || *text == "0") return false;
        throw ConfigError(section + "." + key + ": expected true or false, got '" + *text + "'");
    }

    std::vector<double> list(const std::string& section, const std::string& key, std::vector<double> fallback) const
    {
        const auto text = raw(section, key);
        if (!text) return fallback;
        std::vector<double> out;
        for (const auto& item : split_list(*text)) out.push_back(parse_double(item, section + "." + key));
        return out;
    }

    std::array<double, 2> pair(const std::string& section, const std::string& key, std::array<double, 2> fallback) const
    {
        const auto text = raw(section, key);
        if (!text) return fallback;
        const auto values = list(section, key, {});
        if (values.size() != 2) throw ConfigError(section + "." + key + ": expected two comma-separated numbers");
        return {values[0], values[1]};
    }

    Vec2 vec(const std::string& section, const std::string& key, Vec2 fallback) const
    {
        const auto p = pair(section, key, {fallback.x, fallback.y});
        return {p[0], p[1]};
    }

private:
    static double parse_double(const std::string& text, const std::string& where)
    {
        double value = 0.0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc() || ptr != end) throw ConfigError(where + ": '" + text + "' is not a number");
        return value;
    }

    static std::uint64_t parse_unsigned(const std::string& text, const std::string& where)
    {
        std::uint64_t value = 0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc() || ptr != end)
            throw ConfigError(where + ": '" + text + "' is not a non-negative integer");
        return value;
    }

    const pt::ptree& tree_;
};

void reject_unknown(const pt::ptree& tree)
{
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) {
            if (body.empty()) throw ConfigError("config: key '" + section + "' outside any section");
            throw ConfigError("config: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body)
            if (!it->second.contains(key)) throw ConfigError("config: unknown key " + section + "." + key);
    }
}

std::string fmt(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt(Vec2 v) { return fmt(v.x) + ", " + fmt(v.y); }
std::string fmt(std::array<double, 2> v) { return fmt(v[0]) + ", " + fmt(v[1]); }
const char* fmt(bool b) { return b ? "true" : "false"; }

const char* window_name(DopplerWindow w) { return w == DopplerWindow::hann ? "hann" : "rectangular"; }
const char* combine_name(DopplerCombine c) { return c == DopplerCombine::noncoherent ? "noncoherent" : "antenna0"; }

} // namespace

ArrayGeometry ScenarioConfig::array() const
{
    const double lambda = grid.wavelength();
    return {num_antennas, spacing_wavelengths * lambda, lambda};
}

CalibrationOptions ScenarioConfig::calibration_options() const
{
    CalibrationOptions opt;
    opt.fft_size = fft_size;
    opt.num_peaks = num_peaks;
    opt.angle_grid = make_angle_grid(-90.0 + angle_step_deg, 90.0 - angle_step_deg, angle_step_deg);
    opt.weak_reference_db = weak_reference_db;
    opt.variation_threshold = reference_variation_threshold;
    return opt;
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (schema_version != kSchemaVersion) fail("meta.schema_version: unsupported version " + std::to_string(schema_version));
    try {
        grid.validate();
        array().validate();
        scene.validate();
    } catch (const ConfigError& e) {
        fail(e.what());
    }
    if (spacing_wavelengths <= 0.0) fail("array.spacing_wavelengths: must be > 0");
    if (targets.placements < 1) fail("targets.placements: must be >= 1");
    if (targets.region_x_m[0] > targets.region_x_m[1]) fail("targets.region_x_m: min exceeds max");
    if (targets.region_y_m[0] > targets.region_y_m[1]) fail("targets.region_y_m: min exceeds max");
    if (!(targets.gain > 0.0)) fail("targets.gain: must be > 0");
    if (!(scene.los_gain != cd{})) fail("scene.los_gain: must be nonzero");
    if (!(scene.reflector_gain != cd{})) fail("scene.reflector_gain: must be nonzero");
    if (impairments.sto_max_s < 0.0) fail("impairments.sto_max_s: must be >= 0");
    if (impairments.phase_jitter < 0.0) fail("impairments.phase_jitter: must be >= 0");
    if (fft_size < grid.num_subcarriers || (fft_size & (fft_size - 1)) != 0)
        fail("processing.ifft_size: must be a power of two >= grid.num_rs_subcarriers");
    if (!(angle_step_deg > 0.0 && angle_step_deg < 45.0)) fail("processing.angle_step_deg: must be in (0, 45)");
    if (num_peaks < 2) fail("processing.num_peaks: must be >= 2 (reference and target)");
    if (!(aoa_tolerance_deg > 0.0)) fail("processing.aoa_tolerance_deg: must be > 0");
    if (num_trials < 1) fail("run.num_trials: must be >= 1");
    if (snr_db.empty()) fail("run.snr_db: at least one SNR is required");
    for (double s : snr_db)
        if (!std::isfinite(s)) fail("run.snr_db: values must be finite");
    if (doppler.window_frames < 1) fail("doppler.window_frames: must be >= 1");
    if (doppler.enabled && doppler.window_frames * grid.num_symbols < 8)
        fail("doppler.window_frames: need at least 8 slow-time symbols");
}

ScenarioConfig parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    reject_unknown(tree);
    const Reader r(tree);

    ScenarioConfig c;
    const auto version = r.raw("meta", "schema_version");
    if (!version) throw ConfigError("meta.schema_version: required");
    c.schema_version = static_cast<int>(r.count("meta", "schema_version", 0));
    c.name = r.raw("meta", "name").value_or(c.name);

    c.grid.num_subcarriers = r.count("grid", "num_rs_subcarriers", c.grid.num_subcarriers);
    c.grid.subcarrier_spacing_hz = r.number("grid", "rs_spacing_hz", c.grid.subcarrier_spacing_hz);
    c.grid.num_symbols = r.count("grid", "num_rs_symbols", c.grid.num_symbols);
    c.grid.symbol_interval_s = r.number("grid", "rs_interval_s", c.grid.symbol_interval_s);
    c.grid.carrier_frequency_hz = r.number("grid", "carrier_frequency_hz", c.grid.carrier_frequency_hz);

    c.num_antennas = r.count("array", "num_antennas", c.num_antennas);
    c.spacing_wavelengths = r.number("array", "spacing_wavelengths", c.spacing_wavelengths);

    c.scene.tx = r.vec("scene", "tx_position_m", c.scene.tx);
    c.scene.rx = r.vec("scene", "rx_position_m", c.scene.rx);
    const Vec2 normal = r.vec("scene", "rx_normal", c.scene.rx_normal);
    if (!(norm(normal) > 0.0)) throw ConfigError("scene.rx_normal: must be nonzero");
    c.scene.rx_normal = (1.0 / norm(normal)) * normal;
    c.scene.los_blocked = r.flag("scene", "los_blocked", c.scene.los_blocked);
    c.scene.los_gain = r.number("scene", "los_gain", c.scene.los_gain.real());
    if (r.raw("scene", "reflector_position_m")) c.scene.reference_reflector = r.vec("scene", "reflector_position_m", {});
    c.scene.reflector_gain = r.number("scene", "reflector_gain", c.scene.reflector_gain.real());

    auto& t = c.targets;
    t.placements = r.count("targets", "placements", t.placements);
    t.region_x_m = r.pair("targets", "region_x_m", t.region_x_m);
    t.region_y_m = r.pair("targets", "region_y_m", t.region_y_m);
    t.gain = r.number("targets", "gain", t.gain);
    t.velocity_mps = r.vec("targets", "velocity_mps", t.velocity_mps);
    t.min_range_separation_m = r.number("targets", "min_range_separation_m", t.min_range_separation_m);
    t.min_aoa_separation_deg = r.number("targets", "min_aoa_separation_deg", t.min_aoa_separation_deg);

    auto& imp = c.impairments;
    imp.cfo_residual_hz = r.number("impairments", "cfo_residual_hz", imp.cfo_residual_hz);
    imp.phase_jitter = r.number("impairments", "phase_jitter", imp.phase_jitter);
    imp.sto_max_s = r.number("impairments", "sto_max_s", imp.sto_max_s);
    imp.sto_integer_bins = r.flag("impairments", "sto_integer_bins", imp.sto_integer_bins);

    c.fft_size = r.count("processing", "ifft_size", c.fft_size);
    c.angle_step_deg = r.number("processing", "angle_step_deg", c.angle_step_deg);
    c.num_peaks = r.count("processing", "num_peaks", c.num_peaks);
    c.aoa_tolerance_deg = r.number("processing", "aoa_tolerance_deg", c.aoa_tolerance_deg);
    c.weak_reference_db = r.number("processing", "weak_reference_db", c.weak_reference_db);
    c.reference_variation_threshold =
        r.number("processing", "reference_variation_threshold", c.reference_variation_threshold);
    imp.fft_size = c.fft_size;

    c.num_trials = r.count("run", "num_trials", c.num_trials);
    c.seed = r.u64("run", "seed", c.seed);
    c.snr_db = r.list("run", "snr_db", c.snr_db);
    c.no_noise = r.flag("run", "no_noise", c.no_noise);

    auto& d = c.doppler;
    d.enabled = r.flag("doppler", "enabled", d.enabled);
    d.window_frames = r.count("doppler", "window_frames", d.window_frames);
    if (const auto w = r.raw("doppler", "window")) {
        if (*w == "hann") d.options.window = DopplerWindow::hann;
        else if (*w == "rectangular") d.options.window = DopplerWindow::rectangular;
        else throw ConfigError("doppler.window: expected hann or rectangular, got '" + *w + "'");
    }
    d.options.notch_bins = r.count("doppler", "notch_bins", d.options.notch_bins);
    if (const auto cmb = r.raw("doppler", "combine")) {
        if (*cmb == "noncoherent") d.options.combine = DopplerCombine::noncoherent;
        else if (*cmb == "antenna0") d.options.combine = DopplerCombine::antenna0;
        else throw ConfigError("doppler.combine: expected noncoherent or antenna0, got '" + *cmb + "'");
    }

    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in);
}

std::string config_to_ini(const ScenarioConfig& c)
{
    std::ostringstream os;
    os << "[meta]\nschema_version = " << c.schema_version << "\nname = " << c.name << "\n\n";
    os << "[grid]\nnum_rs_subcarriers = " << c.grid.num_subcarriers << "\nrs_spacing_hz = " << fmt(c.grid.subcarrier_spacing_hz)
       << "\nnum_rs_symbols = " << c.grid.num_symbols << "\nrs_interval_s = " << fmt(c.grid.symbol_interval_s)
       << "\ncarrier_frequency_hz = " << fmt(c.grid.carrier_frequency_hz) << "\n\n";
    os << "[array]\nnum_antennas = " << c.num_antennas << "\nspacing_wavelengths = " << fmt(c.spacing_wavelengths) << "\n\n";
    os << "[scene]\ntx_position_m = " << fmt(c.scene.tx) << "\nrx_position_m = " << fmt(c.scene.rx)
       << "\nrx_normal = " << fmt(c.scene.rx_normal) << "\nlos_blocked = " << fmt(c.scene.los_blocked)
       << "\nlos_gain = " << fmt(c.scene.los_gain.real()) << "\n";
    if (c.scene.reference_reflector) os << "reflector_position_m = " << fmt(*c.scene.reference_reflector) << "\n";
    os << "reflector_gain = " << fmt(c.scene.reflector_gain.real()) << "\n\n";
    const auto& t = c.targets;
    os << "[targets]\nplacements = " << t.placements << "\nregion_x_m = " << fmt(t.region_x_m)
       << "\nregion_y_m = " << fmt(t.region_y_m) << "\ngain = " << fmt(t.gain) << "\nvelocity_mps = " << fmt(t.velocity_mps)
       << "\nmin_range_separation_m = " << fmt(t.min_range_separation_m)
       << "\nmin_aoa_separation_deg = " << fmt(t.min_aoa_separation_deg) << "\n\n";
    const auto& imp = c.impairments;
    os << "[impairments]\ncfo_residual_hz = " << fmt(imp.cfo_residual_hz) << "\nphase_jitter = " << fmt(imp.phase_jitter)
       << "\nsto_max_s = " << fmt(imp.sto_max_s) << "\nsto_integer_bins = " << fmt(imp.sto_integer_bins) << "\n\n";
    os << "[processing]\nifft_size = " << c.fft_size << "\nangle_step_deg = " << fmt(c.angle_step_deg)
       << "\nnum_peaks = " << c.num_peaks << "\naoa_tolerance_deg = " << fmt(c.aoa_tolerance_deg)
       << "\nweak_reference_db = " << fmt(c.weak_reference_db)
       << "\nreference_variation_threshold = " << fmt(c.reference_variation_threshold) << "\n\n";
    os << "[run]\nnum_trials = " << c.num_trials << "\nseed = " << c.seed << "\nsnr_db = ";
    for (std::size_t i = 0; i < c.snr_db.size(); ++i) os << (i ? ", " : "") << fmt(c.snr_db[i]);
    os << "\nno_noise = " << fmt(c.no_noise) << "\n\n";
    os << "[doppler]\nenabled = " << fmt(c.doppler.enabled) << "\nwindow_frames = " << c.doppler.window_frames
       << "\nwindow = " << window_name(c.doppler.options.window) << "\nnotch_bins = " << c.doppler.options.notch_bins
       << "\ncombine = " << combine_name(c.doppler.options.combine) << "\n";
    return os.str();
}

} // namespace refcal::harness
