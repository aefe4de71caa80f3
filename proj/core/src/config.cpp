#include "qpr/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qpr/errors.hpp"

namespace qpr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& field, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(field, "not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(field, "trailing junk in number: '" + v + "'");
    if (std::isnan(x)) throw ConfigError(field, "NaN is not allowed");
    return x;
}

int parse_int(const std::string& field, const std::string& v) {
    const double x = parse_double(field, v);
    const int i = static_cast<int>(x);
    if (x != static_cast<double>(i)) throw ConfigError(field, "expected an integer");
    return i;
}

std::vector<double> parse_double_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(field, tok));
    if (out.empty()) throw ConfigError(field, "expected a nonempty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& field, const std::string& v) {
    std::vector<int> out;
    for (double x : parse_double_list(field, v)) {
        const int i = static_cast<int>(x);
        if (x != static_cast<double>(i)) throw ConfigError(field, "expected integers");
        out.push_back(i);
    }
    return out;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct KeyTracker {
    std::set<std::string> seen;
    bool mark(const std::string& key) { return seen.insert(key).second; }
    bool has(const std::string& key) const { return seen.count(key) > 0; }
};

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int segment_index = -1;
    int line_no = 0;
    KeyTracker profile_keys, scenario_keys, bands_keys, figures_keys,
        spectrum_keys, segment_keys;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string at = "line " + std::to_string(line_no);

        if (line.front() == '[') {
            if (line == "[[segment]]") {
                if (!cfg.profile)
                    throw ConfigError("segment", "[[segment]] must follow [profile] (" + at + ")");
                cfg.profile->segments.emplace_back();
                ++segment_index;
                segment_keys = {};
                section = "segment";
                continue;
            }
            if (line.size() < 3 || line.back() != ']')
                throw ConfigError("config", "malformed section header '" + line + "' (" + at + ")");
            section = line.substr(1, line.size() - 2);
            if (section == "profile") {
                if (cfg.profile) throw ConfigError("profile", "duplicate section");
                cfg.profile.emplace();
            } else if (section == "scenario") {
                if (cfg.scenario) throw ConfigError("scenario", "duplicate section");
                cfg.scenario.emplace();
            } else if (section == "bands") {
                if (cfg.bands) throw ConfigError("bands", "duplicate section");
                cfg.bands.emplace();
            } else if (section == "figures") {
                if (cfg.figures) throw ConfigError("figures", "duplicate section");
                cfg.figures.emplace();
            } else if (section == "spectrum") {
                if (cfg.spectrum) throw ConfigError("spectrum", "duplicate section");
                cfg.spectrum.emplace();
            } else {
                throw ConfigError(section, "unknown section (" + at + ")");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "expected 'key = value' (" + at + "): '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config", "empty key (" + at + ")");
        if (value.empty()) throw ConfigError(section + "." + key, "empty value (" + at + ")");
        if (section.empty())
            throw ConfigError(key, "key outside any section (" + at + ")");

        auto unique = [&](KeyTracker& tracker, const std::string& path) {
            if (!tracker.mark(key)) throw ConfigError(path, "duplicate key (" + at + ")");
        };

        if (section == "profile") {
            const std::string path = "profile." + key;
            unique(profile_keys, path);
            if (key == "omega0") cfg.profile->omega0 = parse_double(path, value);
            else if (key == "tau") cfg.profile->tau = parse_double(path, value);
            else if (key == "n_periods") cfg.profile->n_periods = parse_int(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "segment") {
            const std::string path =
                "profile.segments[" + std::to_string(segment_index) + "]." + key;
            unique(segment_keys, path);
            Segment& seg = cfg.profile->segments.back();
            if (key == "duration") seg.duration = parse_double(path, value);
            else if (key == "delta") seg.delta = parse_double(path, value);
            else if (key == "gamma") seg.gamma = parse_double(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "scenario") {
            const std::string path = "scenario." + key;
            unique(scenario_keys, path);
            ScenarioSpec& sc = *cfg.scenario;
            if (key == "regime") sc.regime = value;
            else if (key == "m_list") sc.m_list = parse_int_list(path, value);
            else if (key == "alpha0") sc.alpha0 = parse_double(path, value);
            else if (key == "alpha_deriv0") sc.alpha_deriv0 = parse_double(path, value);
            else if (key == "rho_offset") sc.rho_offset = parse_double(path, value);
            else if (key == "rho_deriv0") sc.rho_deriv0 = parse_double(path, value);
            else if (key == "sample_times") sc.sample_times = parse_double_list(path, value);
            else if (key == "sample_stride") sc.sample_stride = parse_int(path, value);
            else if (key == "sample_count") sc.sample_count = parse_int(path, value);
            else if (key == "tail_tol") sc.tail_tol = parse_double(path, value);
            else if (key == "output_dir") sc.output_dir = value;
            else throw ConfigError(path, "unknown key");
        } else if (section == "bands") {
            const std::string path = "bands." + key;
            unique(bands_keys, path);
            if (key == "x_min") cfg.bands->x_min = parse_double(path, value);
            else if (key == "x_max") cfg.bands->x_max = parse_double(path, value);
            else if (key == "n_points") cfg.bands->n_points = parse_int(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "figures") {
            const std::string path = "figures." + key;
            unique(figures_keys, path);
            if (key == "kind") cfg.figures->kind = value;
            else if (key == "m_list") cfg.figures->m_list = parse_int_list(path, value);
            else if (key == "gammas") cfg.figures->gammas = parse_double_list(path, value);
            else if (key == "ecl_over_omega")
                cfg.figures->ecl_over_omega = parse_double_list(path, value);
            else throw ConfigError(path, "unknown key");
        } else if (section == "spectrum") {
            const std::string path = "spectrum." + key;
            unique(spectrum_keys, path);
            if (key == "regime") cfg.spectrum->regime = value;
            else if (key == "gamma") cfg.spectrum->gamma = parse_double(path, value);
            else if (key == "beta_omega_tilde")
                cfg.spectrum->beta_omega_tilde = parse_double(path, value);
            else if (key == "m_list") cfg.spectrum->m_list = parse_int_list(path, value);
            else if (key == "tail_tol") cfg.spectrum->tail_tol = parse_double(path, value);
            else throw ConfigError(path, "unknown key");
        }
    }

    if (cfg.profile) {
        if (!profile_keys.has("omega0")) throw ConfigError("profile.omega0", "missing");
        if (!profile_keys.has("tau")) throw ConfigError("profile.tau", "missing");
        if (!profile_keys.has("n_periods")) throw ConfigError("profile.n_periods", "missing");
        if (cfg.profile->segments.empty())
            throw ConfigError("profile.segments", "at least one [[segment]] required");
    }
    if (cfg.scenario) {
        if (!scenario_keys.has("regime")) throw ConfigError("scenario.regime", "missing");
        if (!scenario_keys.has("m_list")) throw ConfigError("scenario.m_list", "missing");
    }
    if (cfg.bands) {
        if (!bands_keys.has("x_min")) throw ConfigError("bands.x_min", "missing");
        if (!bands_keys.has("x_max")) throw ConfigError("bands.x_max", "missing");
        if (!bands_keys.has("n_points")) throw ConfigError("bands.n_points", "missing");
    }
    if (cfg.figures && !figures_keys.has("kind"))
        throw ConfigError("figures.kind", "missing");
    if (cfg.spectrum) {
        if (!spectrum_keys.has("regime")) throw ConfigError("spectrum.regime", "missing");
        if (!spectrum_keys.has("gamma")) throw ConfigError("spectrum.gamma", "missing");
        if (!spectrum_keys.has("m_list")) throw ConfigError("spectrum.m_list", "missing");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    auto num = [&](const std::string& key, double v) {
        out << key << " = " << fmt17(v) << "\n";
    };
    if (config.profile) {
        const ProfileSpec& p = *config.profile;
        out << "[profile]\n";
        num("omega0", p.omega0);
        num("tau", p.tau);
        out << "n_periods = " << p.n_periods << "\n";
        for (const Segment& s : p.segments) {
            out << "\n[[segment]]\n";
            num("duration", s.duration);
            num("delta", s.delta);
            num("gamma", s.gamma);
        }
        out << "\n";
    }
    if (config.scenario) {
        const ScenarioSpec& s = *config.scenario;
        out << "[scenario]\n";
        out << "regime = " << s.regime << "\n";
        out << "m_list =";
        for (int m : s.m_list) out << " " << m;
        out << "\n";
        if (s.alpha0 != 0.0) num("alpha0", s.alpha0);
        if (s.alpha_deriv0 != 0.0) num("alpha_deriv0", s.alpha_deriv0);
        if (s.rho_offset != 0.0) num("rho_offset", s.rho_offset);
        if (s.rho_deriv0 != 0.0) num("rho_deriv0", s.rho_deriv0);
        if (!s.sample_times.empty()) {
            out << "sample_times =";
            for (double t : s.sample_times) out << " " << fmt17(t);
            out << "\n";
        }
        if (s.sample_stride != 0) out << "sample_stride = " << s.sample_stride << "\n";
        if (s.sample_count != 0) out << "sample_count = " << s.sample_count << "\n";
        num("tail_tol", s.tail_tol);
        out << "output_dir = " << s.output_dir << "\n\n";
    }
    if (config.bands) {
        out << "[bands]\n";
        num("x_min", config.bands->x_min);
        num("x_max", config.bands->x_max);
        out << "n_points = " << config.bands->n_points << "\n\n";
    }
    if (config.figures) {
        const FiguresSpec& f = *config.figures;
        out << "[figures]\n";
        out << "kind = " << f.kind << "\n";
        if (!f.m_list.empty()) {
            out << "m_list =";
            for (int m : f.m_list) out << " " << m;
            out << "\n";
        }
        if (!f.gammas.empty()) {
            out << "gammas =";
            for (double g : f.gammas) out << " " << fmt17(g);
            out << "\n";
        }
        if (!f.ecl_over_omega.empty()) {
            out << "ecl_over_omega =";
            for (double r : f.ecl_over_omega) out << " " << fmt17(r);
            out << "\n";
        }
        out << "\n";
    }
    if (config.spectrum) {
        const SpectrumSpec& s = *config.spectrum;
        out << "[spectrum]\n";
        out << "regime = " << s.regime << "\n";
        num("gamma", s.gamma);
        num("beta_omega_tilde", s.beta_omega_tilde);
        out << "m_list =";
        for (int m : s.m_list) out << " " << m;
        out << "\n";
        num("tail_tol", s.tail_tol);
        out << "\n";
    }
    return out.str();
}

DriveProfile build_profile(const ProfileSpec& spec) {
    try {
        return DriveProfile::make(spec.omega0, spec.tau, spec.n_periods,
                                  spec.segments);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("profile", e.what());
    }
}

ScenarioConfig resolve_scenario(const RunConfig& config) {
    if (!config.profile) throw ConfigError("profile", "section required for scenarios");
    if (!config.scenario) throw ConfigError("scenario", "section required");
    const ScenarioSpec& s = *config.scenario;

    ScenarioConfig out;
    out.profile = build_profile(*config.profile);

    if (s.regime == "displaced") out.regime = Regime::displaced;
    else if (s.regime == "squeezed") out.regime = Regime::squeezed;
    else throw ConfigError("scenario.regime", "expected 'displaced' or 'squeezed', got '" + s.regime + "'");

    if (s.m_list.empty()) throw ConfigError("scenario.m_list", "must be nonempty");
    for (int m : s.m_list)
        if (m < 0) throw ConfigError("scenario.m_list", "indices must be >= 0");
    out.m_list = s.m_list;

    // the perturbation must act on the regime's own auxiliary function
    if (out.regime == Regime::displaced) {
        if (s.rho_offset != 0.0)
            throw ConfigError("scenario.rho_offset", "not allowed in the displaced regime");
        if (s.rho_deriv0 != 0.0)
            throw ConfigError("scenario.rho_deriv0", "not allowed in the displaced regime");
    } else {
        if (s.alpha0 != 0.0)
            throw ConfigError("scenario.alpha0", "not allowed in the squeezed regime");
        if (s.alpha_deriv0 != 0.0)
            throw ConfigError("scenario.alpha_deriv0", "not allowed in the squeezed regime");
    }
    out.alpha0 = s.alpha0;
    out.alpha_deriv0 = s.alpha_deriv0;
    out.rho_offset = s.rho_offset;
    out.rho_deriv0 = s.rho_deriv0;

    const double total = out.profile.total_time();
    if (!s.sample_times.empty()) {
        if (s.sample_stride != 0 || s.sample_count != 0)
            throw ConfigError("scenario.sample_times",
                              "give either sample_times or sample_stride/sample_count, not both");
        double prev = 0.0;
        for (double t : s.sample_times) {
            if (t < prev)
                throw ConfigError("scenario.sample_times", "must be sorted and >= 0");
            if (t > total)
                throw ConfigError("scenario.sample_times",
                                  "sample beyond n_periods*tau = " + std::to_string(total));
            prev = t;
        }
        out.sample_times = s.sample_times;
    } else {
        if (s.sample_stride < 1) throw ConfigError("scenario.sample_stride", "must be >= 1");
        if (s.sample_count < 1) throw ConfigError("scenario.sample_count", "must be >= 1");
        if (static_cast<long>(s.sample_stride) * s.sample_count > out.profile.n_periods())
            throw ConfigError("scenario.sample_count",
                              "sample_stride*sample_count exceeds n_periods");
        for (int k = 1; k <= s.sample_count; ++k)
            out.sample_times.push_back(static_cast<double>(k) * s.sample_stride *
                                       out.profile.tau());
    }

    if (!(s.tail_tol > 0.0) || s.tail_tol > 1e-6)
        throw ConfigError("scenario.tail_tol", "must lie in (0, 1e-6]");
    out.tail_tol = s.tail_tol;
    out.output_dir = s.output_dir;
    return out;
}

} // namespace qpr
