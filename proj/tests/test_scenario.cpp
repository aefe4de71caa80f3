#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/scenario.hpp"

using namespace qpr;
namespace fs = std::filesystem;

namespace {

const char* kSqueezedConfig = R"(# square-wave drive, principal band
[profile]
omega0 = 1.0
tau = 3.18
n_periods = 15

[[segment]]
duration = 1.59
delta = 0.3
gamma = 0.0

[[segment]]
duration = 1.59
delta = -0.3
gamma = 0.0

[scenario]
regime = squeezed
m_list = 0 1 2
rho_offset = 1e-6
sample_stride = 5
sample_count = 3
tail_tol = 1e-12
output_dir = out
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("qpr_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

void check_field(const char* text, const std::string& field_substr) {
    try {
        resolve_scenario(parse_config(text));
        FAIL_CHECK("expected ConfigError mentioning " << field_substr);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.field()).find(field_substr) != std::string::npos);
    }
}

} // namespace

TEST_CASE("config parses and resolves") {
    const RunConfig cfg = parse_config(kSqueezedConfig);
    REQUIRE(cfg.profile.has_value());
    REQUIRE(cfg.scenario.has_value());
    CHECK(cfg.profile->segments.size() == 2);
    CHECK(cfg.profile->segments[1].delta == -0.3);

    const ScenarioConfig sc = resolve_scenario(cfg);
    CHECK(sc.regime == Regime::squeezed);
    CHECK(sc.m_list.size() == 3);
    REQUIRE(sc.sample_times.size() == 3);
    CHECK(sc.sample_times[0] == doctest::Approx(5 * 3.18));
    CHECK(sc.sample_times[2] == doctest::Approx(15 * 3.18));
}

TEST_CASE("config round-trips through its canonical form") {
    const RunConfig first = parse_config(kSqueezedConfig);
    const RunConfig second = parse_config(serialize_config(first));
    CHECK(first == second);

    // a config with every section present
    const char* full = R"(
[profile]
omega0 = 1.5
tau = 2.0
n_periods = 4
[[segment]]
duration = 2.0
delta = 0.1
gamma = 0.25
[scenario]
regime = displaced
m_list = 0 3
alpha0 = 1e-6
sample_times = 2.0 4.0 6.5
tail_tol = 1e-10
output_dir = results
[bands]
x_min = 0.5
x_max = 20
n_points = 250
[figures]
kind = fig2
m_list = 0 1 2 3 4 5
ecl_over_omega = 10 100
[spectrum]
regime = squeezed
gamma = 4.0
m_list = 0 2
)";
    const RunConfig a = parse_config(full);
    const RunConfig b = parse_config(serialize_config(a));
    CHECK(a == b);
}

TEST_CASE("config errors carry the field path") {
    check_field("[scenario]\nregime = displaced\nm_list = 0\n", "profile");
    check_field(
        "[profile]\nomega0 = 1\ntau = 1\nn_periods = 2\n[[segment]]\nduration "
        "= 1\ndelta = 0\ngamma = 0\n[scenario]\nregime = sideways\nm_list = 0\n"
        "sample_stride = 1\nsample_count = 1\n",
        "scenario.regime");
    // squeezed perturbation offered to a displaced run
    check_field(
        "[profile]\nomega0 = 1\ntau = 1\nn_periods = 2\n[[segment]]\nduration "
        "= 1\ndelta = 0\ngamma = 0\n[scenario]\nregime = displaced\nm_list = "
        "0\nrho_offset = 1e-6\nsample_stride = 1\nsample_count = 1\n",
        "scenario.rho_offset");
    check_field(
        "[profile]\nomega0 = 1\ntau = 1\nn_periods = 2\n[[segment]]\nduration "
        "= 1\ndelta = 0\ngamma = 0\n[scenario]\nregime = squeezed\nm_list = "
        "0\nalpha0 = 1e-6\nsample_stride = 1\nsample_count = 1\n",
        "scenario.alpha0");
    // samples beyond the simulated range
    check_field(
        "[profile]\nomega0 = 1\ntau = 1\nn_periods = 2\n[[segment]]\nduration "
        "= 1\ndelta = 0\ngamma = 0\n[scenario]\nregime = squeezed\nm_list = "
        "0\nsample_stride = 3\nsample_count = 1\n",
        "scenario.sample_count");
    // malformed numbers and unknown keys
    CHECK_THROWS_AS(parse_config("[profile]\nomega0 = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[profile]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nonsense]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("omega0 = 1\n"), ConfigError);
}

TEST_CASE("null scenario keeps the initial eigenstate") {
    const char* null_displaced = R"(
[profile]
omega0 = 1.0
tau = 2.0
n_periods = 4
[[segment]]
duration = 2.0
delta = 0.0
gamma = 0.0
[scenario]
regime = displaced
m_list = 0 2
sample_stride = 2
sample_count = 2
)";
    TempDir dir("null_displaced");
    const ScenarioResult r =
        run_scenario(resolve_scenario(parse_config(null_displaced)), dir.str());
    for (const GammaValue& g : r.gammas) CHECK(g.gamma == 0.0);
    for (const MomentRow& row : r.moments) {
        CHECK(row.mean == doctest::Approx(row.m + 0.5).epsilon(1e-12));
        CHECK(std::abs(row.stddev) < 1e-9);
    }

    const char* null_squeezed = R"(
[profile]
omega0 = 1.0
tau = 2.0
n_periods = 4
[[segment]]
duration = 2.0
delta = 0.0
gamma = 0.0
[scenario]
regime = squeezed
m_list = 1
sample_stride = 2
sample_count = 2
)";
    TempDir dir2("null_squeezed");
    const ScenarioResult r2 =
        run_scenario(resolve_scenario(parse_config(null_squeezed)), dir2.str());
    for (const GammaValue& g : r2.gammas)
        CHECK(g.gamma == doctest::Approx(1.0).epsilon(1e-12));
    for (const MomentRow& row : r2.moments)
        CHECK(row.mean == doctest::Approx((1 + 0.5) * row.gamma.beta_omega_tilde)
                              .epsilon(1e-10));
}

TEST_CASE("scenario bundle is written and byte-stable") {
    const ScenarioConfig sc = resolve_scenario(parse_config(kSqueezedConfig));
    TempDir a("det_a"), b("det_b");
    const ScenarioResult ra = run_scenario(sc, a.str(), 1);
    const ScenarioResult rb = run_scenario(sc, b.str(), 2); // thread count must not matter

    REQUIRE(ra.files.size() == rb.files.size());
    CHECK(ra.files.size() == 2 + 3 * 3 + 1); // trajectory, gamma, dists, moments
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
        CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
    }
    // gamma grows along the in-band run, and once it is large the mean locks
    // onto the persistent-memory value (m + 1/2) E_cl
    CHECK(ra.gammas.back().gamma > ra.gammas.front().gamma);
    CHECK(ra.gammas.front().gamma >= 1.0);
    for (const MomentRow& row : ra.moments)
        if (row.gamma.gamma > 500.0)
            CHECK(row.mean / (row.gamma.e_cl * (row.m + 0.5)) ==
                  doctest::Approx(1.0).epsilon(0.01));

    // distribution headers carry the metadata comment
    const std::string dist0 = slurp(ra.files[2]);
    CHECK(dist0.find("# m=0, gamma=") != std::string::npos);
    CHECK(dist0.find("regime=squeezed") != std::string::npos);
    CHECK(dist0.find("n,P,cumulative") != std::string::npos);
}

TEST_CASE("displaced scenario reproduces the fading-memory trend") {
    const char* text = R"(
[profile]
omega0 = 1.0
tau = 3.18
n_periods = 60
[[segment]]
duration = 1.59
delta = 0.3
gamma = 0.0
[[segment]]
duration = 1.59
delta = -0.3
gamma = 0.0
[scenario]
regime = displaced
m_list = 0 1 2
alpha0 = 1e-6
sample_stride = 30
sample_count = 2
)";
    TempDir dir("displaced_trend");
    const ScenarioResult r =
        run_scenario(resolve_scenario(parse_config(text)), dir.str());
    // by the late sample the mean has converged onto E_cl for every m
    for (const MomentRow& row : r.moments)
        if (row.t > 100.0 && row.gamma.gamma > 100.0)
            CHECK(std::abs(row.mean / row.gamma.e_cl - 1.0) < 0.02);
}

TEST_CASE("figure data") {
    TempDir dir("figures");
    SUBCASE("fig2 rows carry the asymptote column") {
        FiguresSpec spec;
        spec.kind = "fig2";
        spec.m_list = {0, 1, 2, 3};
        spec.ecl_over_omega = {10.0, 100.0};
        const std::string path = emit_figure_data(spec, dir.str());
        const std::string text = slurp(path);
        CHECK(text.find("m,ratio_ecl_10,ratio_ecl_100,asymptote") != std::string::npos);
        CHECK(text.find("0.70710678118654") != std::string::npos); // m = 0
        CHECK(text.find("2.54950975679639") != std::string::npos); // m = 3
    }
    SUBCASE("fig1b ratios approach m + 1/2") {
        FiguresSpec spec;
        spec.kind = "fig1b";
        spec.m_list = {2};
        spec.ecl_over_omega = {2000.0};
        emit_figure_data(spec, dir.str());
        const std::string text = slurp((fs::path(dir.str()) / "fig1b.csv").string());
        // last row: ecl, m, ratio, asymptote
        const std::size_t pos = text.rfind("\n2000,");
        REQUIRE(pos != std::string::npos);
        std::istringstream row(text.substr(pos + 1));
        std::string cell;
        std::getline(row, cell, ','); // ecl
        std::getline(row, cell, ','); // m
        std::getline(row, cell, ','); // ratio
        CHECK(std::abs(std::stod(cell) - 2.5) < 0.02 * 2.5);
    }
    SUBCASE("fig1a ratio converges to 1") {
        FiguresSpec spec;
        spec.kind = "fig1a";
        spec.m_list = {0, 3};
        spec.gammas = {1000.0};
        emit_figure_data(spec, dir.str());
        const std::string text = slurp((fs::path(dir.str()) / "fig1a.csv").string());
        std::istringstream in(text);
        std::string line;
        int rows = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 'g') continue;
            const std::size_t c2 = line.rfind(',');
            CHECK(std::abs(std::stod(line.substr(c2 + 1)) - 1.0) < 0.02);
            ++rows;
        }
        CHECK(rows == 2);
    }
    SUBCASE("unknown kind") {
        FiguresSpec spec;
        spec.kind = "fig9";
        CHECK_THROWS_AS(emit_figure_data(spec, dir.str()), ConfigError);
    }
}

TEST_CASE("bands command") {
    TempDir dir("bands");
    BandsSpec spec{0.5, 20.0, 400};
    SUBCASE("unmodulated drive yields no in-band points") {
        const DriveProfile flat =
            DriveProfile::make(1.0, 2.0, 1, {{2.0, 0.0, 0.02}});
        scan_bands_cmd(flat, spec, dir.str());
        const std::string text = slurp((fs::path(dir.str()) / "bands.csv").string());
        CHECK(text.find(",1\n") == std::string::npos);
        const std::string edges =
            slurp((fs::path(dir.str()) / "band_edges.csv").string());
        CHECK(edges.find("lower,upper") != std::string::npos);
    }
    SUBCASE("square wave yields alternating structure") {
        const DriveProfile shape = DriveProfile::make(
            1.0, 3.0, 1, {{1.5, 0.3, 0.0}, {1.5, -0.3, 0.0}});
        scan_bands_cmd(shape, spec, dir.str());
        const std::string text = slurp((fs::path(dir.str()) / "bands.csv").string());
        CHECK(text.find(",1\n") != std::string::npos);
        CHECK(text.find(",0\n") != std::string::npos);
    }
}

TEST_CASE("spectrum snapshots") {
    TempDir dir("spectrum");
    SpectrumSpec spec;
    spec.regime = "squeezed";
    spec.gamma = 4.0;
    spec.m_list = {0, 2};
    const auto paths = emit_spectrum(spec, dir.str());
    CHECK(paths.size() == 3);
    const std::string d0 = slurp(paths[0]);
    CHECK(d0.find("# m=0, gamma=4") != std::string::npos);
    CHECK(d0.find("0,0.5,0.5") != std::string::npos); // P_0(0) = 1/sqrt(4)

    spec.gamma = 0.5; // invalid for squeezed
    CHECK_THROWS_AS(emit_spectrum(spec, dir.str()), ConfigError);

    SpectrumSpec disp;
    disp.regime = "displaced";
    disp.gamma = 3.0;
    disp.m_list = {0};
    const auto dpaths = emit_spectrum(disp, dir.str());
    const std::string dd = slurp(dpaths[0]);
    CHECK(dd.find("regime=displaced") != std::string::npos);
    // Poisson ground value e^{-3}
    CHECK(dd.find("0,0.049787068367863944,") != std::string::npos);
}
