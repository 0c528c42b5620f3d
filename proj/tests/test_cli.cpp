#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <sys/wait.h>
#include <thread>

#include <json.hpp>

#include "nlfm/app/config.hpp"
#include "nlfm/app/io.hpp"
#include "nlfm/app/runner.hpp"

namespace fs = std::filesystem;
using namespace nlfm::app;
using nlfm::ErrorKind;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nlfm_test_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

DesignConfig small_spline(double lambda = 1e-21) {
    DesignConfig c;
    c.window = WindowKind::Gaussian;
    c.pulse_length = 1e-6;
    c.bandwidth = 100e6;
    c.sample_rate = 500e6;
    c.method = MethodKind::Spline;
    c.lambda = lambda;
    c.n_points = 401;
    return c;
}

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const nlfm::Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no nlfm::Error thrown";
    return ErrorKind::Io;
}

struct Run {
    int code;
    std::string err;
};

Run run_cli(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(NLFM_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                            err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(err)};
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name == "manifest.json" || name == "stdout.txt" || name == "stderr.txt") continue;
        out[name] = read_text_file(e.path());
    }
    return out;
}

} // namespace

TEST(ParseQuantity, UnitSuffixes) {
    EXPECT_EQ(parse_quantity("2.5us"), 2.5e-6);
    EXPECT_EQ(parse_quantity("2.5 \xC2\xB5s"), 2.5e-6);
    EXPECT_EQ(parse_quantity("10us"), 10e-6);
    EXPECT_EQ(parse_quantity("3ms"), 3e-3);
    EXPECT_EQ(parse_quantity("4ns"), 4e-9);
    EXPECT_EQ(parse_quantity("100MHz"), 100e6);
    EXPECT_EQ(parse_quantity("500 mhz"), 500e6);
    EXPECT_EQ(parse_quantity("2GHz"), 2e9);
    EXPECT_EQ(parse_quantity("7kHz"), 7e3);
    EXPECT_EQ(parse_quantity("1e-21"), 1e-21);
    EXPECT_EQ(parse_quantity("-3"), -3.0);
}

TEST(ParseQuantity, RejectsGarbage) {
    EXPECT_EQ(kind_of([] { parse_quantity("fast"); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([] { parse_quantity("3 parsecs"); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([] { parse_quantity(""); }), ErrorKind::InvalidParameter);
}

TEST(ConfigText, KeysCommentsAndSweepEntries) {
    std::map<std::string, std::string> sweep;
    const DesignConfig c = parse_config_text(
        "# Taylor design\nwindow = taylor\nnbar = 6\neta = 35 dB\nT = 10us  # long pulse\nB = 100MHz\n"
        "fs = 500MHz\nmethod = polynomial\ndegree = 11\nn-points = 501\nsweep.lambda = 1e-22, 1e-21\n",
        &sweep);
    EXPECT_EQ(c.window, WindowKind::Taylor);
    EXPECT_EQ(c.nbar, 6);
    EXPECT_EQ(c.eta_db, 35.0);
    EXPECT_EQ(c.pulse_length, 10e-6);
    EXPECT_EQ(c.method, MethodKind::Polynomial);
    EXPECT_EQ(c.degree, 11);
    EXPECT_EQ(c.n_points, 501u);
    ASSERT_EQ(sweep.count("lambda"), 1u);
    EXPECT_EQ(parse_list(sweep["lambda"]), (std::vector<double>{1e-22, 1e-21}));
}

TEST(ConfigText, Errors) {
    EXPECT_EQ(kind_of([] { parse_config_text("colour = blue\n"); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([] { parse_config_text("window gaussian\n"); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([] { parse_config_text("sweep.k = 1,2\n"); }), ErrorKind::InvalidParameter);
    EXPECT_EQ(kind_of([] { load_config_file("/nonexistent/nlfm.cfg"); }), ErrorKind::Io);
}

TEST(Validate, PhysicalAndMethodChecks) {
    DesignConfig c = small_spline();
    EXPECT_NO_THROW(validate(c));
    c.sample_rate = 50e6;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::Aliasing);
    c = small_spline();
    c.lambda.reset();
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidParameter);
    c = small_spline(-1.0);
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidParameter);
    c = small_spline();
    c.pulse_length = 0.0;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidParameter);
}

TEST(Exporters, IqRoundTripIsBitExact) {
    const auto r = evaluate_design(small_spline());
    const std::string bytes = waveform_iq(r.waveform);
    EXPECT_EQ(bytes.size(), 16 * r.waveform.size());
    EXPECT_EQ(parse_waveform_iq(bytes), r.waveform.samples);
    // Little-endian: the first byte is the low byte of the first I value.
    const auto bits = std::bit_cast<std::uint64_t>(r.waveform.samples[0].real());
    EXPECT_EQ(static_cast<unsigned char>(bytes[0]), bits & 0xffu);
}

TEST(Exporters, WaveformCsvRoundTripReproducesAcfCsv) {
    const auto r = evaluate_design(small_spline());
    const auto samples = parse_waveform_csv(waveform_csv(r.waveform));
    EXPECT_EQ(samples, r.waveform.samples);
    const nlfm::Waveform reread{samples, r.waveform.sample_rate, r.waveform.pulse_length, "reread"};
    const auto recomputed = nlfm::autocorrelation(reread, r.config.oversample);
    const auto rows = parse_acf_csv(acf_csv(r.report.curve));
    ASSERT_EQ(rows.size(), recomputed.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_NEAR(rows[i].lag, recomputed.lags[i], 1e-9 * r.waveform.pulse_length);
        EXPECT_NEAR(rows[i].magnitude, recomputed.magnitude[i], 1e-9);
        if (recomputed.db[i] > -150.0) {
            EXPECT_NEAR(rows[i].db, recomputed.db[i], 1e-9);
        }
    }
}

TEST(Exporters, SvgHasCurveAxesAndPslLine) {
    const auto r = evaluate_design(small_spline());
    const std::string svg = acf_svg(r.report.curve, r.report.psl_db, 1e-6, "t");
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(svg.find("lag (us)"), std::string::npos);
    EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Design, ReportFieldsAndDegenerateCw) {
    const auto r = evaluate_design(small_spline());
    const auto j = report_json(r);
    ASSERT_TRUE(j["psl_db"].is_number());
    EXPECT_LT(j["psl_db"].get<double>(), 0.0);
    EXPECT_GT(j["nmlw"].get<double>(), 1.0);
    EXPECT_TRUE(j["monotone_flag"].get<bool>());

    DesignConfig cw = small_spline();
    cw.method = MethodKind::Polynomial;
    cw.degree = 0;
    const auto d = evaluate_design(cw);
    EXPECT_FALSE(d.monotone);
    EXPECT_FALSE(d.diagnostics.empty());
}

TEST(Design, LfmWindowHasUnitNmlw) {
    DesignConfig c = small_spline();
    c.window = WindowKind::Lfm;
    const auto r = evaluate_design(c);
    EXPECT_EQ(r.report.nmlw, 1.0);
    EXPECT_TRUE(r.report.psl_db.has_value());
}

TEST(Design, ArtifactsAreDeterministic) {
    const auto a = evaluate_design(small_spline());
    const auto b = evaluate_design(small_spline());
    EXPECT_EQ(waveform_csv(a.waveform), waveform_csv(b.waveform));
    EXPECT_EQ(acf_csv(a.report.curve), acf_csv(b.report.curve));
    EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
}

TEST(Compare, TableWithLfmReference) {
    std::vector<DesignConfig> configs;
    for (auto window : {WindowKind::Gaussian, WindowKind::Taylor}) {
        for (auto method : {MethodKind::Polynomial, MethodKind::Spline}) {
            DesignConfig c = small_spline();
            c.window = window;
            c.method = method;
            configs.push_back(c);
        }
    }
    const auto table = evaluate_compare(configs);
    ASSERT_EQ(table.rows.size(), 5u);
    EXPECT_TRUE(table.rows.back().reference);
    EXPECT_EQ(table.rows.back().method, "lfm");
    EXPECT_EQ(table.rows.back().nmlw, 1.0);
    const auto j = compare_json(table);
    EXPECT_EQ(j["psl_db_table"].size(), 3u);
    EXPECT_TRUE(j["psl_db_table"][0].contains("polynomial"));
    EXPECT_TRUE(j["psl_db_table"][0].contains("smoothing_spline"));
}

TEST(Compare, LfmOnlyAndErrors) {
    DesignConfig lfm = small_spline();
    lfm.window = WindowKind::Lfm;
    const auto table = evaluate_compare({lfm});
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0].nmlw, 1.0);

    EXPECT_EQ(kind_of([] { evaluate_compare({}); }), ErrorKind::InvalidParameter);
    DesignConfig other = small_spline();
    other.sample_rate = 400e6;
    EXPECT_EQ(kind_of([&] { evaluate_compare({small_spline(), other}); }), ErrorKind::InvalidComparison);
}

TEST(Sweep, GridOrderIsNestedWithMethodAxis) {
    SweepGrid grid;
    grid.k = {40, 60};
    grid.degree = {5};
    grid.lambda = {1e-22, 1e-21};
    const auto points = expand_grid(small_spline(), grid);
    ASSERT_EQ(points.size(), 6u);
    EXPECT_EQ(points[0].k, 40);
    EXPECT_EQ(points[0].method, MethodKind::Polynomial);
    EXPECT_EQ(points[1].lambda, 1e-22);
    EXPECT_EQ(points[2].lambda, 1e-21);
    EXPECT_EQ(points[3].k, 60);
    EXPECT_EQ(points[3].degree, 5);
}

TEST(Sweep, SinglePointMatchesDesign) {
    SweepGrid grid;
    grid.lambda = {2e-21};
    const auto s = evaluate_sweep(small_spline(), grid, 1);
    ASSERT_EQ(s.rows.size(), 1u);
    const auto d = evaluate_design(small_spline(2e-21));
    EXPECT_TRUE(s.rows[0].ok);
    EXPECT_EQ(s.rows[0].psl_db, d.report.psl_db);
    EXPECT_EQ(s.rows[0].mlw_s, d.report.mlw_seconds);
    EXPECT_EQ(s.rows[0].nmlw, d.report.nmlw);
    EXPECT_EQ(s.best_psl, 0u);
}

TEST(Sweep, InvalidPointIsRecordedNotFatal) {
    SweepGrid grid;
    grid.lambda = {1e-21, -1.0, 1e-22};
    const auto s = evaluate_sweep(small_spline(), grid, 2);
    ASSERT_EQ(s.rows.size(), 3u);
    EXPECT_TRUE(s.rows[0].ok);
    EXPECT_FALSE(s.rows[1].ok);
    EXPECT_TRUE(s.rows[2].ok);
    EXPECT_NE(sweep_csv(s).find("1,gaussian,"), std::string::npos);
    EXPECT_NE(sweep_csv(s).find(",failed,"), std::string::npos);
    EXPECT_EQ(sweep_best_json(s, grid)["failed"], 1);
}

TEST(Sweep, IndependentOfThreadCount) {
    SweepGrid grid;
    grid.k = {40, 73.68};
    grid.degree = {5, 9};
    grid.lambda = {1e-23, 1e-22, 1e-21};
    const auto one = evaluate_sweep(small_spline(), grid, 1);
    const auto many = evaluate_sweep(small_spline(), grid, std::max(2u, std::thread::hardware_concurrency()));
    EXPECT_EQ(sweep_csv(one), sweep_csv(many));
    EXPECT_EQ(sweep_best_json(one, grid).dump(), sweep_best_json(many, grid).dump());
}

TEST(Binary, AliasingExitsTwoWithJsonError) {
    const auto dir = scratch("alias");
    const auto r = run_cli("design --lambda 1e-21 --fs 50MHz --out " + (dir / "out").string(), dir);
    EXPECT_EQ(r.code, 2);
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["error"], "aliasing");
}

TEST(Binary, UsageErrorsExitTwo) {
    const auto dir = scratch("usage");
    EXPECT_EQ(run_cli("", dir).code, 2);
    EXPECT_EQ(run_cli("compare", dir).code, 2);
    EXPECT_EQ(run_cli("design --bogus 1", dir).code, 2);
}

TEST(Binary, IoErrorExitsFour) {
    const auto dir = scratch("io");
    write_text_file(dir / "blocker", "x");
    EXPECT_EQ(run_cli("design --lambda 1e-21 --T 1us --out " + (dir / "blocker" / "out").string(), dir).code, 4);
    EXPECT_EQ(run_cli("design --config " + (dir / "missing.cfg").string(), dir).code, 4);
}

TEST(Binary, DesignWritesAllArtifacts) {
    const auto dir = scratch("design");
    const auto out = dir / "out";
    ASSERT_EQ(run_cli("design --window gaussian --k 73.68 --T 2.5us --B 100MHz --fs 500MHz --method spline "
                      "--lambda 1e-21 --n-points 1001 --out " + out.string(), dir).code, 0);
    for (const char* name : {"waveform.csv", "waveform.iq", "waveform.meta.json", "acf.csv", "report.json", "acf.svg",
                             "manifest.json"}) {
        EXPECT_TRUE(fs::exists(out / name)) << name;
    }
    const auto report = nlohmann::json::parse(read_text_file(out / "report.json"));
    EXPECT_LT(report["psl_db"].get<double>(), 0.0);
    const auto manifest = nlohmann::json::parse(read_text_file(out / "manifest.json"));
    EXPECT_TRUE(manifest.contains("wall_time_s"));
    EXPECT_EQ(manifest["config"]["T"], 2.5e-6);
}

TEST(Binary, DegreeZeroPolynomialRuns) {
    const auto dir = scratch("cw");
    EXPECT_EQ(run_cli("design --method polynomial --degree 0 --T 1us --out " + (dir / "out").string(), dir).code, 0);
    const auto report = nlohmann::json::parse(read_text_file(dir / "out" / "report.json"));
    EXPECT_FALSE(report["monotone_flag"].get<bool>());
}

TEST(Binary, RepeatedRunsAreByteIdentical) {
    const auto dir = scratch("repeat");
    const std::string args = "design --T 1us --lambda 1e-21 --out ";
    ASSERT_EQ(run_cli(args + (dir / "a").string(), dir).code, 0);
    ASSERT_EQ(run_cli(args + (dir / "b").string(), dir).code, 0);
    const auto a = data_files(dir / "a");
    EXPECT_EQ(a.size(), 6u);
    EXPECT_EQ(a, data_files(dir / "b"));
}

TEST(Binary, SweepByteIdenticalAcrossThreadCounts) {
    const auto dir = scratch("threads");
    const std::string args = "sweep --T 1us --sweep-k 40,73.68 --sweep-lambda 1e-23,1e-22,1e-21,-1 --sweep-degree 7 ";
    ASSERT_EQ(run_cli(args + "--threads 1 --out " + (dir / "a").string(), dir).code, 0);
    ASSERT_EQ(run_cli(args + "--threads 0 --out " + (dir / "b").string(), dir).code, 0);
    const auto a = data_files(dir / "a");
    EXPECT_EQ(a.size(), 2u);
    EXPECT_EQ(a, data_files(dir / "b"));
}

TEST(Binary, CompareFromConfigFiles) {
    const auto dir = scratch("compare");
    write_text_file(dir / "g.cfg", "window = gaussian\nT = 1us\nmethod = spline\nlambda = 1e-21\n");
    write_text_file(dir / "t.cfg", "window = taylor\nT = 1us\nmethod = polynomial\ndegree = 9\n");
    write_text_file(dir / "bad.cfg", "window = taylor\nT = 1us\nfs = 400MHz\nmethod = polynomial\n");
    const auto out = dir / "out";
    ASSERT_EQ(run_cli("compare --config " + (dir / "g.cfg").string() + " --config " + (dir / "t.cfg").string() +
                      " --out " + out.string(), dir).code, 0);
    EXPECT_TRUE(fs::exists(out / "compare.csv"));
    EXPECT_TRUE(fs::exists(out / "compare.json"));
    const auto r = run_cli("compare --config " + (dir / "t.cfg").string() + " --config " + (dir / "bad.cfg").string() +
                           " --out " + out.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "invalid_comparison");
}
