#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "duetdyn/experiment.hpp"

using namespace duetdyn;

namespace {

SweepSpec small_spec() {
    SweepSpec spec;
    spec.base.lindblad = LindbladSpec::sigma_plus();
    spec.c_axis = {0.0, 3.0, 4};
    spec.gamma_axis = {0.0, 0.2};
    spec.init = {0.8, 0.5};
    spec.grid = {4.0, 1e-2, 50};
    spec.summary_window = {2.0, 4.0};
    return spec;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& row) {
    std::vector<std::string> out;
    std::stringstream ss(row);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "duetdyn_test_experiment";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("CAxis values") {
    CHECK(CAxis{2.0, 5.0, 1}.values() == std::vector<double>{2.0});
    const auto v = CAxis{0.0, 4.0, 201}.values();
    REQUIRE(v.size() == 201);
    CHECK(v[1] == doctest::Approx(0.02));
    CHECK(v[100] == doctest::Approx(2.0));
    CHECK(v.back() == 4.0);
    CHECK_THROWS_AS(CAxis({0.0, 1.0, 0}).values(), ValidationError);
}

TEST_CASE("SweepSpec validation") {
    auto spec = small_spec();
    CHECK_NOTHROW(spec.validate());
    spec.gamma_axis = {};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = small_spec();
    spec.gamma_axis = {-0.1};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = small_spec();
    spec.c_axis = {2.0, 1.0, 3};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = small_spec();
    spec.init.z0 = 1.5;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = small_spec();
    spec.summary_window = {3.0, 5.0};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("figure presets") {
    const auto f1 = figure_preset(FigureName::Fig1);
    CHECK(f1.base.lindblad.preset == LindbladPreset::SigmaPlus);
    CHECK(f1.gamma_axis == std::vector<double>{0.1, 0.0});
    CHECK(f1.c_axis.steps == 201);
    CHECK(f1.c_axis.max == 4.0);
    CHECK(f1.init.z0 == 1.0);
    CHECK(f1.grid.t_final == 50.0);
    CHECK(f1.summary_window.t_start == 25.0);

    CHECK(figure_preset(FigureName::Fig2).gamma_axis == std::vector<double>{0.3, 0.5});
    CHECK(figure_preset(FigureName::Fig3).observables == std::vector<Observable>{Observable::Coherence});

    for (auto [f, c] : {std::pair{FigureName::Fig4, 3.0}, {FigureName::Fig5, 1.0}, {FigureName::Fig6, 2.0}}) {
        const auto s = figure_preset(f);
        CHECK(s.base.lindblad.preset == LindbladPreset::SigmaX);
        CHECK(s.c_axis.values() == std::vector<double>{c});
        CHECK(s.gamma_axis == std::vector<double>{0.01, 0.0});
    }
    CHECK(parse_figure_name("fig5") == FigureName::Fig5);
    CHECK(to_string(FigureName::Fig2) == "fig2");
    CHECK_THROWS_AS(parse_figure_name("fig7"), ValidationError);
}

TEST_CASE("a 1x1 sweep reproduces evolve") {
    SweepSpec spec;
    spec.base.decoherence_rate = 0.3;
    spec.base.lindblad = LindbladSpec::sigma_plus();
    spec.c_axis = {2.5, 2.5, 1};
    spec.gamma_axis = {0.05};
    spec.init = {0.3, 1.2};
    spec.grid = {10.0, 1e-3, 100};
    spec.summary_window = {5.0, 10.0};
    const auto result = run_sweep(spec, 1);
    REQUIRE(result.cells().size() == 1);
    const auto& cell = result.at(0, 0);
    REQUIRE(cell.ok());

    ModelParams p = spec.base;
    p.c = 2.5;
    p.decoherence_rate = 0.05;
    const auto direct = evolve(density_from_initial(spec.init), p, spec.grid);
    REQUIRE(cell.trajectory.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(cell.trajectory[i].t == direct[i].t);
        CHECK((cell.trajectory[i].rho.matrix() - direct[i].rho.matrix()).norm() == 0.0);
    }
    REQUIRE(cell.summary);
    CHECK(cell.summary->mean_z == window_summary(direct, 5.0, 10.0).mean_z);
}

TEST_CASE("sweep layout and thread independence") {
    const auto spec = small_spec();
    const auto serial = run_sweep(spec, 1);
    const auto parallel = run_sweep(spec, 4);
    CHECK(serial.c_count() == 4);
    CHECK(serial.gamma_count() == 2);
    REQUIRE(serial.cells().size() == 8);
    for (std::size_t ci = 0; ci < 4; ++ci)
        for (std::size_t gi = 0; gi < 2; ++gi) {
            const auto& a = serial.at(ci, gi);
            const auto& b = parallel.at(ci, gi);
            CHECK(a.c_index == ci);
            CHECK(a.gamma_index == gi);
            CHECK(a.c == static_cast<double>(ci));
            CHECK(a.decoherence_rate == spec.gamma_axis[gi]);
            REQUIRE(a.trajectory.size() == b.trajectory.size());
            for (std::size_t k = 0; k < a.trajectory.size(); ++k)
                CHECK((a.trajectory[k].rho.matrix() - b.trajectory[k].rho.matrix()).norm() == 0.0);
        }
    std::ostringstream x, y;
    write_csv(serial, x);
    write_csv(parallel, y);
    CHECK(x.str() == y.str());

    const auto curve = serial.summary_curve(1);
    REQUIRE(curve.size() == 4);
    CHECK(curve[2].c == 2.0);
    CHECK(curve[2].mean_z == serial.at(2, 1).summary->mean_z);
    CHECK(serial.provenance().version == library_version());
}

TEST_CASE("failed cells are recorded without stopping the sweep") {
    SweepSpec spec;
    spec.c_axis = {0.0, 400.0, 2};
    spec.init = {0.9, 0.0};
    spec.grid = {5.0, 0.05, 1};
    spec.summary_window = {0.0, 5.0};
    const auto result = run_sweep(spec, 2);
    CHECK(result.at(0, 0).ok());
    const auto& bad = result.at(1, 0);
    REQUIRE_FALSE(bad.ok());
    CHECK((bad.error->kind == "PositivityViolation" || bad.error->kind == "TraceDrift"));
    REQUIRE(bad.error->time);
    CHECK(*bad.error->time > 0.0);
    CHECK_FALSE(bad.summary);
    CHECK(result.summary_curve(0).size() == 1);
}

TEST_CASE("observables are optional in exports") {
    auto spec = small_spec();
    spec.observables = {Observable::Coherence};
    const auto json_text = to_json(run_sweep(spec, 1));
    CHECK(json_text.find("\"coherence\"") != std::string::npos);
    CHECK(json_text.find("\"purity\"") == std::string::npos);
    CHECK(spec.wants(Observable::Coherence));
    CHECK_FALSE(spec.wants(Observable::Z));
}

TEST_CASE("CSV export") {
    const auto result = run_sweep(small_spec(), 1);
    std::ostringstream os;
    write_csv(result, os);
    const auto lines = lines_of(os.str());
    REQUIRE(!lines.empty());
    CHECK(lines[0] == kCsvHeader);

    std::size_t rows = 0;
    for (const auto& cell : result.cells()) rows += cell.trajectory.size();
    CHECK(lines.size() == rows + 1);

    SUBCASE("values round-trip through 17 significant digits") {
        const auto fields = split(lines[1]);
        REQUIRE(fields.size() == 10);
        const auto& s = result.cells()[0].trajectory[0];
        CHECK(std::stod(fields[2]) == s.t);
        CHECK(std::stod(fields[5]) == s.rho.rl().real());
        const auto last = split(lines.back());
        const auto& e = result.cells().back().trajectory.back();
        CHECK(std::stod(last[3]) == e.rho.rr().real());
        CHECK(std::stod(last[9]) == e.purity);
    }
    SUBCASE("one gamma column") {
        std::ostringstream one;
        write_csv(result, one, 1);
        const auto l = lines_of(one.str());
        CHECK(l.size() == rows / 2 + 1);
        for (std::size_t i = 1; i < l.size(); ++i) CHECK(std::stod(split(l[i])[1]) == 0.2);
    }
    SUBCASE("stream precision is restored") {
        std::ostringstream s2;
        s2 << 0.1;
        write_csv(result, s2);
        s2 << ' ' << 0.1;
        CHECK(s2.str().substr(s2.str().size() - 4) == " 0.1");
    }
    SUBCASE("repeat export is byte-identical") {
        std::ostringstream again;
        write_csv(result, again);
        CHECK(again.str() == os.str());
    }
    SUBCASE("an empty result writes only the header") {
        std::ostringstream empty;
        write_csv(SweepResult{}, empty);
        CHECK(empty.str() == std::string(kCsvHeader) + "\n");
    }
}

TEST_CASE("JSON round trip") {
    auto spec = small_spec();
    spec.base.lindblad = LindbladSpec::custom({Complex{0.5, -0.25}, Complex{0.0, 1.0}, Complex{0.1, 0.0}}, 0.7);
    const auto result = run_sweep(spec, 1);
    const auto back = sweep_result_from_json(to_json(result));
    CHECK(back.c_count() == result.c_count());
    CHECK(back.gamma_count() == result.gamma_count());
    CHECK(back.provenance().version == result.provenance().version);
    CHECK(back.provenance().spec.base.lindblad.lambdas == spec.base.lindblad.lambdas);
    CHECK(back.provenance().spec.base.lindblad.scale == 0.7);
    for (std::size_t i = 0; i < result.cells().size(); ++i) {
        const auto& a = result.cells()[i];
        const auto& b = back.cells()[i];
        REQUIRE(b.summary);
        CHECK(b.summary->mean_z == a.summary->mean_z);
        CHECK(b.summary->sample_count == a.summary->sample_count);
        REQUIRE(b.trajectory.size() == a.trajectory.size());
        CHECK(b.trajectory.back().purity == a.trajectory.back().purity);
        // Only the real diagonal and rho_RL are exported; those come back exact.
        CHECK(b.trajectory.back().rho.rr().real() == a.trajectory.back().rho.rr().real());
        CHECK(b.trajectory.back().rho.ll().real() == a.trajectory.back().rho.ll().real());
        CHECK(b.trajectory.back().rho.rl() == a.trajectory.back().rho.rl());
    }
    CHECK(to_json(back) == to_json(result));

    SUBCASE("errors survive the round trip") {
        SweepSpec bad;
        bad.c_axis = {400.0, 400.0, 1};
        bad.init = {0.9, 0.0};
        bad.grid = {5.0, 0.05, 1};
        bad.summary_window = {0.0, 5.0};
        const auto r = run_sweep(bad, 1);
        const auto rb = sweep_result_from_json(to_json(r));
        REQUIRE_FALSE(rb.at(0, 0).ok());
        CHECK(rb.at(0, 0).error->kind == r.at(0, 0).error->kind);
        CHECK(rb.at(0, 0).error->time == r.at(0, 0).error->time);
    }
}

TEST_CASE("spec JSON") {
    const auto spec = small_spec();
    const auto back = spec_from_json(spec_to_json(spec));
    CHECK(spec_to_json(back) == spec_to_json(spec));

    const auto partial = spec_from_json(R"({"c_axis": {"min": 1, "max": 2, "steps": 3}})");
    CHECK(partial.c_axis.steps == 3);
    CHECK(partial.grid.dt == 1e-3);

    const auto str_lambdas = spec_from_json(
        R"({"base": {"lindblad": {"preset": "custom", "lambdas": ["1", "i", "0.5-2e-1i"]}}})");
    CHECK(str_lambdas.base.lindblad.lambdas[1] == Complex{0.0, 1.0});
    CHECK(str_lambdas.base.lindblad.lambdas[2] == Complex{0.5, -0.2});

    CHECK_THROWS_AS(spec_from_json(R"({"bogus": 1})"), ValidationError);
    CHECK_THROWS_AS(spec_from_json(R"({"grid": {"dt": "x"}})"), ValidationError);
    CHECK_THROWS_AS(spec_from_json("{"), ValidationError);
    CHECK_THROWS_AS(spec_from_json(R"({"base": {"lindblad": {"preset": "custom"}}})"), ValidationError);
    CHECK_THROWS_AS(spec_from_json(R"({"observables": ["entropy"]})"), ValidationError);
}

TEST_CASE("run config") {
    const auto cfg = parse_run_config(R"({"c_axis": {"min": 0, "max": 1, "steps": 2},
                                          "output": {"path": "out.json", "format": "json"}})");
    CHECK(cfg.output.path == "out.json");
    CHECK(cfg.output.format == ExportFormat::Json);
    CHECK(parse_run_config(R"({"output": {"path": "a.csv"}})").output.format == ExportFormat::Csv);

    CHECK_THROWS_AS(parse_run_config(R"({"c_axis": {}})"), ValidationError);
    CHECK_THROWS_AS(parse_run_config(R"({"output": {"path": "a", "format": "xml"}})"), ValidationError);
    CHECK_THROWS_AS(parse_run_config(R"({"output": {"path": "a", "extra": 1}})"), ValidationError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/duetdyn.json"), IoError);

    const auto path = scratch("cfg.json");
    std::ofstream(path) << R"({"output": {"path": "x.csv"}})";
    CHECK(load_run_config(path).output.path == "x.csv");
}

TEST_CASE("export_result") {
    const auto result = run_sweep(small_spec(), 1);
    const auto csv = scratch("r.csv");
    export_result(result, ExportFormat::Csv, csv);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == kCsvHeader);

    const auto js = scratch("r.json");
    export_result(result, ExportFormat::Json, js);
    std::ifstream jin(js);
    std::stringstream buf;
    buf << jin.rdbuf();
    CHECK(sweep_result_from_json(buf.str()).cells().size() == result.cells().size());

    try {
        export_result(result, ExportFormat::Csv, "/nonexistent/dir/r.csv");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/r.csv") != std::string::npos);
    }
}
