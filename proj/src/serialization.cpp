#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "duetdyn/experiment.hpp"

namespace duetdyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

// Rejects keys outside `allowed` so a misspelled field is not silently
// replaced by its default.
void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!j.is_object()) fail(std::string(where) + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) fail(std::string(where) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_string()) return parse_complex_literal(j.get<std::string>());
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    fail("Lindblad coefficient must be [re, im], a number, or an \"a+bi\" string");
}

json lindblad_to_json(const LindbladSpec& l) {
    return {{"preset", std::string(to_string(l.preset))},
            {"lambdas", json::array({complex_to_json(l.lambdas[0]), complex_to_json(l.lambdas[1]),
                                     complex_to_json(l.lambdas[2])})},
            {"scale", l.scale}};
}

LindbladSpec lindblad_from_json(const json& j) {
    check_keys(j, {"preset", "lambdas", "scale"}, "lindblad");
    const auto preset = parse_lindblad_preset(j.value("preset", std::string("sigma_x")));
    const double scale = j.value("scale", 1.0);
    std::array<Complex, 3> lambdas{};
    if (j.contains("lambdas")) {
        const auto& arr = j.at("lambdas");
        if (!arr.is_array() || arr.size() != 3) fail("lindblad.lambdas must hold three coefficients");
        for (std::size_t k = 0; k < 3; ++k) lambdas[k] = complex_from_json(arr[k]);
    }
    if (preset == LindbladPreset::Custom) {
        if (!j.contains("lambdas")) fail("custom Lindblad operator needs lambdas");
        return LindbladSpec::custom(lambdas, scale);
    }
    auto spec = LindbladSpec::from_preset(preset, scale);
    if (j.contains("lambdas") && lambdas != spec.lambdas)
        fail("lambdas contradict preset '" + std::string(to_string(preset)) + "'");
    return spec;
}

json params_to_json(const ModelParams& p) {
    return {{"gamma", p.gamma},
            {"c", p.c},
            {"v", p.v},
            {"decoherence_rate", p.decoherence_rate},
            {"lindblad", lindblad_to_json(p.lindblad)}};
}

ModelParams params_from_json(const json& j) {
    check_keys(j, {"gamma", "c", "v", "decoherence_rate", "lindblad"}, "base");
    ModelParams p;
    read_opt(j, "gamma", p.gamma);
    read_opt(j, "c", p.c);
    read_opt(j, "v", p.v);
    read_opt(j, "decoherence_rate", p.decoherence_rate);
    if (j.contains("lindblad")) p.lindblad = lindblad_from_json(j.at("lindblad"));
    return p;
}

json spec_json(const SweepSpec& s) {
    json obs = json::array();
    for (auto o : s.observables) obs.push_back(std::string(to_string(o)));
    return {{"base", params_to_json(s.base)},
            {"c_axis", {{"min", s.c_axis.min}, {"max", s.c_axis.max}, {"steps", s.c_axis.steps}}},
            {"gamma_axis", s.gamma_axis},
            {"init", {{"z0", s.init.z0}, {"theta0", s.init.theta0}}},
            {"grid", {{"t_final", s.grid.t_final}, {"dt", s.grid.dt}, {"record_stride", s.grid.record_stride}}},
            {"cfg",
             {{"method", std::string(to_string(s.cfg.method))},
              {"abs_tol", s.cfg.abs_tol},
              {"rel_tol", s.cfg.rel_tol},
              {"trace_guard", s.cfg.trace_guard},
              {"positivity_guard", s.cfg.positivity_guard}}},
            {"observables", obs},
            {"summary_window", {{"t_start", s.summary_window.t_start}, {"t_end", s.summary_window.t_end}}}};
}

SweepSpec spec_from(const json& j) {
    check_keys(j, {"base", "c_axis", "gamma_axis", "init", "grid", "cfg", "observables", "summary_window"}, "spec");
    SweepSpec s;
    if (j.contains("base")) s.base = params_from_json(j.at("base"));
    if (j.contains("c_axis")) {
        const auto& a = j.at("c_axis");
        check_keys(a, {"min", "max", "steps"}, "c_axis");
        read_opt(a, "min", s.c_axis.min);
        read_opt(a, "max", s.c_axis.max);
        read_opt(a, "steps", s.c_axis.steps);
    }
    read_opt(j, "gamma_axis", s.gamma_axis);
    if (j.contains("init")) {
        const auto& a = j.at("init");
        check_keys(a, {"z0", "theta0"}, "init");
        read_opt(a, "z0", s.init.z0);
        read_opt(a, "theta0", s.init.theta0);
    }
    if (j.contains("grid")) {
        const auto& a = j.at("grid");
        check_keys(a, {"t_final", "dt", "record_stride"}, "grid");
        read_opt(a, "t_final", s.grid.t_final);
        read_opt(a, "dt", s.grid.dt);
        read_opt(a, "record_stride", s.grid.record_stride);
    }
    if (j.contains("cfg")) {
        const auto& a = j.at("cfg");
        check_keys(a, {"method", "abs_tol", "rel_tol", "trace_guard", "positivity_guard"}, "cfg");
        if (a.contains("method")) s.cfg.method = parse_method(a.at("method").get<std::string>());
        read_opt(a, "abs_tol", s.cfg.abs_tol);
        read_opt(a, "rel_tol", s.cfg.rel_tol);
        read_opt(a, "trace_guard", s.cfg.trace_guard);
        read_opt(a, "positivity_guard", s.cfg.positivity_guard);
    }
    if (j.contains("observables")) {
        s.observables.clear();
        for (const auto& o : j.at("observables")) s.observables.push_back(parse_observable(o.get<std::string>()));
    }
    if (j.contains("summary_window")) {
        const auto& w = j.at("summary_window");
        if (w.is_array() && w.size() == 2) {
            s.summary_window = {w[0].get<double>(), w[1].get<double>()};
        } else {
            check_keys(w, {"t_start", "t_end"}, "summary_window");
            read_opt(w, "t_start", s.summary_window.t_start);
            read_opt(w, "t_end", s.summary_window.t_end);
        }
    }
    return s;
}

json parse_text(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
}

template <typename F>
auto translate_json_errors(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        fail(std::string("invalid JSON content: ") + e.what());
    }
}

void write_row(std::ostream& os, double c, double rate, const Sample& s) {
    const auto& m = s.rho.matrix();
    os << c << ',' << rate << ',' << s.t << ',' << m(0, 0).real() << ',' << m(1, 1).real() << ',' << m(0, 1).real()
       << ',' << m(0, 1).imag() << ',' << s.z << ',' << s.coherence << ',' << s.purity << '\n';
}

} // namespace

void write_csv(const SweepResult& result, std::ostream& os, std::optional<std::size_t> gamma_index) {
    const auto old_precision = os.precision(17);
    os << kCsvHeader << '\n';
    for (const auto& cell : result.cells()) {
        if (gamma_index && cell.gamma_index != *gamma_index) continue;
        for (const auto& s : cell.trajectory) write_row(os, cell.c, cell.decoherence_rate, s);
        if (!os) {
            std::ostringstream msg;
            msg << "CSV write failed at cell (c_index=" << cell.c_index << ", gamma_index=" << cell.gamma_index << ")";
            throw IoError(msg.str());
        }
    }
    os.precision(old_precision);
}

std::string to_json(const SweepResult& result) {
    const auto& spec = result.provenance().spec;
    json cells = json::array();
    for (const auto& cell : result.cells()) {
        json jc = {{"c_index", cell.c_index},
                   {"gamma_index", cell.gamma_index},
                   {"c", cell.c},
                   {"gamma_rate", cell.decoherence_rate},
                   {"status", cell.ok() ? "ok" : "error"}};
        if (cell.error) {
            jc["error"] = {{"kind", cell.error->kind}, {"message", cell.error->message}};
            jc["error"]["time"] = cell.error->time ? json(*cell.error->time) : json(nullptr);
        }
        if (cell.summary) {
            const auto& w = *cell.summary;
            jc["summary"] = {{"t_start", w.window.t_start}, {"t_end", w.window.t_end}, {"mean_z", w.mean_z},
                             {"min_z", w.min_z},           {"max_z", w.max_z},     {"mean_coherence", w.mean_coherence},
                             {"sample_count", w.sample_count}};
        }
        json t = json::array(), rr = json::array(), ll = json::array(), re = json::array(), im = json::array();
        json z = json::array(), coh = json::array(), pur = json::array();
        for (const auto& s : cell.trajectory) {
            const auto& m = s.rho.matrix();
            t.push_back(s.t);
            rr.push_back(m(0, 0).real());
            ll.push_back(m(1, 1).real());
            re.push_back(m(0, 1).real());
            im.push_back(m(0, 1).imag());
            z.push_back(s.z);
            coh.push_back(s.coherence);
            pur.push_back(s.purity);
        }
        json samples = {{"t", t}, {"rho_rr", rr}, {"rho_ll", ll}, {"re_rho_rl", re}, {"im_rho_rl", im}};
        if (spec.wants(Observable::Z)) samples["z"] = z;
        if (spec.wants(Observable::Coherence)) samples["coherence"] = coh;
        if (spec.wants(Observable::Purity)) samples["purity"] = pur;
        jc["samples"] = std::move(samples);
        cells.push_back(std::move(jc));
    }
    json root = {{"provenance", {{"version", result.provenance().version}, {"spec", spec_json(spec)}}},
                 {"c_count", result.c_count()},
                 {"gamma_count", result.gamma_count()},
                 {"cells", std::move(cells)}};
    return root.dump(1);
}

SweepResult sweep_result_from_json(std::string_view text) {
    const json root = parse_text(text);
    return translate_json_errors([&] {
        const auto& prov = root.at("provenance");
        SweepResult result(Provenance{spec_from(prov.at("spec")), prov.at("version").get<std::string>()},
                           root.at("c_count").get<std::size_t>(), root.at("gamma_count").get<std::size_t>());
        for (const auto& jc : root.at("cells")) {
            auto& cell = result.at(jc.at("c_index").get<std::size_t>(), jc.at("gamma_index").get<std::size_t>());
            cell.c_index = jc.at("c_index").get<std::size_t>();
            cell.gamma_index = jc.at("gamma_index").get<std::size_t>();
            cell.c = jc.at("c").get<double>();
            cell.decoherence_rate = jc.at("gamma_rate").get<double>();
            if (jc.contains("error")) {
                const auto& e = jc.at("error");
                CellError err{e.at("kind").get<std::string>(), e.at("message").get<std::string>(), std::nullopt};
                if (!e.at("time").is_null()) err.time = e.at("time").get<double>();
                cell.error = err;
            }
            if (jc.contains("summary")) {
                const auto& s = jc.at("summary");
                WindowSummary w;
                w.window = {s.at("t_start").get<double>(), s.at("t_end").get<double>()};
                w.mean_z = s.at("mean_z").get<double>();
                w.min_z = s.at("min_z").get<double>();
                w.max_z = s.at("max_z").get<double>();
                w.mean_coherence = s.at("mean_coherence").get<double>();
                w.sample_count = s.at("sample_count").get<std::size_t>();
                cell.summary = w;
            }
            const auto& js = jc.at("samples");
            const auto& t = js.at("t");
            for (std::size_t k = 0; k < t.size(); ++k) {
                const double re = js.at("re_rho_rl")[k].get<double>();
                const double im = js.at("im_rho_rl")[k].get<double>();
                Matrix2c m;
                m << js.at("rho_rr")[k].get<double>(), Complex{re, im}, Complex{re, -im},
                    js.at("rho_ll")[k].get<double>();
                Sample s = make_sample(t[k].get<double>(), DensityMatrix::from_matrix_unchecked(m));
                if (js.contains("z")) s.z = js.at("z")[k].get<double>();
                if (js.contains("coherence")) s.coherence = js.at("coherence")[k].get<double>();
                if (js.contains("purity")) s.purity = js.at("purity")[k].get<double>();
                cell.trajectory.push_back(s);
            }
        }
        return result;
    });
}

void export_result(const SweepResult& result, ExportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    try {
        if (format == ExportFormat::Csv)
            write_csv(result, out);
        else
            out << to_json(result) << '\n';
    } catch (const IoError& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string spec_to_json(const SweepSpec& spec) { return spec_json(spec).dump(2); }

SweepSpec spec_from_json(std::string_view text) {
    const json j = parse_text(text);
    return translate_json_errors([&] { return spec_from(j); });
}

RunConfig parse_run_config(std::string_view text) {
    json j = parse_text(text);
    return translate_json_errors([&] {
        if (!j.is_object() || !j.contains("output")) fail("run config needs an \"output\" block");
        const json out = j.at("output");
        j.erase("output");
        check_keys(out, {"path", "format"}, "output");
        RunConfig cfg;
        cfg.spec = spec_from(j);
        cfg.output.path = out.at("path").get<std::string>();
        cfg.output.format = parse_export_format(out.value("format", std::string("csv")));
        return cfg;
    });
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace duetdyn
