#include "ffr/scenario_io.hpp"

#include <fstream>
#include <set>

#include "ffr/presets.hpp"

namespace ffr::scenario_io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw SchemaError("scenario: " + path + ": " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) fail(path + "/" + key, "unknown key");
    }
}

double num(const json& j, const std::string& key, const std::string& path, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(path + "/" + key, "expected a number");
    return j[key].get<double>();
}

std::string str(const json& j, const std::string& key, const std::string& path, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(path + "/" + key, "expected a string");
    return j[key].get<std::string>();
}

gridsim::HydroUnit parse_hydro(const json& j, const std::string& path) {
    check_keys(j, {"rating_mw", "t_y_s", "t_w_s", "g0_pu", "servo_rate_pu_s", "fcr_share"}, path);
    for (const char* req : {"rating_mw", "t_y_s", "t_w_s", "g0_pu", "fcr_share"})
        if (!j.contains(req)) fail(path, std::string("missing key '") + req + "'");
    gridsim::HydroUnit u;
    u.params.rating_mw = num(j, "rating_mw", path, 0.0);
    u.params.t_y = num(j, "t_y_s", path, 0.0);
    u.params.t_w = num(j, "t_w_s", path, 0.0);
    u.params.g0 = num(j, "g0_pu", path, 0.0);
    u.params.servo_rate_pu_s = num(j, "servo_rate_pu_s", path, u.params.servo_rate_pu_s);
    u.fcr_share = num(j, "fcr_share", path, 0.0);
    return u;
}

gridsim::WindUnit parse_wind(const json& j, const std::string& path, const std::filesystem::path& base) {
    check_keys(j, {"p_nom_mw", "v_m_s", "k", "ffr_share", "c_opt", "x_floor", "trace_file"}, path);
    for (const char* req : {"p_nom_mw", "ffr_share"})
        if (!j.contains(req)) fail(path, std::string("missing key '") + req + "'");
    gridsim::WindUnit u;
    double p_nom_total = num(j, "p_nom_mw", path, 0.0);
    if (p_nom_total <= 0.0) fail(path + "/p_nom_mw", "must be > 0");
    u.params.scale = p_nom_total / u.params.p_nom_mw;
    u.params.k = num(j, "k", path, u.params.k);
    u.params.c_opt = num(j, "c_opt", path, u.params.c_opt);
    u.params.x_floor = num(j, "x_floor", path, u.params.x_floor);
    u.ffr_share = num(j, "ffr_share", path, 0.0);
    u.trace_path = str(j, "trace_file", path, "");
    if (!u.trace_path.empty()) {
        std::filesystem::path tp = u.trace_path;
        if (tp.is_relative()) tp = base / tp;
        std::ifstream f(tp);
        if (!f) fail(path + "/trace_file", "cannot open '" + tp.string() + "'");
        u.trace = turbine::WindTrace::parse(f);
        u.v_m_s = u.trace->at(0.0);
    } else {
        if (!j.contains("v_m_s")) fail(path, "missing key 'v_m_s' (or a trace_file)");
        u.v_m_s = num(j, "v_m_s", path, 0.0);
    }
    return u;
}

gridsim::DriveMode parse_drive(const std::string& s, const std::string& path) {
    if (s == "fault") return gridsim::DriveMode::fault;
    if (s == "frequency_step") return gridsim::DriveMode::frequency_step;
    if (s == "reference_step") return gridsim::DriveMode::reference_step;
    fail(path, "drive must be one of fault|frequency_step|reference_step");
}

const char* drive_name(gridsim::DriveMode m) {
    switch (m) {
        case gridsim::DriveMode::fault: return "fault";
        case gridsim::DriveMode::frequency_step: return "frequency_step";
        case gridsim::DriveMode::reference_step: return "reference_step";
    }
    return "fault";
}

}  // namespace

gridsim::Scenario from_json(const json& j, const std::filesystem::path& base_dir) {
    const std::string root = "";
    check_keys(j,
               {"preset", "name", "f0_hz", "f_start_hz", "load_damping_mw_per_hz", "t_end_s", "dt_s",
                "drive", "event_t_s", "event_dp_mw", "event_freq_step_hz", "event_ref_step_frac",
                "target", "fcrd", "buses"},
               root);

    gridsim::Scenario sc;
    if (j.contains("preset")) {
        std::string p = str(j, "preset", root, "");
        if (!presets::exists(p)) fail("/preset", "unknown preset '" + p + "'");
        sc = presets::get(p);
    }
    sc.name = str(j, "name", root, sc.name);
    sc.f0_hz = num(j, "f0_hz", root, sc.f0_hz);
    sc.f_start_hz = num(j, "f_start_hz", root, sc.f_start_hz);
    sc.load_damping_mw_hz = num(j, "load_damping_mw_per_hz", root, sc.load_damping_mw_hz);
    sc.t_end_s = num(j, "t_end_s", root, sc.t_end_s);
    sc.dt_s = num(j, "dt_s", root, sc.dt_s);
    if (j.contains("drive")) sc.drive = parse_drive(str(j, "drive", root, ""), "/drive");
    sc.event_t_s = num(j, "event_t_s", root, sc.event_t_s);
    sc.event_dp_mw = num(j, "event_dp_mw", root, sc.event_dp_mw);
    sc.event_freq_step_hz = num(j, "event_freq_step_hz", root, sc.event_freq_step_hz);
    sc.event_ref_step_frac = num(j, "event_ref_step_frac", root, sc.event_ref_step_frac);

    if (j.contains("target")) {
        const json& t = j["target"];
        check_keys(t, {"r_fcr_mw_per_hz", "lead_s", "lag1_s", "lag2_s"}, "/target");
        if (t.contains("r_fcr_mw_per_hz")) sc.r_fcr_override = num(t, "r_fcr_mw_per_hz", "/target", 0.0);
        sc.fcrd.lead_s = num(t, "lead_s", "/target", sc.fcrd.lead_s);
        sc.fcrd.lag1_s = num(t, "lag1_s", "/target", sc.fcrd.lag1_s);
        sc.fcrd.lag2_s = num(t, "lag2_s", "/target", sc.fcrd.lag2_s);
    }
    if (j.contains("fcrd")) {
        const json& f = j["fcrd"];
        check_keys(f,
                   {"activation_50pct_s", "full_activation_s", "nadir_limit_hz", "band_high_hz",
                    "band_low_hz", "dimensioning_fault_mw"},
                   "/fcrd");
        sc.fcrd.activation_50pct_s = num(f, "activation_50pct_s", "/fcrd", sc.fcrd.activation_50pct_s);
        sc.fcrd.full_activation_s = num(f, "full_activation_s", "/fcrd", sc.fcrd.full_activation_s);
        sc.fcrd.nadir_limit_hz = num(f, "nadir_limit_hz", "/fcrd", sc.fcrd.nadir_limit_hz);
        sc.fcrd.band_high_hz = num(f, "band_high_hz", "/fcrd", sc.fcrd.band_high_hz);
        sc.fcrd.band_low_hz = num(f, "band_low_hz", "/fcrd", sc.fcrd.band_low_hz);
        sc.fcrd.dimensioning_fault_mw = num(f, "dimensioning_fault_mw", "/fcrd", sc.fcrd.dimensioning_fault_mw);
    }
    if (j.contains("buses")) {
        if (!j["buses"].is_array()) fail("/buses", "expected an array");
        sc.buses.clear();
        std::size_t idx = 0;
        for (const auto& bj : j["buses"]) {
            std::string path = "/buses/" + std::to_string(idx++);
            check_keys(bj, {"id", "w_kin_gws", "hydro", "wind"}, path);
            if (!bj.contains("id") || !bj.contains("w_kin_gws")) fail(path, "missing 'id' or 'w_kin_gws'");
            gridsim::BusSpec b;
            b.id = str(bj, "id", path, "");
            b.w_kin_gws = num(bj, "w_kin_gws", path, 0.0);
            if (bj.contains("hydro")) b.hydro = parse_hydro(bj["hydro"], path + "/hydro");
            if (bj.contains("wind")) b.wind = parse_wind(bj["wind"], path + "/wind", base_dir);
            sc.buses.push_back(std::move(b));
        }
    }
    sc.validate();
    return sc;
}

json to_json(const gridsim::Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["f0_hz"] = sc.f0_hz;
    j["f_start_hz"] = sc.f_start_hz;
    j["load_damping_mw_per_hz"] = sc.load_damping_mw_hz;
    j["t_end_s"] = sc.t_end_s;
    j["dt_s"] = sc.dt_s;
    j["drive"] = drive_name(sc.drive);
    j["event_t_s"] = sc.event_t_s;
    j["event_dp_mw"] = sc.event_dp_mw;
    j["event_freq_step_hz"] = sc.event_freq_step_hz;
    j["event_ref_step_frac"] = sc.event_ref_step_frac;
    json t;
    if (sc.r_fcr_override) t["r_fcr_mw_per_hz"] = *sc.r_fcr_override;
    t["lead_s"] = sc.fcrd.lead_s;
    t["lag1_s"] = sc.fcrd.lag1_s;
    t["lag2_s"] = sc.fcrd.lag2_s;
    j["target"] = t;
    j["fcrd"] = {{"activation_50pct_s", sc.fcrd.activation_50pct_s},
                 {"full_activation_s", sc.fcrd.full_activation_s},
                 {"nadir_limit_hz", sc.fcrd.nadir_limit_hz},
                 {"band_high_hz", sc.fcrd.band_high_hz},
                 {"band_low_hz", sc.fcrd.band_low_hz},
                 {"dimensioning_fault_mw", sc.fcrd.dimensioning_fault_mw}};
    j["buses"] = json::array();
    for (const auto& b : sc.buses) {
        json bj;
        bj["id"] = b.id;
        bj["w_kin_gws"] = b.w_kin_gws;
        if (b.hydro) {
            bj["hydro"] = {{"rating_mw", b.hydro->params.rating_mw}, {"t_y_s", b.hydro->params.t_y},
                           {"t_w_s", b.hydro->params.t_w},           {"g0_pu", b.hydro->params.g0},
                           {"servo_rate_pu_s", b.hydro->params.servo_rate_pu_s},
                           {"fcr_share", b.hydro->fcr_share}};
        }
        if (b.wind) {
            json w = {{"p_nom_mw", b.wind->params.p_nom_mw * b.wind->params.scale},
                      {"v_m_s", b.wind->v_m_s},
                      {"k", b.wind->params.k},
                      {"c_opt", b.wind->params.c_opt},
                      {"x_floor", b.wind->params.x_floor},
                      {"ffr_share", b.wind->ffr_share}};
            if (!b.wind->trace_path.empty()) w["trace_file"] = b.wind->trace_path;
            bj["wind"] = w;
        }
        j["buses"].push_back(bj);
    }
    return j;
}

gridsim::Scenario load_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("scenario: cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw SchemaError("scenario: '" + path.string() + "': " + e.what());
    }
    return from_json(j, path.parent_path());
}

}  // namespace ffr::scenario_io
