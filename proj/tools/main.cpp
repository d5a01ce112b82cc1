#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "ffr/fcrd.hpp"
#include "ffr/gridsim.hpp"
#include "ffr/presets.hpp"
#include "ffr/scenario_io.hpp"
#include "ffr/turbine.hpp"

namespace fs = std::filesystem;
using namespace ffr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

struct ScenarioArgs {
    std::string preset;
    std::string file;
    double dt = 0.0;
    double t_end = 0.0;

    gridsim::Scenario load() const {
        if (!preset.empty() && !file.empty())
            throw scenario_io::SchemaError("give either --preset or --scenario, not both");
        gridsim::Scenario sc;
        if (!preset.empty()) {
            sc = presets::get(preset);
        } else if (!file.empty()) {
            sc = scenario_io::load_file(file);
        } else {
            throw scenario_io::SchemaError("one of --preset or --scenario is required");
        }
        if (dt > 0.0) sc.dt_s = dt;
        if (t_end > 0.0) sc.t_end_s = t_end;
        sc.validate();
        return sc;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "named experiment preset");
        cmd->add_option("--scenario", file, "scenario JSON file");
        cmd->add_option("--dt", dt, "integration step override [s]");
        cmd->add_option("--t-end", t_end, "horizon override [s]");
    }
};

matching::ParticipationSet controllers_for(const gridsim::Scenario& sc) {
    if (sc.drive == gridsim::DriveMode::reference_step) return {};
    return gridsim::synthesize_for(sc);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
}

std::string coeff_list(const std::vector<double>& c) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < c.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", c[i]);
        os << (i ? ", " : "") << buf;
    }
    os << "]";
    return os.str();
}

std::string controllers_report(const gridsim::Scenario& sc, const matching::ParticipationSet& set,
                               const matching::MatchingReport& rep) {
    auto acts = gridsim::actuators_for(sc);
    std::ostringstream os;
    os << "scenario=" << sc.name << "\n";
    os << "target: " << lti::to_string(set.target) << "\n";
    os << "normalized=" << (set.normalized ? "true" : "false") << "\n";
    if (!set.diagnostic.empty()) os << "diagnostic=" << set.diagnostic << "\n";
    for (const auto& w : set.warnings) os << "warning=" << w << "\n";
    os << "residual_inf_norm=" << rep.residual_inf_norm << "\n";
    os << "internal_stability=" << (rep.internal_stability ? "true" : "false") << "\n";
    for (const auto& issue : rep.issues) os << "issue=" << issue << "\n";
    for (std::size_t i = 0; i < acts.size(); ++i) {
        os << "\n[" << acts[i].id << "]\n";
        os << "plant: " << lti::to_string(acts[i].plant) << "\n";
        os << "factor: " << lti::to_string(set.factors[i]) << "\n";
        os << "controller: " << lti::to_string(set.controllers[i]) << "\n";
        os << "controller_num_desc: " << coeff_list(lti::numerator(set.controllers[i])) << "\n";
        os << "controller_den_desc: " << coeff_list(lti::denominator(set.controllers[i])) << "\n";
    }
    return os.str();
}

int cmd_simulate(const ScenarioArgs& args, const std::string& out_dir, bool linear) {
    gridsim::Scenario sc = args.load();
    auto ctrl = controllers_for(sc);
    TimeSeries ts = linear ? gridsim::simulate_linear(sc, ctrl) : gridsim::simulate(sc, ctrl);

    fs::path dir(out_dir);
    fs::create_directories(dir);
    std::ostringstream csv;
    write_csv(csv, ts);
    write_text(dir / (sc.name + ".csv"), csv.str());

    fcrd::Verdict v = gridsim::check(sc, ts);
    std::string verdict = fcrd::to_text(v);
    write_text(dir / (sc.name + ".verdict.txt"), verdict);
    std::cout << "wrote " << (dir / (sc.name + ".csv")).string() << "\n" << verdict;
    return v.overall == fcrd::VerdictState::fail ? kExitVerdictFail : kExitOk;
}

int cmd_synthesize(const ScenarioArgs& args, const std::string& out_dir) {
    gridsim::Scenario sc = args.load();
    if (sc.drive == gridsim::DriveMode::reference_step)
        throw scenario_io::SchemaError("reference_step scenarios have no controllers to synthesize");
    auto set = gridsim::synthesize_for(sc);
    auto rep = matching::verify_matching(set, gridsim::actuators_for(sc));
    std::string report = controllers_report(sc, set, rep);
    fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text(dir / (sc.name + ".controllers.txt"), report);
    std::cout << report;
    return kExitOk;
}

int cmd_linearize(double v, double k, std::optional<double> x0) {
    turbine::TurbineParams p;
    p.k = k;
    auto lin = turbine::linearize(v, p);
    auto m = turbine::mpp(v, p);
    std::cout << "v_m_s=" << v << "\n";
    std::cout << "k=" << k << "\n";
    std::cout << "omega_mpp_rad_s=" << m.omega_mpp_rad_s << "\n";
    std::cout << "p_mpp_mw=" << m.p_mpp_mw << "\n";
    std::cout << "zero_bound_rad_s=" << lin.zero_bound_rad_s << "\n";
    std::cout << "pole_floor_rad_s=" << lin.pole_floor_rad_s << "\n";
    std::cout << "speed_constant=" << lin.speed_constant << "\n";
    std::cout << "h_wind: " << lti::to_string(lin.h_dimensional) << "\n";
    if (x0) {
        auto pz = turbine::linearize_at(v, *x0, p);
        std::cout << "x0=" << *x0 << "\n";
        std::cout << "zero_at_x0_rad_s=" << pz.zero_rad_s << "\n";
        std::cout << "pole_at_x0_rad_s=" << pz.pole_rad_s << "\n";
    }
    return kExitOk;
}

int cmd_verify(const ScenarioArgs& args, const std::string& csv_path) {
    gridsim::Scenario sc = args.load();
    std::ifstream f(csv_path);
    if (!f) throw scenario_io::SchemaError("cannot open '" + csv_path + "'");
    TimeSeries ts = read_csv(f);
    fcrd::Verdict v = gridsim::check(sc, ts);
    std::cout << fcrd::to_text(v);
    return v.overall == fcrd::VerdictState::fail ? kExitVerdictFail : kExitOk;
}

int cmd_sweep(const ScenarioArgs& args, const std::string& out_dir, const std::string& pointer,
              double from, double to, int steps, int jobs) {
    if (steps < 2) throw scenario_io::SchemaError("sweep needs --steps >= 2");
    gridsim::Scenario base = args.load();
    nlohmann::json base_json = scenario_io::to_json(base);
    nlohmann::json::json_pointer ptr;
    try {
        ptr = nlohmann::json::json_pointer(pointer);
    } catch (const nlohmann::json::exception& e) {
        throw scenario_io::SchemaError(std::string("bad --param pointer: ") + e.what());
    }
    if (!base_json.contains(ptr))
        throw scenario_io::SchemaError("sweep parameter '" + pointer + "' not present in the scenario");

    struct Row {
        double value = 0.0;
        fcrd::Verdict verdict;
    };
    auto run_one = [&](double value) {
        nlohmann::json j = base_json;
        j[ptr] = value;
        gridsim::Scenario sc = scenario_io::from_json(j);
        auto ts = gridsim::simulate(sc, controllers_for(sc));
        return Row{value, gridsim::check(sc, ts)};
    };

    std::vector<double> values(steps);
    for (int i = 0; i < steps; ++i) values[i] = from + (to - from) * double(i) / double(steps - 1);

    // fan out to a bounded pool; results keep parameter order
    if (jobs < 1) jobs = 1;
    std::vector<Row> rows(steps);
    for (int begin = 0; begin < steps; begin += jobs) {
        int end = std::min(begin + jobs, steps);
        std::vector<std::future<Row>> batch;
        for (int i = begin; i < end; ++i)
            batch.push_back(std::async(std::launch::async, run_one, values[i]));
        for (int i = begin; i < end; ++i) rows[i] = batch[i - begin].get();
    }

    std::ostringstream os;
    os << "value,nadir_hz,nadir_dev_hz,steady_state_hz,activation_50_s,activation_95_s,overall\n";
    for (const auto& r : rows) {
        const char* overall = r.verdict.overall == fcrd::VerdictState::pass ? "pass"
                              : r.verdict.overall == fcrd::VerdictState::fail ? "fail"
                                                                              : "inconclusive";
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%s\n", r.value,
                      r.verdict.nadir_hz, r.verdict.nadir_dev_hz, r.verdict.steady_state_hz,
                      r.verdict.activation_50_s, r.verdict.activation_95_s, overall);
        os << buf;
    }
    fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text(dir / (base.name + ".sweep.csv"), os.str());
    std::cout << os.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-reserve simulation and controller-synthesis toolkit"};
    app.require_subcommand(1);

    ScenarioArgs sim_args, syn_args, ver_args, sweep_args;
    std::string out_dir = ".";
    bool linear = false;
    unsigned seed = 0;  // reserved; runs are deterministic

    auto* sim = app.add_subcommand("simulate", "run a scenario and write CSV + verdict");
    sim_args.attach(sim);
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--linear", linear, "use the linearized actuator models");
    sim->add_option("--seed", seed, "reserved (simulations are deterministic)");

    auto* syn = app.add_subcommand("synthesize", "write controller factored forms and residual");
    syn_args.attach(syn);
    std::string syn_out = ".";
    syn->add_option("--out", syn_out, "output directory");

    auto* lin = app.add_subcommand("linearize", "print turbine operating-point rows");
    double lin_v = 8.0, lin_k = 0.72;
    std::optional<double> lin_x0;
    lin->add_option("--v", lin_v, "wind speed [m/s]")->required();
    lin->add_option("--k", lin_k, "stabilizing feedback gain");
    double x0_val = 0.0;
    auto* x0_opt = lin->add_option("--x0", x0_val, "explicit operating point");

    auto* ver = app.add_subcommand("verify-fcrd", "re-check an existing CSV against the requirements");
    ver_args.attach(ver);
    std::string csv_path;
    ver->add_option("--csv", csv_path, "simulation CSV")->required();

    auto* swp = app.add_subcommand("sweep", "vary one scalar over a range");
    sweep_args.attach(swp);
    std::string sweep_out = ".", sweep_param;
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_steps = 0, sweep_jobs = 4;
    swp->add_option("--param", sweep_param, "JSON pointer, e.g. /event_dp_mw")->required();
    swp->add_option("--from", sweep_from, "first value")->required();
    swp->add_option("--to", sweep_to, "last value")->required();
    swp->add_option("--steps", sweep_steps, "number of points")->required();
    swp->add_option("--jobs", sweep_jobs, "worker pool size");
    swp->add_option("--out", sweep_out, "output directory");

    auto* lst = app.add_subcommand("presets", "list shipped experiment presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_args, out_dir, linear);
        if (syn->parsed()) return cmd_synthesize(syn_args, syn_out);
        if (lin->parsed()) {
            if (x0_opt->count()) lin_x0 = x0_val;
            return cmd_linearize(lin_v, lin_k, lin_x0);
        }
        if (ver->parsed()) return cmd_verify(ver_args, csv_path);
        if (swp->parsed())
            return cmd_sweep(sweep_args, sweep_out, sweep_param, sweep_from, sweep_to, sweep_steps,
                             sweep_jobs);
        if (lst->parsed()) {
            for (const auto& n : presets::names()) std::cout << n << "\n";
            return kExitOk;
        }
    } catch (const scenario_io::SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::out_of_range& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitInputError;
}
