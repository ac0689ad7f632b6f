#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellsim/config.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bellsim::SimError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> split_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            double v = std::stod(item, &pos);
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) {
                ++pos;
            }
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw bellsim::SimError("bad numeric list element '" + item + "'");
        }
    }
    if (out.empty()) throw bellsim::SimError("empty numeric list");
    return out;
}

bellsim::RunConfig load_config(const std::string& path, bool seed_set, std::uint64_t seed,
                               const std::string& out_dir) {
    bellsim::RunConfig cfg = bellsim::parse_config(slurp(path));
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cfg;
}

void print_outputs(const bellsim::RunOutputs& outputs) {
    for (const auto& f : outputs.files) std::cout << f.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-by-event simulator of EPRB photon and neutron"
                 " interferometry experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        if (with_seed) {
            sub->add_option("--seed", seed, "seed override")
                ->each([&](const std::string&) { seed_set = true; });
        }
    };

    CLI::App* cmd_run = app.add_subcommand("run", "execute the configured experiment");
    add_common(cmd_run, true);

    std::string sweep_param;
    std::string sweep_values;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "repeat a run over one parameter");
    add_common(cmd_sweep, true);
    cmd_sweep->add_option("--param", sweep_param, "phi, W, eta, gamma, alpha or chi")
        ->required();
    cmd_sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    CLI::App* cmd_oracle = app.add_subcommand("oracle", "write closed-form reference tables");
    add_common(cmd_oracle, false);

    std::string station1, station2, analyze_name = "relog";
    std::string W_text = "1";
    double tau = 1.0;
    std::string analyze_out = ".";
    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "re-run coincidence analysis on stored event logs");
    cmd_analyze->add_option("--station1", station1, "station 1 event log")->required();
    cmd_analyze->add_option("--station2", station2, "station 2 event log")->required();
    cmd_analyze->add_option("--tau", tau, "time-tag resolution");
    cmd_analyze->add_option("--W", W_text, "comma-separated window widths");
    cmd_analyze->add_option("--out", analyze_out, "output directory");
    cmd_analyze->add_option("--name", analyze_name, "output file prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            print_outputs(bellsim::run(load_config(config_path, seed_set, seed, out_dir)));
        } else if (cmd_sweep->parsed()) {
            print_outputs(bellsim::sweep(load_config(config_path, seed_set, seed, out_dir),
                                         sweep_param, split_doubles(sweep_values)));
        } else if (cmd_oracle->parsed()) {
            print_outputs(
                bellsim::oracle_report(load_config(config_path, false, 0, out_dir)));
        } else if (cmd_analyze->parsed()) {
            if (const char* env = std::getenv("BELLSIM_OUT"); env && *env) analyze_out = env;
            print_outputs(bellsim::analyze_logs(station1, station2, tau,
                                                split_doubles(W_text), analyze_out,
                                                analyze_name));
        }
    } catch (const bellsim::SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
