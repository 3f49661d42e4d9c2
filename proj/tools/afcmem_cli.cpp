// afcmem: scenario runner, Kramers-Kronig converter and designer.
//
// Exit codes: 0 ok, 1 invalid configuration or input, 2 physics precondition
// violated, 3 I/O failure.

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "afcmem/scenario.hpp"

namespace fs = std::filesystem;
using namespace afcmem;

namespace {

json load_json(const std::string& path) {
    const std::string text = io::read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": malformed JSON: " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string());
    }
    std::ofstream o(path, std::ios::binary | std::ios::trunc);
    if (o) o.write(content.data(), static_cast<std::streamsize>(content.size()));
    o.close();
    if (!o) {
        std::error_code ec;
        fs::remove(path, ec);
        throw IoError("cannot write " + path.string());
    }
}

int cmd_run(const std::string& config, std::string out) {
    const Scenario sc = parse_scenario(load_json(config));
    if (out.empty()) out = "out/" + sc.name;
    const Artifacts a = run_scenario(sc);
    write_artifacts(out, sc.name, sc.canonical, a);
    std::cout << "wrote " << a.files.size() + 1 << " files to " << out << "\n";
    for (const char* f : {"results.json", "design.json"})
        if (const std::string* r = a.find(f)) std::cout << *r;
    return 0;
}

int cmd_kk(const std::string& input, const std::string& out, double n_bg, double length, double wavelength,
           std::size_t count) {
    if (out.empty()) throw ConfigError("--out: output file is required");
    if (!(n_bg >= 1.0)) throw ConfigError("--n-bg: must be at least 1");
    if (!(length > 0.0)) throw ConfigError("--length: must be positive");
    const AbsorptionProfile profile = io::read_profile_csv(io::read_file(input), length, count);
    if (!(wavelength > 0.0))
        wavelength = profile.grid.center() > 1e13 ? kSpeedOfLight / profile.grid.center() : kDefaultWavelength;
    const IndexProfile index = kramers_kronig(profile, n_bg, wavelength);
    if (index.edge_leakage) std::cerr << "warning: absorption is non-negligible at the spectrum edges\n";
    write_text(out, io::index_csv(profile, index));
    return 0;
}

int cmd_design(const std::string& config, std::string out, bool verify) {
    const json j = load_json(config);
    const DesignConstraints c = parse_constraints(j);
    if (out.empty()) out = "out/design";
    const Artifacts a = run_design(c, verify);
    write_artifacts(out, "design", j.dump(), a);
    std::cout << *a.find("design.json");
    return 0;
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    for (const auto& cell : io::split(list)) {
        const std::string t = io::trim(cell);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size()) throw ConfigError("--values: cannot parse '" + t + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--values: no values given");
    return out;
}

int cmd_sweep(const std::string& config, const std::string& pointer, const std::string& values, std::string out) {
    const json base = load_json(config);
    json::json_pointer ptr;
    try {
        ptr = json::json_pointer(pointer);
    } catch (const json::exception&) {
        throw ConfigError("--param: '" + pointer + "' is not a JSON pointer such as /cavity/r1");
    }
    if (ptr.empty()) throw ConfigError("--param: must name a field");
    const std::string key = ptr.back();

    struct Job {
        std::string dir;
        Scenario scenario;
    };
    std::vector<Job> jobs;
    for (double v : parse_values(values)) {
        json j = base;
        j[ptr] = v;
        char label[64];
        std::snprintf(label, sizeof label, "%s=%.12g", key.c_str(), v);
        jobs.push_back({label, parse_scenario(j)});
    }
    if (out.empty()) out = "out/" + jobs.front().scenario.name + "_sweep";

    std::vector<std::future<Artifacts>> futures;
    for (const auto& job : jobs)
        futures.push_back(std::async(std::launch::async, [&job] { return run_scenario(job.scenario); }));
    std::vector<Artifacts> results;
    for (auto& f : futures) results.push_back(f.get());

    for (std::size_t i = 0; i < jobs.size(); ++i)
        write_artifacts(fs::path(out) / jobs[i].dir, jobs[i].scenario.name, jobs[i].scenario.canonical, results[i]);
    std::cout << "wrote " << jobs.size() << " runs to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-enhanced atomic frequency comb memory simulator"};
    app.require_subcommand(1);

    std::string config, out, input, param, values;
    double n_bg = kDefaultHostIndex, length = 2e-3, wavelength = 0.0;
    std::size_t count = 0;
    bool verify = false;

    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("config", config, "Scenario JSON")->required();
    run->add_option("--out", out, "Output directory (default out/<name>)");

    auto* kk = app.add_subcommand("kk", "Refractive index from a measured absorption CSV");
    kk->add_option("input", input, "CSV with frequency_hz,alpha_per_m")->required();
    kk->add_option("--out", out, "Output CSV")->required();
    kk->add_option("--n-bg", n_bg, "Host refractive index");
    kk->add_option("--length", length, "Medium length (m)");
    kk->add_option("--wavelength", wavelength, "Reference wavelength (m); default from the frequency column");
    kk->add_option("--count", count, "Resampled grid size (power of two)");

    auto* design = app.add_subcommand("design", "Optimise an impedance-matched AFC design");
    design->add_option("config", config, "Constraints JSON")->required();
    design->add_option("--out", out, "Output directory (default out/design)");
    design->add_flag("--verify", verify, "Re-run the best design through the storage simulation");

    auto* sweep = app.add_subcommand("sweep", "Run a scenario over values of one field");
    sweep->add_option("config", config, "Scenario JSON")->required();
    sweep->add_option("--param", param, "JSON pointer of the field, e.g. /cavity/r1")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(config, out);
        if (*kk) return cmd_kk(input, out, n_bg, length, wavelength, count);
        if (*design) return cmd_design(config, out, verify);
        if (*sweep) return cmd_sweep(config, param, values, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
