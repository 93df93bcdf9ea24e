// qhe.cpp: Command-line front end: single-point evaluations, sweeps and p_h* traces

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qhe/sweep.hpp"

namespace fs = std::filesystem;
using namespace qhe;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string variant;
    std::optional<int> workers;
    std::optional<int> quad_n;
    std::optional<double> lambda_step;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "Output directory (stdout when omitted)");
    app->add_option("--variant", c.variant, "Liouvillian variant")
        ->check(CLI::IsMember({"as_printed", "fix_diagonal", "fix_gain"}));
    app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--quad-n", c.quad_n, "Initial quadrature nodes per period (>= 33)")->check(CLI::Range(33, 1 << 20));
    app->add_option("--lambda-step", c.lambda_step, "Counting-field stencil step")->check(CLI::PositiveNumber);
}

RunConfig configure(const Common& c)
{
    RunConfig cfg = c.config.empty() ? parse_config(nlohmann::json::object()) : load_config(c.config);
    CgfOptions& o = cfg.numerics.cumulants.cgf;
    if (!c.variant.empty()) {
        o.variant = parse_variant(c.variant);
        cfg.numerics.oracle.variant = o.variant;
    }
    if (c.workers) cfg.numerics.workers = *c.workers;
    if (c.quad_n) {
        o.quadrature.start_nodes = *c.quad_n;
        o.quadrature.max_nodes = std::max(o.quadrature.max_nodes, *c.quad_n);
    }
    if (c.lambda_step) cfg.numerics.cumulants.h = *c.lambda_step;
    return cfg;
}

void emit(const Table& table, const Common& c, const std::string& name)
{
    if (c.out.empty()) {
        write_csv(std::cout, table);
        return;
    }
    fs::create_directories(c.out);
    const fs::path path = fs::path(c.out) / name;
    write_csv_file(path.string(), table);
    std::cerr << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
}

void emit_manifest(const nlohmann::json& manifest, const Common& c, const std::string& csv_name)
{
    const std::string text = manifest.dump(2) + "\n";
    if (c.out.empty()) {
        std::cerr << text;
        return;
    }
    const fs::path path = fs::path(c.out) / (fs::path(csv_name).stem().string() + ".manifest.json");
    std::ofstream os(path);
    os << text;
    if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

// Runs `recipe` on the configuration's base point (sweep axes dropped),
// optionally with extra axes, and reports per-point errors as a failure.
int run_recipe(RunConfig cfg, Recipe recipe, std::vector<Axis> axes, const Common& c, const std::string& name,
               bool manifest)
{
    cfg.sweep.recipe = recipe;
    cfg.sweep.axes = std::move(axes);
    const auto t0 = std::chrono::steady_clock::now();
    SweepOutput out = run_sweep(cfg, cfg.numerics.workers);
    out.manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(out.table, c, name);
    if (manifest) emit_manifest(out.manifest, c, name);
    const int cerr = out.table.column("error");
    int failed = 0;
    for (const auto& row : out.table.rows) {
        if (!row[cerr].empty()) {
            std::cerr << "point " << row[0] << ": " << row[cerr] << "\n";
            ++failed;
        }
    }
    return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adiabatic full counting statistics of a temperature-driven four-level heat engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", QHE_VERSION_STRING);

    Common common;
    std::vector<double> lambdas;
    std::vector<double> etas;
    std::string input, quantity = "jd";

    auto* cgf_cmd = app.add_subcommand("cgf", "S_d(λ) and S_g(λ) at the configured point");
    add_common(cgf_cmd, common);
    cgf_cmd->add_option("--lambda", lambdas, "Counting-field values (default: numerics.lambdas)");

    auto* cum_cmd = app.add_subcommand("cumulants", "Dynamic and geometric flux and noise");
    add_common(cum_cmd, common);

    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate the configured recipe over its axes");
    add_common(sweep_cmd, common);

    auto* emp_cmd = app.add_subcommand("emp", "Efficiency at maximum power over Eb");
    add_common(emp_cmd, common);
    emp_cmd->add_option("--eta-c", etas, "Carnot efficiencies to sweep (Th0 = Tc0/(1 - etaC)); fit reported")->delimiter(',');

    auto* tur_cmd = app.add_subcommand("tur", "Work, power, efficiency, affinity and γ/η");
    add_common(tur_cmd, common);

    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare S_d + S_g with direct propagation");
    add_common(oracle_cmd, common);
    oracle_cmd->add_option("--lambda", lambdas, "Counting-field values (default: numerics.lambdas)");

    auto* opt_cmd = app.add_subcommand("optimum-trace", "p_h* per group from a flux-noise dataset");
    opt_cmd->add_option("--in", input, "Sweep CSV containing a ph column")->required()->check(CLI::ExistingFile);
    opt_cmd->add_option("--quantity", quantity, "Column to maximise (jd, j, nd, n, ...)");
    opt_cmd->add_option("--out", common.out, "Output directory (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt_cmd->parsed()) {
            const auto rows = optimum_trace(read_csv_file(input), quantity);
            // One table per envelope when the dataset spans several.
            std::map<std::string, std::vector<OptimumRow>> by_envelope;
            for (const auto& r : rows) {
                std::string env = "all";
                for (const auto& [k, v] : r.key) {
                    if (k == "envelope") env = v;
                }
                by_envelope[env].push_back(r);
            }
            for (const auto& [env, group] : by_envelope) {
                emit(optimum_table(group), common, "optimum_" + quantity + "_" + env + ".csv");
            }
            return 0;
        }

        const RunConfig cfg = configure(common);
        auto lambda_axes = [&] {
            std::vector<Axis> axes;
            if (!lambdas.empty()) axes.push_back({"lambda", lambdas, {}});
            return axes;
        };
        if (cgf_cmd->parsed()) return run_recipe(cfg, Recipe::Cgf, lambda_axes(), common, "cgf.csv", false);
        if (cum_cmd->parsed()) return run_recipe(cfg, Recipe::FluxNoise, {}, common, "cumulants.csv", false);
        if (tur_cmd->parsed()) return run_recipe(cfg, Recipe::Tur, {}, common, "tur.csv", false);
        if (oracle_cmd->parsed()) {
            return run_recipe(cfg, Recipe::OracleCheck, lambda_axes(), common, "oracle_check.csv", false);
        }
        if (emp_cmd->parsed()) {
            std::vector<Axis> axes;
            if (!etas.empty()) axes.push_back({"etaC", etas, {}});
            return run_recipe(cfg, Recipe::Emp, axes, common, "emp.csv", !etas.empty());
        }
        if (sweep_cmd->parsed()) {
            return run_recipe(cfg, cfg.sweep.recipe, cfg.sweep.axes, common, fs::path(cfg.sweep.output).filename(),
                              true);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
