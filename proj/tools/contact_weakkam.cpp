#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ckam/config.hpp"
#include "ckam/pipelines.hpp"
#include "ckam/util.hpp"

/// Command-line front end.  Exit codes: 0 = run completed (including runs
/// that merely report divergence or blow-up), 1 = configuration or usage
/// error, 2 = a verified mathematical claim failed.
int main(int argc, char** argv) {
    CLI::App app{"weak KAM toolkit for contact Hamilton-Jacobi equations "
                 "H(x, u', u) = c on the circle"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    ckam::PipelineContext ctx;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--out", ctx.out_dir, "output directory")
        ->capture_default_str();
    app.add_option("--seed", ctx.seed,
                   "reserved for randomized workflows; recorded in report.txt")
        ->capture_default_str();

    double solve_c = 0.0;
    std::string solve_init = "const:0";
    CLI::App* solve = app.add_subcommand(
        "solve", "fixed-point solve of the discrete contact operator at a "
                 "given level c");
    solve->add_option("--c", solve_c, "right-hand-side level c")->required();
    solve->add_option("--init", solve_init,
                      "initial datum, const:K or file:PATH")
        ->capture_default_str();

    CLI::App* scan = app.add_subcommand(
        "scan-c", "sample the critical-value curve over the configured "
                  "frozen-multiplier range and grade its structure");

    double mather_theta = 0.0;
    int mather_count = 1;
    CLI::App* mather = app.add_subcommand(
        "mather", "minimizing closed measures at a frozen multiplier value");
    mather->add_option("--theta", mather_theta, "frozen multiplier value")
        ->required();
    mather->add_option("--enumerate", mather_count,
                       "vertex budget; 1 solves a single linear program")
        ->capture_default_str();

    std::string cmp_u1, cmp_u2;
    double cmp_theta = 0.0;
    CLI::App* compare = app.add_subcommand(
        "compare", "order two stored solutions through the minimizing "
                   "measures of a frozen multiplier value");
    compare->add_option("--u1", cmp_u1, "first solution CSV")->required();
    compare->add_option("--u2", cmp_u2, "second solution CSV")->required();
    compare->add_option("--theta", cmp_theta, "frozen multiplier value")
        ->required();

    std::string flow_start;
    double flow_T = 0.0, flow_c = 0.0, flow_dt = 1e-3;
    CLI::App* flow = app.add_subcommand(
        "flow", "integrate the contact characteristic system");
    flow->add_option("--start", flow_start, "initial point as x,p,u")
        ->required();
    flow->add_option("--time", flow_T, "integration time")->required();
    flow->add_option("--c", flow_c, "energy level entering u' = pH_p - H - c")
        ->capture_default_str();
    flow->add_option("--dt", flow_dt, "integrator step")
        ->capture_default_str();

    std::string example_name;
    CLI::App* example = app.add_subcommand(
        "example", "regenerate a built-in worked example with its "
                   "verification gates");
    example->add_option("--name", example_name, "fig1 or fig2")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        ckam::RunConfig cfg;
        if (!config_path.empty()) cfg = ckam::load_config_file(config_path);

        if (solve->parsed())
            ckam::run_solve(cfg, solve_c, solve_init, ctx);
        else if (scan->parsed())
            ckam::run_scan_c(cfg, ctx);
        else if (mather->parsed())
            ckam::run_mather(cfg, mather_theta, mather_count, ctx);
        else if (compare->parsed())
            ckam::run_compare(cfg, cmp_u1, cmp_u2, cmp_theta, ctx);
        else if (flow->parsed())
            ckam::run_flow(cfg, flow_start, flow_T, flow_c, flow_dt, ctx);
        else if (example->parsed())
            ckam::run_example(example_name, ctx);
    } catch (const ckam::verification_error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 2;
    } catch (const ckam::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
