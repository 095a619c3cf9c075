#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ckam/builtin_examples.hpp"
#include "ckam/config.hpp"
#include "ckam/csv.hpp"
#include "ckam/hamiltonian.hpp"
#include "ckam/lax_oleinik.hpp"
#include "ckam/pipelines.hpp"
#include "ckam/util.hpp"

using namespace ckam;
namespace fs = std::filesystem;

namespace {

const double kPi = 3.14159265358979323846;

/// Fresh scratch directory under the system temp root.
std::string scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ckam_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// Drops the generated_at line, the one run-dependent byte sequence.
std::string without_timestamp(const std::string& report) {
    const size_t eol = report.find('\n');
    REQUIRE(eol != std::string::npos);
    REQUIRE(report.compare(0, 13, "generated_at=") == 0);
    return report.substr(eol + 1);
}

bool bits_equal(double a, double b) {
    std::uint64_t ua = 0, ub = 0;
    std::memcpy(&ua, &a, sizeof a);
    std::memcpy(&ub, &b, sizeof b);
    return ua == ub;
}

RunConfig parse(const std::string& text) { return parse_config(text, "test"); }

} // namespace

TEST_CASE("config: a minimal preset file yields the documented defaults") {
    const RunConfig cfg = parse("[hamiltonian]\npreset = pendulum_example\n");
    CHECK(cfg.preset == "pendulum_example");
    CHECK(cfg.period == doctest::Approx(1.0));
    CHECK(cfg.n_nodes == 512);
    CHECK(cfg.m_nodes == 65);
    CHECK(cfg.v_max == doctest::Approx(4.0));
    CHECK(cfg.dt == doctest::Approx(0.0));
    CHECK(cfg.dt_or_default() == doctest::Approx(16.0 * (1.0 / 512.0) / 4.0));
    CHECK(cfg.tol_fix == doctest::Approx(1e-8));
    CHECK(cfg.max_iter == 200000);
    CHECK(cfg.eps_ordinal == doctest::Approx(1e-3));
    CHECK(cfg.tol_closed == doctest::Approx(1e-8));
    CHECK(cfg.theta_min == doctest::Approx(-1.0));
    CHECK(cfg.theta_max == doctest::Approx(2.0));
    CHECK(cfg.n_samples == 31);
    CHECK(cfg.method == "both");

    const ContactHamiltonianSpec spec = cfg.make_spec();
    CHECK(eval_hamiltonian(spec, 0.0, 0.0, 3.0) == doctest::Approx(0.0));
    CHECK(eval_hamiltonian(spec, 0.5, 0.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("config: comments, blank lines, and spacing are tolerated") {
    const RunConfig cfg = parse("# leading comment\n\n"
                                "[hamiltonian]\n"
                                "  preset =  piecewise_example  # trailing\n"
                                "\n[grid]\n"
                                "n_nodes=128\n");
    CHECK(cfg.preset == "piecewise_example");
    CHECK(cfg.period == doctest::Approx(2.0)); // preset default
    CHECK(cfg.n_nodes == 128);
}

TEST_CASE("config: malformed inputs are rejected and blame their line") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        try {
            parse_config(text, "bad.ini");
            FAIL_CHECK("expected config_error for: " << text);
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    fails_with("[nope]\n", "bad.ini:1");
    fails_with("[hamiltonian]\npreset = pendulum_example\nbogus = 1\n",
               "bad.ini:3");
    fails_with("[grid]\nn_nodes = 64\nn_nodes = 32\n", "duplicate");
    fails_with("[grid]\nn_nodes = soup\n", "n_nodes");
    fails_with("[grid]\nn_nodes = -4\n", "at least 16");
    fails_with("[grid]\nm_nodes = 34\n", "odd");
    fails_with("preset = pendulum_example\n", "bad.ini:1");
    fails_with("[grid]\nnocolon\n", "bad.ini:2");
    fails_with("[solver]\ndt = 1e-6\n", "dt");
    fails_with("[scan]\ntheta_min = 2\ntheta_max = -1\n", "theta");
    fails_with("[scan]\nn_samples = 4\n", "n_samples");
    fails_with("[scan]\nmethod = banana\n", "method");
    fails_with("[hamiltonian]\npreset = harmonic\n", "preset");
}

TEST_CASE("config: preset periods are enforced, mechanical coefficients build "
          "the stated Hamiltonian") {
    CHECK_THROWS_AS(parse("[hamiltonian]\npreset = piecewise_example\n"
                          "[grid]\nperiod = 1\n"),
                    config_error);
    CHECK_THROWS_AS(parse("[hamiltonian]\npreset = pendulum_example\n"
                          "[grid]\nperiod = 2\n"),
                    config_error);
    // Coefficient keys belong to the mechanical preset only.
    CHECK_THROWS_AS(parse("[hamiltonian]\npreset = pendulum_example\n"
                          "potential_a0 = 1\n"),
                    config_error);

    const RunConfig cfg = parse("[hamiltonian]\n"
                                "preset = mechanical\n"
                                "potential_a0 = -1\n"
                                "potential_cos = 1 0.25\n"
                                "coupling_a0 = 2\n"
                                "coupling_sin = 0.5\n"
                                "u_shift = 0.25\n"
                                "[grid]\nperiod = 0.5\n");
    const ContactHamiltonianSpec spec = cfg.make_spec();
    CHECK(spec.period == doctest::Approx(0.5));
    // H(x,p,u) = p^2/2 + V(x) + alpha(x) (u - 1/4) with the configured series
    // sampled on the rescaled circle.
    const double x = 0.3, p = 0.7, u = 2.0;
    const double w = 2.0 * kPi * x / 0.5;
    const double V = -1.0 + std::cos(w) + 0.25 * std::cos(2.0 * w);
    const double alpha = 2.0 + 0.5 * std::sin(w);
    CHECK(eval_hamiltonian(spec, x, p, u) ==
          doctest::Approx(0.5 * p * p + V + alpha * (u - 0.25)).epsilon(1e-12));
}

TEST_CASE("solution CSV round-trips bit-exactly") {
    const TorusGrid1D grid = TorusGrid1D::make(1.0, 64);
    std::vector<double> values(64);
    for (int i = 0; i < 64; ++i)
        values[static_cast<size_t>(i)] =
            kPi * std::sin(2.0 * kPi * i / 64.0) + 1e-17 * i - 1.0 / 3.0;
    const GridFunction u = GridFunction::make(grid, values);
    const ResidualReport rep =
        residual(ContactHamiltonianSpec::pendulum_example(), u, 0.0);

    const std::string text = csv_solution(u, rep);
    const GridFunction back = read_solution_csv(text, "roundtrip");
    REQUIRE(back.grid.n_nodes == 64);
    CHECK(back.grid.period == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 64; ++i) CHECK(bits_equal(back[i], u[i]));
}

TEST_CASE("solution CSV reader rejects malformed input") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        try {
            read_solution_csv(text, "in.csv");
            FAIL_CHECK("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    fails_with("u,x\n0,0\n", "header");
    fails_with("x,u\n0,1\n0.5,1\n", "row"); // too few rows
    const TorusGrid1D grid = TorusGrid1D::make(1.0, 16);
    std::string nonuniform = "x,u\n";
    for (int i = 0; i < 16; ++i) {
        double x = grid.node(i);
        if (i == 7) x += 0.01;
        nonuniform += format_double(x) + ",1\n";
    }
    fails_with(nonuniform, "uniform");
    std::string soup = "x,u\n";
    for (int i = 0; i < 16; ++i)
        soup += format_double(grid.node(i)) + (i == 3 ? ",soup\n" : ",1\n");
    fails_with(soup, "in.csv:5");
}

TEST_CASE("two-branch construction reproduces its frozen values") {
    const SeparatrixBranch plus = integrate_separatrix(true);
    const SeparatrixBranch minus = integrate_separatrix(false);
    CHECK(plus.g_half == doctest::Approx(-0.678899441).epsilon(1e-6));
    CHECK(minus.g_half == doctest::Approx(0.600443579).epsilon(1e-6));
    CHECK(separatrix_tail_curvature() ==
          doctest::Approx(0.5 * (std::sqrt(1.0 + 4.0 * kPi * kPi) - 1.0))
              .epsilon(1e-6));

    const TorusGrid1D grid = TorusGrid1D::make(2.0, 1024);
    const GridFunction u1 = sample_two_branch_solution(grid, 1, plus);
    const GridFunction u2 = sample_two_branch_solution(grid, 2, minus);
    CHECK(u1[0] == doctest::Approx(-1.315519).epsilon(1e-5));
    CHECK(u2[0] == doctest::Approx(1.237063).epsilon(1e-5));
    CHECK(GridFunction::sup_distance(u1, u2) ==
          doctest::Approx(2.5526).epsilon(1e-3));

    CHECK_THROWS_AS(integrate_g_ode(1.0, 0.25, 0.0, 1e-4),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_g_ode(1.0, 0.75, 5.0, 1e-4), std::runtime_error);
}

TEST_CASE("pipelines write byte-identical artifacts across reruns") {
    const std::string dir_a = scratch_dir("det_a");
    const std::string dir_b = scratch_dir("det_b");
    PipelineContext ctx;
    ctx.out_dir = dir_a;
    run_example("fig1", ctx);
    ctx.out_dir = dir_b;
    run_example("fig1", ctx);

    const std::vector<std::string> files = {
        "family_lam_0.csv",   "family_lam_0.25.csv", "family_lam_0.5.csv",
        "family_lam_1.csv",   "measure.csv"};
    for (const std::string& f : files)
        CHECK(slurp(dir_a + "/" + f) == slurp(dir_b + "/" + f));
    CHECK(without_timestamp(slurp(dir_a + "/report.txt")) ==
          without_timestamp(slurp(dir_b + "/report.txt")));
}

TEST_CASE("the command-line binary honors the exit-code contract") {
    const char* bin = std::getenv("CONTACT_WEAKKAM_BIN");
    if (bin == nullptr || *bin == '\0') {
        MESSAGE("CONTACT_WEAKKAM_BIN not set; skipping binary checks");
        return;
    }
    const std::string dir = scratch_dir("bin");
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(bin) + " " + args +
                                " >" + dir + "/stdout.log 2>" + dir +
                                "/stderr.log";
        const int rc = std::system(cmd.c_str());
        REQUIRE(WIFEXITED(rc));
        return WEXITSTATUS(rc);
    };

    CHECK(run("--help") == 0);
    CHECK(run("example --name fig1 --out " + dir + "/fig1") == 0);
    CHECK(fs::exists(dir + "/fig1/report.txt"));
    CHECK(run("example --name fig9 --out " + dir + "/x") == 1);
    CHECK(run("solve --out " + dir + "/x") == 1);      // missing --c
    CHECK(run("solve --c 0 --frobnicate") == 1);       // unknown flag

    write_text_file(dir + "/bad.ini",
                    "[hamiltonian]\npreset = pendulum_example\nbogus = 1\n");
    CHECK(run("solve --c 0 --config " + dir + "/bad.ini --out " + dir + "/x") ==
          1);

    // A level below every workable constant: the run reports divergence but
    // exits cleanly.
    write_text_file(dir + "/quick.ini",
                    "[hamiltonian]\npreset = pendulum_example\n"
                    "[grid]\nn_nodes = 64\n"
                    "[solver]\nmax_iter = 2000\n");
    CHECK(run("solve --c -1 --config " + dir + "/quick.ini --out " + dir +
              "/div") == 0);
    const std::string report = slurp(dir + "/div/report.txt");
    CHECK(report.find("converged=0") != std::string::npos);

    // An ordered-integral hypothesis that holds while the pointwise
    // conclusion fails must exit 2.
    std::string u1 = "x,u\n", u2 = "x,u\n";
    for (int i = 0; i < 64; ++i) {
        const double x = i / 64.0;
        u1 += format_double(x) + (i == 32 ? ",1\n" : ",0\n");
        u2 += format_double(x) + ",0\n";
    }
    write_text_file(dir + "/u1.csv", u1);
    write_text_file(dir + "/u2.csv", u2);
    CHECK(run("compare --u1 " + dir + "/u1.csv --u2 " + dir +
              "/u2.csv --theta 0 --out " + dir + "/cmp") == 2);
    CHECK(run("compare --u1 " + dir + "/u2.csv --u2 " + dir +
              "/u1.csv --theta 0 --out " + dir + "/cmp2") == 0);
}
