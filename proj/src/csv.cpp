#include "ckam/csv.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ckam/util.hpp"

namespace ckam {

namespace {

void append_row(std::string& out, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const std::string& cell : cells) {
        if (!first) out += ',';
        out += cell;
        first = false;
    }
    out += '\n';
}

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

std::string csv_solution(const GridFunction& u, const ResidualReport& rep) {
    std::string out = "x,u,du_upwind,residual,kink_flag\n";
    for (int i = 0; i < u.grid.n_nodes; ++i) {
        const size_t k = static_cast<size_t>(i);
        append_row(out, {fmt(u.grid.node(i)), fmt(u[i]), fmt(rep.du_upwind[k]),
                         fmt(rep.r[i]), rep.kink[k] ? "1" : "0"});
    }
    return out;
}

std::string csv_measure(const DiscreteMeasure& mu) {
    std::string out = "x,v,mass\n";
    for (const DiscreteMeasure::Cell& cell : mu.cells)
        append_row(out, {fmt(mu.x_grid.node(cell.i)), fmt(mu.v_grid.node(cell.j)),
                         fmt(cell.mass)});
    return out;
}

std::string csv_trajectory(const Trajectory& traj) {
    std::string out = "t,x,p_or_v,u,H,multiplier\n";
    for (size_t k = 0; k < traj.samples.size(); ++k)
        append_row(out, {fmt(traj.dt * static_cast<double>(k)),
                         fmt(traj.samples[k].x), fmt(traj.samples[k].p_or_v),
                         fmt(traj.samples[k].u), fmt(traj.energy[k]),
                         fmt(traj.multiplier[k])});
    return out;
}

std::string csv_scan(const std::vector<CCurveSample>& samples) {
    std::string out =
        "theta,c,slope_left,slope_right,integral_duH,ordinal_nonempty,"
        "method_gap\n";
    for (const CCurveSample& s : samples)
        append_row(out, {fmt(s.theta), fmt(s.c), fmt(s.slope_left),
                         fmt(s.slope_right), fmt(s.integral_duH),
                         s.ordinal_nonempty ? "1" : "0", fmt(s.method_gap)});
    return out;
}

GridFunction read_solution_csv(const std::string& text,
                               const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    auto fail = [&](const std::string& what) -> void {
        throw config_error(source + ":" + std::to_string(line_no) + ": " + what);
    };

    if (!std::getline(in, line)) {
        line_no = 1;
        fail("empty file");
    }
    ++line_no;
    const std::vector<std::string> header = split_commas(line);
    if (header.size() < 2 || header[0] != "x" || header[1] != "u")
        fail("expected a header starting with 'x,u'");

    std::vector<double> xs, us;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_commas(line);
        if (cells.size() < 2) fail("expected at least two columns");
        double x = 0.0, u = 0.0;
        if (!parse_double(cells[0], x) || !parse_double(cells[1], u))
            fail("non-numeric x or u entry");
        xs.push_back(x);
        us.push_back(u);
    }
    line_no += 1;
    if (xs.size() < 16) fail("need at least 16 rows");
    if (xs.front() != 0.0) fail("the x column must start at 0");
    const double h = xs[1] - xs[0];
    if (!(h > 0.0)) fail("the x column must be ascending");
    for (size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - static_cast<double>(i) * h) > 1e-9 * xs.size())
            fail("the x column must be uniformly spaced");

    const TorusGrid1D grid =
        TorusGrid1D::make(h * static_cast<double>(xs.size()),
                          static_cast<int>(xs.size()));
    return GridFunction::make(grid, std::move(us));
}

GridFunction load_solution_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path + ":0: cannot open CSV file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return read_solution_csv(buffer.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error(path + ":0: cannot open file for writing");
    out << text;
    if (!out) throw config_error(path + ":0: write failed");
}

} // namespace ckam
