#include "halfline/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace halfline {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path, std::string& header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    header = line;
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(line_no) + ": not a number: " + cell);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Mesh mesh_from_rows(const std::vector<std::vector<double>>& rows, const std::string& path) {
    if (rows.size() < 6) throw DataError(path + ": too few rows for a grid");
    for (const auto& r : rows)
        if (r.size() < 3) throw DataError(path + ": short row");
    std::size_t n_x = 1;
    while (n_x < rows.size() && rows[n_x][0] > rows[n_x - 1][0]) ++n_x;
    if (n_x < 3 || rows.size() % n_x != 0)
        throw DataError(path + ": rows do not form a rectangular grid");
    const std::size_t n_t = rows.size() / n_x;
    const double x_max = rows[n_x - 1][0];
    const double T = rows.back()[1];
    return Mesh(x_max, static_cast<int>(n_x), static_cast<int>(n_t), T);
}

}  // namespace

void write_grid_csv(const std::string& path, const GridFunction& g,
                    const GridFunction* derivative) {
    if (derivative) g.require_same_mesh(*derivative);
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw DataError("cannot write " + path);
    out << (derivative ? "x,t,u,du_dx\n" : "x,t,u\n");
    const Mesh& m = g.mesh();
    for (int j = 0; j < m.n_t; ++j)
        for (int i = 0; i < m.n_x; ++i) {
            out << fmt(m.x(i)) << ',' << fmt(m.t(j)) << ',' << fmt(g(j, i));
            if (derivative) out << ',' << fmt((*derivative)(j, i));
            out << '\n';
        }
}

std::pair<GridFunction, std::optional<GridFunction>> read_grid_csv(const std::string& path) {
    std::string header;
    const auto rows = read_csv_rows(path, header);
    const bool has_derivative = header.find("du_dx") != std::string::npos;
    const Mesh mesh = mesh_from_rows(rows, path);

    GridFunction g(mesh);
    std::optional<GridFunction> du;
    if (has_derivative) du.emplace(mesh);
    std::size_t r = 0;
    for (int j = 0; j < mesh.n_t; ++j)
        for (int i = 0; i < mesh.n_x; ++i, ++r) {
            if (rows[r].size() < (has_derivative ? 4u : 3u))
                throw DataError(path + ": short row");
            g.at(j, i) = rows[r][2];
            if (has_derivative) du->at(j, i) = rows[r][3];
        }
    return {std::move(g), std::move(du)};
}

void write_policy_csv(const std::string& path, const FeedbackPolicy& policy) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "x,t,alpha\n";
    const Mesh& m = policy.mesh();
    for (int j = 0; j < m.n_t; ++j)
        for (int i = 0; i < m.n_x; ++i)
            out << fmt(m.x(i)) << ',' << fmt(m.t(j)) << ',' << fmt(policy.at(j, i)) << '\n';
}

FeedbackPolicy read_policy_csv(const std::string& path, const ControlSet& controls) {
    std::string header;
    const auto rows = read_csv_rows(path, header);
    const Mesh mesh = mesh_from_rows(rows, path);
    std::vector<double> vals(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() < 3) throw DataError(path + ": short row");
        vals[r] = rows[r][2];
    }
    return FeedbackPolicy(mesh, std::move(vals), controls);
}

std::string diagnostics_json_line(const IterationRecord& rec) {
    nlohmann::json j{{"n", rec.n},
                     {"bielecki_diff", rec.bielecki_diff},
                     {"sup_diff", rec.sup_diff},
                     {"q_estimate", rec.q_estimate}};
    return j.dump();
}

void write_diagnostics_jsonl(const std::string& path, const IterationDiagnostics& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& rec : d.records) out << diagnostics_json_line(rec) << '\n';
}

std::string estimate_json(const McEstimate& e) {
    nlohmann::json j{{"mean", e.mean}, {"stderr", e.stderr_}, {"n_paths", e.n_paths}};
    return j.dump();
}

}  // namespace halfline
