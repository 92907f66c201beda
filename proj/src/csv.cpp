#include "qualidetect/csv.hpp"

#include "qualidetect/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qualidetect {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

}  // namespace

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Trajectory& traj) {
    std::string out = "t";
    for (const auto& name : traj.channel_names()) out += "," + name;
    out += '\n';
    const std::size_t nc = traj.channel_names().size();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_real(traj.times()[i]);
        for (std::size_t c = 0; c < nc; ++c) {
            out += ',';
            out += format_real(traj.channel(c)[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_csv(const Table& table) {
    std::string out;
    append_row(out, table.header);
    for (const auto& row : table.rows) append_row(out, row);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IOError("cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw IOError("failed writing '" + path + "'");
}

void emit_csv(const Trajectory& traj, const std::string& path) { write_text(path, to_csv(traj)); }
void emit_csv(const Table& table, const std::string& path) { write_text(path, to_csv(table)); }

Trajectory parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw AnalysisError("csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line);
    if (header.empty() || header.front() != "t") throw AnalysisError("csv: first column must be 't'");
    header.erase(header.begin());

    Trajectory traj(header);
    std::vector<double> values(header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size() + 1) {
            throw AnalysisError("csv line " + std::to_string(lineno) + ": wrong number of cells");
        }
        double t = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            errno = 0;
            char* end = nullptr;
            const double v = std::strtod(cells[i].c_str(), &end);
            if (cells[i].empty() || *end != '\0') {
                throw AnalysisError("csv line " + std::to_string(lineno) + ": non-numeric cell '" + cells[i] + "'");
            }
            if (i == 0) {
                t = v;
            } else {
                values[i - 1] = v;
            }
        }
        traj.append(t, values);
    }
    return traj;
}

Trajectory read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IOError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_trajectory_csv(ss.str());
}

}  // namespace qualidetect
