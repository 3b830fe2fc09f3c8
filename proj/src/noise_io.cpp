#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ouselect/noise.hpp"

namespace ouselect {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw std::runtime_error("observations csv: bad number '" + s + "' on line " +
                                 std::to_string(line_no));
    }
    return v;
}

std::ofstream open_out(const std::string& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + file);
    }
    return out;
}

} // namespace

void write_path_csv(const std::string& file, const ObservationPath& obs) {
    auto out = open_out(file);
    out << "t,xi,y_increment\n";
    for (std::size_t i = 0; i < obs.times.size(); ++i) {
        const double xi = obs.noise ? obs.noise->xi[i] : NAN;
        out << fmt(obs.times[i]) << ',' << fmt(xi) << ',' << fmt(obs.y_increments[i]) << '\n';
    }
}

void write_jumps_csv(const std::string& file, const NoisePath& path) {
    auto out = open_out(file);
    out << "T_k,Y_k\n";
    for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
        out << fmt(path.jump_times[k]) << ',' << fmt(path.jump_marks[k]) << '\n';
    }
}

ObservationPath read_observations_csv(const std::string& file, int n) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot read " + file);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("observations csv: empty file");
    }
    const auto header = split(line);
    int t_col = -1;
    int y_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "t") {
            t_col = static_cast<int>(c);
        } else if (header[c] == "y_increment") {
            y_col = static_cast<int>(c);
        }
    }
    if (t_col < 0 || y_col < 0) {
        throw std::runtime_error("observations csv: header must contain t and y_increment");
    }
    ObservationPath obs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("observations csv: wrong field count on line " +
                                     std::to_string(line_no));
        }
        const double t = parse_number(fields[static_cast<std::size_t>(t_col)], line_no);
        const double dy = parse_number(fields[static_cast<std::size_t>(y_col)], line_no);
        if (!obs.times.empty() && !(t > obs.times.back())) {
            throw std::runtime_error("observations csv: times not increasing at line " +
                                     std::to_string(line_no));
        }
        if (obs.times.empty() && t < 0.0) {
            throw std::runtime_error("observations csv: negative time");
        }
        obs.times.push_back(t);
        obs.y_increments.push_back(dy);
    }
    if (obs.times.empty()) {
        throw std::runtime_error("observations csv: no data rows");
    }
    if (n <= 0) {
        const double step = obs.times.size() > 1
                                ? obs.times.back() - obs.times[obs.times.size() - 2]
                                : 1.0;
        n = static_cast<int>(std::lround(obs.times.back() + step));
    }
    if (n < 1 || obs.times.back() >= n) {
        throw std::runtime_error("observations csv: times exceed the horizon");
    }
    obs.n = n;
    obs.signal_name = "ingested";
    return obs;
}

} // namespace ouselect
