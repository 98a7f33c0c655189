#include "fme/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fme {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

}  // namespace

std::string format_sig(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_surface_csv(const Surface& f, const std::string& path) {
    const SurfaceGrid& g = f.grid();
    std::ofstream out = open_out(path);
    out << "s\\z";
    for (std::size_t j = 0; j < g.n_z; ++j) out << ',' << format_sig(g.z(j));
    out << '\n';
    for (std::size_t i = 0; i < g.n_s; ++i) {
        out << format_sig(g.s(i));
        for (std::size_t j = 0; j < g.n_z; ++j) out << ',' << format_sig(f.at(i, j));
        out << '\n';
    }
    nlohmann::json meta{{"h", g.h}, {"n_s", g.n_s}, {"n_z", g.n_z}};
    open_out(path + ".json") << meta.dump(2) << '\n';
}

Surface read_surface_csv(const std::string& path) {
    nlohmann::json meta;
    open_in(path + ".json") >> meta;
    SurfaceGrid g(meta.at("h").get<double>(), meta.at("n_s").get<std::size_t>(),
                  meta.at("n_z").get<std::size_t>());
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("surface csv: missing header: " + path);
    Surface f(g);
    for (std::size_t i = 0; i < g.n_s; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("surface csv: truncated: " + path);
        auto fields = split_csv(line);
        if (fields.size() != g.n_z + 1)
            throw std::runtime_error("surface csv: bad field count: " + path);
        for (std::size_t j = 0; j < g.n_z; ++j) f.at(i, j) = std::stod(fields[j + 1]);
    }
    f.check_finite();
    return f;
}

void write_discount_csv(const DiscountCurve& curve, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "t,r\n";
    for (std::size_t i = 0; i < curve.times().size(); ++i)
        out << format_sig(curve.times()[i]) << ',' << format_sig(curve.rates()[i]) << '\n';
}

DiscountCurve read_discount_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("discount csv: missing header: " + path);
    std::vector<double> times, rates;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 2) throw std::runtime_error("discount csv: bad field count: " + path);
        times.push_back(std::stod(fields[0]));
        rates.push_back(std::stod(fields[1]));
    }
    return DiscountCurve(std::move(times), std::move(rates));
}

}  // namespace fme
