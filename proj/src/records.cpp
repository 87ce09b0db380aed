#include "gplab/records.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gplab {

namespace {

using nlohmann::json;

json number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double as_double(const json& j)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

json coords(const Coord& c, int dim) { return std::vector<int>(c.begin(), c.begin() + dim); }

Coord as_coord(const json& j)
{
    Coord c{0, 0, 0};
    const auto v = j.get<std::vector<int>>();
    if (v.size() > c.size()) throw std::invalid_argument("coordinate with too many entries");
    std::copy(v.begin(), v.end(), c.begin());
    return c;
}

}  // namespace

std::string to_json_line(const RunRecord& r)
{
    json eig = json::array();
    for (double v : r.eigenvalues) eig.push_back(number(v));
    json j = {
        {"experiment", r.experiment},
        {"master_seed", r.provenance.master_seed},
        {"l_index", r.provenance.l_index},
        {"sample_index", r.provenance.sample_index},
        {"dim", r.dim},
        {"L", r.L},
        {"U", number(r.coupling)},
        {"E0", number(r.e0)},
        {"E1", number(r.e1)},
        {"E_GP", number(r.e_gp)},
        {"overlap", number(r.overlap)},
        {"gap", number(r.gap)},
        {"phi0_l4_4", number(r.ground_l4_4)},
        {"flatness", number(r.flatness)},
        {"eta", number(r.eta)},
        {"certificate_valid", r.certificate_valid},
        {"certificate_margin", number(r.certificate_margin)},
        {"certificate_squared_margin", number(r.certificate_squared_margin)},
        {"x0", coords(r.x0, r.dim)},
        {"x1", coords(r.x1, r.dim)},
        {"center_distance", r.center_distance},
        {"decay_rate", number(r.decay_rate)},
        {"eigenvalues", eig},
        {"eig_iterations", r.eig_iterations},
        {"gp_iterations", r.gp_iterations},
        {"gp_gradient", number(r.gp_gradient)},
        {"wall_time", number(r.wall_time)},
        {"status", r.status},
        {"failure", r.failure},
    };
    return j.dump();
}

RunRecord from_json_line(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    try {
        RunRecord r;
        r.experiment = j.at("experiment").get<std::string>();
        r.provenance.master_seed = j.at("master_seed").get<std::uint64_t>();
        r.provenance.l_index = j.at("l_index").get<std::uint32_t>();
        r.provenance.sample_index = j.at("sample_index").get<std::uint32_t>();
        r.dim = j.at("dim").get<int>();
        r.L = j.at("L").get<int>();
        r.coupling = as_double(j.at("U"));
        r.e0 = as_double(j.at("E0"));
        r.e1 = as_double(j.at("E1"));
        r.e_gp = as_double(j.at("E_GP"));
        r.overlap = as_double(j.at("overlap"));
        r.gap = as_double(j.at("gap"));
        r.ground_l4_4 = as_double(j.at("phi0_l4_4"));
        r.flatness = as_double(j.at("flatness"));
        r.eta = as_double(j.at("eta"));
        r.certificate_valid = j.at("certificate_valid").get<bool>();
        r.certificate_margin = as_double(j.at("certificate_margin"));
        r.certificate_squared_margin = as_double(j.at("certificate_squared_margin"));
        r.x0 = as_coord(j.at("x0"));
        r.x1 = as_coord(j.at("x1"));
        r.center_distance = j.at("center_distance").get<int>();
        r.decay_rate = as_double(j.at("decay_rate"));
        for (const auto& v : j.at("eigenvalues")) r.eigenvalues.push_back(as_double(v));
        r.eig_iterations = j.at("eig_iterations").get<std::int64_t>();
        r.gp_iterations = j.at("gp_iterations").get<std::int64_t>();
        r.gp_gradient = as_double(j.at("gp_gradient"));
        r.wall_time = as_double(j.at("wall_time"));
        r.status = j.at("status").get<std::string>();
        r.failure = j.at("failure").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad record: ") + e.what());
    }
}

void write_records(const std::string& path, const std::vector<RunRecord>& records)
{
    std::ofstream f(path, std::ios::app);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& r : records) f << to_json_line(r) << '\n';
    if (!f) throw std::runtime_error("write to " + path + " failed");
}

ReadResult read_records(const std::string& path)
{
    ReadResult out;
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t number = 0;
    while (std::getline(f, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            out.records.push_back(from_json_line(line));
        } catch (const std::invalid_argument& e) {
            out.bad_lines.emplace_back(number, e.what());
        }
    }
    return out;
}

}  // namespace gplab
