#include "gplab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gplab {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
    if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
}

}  // namespace

ConfigEntries parse_config(const std::string& text)
{
    ConfigEntries out;
    std::stringstream ss(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(ss, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(number) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
        if (out.count(key))
            throw std::invalid_argument("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
        out[key] = {trim(t.substr(eq + 1)), number};
    }
    return out;
}

ConfigEntries read_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_setting(ExperimentPlan& plan, const std::string& key, const std::string& value)
{
    if (key == "dim") plan.dim = parse_number<int>(key, value);
    else if (key == "l_grid") plan.l_grid = parse_list<int>(key, value);
    else if (key == "schedule") {
        if (value == "theorem") plan.schedule.kind = CouplingSchedule::Kind::Theorem;
        else if (value == "explicit") plan.schedule.kind = CouplingSchedule::Kind::Explicit;
        else {
            plan.schedule.kind = CouplingSchedule::Kind::Explicit;
            plan.schedule.values = parse_list<double>(key, value);
        }
    }
    else if (key == "c") plan.schedule.c = parse_number<double>(key, value);
    else if (key == "couplings") {
        plan.schedule.kind = CouplingSchedule::Kind::Explicit;
        plan.schedule.values = parse_list<double>(key, value);
    }
    else if (key == "samples") plan.samples = parse_number<int>(key, value);
    else if (key == "seed") plan.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") plan.out = value;
    else if (key == "tol_eig") plan.tol_eig = parse_number<double>(key, value);
    else if (key == "tol_gp") plan.tol_gp = parse_number<double>(key, value);
    else if (key == "distribution") plan.disorder.kind = parse_distribution(value);
    else if (key == "v_max") plan.disorder.v_max = parse_number<double>(key, value);
    else if (key == "bernoulli_p") plan.disorder.bernoulli_p = parse_number<double>(key, value);
    else if (key == "potential_levels") plan.disorder.levels = parse_list<double>(key, value);
    else if (key == "experiment") plan.kind = parse_experiment(value);
    else if (key == "workers") plan.workers = parse_number<int>(key, value);
    else if (key == "lambda") plan.lambda = parse_number<double>(key, value);
    else if (key == "levels") plan.levels = parse_number<int>(key, value);
    else if (key == "widths") plan.widths = parse_list<double>(key, value);
    else if (key == "window") {
        const auto w = parse_list<double>(key, value);
        if (w.size() != 2) throw std::invalid_argument("config key 'window': expected lo,hi");
        plan.window_lo = w[0];
        plan.window_hi = w[1];
    }
    else if (key == "window_positions") plan.window_positions = parse_number<int>(key, value);
    else if (key == "box_sides") plan.box_sides = parse_list<int>(key, value);
    else if (key == "gap_etas") plan.gap_etas = parse_list<double>(key, value);
    else if (key == "eps_grid") plan.eps_grid = parse_list<double>(key, value);
    else if (key == "fields") plan.fields = parse_number<int>(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

void apply_config(ExperimentPlan& plan, const ConfigEntries& entries)
{
    for (const auto& [key, entry] : entries) {
        try {
            apply_setting(plan, key, entry.first);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(entry.second) + ": " + e.what());
        }
    }
}

ExperimentPlan default_plan(ExperimentKind kind)
{
    ExperimentPlan p;
    p.kind = kind;
    switch (kind) {
    case ExperimentKind::Condense:
        p.l_grid = {64, 128, 256, 512};
        p.samples = 200;
        break;
    case ExperimentKind::Scaling:
        p.l_grid = {64, 128, 256, 512, 1024};
        p.samples = 200;
        break;
    case ExperimentKind::Spectrum:
        p.l_grid = {64};
        p.samples = 100;
        break;
    case ExperimentKind::Estimates:
        p.l_grid = {32};
        p.samples = 10000;
        p.disorder.v_max = 4.0;
        break;
    case ExperimentKind::Shells:
        p.l_grid = {512};
        p.samples = 50;
        break;
    }
    return p;
}

}  // namespace gplab
