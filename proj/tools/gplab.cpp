// Command-line driver for the ensemble experiments.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "gplab/config.hpp"
#include "gplab/ensemble.hpp"
#include "gplab/records.hpp"

using namespace gplab;

namespace {

const std::vector<std::string> kSettingKeys = {
    "dim",      "l_grid",  "schedule",         "c",         "couplings",  "samples",     "out",
    "tol_eig",  "tol_gp",  "distribution",     "v_max",     "bernoulli_p", "potential_levels",
    "lambda",   "levels",  "widths",           "window",    "window_positions", "box_sides",
    "gap_etas", "eps_grid", "fields"};

struct Invocation {
    std::string config;
    std::uint64_t seed = 0;
    int workers = 1;
    std::map<std::string, std::string> settings;
};

void add_plan_options(CLI::App* cmd, Invocation& inv)
{
    cmd->add_option("--config", inv.config, "key=value plan file; flags override its entries");
    cmd->add_option("--seed", inv.seed, "master seed")->required();
    cmd->add_option("--workers", inv.workers, "worker threads")->check(CLI::PositiveNumber);
    for (const auto& key : kSettingKeys) {
        std::string dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        std::string names = "--" + key;
        if (dashed != key) names += ",--" + dashed;
        cmd->add_option_function<std::string>(
            names, [&inv, key](const std::string& v) { inv.settings[key] = v; }, "plan setting '" + key + "'");
    }
}

ExperimentPlan build_plan(ExperimentKind kind, const Invocation& inv)
{
    ExperimentPlan plan = default_plan(kind);
    if (!inv.config.empty()) {
        const auto entries = read_config(inv.config);
        apply_config(plan, entries);
        if (plan.kind != kind)
            throw std::invalid_argument("config file selects experiment '" + to_string(plan.kind) +
                                        "' but the subcommand is '" + to_string(kind) + "'");
    }
    for (const auto& [key, value] : inv.settings) apply_setting(plan, key, value);
    plan.seed = inv.seed;
    plan.workers = inv.workers;
    plan.validate();
    return plan;
}

std::string level_table(const EnsembleSummary& s, bool with_gp)
{
    std::string t;
    if (with_gp) {
        t += fmt::format("{:>6} {:>11} {:>7} {:>13} {:>13} {:>11} {:>10} {:>8} {:>5} {:>5}\n", "L", "U", "eta",
                         "median 1-ov", "q10 1-ov", "median gap", "condensed", "close", "fail", "viol");
        for (const auto& lv : s.levels)
            t += fmt::format("{:>6} {:>11.4e} {:>7.4f} {:>13.4e} {:>13.4e} {:>11.4e} {:>10.3f} {:>8.3f} {:>5} {:>5}\n",
                             lv.L, lv.coupling, lv.eta, 1.0 - lv.overlap.median, 1.0 - lv.overlap.q10,
                             lv.gap.median, lv.condensed_fraction, lv.close_fraction, lv.failed, lv.violations);
    }
    t += fmt::format("{:>6} {:>12} {:>12} {:>16} {:>14} {:>5}\n", "L", "median E0", "median gap",
                     "E0 (log L)^2/d", "median flat", "fail");
    for (const auto& lv : s.levels)
        t += fmt::format("{:>6} {:>12.5e} {:>12.5e} {:>16.5f} {:>14.5e} {:>5}\n", lv.L, lv.e0.median,
                         lv.gap.median, lv.normalized_e0, lv.flatness.median, lv.failed);
    return t;
}

std::string ensemble_report(const ExperimentPlan& plan, const EnsembleSummary& s)
{
    const bool with_gp = plan.kind != ExperimentKind::Spectrum;
    std::string t = level_table(s, with_gp);
    if (with_gp) {
        t += fmt::format("median overlap non-decreasing in L: {}\n", s.median_overlap_nondecreasing ? "yes" : "no");
        t += fmt::format("condensed fraction non-decreasing in L: {}\n",
                         s.condensed_fraction_nondecreasing ? "yes" : "no");
    }
    t += fmt::format("E0 (log L)^(2/d) band: [{:.5f}, {:.5f}], ratio {:.3f}\n", s.normalized_e0_min,
                     s.normalized_e0_max, s.normalized_e0_max / s.normalized_e0_min);
    t += fmt::format("failed samples: {}, records violating invariants: {}\n", s.total_failed, s.total_violations);
    return t;
}

std::string estimates_report(const std::vector<EstimatesSummary>& all)
{
    std::string t;
    for (const auto& e : all) {
        t += fmt::format("L = {} ({} samples, {} failed)\n", e.L, e.samples, e.failed);
        t += fmt::format("{:>10} {:>12} {:>12} {:>14}\n", "width", "mean count", "linear fit", "P[>=2]");
        for (std::size_t k = 0; k < e.widths.size(); ++k)
            t += fmt::format("{:>10.4g} {:>12.5f} {:>12.5f} {:>14.6e}\n", e.widths[k], e.mean_counts[k],
                             e.wegner_slope * e.widths[k], e.minami_probability[k]);
        t += fmt::format("Wegner slope {:.4f}, max relative deviation {:.4f}\n", e.wegner_slope,
                         e.wegner_max_deviation);
        t += fmt::format("Minami log-log slope {:.4f}\n", e.minami_slope);
        t += fmt::format("{:>6} {:>14} {:>10}\n", "ell", "P[E0N<=ell^-2]", "boxes");
        for (std::size_t j = 0; j < e.box_sides.size(); ++j)
            t += fmt::format("{:>6} {:>14.6e} {:>10}\n", e.box_sides[j], e.lifshitz_probability[j],
                             e.lifshitz_boxes[j]);
        t += fmt::format("Lifshitz curve non-increasing: {}\n", e.lifshitz_nonincreasing ? "yes" : "no");
        t += fmt::format("{:>8} {:>16}\n", "eta", "P[gap<=eta L^-d]");
        for (std::size_t j = 0; j < e.gap_etas.size(); ++j)
            t += fmt::format("{:>8.4g} {:>16.6e}\n", e.gap_etas[j], e.gap_probability[j]);
        t += fmt::format("gap law log-log slope {:.4f}\n", e.gap_slope);
    }
    return t;
}

std::string shells_report(const ShellSummary& s)
{
    std::string t = fmt::format("{:>6} {:>7} {:>7} {:>10} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10}\n", "L", "eps",
                                "fields", "median", "q90", "max", "sup-vio", "shell-vio", "delta", "flat");
    for (const auto& lv : s.levels)
        t += fmt::format("{:>6} {:>7.3g} {:>7} {:>10.4f} {:>10.4f} {:>10.4f} {:>8} {:>8} {:>10.4f} {:>10.4f}\n", lv.L,
                         lv.eps, lv.fields, lv.ratio.median, lv.ratio.q90, lv.ratio.max, lv.sup_violations,
                         lv.energy_violations, lv.delta_trial_ratio, lv.flat_trial_ratio);
    for (std::size_t i = 0; i < s.constant_variation.size(); ++i)
        t += fmt::format("variation of the empirical constant across eps (grid entry {}): {:.3f}\n", i,
                         s.constant_variation[i]);
    t += fmt::format("trial-family constant {:.4f}\n", s.trial_constant);
    if (s.ground_states > 0)
        t += fmt::format("ground states: {} fields, ratio median {:.4f}, max {:.4f} ({:.3f} x trial constant)\n",
                         s.ground_states, s.ground_state_ratio.median, s.ground_state_ratio.max,
                         s.ground_state_ratio.max / s.trial_constant);
    if (s.failed > 0) t += fmt::format("failed ground-state samples: {}\n", s.failed);
    return t;
}

void emit(const ExperimentPlan& plan, const std::string& report)
{
    std::fputs(report.c_str(), stdout);
    if (plan.out.empty()) return;
    std::ofstream f(plan.out + "_summary.txt");
    f << report;
}

int run(ExperimentKind kind, const Invocation& inv)
{
    const ExperimentPlan plan = build_plan(kind, inv);
    const auto start = std::chrono::steady_clock::now();
    int status = 0;

    if (kind == ExperimentKind::Estimates) {
        const auto s = run_spectral_estimates(plan);
        emit(plan, estimates_report(s));
        if (!plan.out.empty()) write_series(plan.out, s);
        for (const auto& e : s)
            if (e.failed > 0) status = 3;
    } else if (kind == ExperimentKind::Shells) {
        const auto s = run_shell_experiment(plan);
        emit(plan, shells_report(s));
        if (!plan.out.empty()) write_series(plan.out, s);
        for (const auto& lv : s.levels)
            if (lv.sup_violations > 0 || lv.energy_violations > 0) status = 1;
        if (status == 0 && s.failed > 0) status = 3;
    } else {
        const auto records = run_records(plan);
        if (!plan.out.empty()) write_records(plan.out + ".jsonl", records);
        for (const auto& r : records) {
            if (!r.ok())
                fmt::print(stderr, "L={} sample={}: failed: {}\n", r.L, r.provenance.sample_index, r.failure);
            for (const auto& v : record_violations(r))
                fmt::print(stderr, "L={} sample={}: invariant violated: {}\n", r.L, r.provenance.sample_index, v);
        }
        const auto s = summarize(plan, records);
        emit(plan, ensemble_report(plan, s));
        if (!plan.out.empty()) write_series(plan.out, s);
        if (s.total_violations > 0) status = 1;
        else if (s.total_failed > 0) status = 3;
    }
    fmt::print("wall time {:.1f} s\n",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return status;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Disordered lattice Gross-Pitaevskii laboratory"};
    app.require_subcommand(1);

    const std::vector<std::pair<ExperimentKind, std::string>> commands = {
        {ExperimentKind::Condense, "GP minimizer overlap with the linear ground state across an L grid"},
        {ExperimentKind::Scaling, "ground-energy scaling E0 (log L)^(2/d) and flatness"},
        {ExperimentKind::Estimates, "Wegner, Minami, Lifshitz and gap-law statistics"},
        {ExperimentKind::Shells, "four-norm bound and frequency-shell statistics"},
        {ExperimentKind::Spectrum, "lowest eigenvalues and localization centers per sample"},
    };
    std::map<std::string, Invocation> invocations;
    std::map<std::string, ExperimentKind> kinds;
    for (const auto& [kind, help] : commands) {
        const std::string name = to_string(kind);
        auto* cmd = app.add_subcommand(name, help);
        add_plan_options(cmd, invocations[name]);
        kinds[name] = kind;
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run(kinds.at(name), invocations.at(name));
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
}
