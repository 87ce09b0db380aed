#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gplab/disorder.hpp"
#include "gplab/lattice.hpp"

namespace gplab {

enum class ExperimentKind { Condense, Spectrum, Scaling, Estimates, Shells };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

/// U(L) = c L^{-d} [1 + (log L)^{d - 2/d}]^{-1} f_d(log L)^{-1} (log L)^{-1}.
double theorem_coupling(int L, int dim, double c);

/// eta(L) = sqrt(U(L) L^d [1 + (log L)^{d - 2/d}] f_d(log L)), evaluated at the
/// coupling actually used.
double condensation_eta(int L, int dim, double coupling);

struct CouplingSchedule {
    enum class Kind { Theorem, Explicit };
    Kind kind = Kind::Theorem;
    double c = 1.0;
    /// One value per L-grid entry, or a single value used for every L.
    std::vector<double> values;

    double at(int L, int dim, std::size_t l_index) const;
};

struct ExperimentPlan {
    ExperimentKind kind = ExperimentKind::Condense;
    int dim = 1;
    std::vector<int> l_grid;
    CouplingSchedule schedule;
    int samples = 1;
    std::optional<std::uint64_t> seed;
    double tol_eig = 1e-10;
    double tol_gp = 1e-9;
    DisorderSpec disorder;
    /// Output prefix; empty disables file output.
    std::string out;
    int workers = 1;
    /// Threshold lambda in |x_0 - x_1| <= lambda log L for "close" centers.
    double lambda = 8.0;
    /// Eigenpairs per sample for the spectrum experiment.
    int levels = 4;

    // estimates
    std::vector<double> widths{0.005, 0.01, 0.02, 0.04, 0.08};
    double window_lo = 0.0;
    double window_hi = 1.0;
    int window_positions = 50;
    std::vector<int> box_sides{4, 6, 8, 10};
    std::vector<double> gap_etas{0.125, 0.25, 0.5, 1.0, 2.0};

    // shells
    std::vector<double> eps_grid{0.5, 0.1, 0.02};
    int fields = 1000;

    /// Throws std::invalid_argument when the plan is inconsistent.
    void validate() const;
};

/// Everything recorded about one (L, sample) task. Fields that a given
/// experiment does not compute are NaN.
struct RunRecord {
    std::string experiment;
    Provenance provenance;
    int dim = 1;
    int L = 0;
    double coupling = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    double e_gp = 0.0;
    double overlap = 0.0;
    double gap = 0.0;
    double ground_l4_4 = 0.0;
    double flatness = 0.0;
    double eta = 0.0;
    bool certificate_valid = false;
    double certificate_margin = 0.0;
    double certificate_squared_margin = 0.0;
    Coord x0{0, 0, 0};
    Coord x1{0, 0, 0};
    int center_distance = 0;
    double decay_rate = 0.0;
    std::vector<double> eigenvalues;
    std::int64_t eig_iterations = 0;
    std::int64_t gp_iterations = 0;
    double gp_gradient = 0.0;
    double wall_time = 0.0;
    /// "ok" or "failed".
    std::string status = "ok";
    std::string failure;

    bool ok() const { return status == "ok"; }
    /// Field-wise equality ignoring wall time, with NaN equal to NaN.
    bool same_content(const RunRecord& other) const;
};

/// Sandwich E_0 <= E_GP <= E_0 + U ||phi_0||_4^4, flatness <= E_0 and, when
/// the certificate is valid, the projection bound; all with slack 1e-9.
std::vector<std::string> record_violations(const RunRecord& r);

inline constexpr double kInvariantSlack = 1e-9;

/// Runs one task; never throws for numerical failures (they are recorded).
RunRecord run_sample(const ExperimentPlan& plan, std::size_t l_index, std::uint32_t sample);

/// Distributes (L, sample) tasks over plan.workers threads. Results come back
/// in task order regardless of the worker count.
std::vector<RunRecord> run_records(const ExperimentPlan& plan);

/// Runs `task(i)` for i in [0, count) on `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

struct Quantiles {
    double q10 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q90 = 0.0, min = 0.0, max = 0.0;
};

/// Linear-interpolated quantiles; NaN entries are dropped.
Quantiles quantiles(std::vector<double> values);

struct LevelSummary {
    int L = 0;
    double coupling = 0.0;
    double eta = 0.0;
    int ok = 0;
    int failed = 0;
    Quantiles overlap;
    Quantiles gap;
    Quantiles e0;
    Quantiles flatness;
    /// Median of E_0 (log L)^{2/d}.
    double normalized_e0 = 0.0;
    /// Fraction of samples with overlap >= 1 - eta.
    double condensed_fraction = 0.0;
    /// Fraction with |x_0 - x_1| <= lambda log L.
    double close_fraction = 0.0;
    int certificate_valid = 0;
    int violations = 0;
};

struct EnsembleSummary {
    std::vector<LevelSummary> levels;
    bool median_overlap_nondecreasing = true;
    bool condensed_fraction_nondecreasing = true;
    /// min and max over the grid of the median E_0 (log L)^{2/d}.
    double normalized_e0_min = 0.0;
    double normalized_e0_max = 0.0;
    int total_violations = 0;
    int total_failed = 0;
};

EnsembleSummary summarize(const ExperimentPlan& plan, const std::vector<RunRecord>& records);

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares y = slope x + intercept.
Fit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct EstimatesSummary {
    int L = 0;
    int samples = 0;
    std::vector<double> widths;
    /// Mean eigenvalue count in windows of each width (Wegner).
    std::vector<double> mean_counts;
    /// Slope of the least-squares line through the origin and its largest
    /// relative deviation from the mean counts.
    double wegner_slope = 0.0;
    double wegner_max_deviation = 0.0;
    /// P[at least two eigenvalues in a window] (Minami) and its log-log slope.
    std::vector<double> minami_probability;
    double minami_slope = 0.0;
    /// P[E_0^N <= ell^{-2}] over disjoint Neumann cubes of side ell (Lifshitz).
    std::vector<int> box_sides;
    std::vector<double> lifshitz_probability;
    std::vector<long> lifshitz_boxes;
    bool lifshitz_nonincreasing = true;
    /// P[E_1 - E_0 <= eta L^{-d}] and its log-log slope.
    std::vector<double> gap_etas;
    std::vector<double> gap_probability;
    double gap_slope = 0.0;
    int failed = 0;
};

/// Wegner, Minami, Lifshitz and gap-law statistics, one block per L.
/// Spectra come from the dense oracle, so every instance must have at most
/// kDenseOracleLimit sites.
std::vector<EstimatesSummary> run_spectral_estimates(const ExperimentPlan& plan);

struct ShellLevel {
    int L = 0;
    double eps = 0.0;
    int fields = 0;
    Quantiles ratio;
    int sup_violations = 0;
    int energy_violations = 0;
    double delta_trial_ratio = 0.0;
    double flat_trial_ratio = 0.0;
};

struct ShellSummary {
    std::vector<ShellLevel> levels;
    /// max over eps of the corpus C divided by min over eps, per L.
    std::vector<double> constant_variation;
    /// Largest trial-family ratio: the calibrated constant.
    double trial_constant = 0.0;
    /// Ratios of ground states phi_0 at eps = field_scale(phi_0).
    Quantiles ground_state_ratio;
    int ground_states = 0;
    int failed = 0;
};

/// Four-norm and shell statistics over random low-energy fields (plan.fields
/// per (L, eps)), the two trial families and, when plan.samples > 0, the
/// ground states of sampled realizations.
ShellSummary run_shell_experiment(const ExperimentPlan& plan);

/// Writes `<prefix>_<name>.dat` files with whitespace-separated columns.
void write_series(const std::string& prefix, const EnsembleSummary& s);
void write_series(const std::string& prefix, const std::vector<EstimatesSummary>& s);
void write_series(const std::string& prefix, const ShellSummary& s);

}  // namespace gplab
