#include "gplab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "gplab/analysis.hpp"
#include "gplab/gp.hpp"
#include "gplab/spectral.hpp"

namespace gplab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_bracket(int L, int dim)
{
    return 1.0 + std::pow(std::log(static_cast<double>(L)), dim - 2.0 / dim);
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

Index sites_of(int dim, int L) { return static_cast<Index>(std::pow(2 * L + 1, dim)); }

RunRecord failed_record(RunRecord r, const std::string& cause)
{
    r.status = "failed";
    r.failure = cause;
    return r;
}

RunRecord sample_task(const ExperimentPlan& plan, const std::shared_ptr<const LatticeGeometry>& geom,
                      std::size_t l_index, std::uint32_t sample)
{
    const auto start = std::chrono::steady_clock::now();
    const int L = plan.l_grid[l_index];
    RunRecord r;
    r.experiment = to_string(plan.kind);
    r.provenance = {*plan.seed, static_cast<std::uint32_t>(l_index), sample};
    r.dim = plan.dim;
    r.L = L;
    const bool with_gp = plan.kind != ExperimentKind::Spectrum;
    r.coupling = with_gp ? plan.schedule.at(L, plan.dim, l_index) : kNaN;
    r.eta = with_gp ? condensation_eta(L, plan.dim, r.coupling) : kNaN;
    r.e_gp = r.overlap = r.certificate_margin = r.certificate_squared_margin = r.gp_gradient = kNaN;

    auto finish = [&](RunRecord rec) {
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return rec;
    };

    try {
        DisorderSpec spec = plan.disorder;
        spec.seed = *plan.seed;
        const auto realization = sample_potential(spec, geom, static_cast<std::uint32_t>(l_index), sample);
        const HamiltonianOperator h = periodic_hamiltonian(realization);

        LanczosOptions lopts;
        lopts.tol = plan.tol_eig;
        const Index k = plan.kind == ExperimentKind::Spectrum ? std::max(2, plan.levels) : 2;
        const EigenSolution eig = lowest_eigenpairs(h, std::min<Index>(k, h.size()), lopts);
        r.eig_iterations = eig.iterations;
        r.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.end());
        r.e0 = eig.eigenvalues[0];
        r.e1 = eig.eigenvalues[1];
        r.gap = r.e1 - r.e0;

        const RealField phi0 = eig.vector(0);
        r.ground_l4_4 = phi0.array().square().square().sum();
        r.flatness = dirichlet_energy(*geom, phi0);
        const auto loc0 = localization_center(*geom, phi0);
        const auto loc1 = localization_center(*geom, eig.vector(1));
        r.x0 = loc0.center_coords;
        r.x1 = loc1.center_coords;
        r.center_distance = geom->torus_distance(loc0.center, loc1.center);
        r.decay_rate = loc0.decay_rate;

        if (!with_gp) return finish(r);

        GPOptions gopts;
        gopts.gradient_tol = plan.tol_gp;
        gopts.v_max = plan.disorder.v_max;
        gopts.dim = plan.dim;
        gopts.record_trace = false;
        const GPProblem problem(h, r.coupling);
        const GPResult gp = minimize_gp(problem, phi0, gopts);
        r.gp_iterations = gp.iterations;
        r.gp_gradient = gp.gradient_norm;
        r.e_gp = gp.energy;
        const auto cert = certificate(problem, eig, gp);
        r.overlap = cert.overlap;
        r.certificate_valid = cert.valid;
        r.certificate_margin = cert.margin;
        r.certificate_squared_margin = cert.squared_margin;
        if (!gp.converged)
            return finish(failed_record(r, "GP minimization stopped after " + std::to_string(gp.iterations) +
                                               " iterations with projected gradient " +
                                               std::to_string(gp.gradient_norm)));
        return finish(r);
    } catch (const NotConvergedError& e) {
        return finish(failed_record(r, std::string("eigensolver: ") + e.what()));
    } catch (const std::exception& e) {
        return finish(failed_record(r, e.what()));
    }
}

/// Disjoint Neumann cubes of side exactly ell, packed from the corner -L; the
/// leftover slab along each axis is not used.
std::vector<Region> cubes_of_side(const LatticeGeometry& geom, int ell)
{
    const int per_axis = geom.side() / ell;
    int total = 1;
    for (int j = 0; j < geom.dim(); ++j) total *= per_axis;
    std::vector<Region> out;
    for (int c = 0; c < total; ++c) {
        Region box;
        box.boundary = BoundaryCondition::Neumann;
        int rest = c;
        for (int j = 0; j < geom.dim(); ++j) {
            box.lower[j] = -geom.half_side() + (rest % per_axis) * ell;
            box.extent[j] = ell;
            rest /= per_axis;
        }
        out.push_back(box);
    }
    return out;
}

std::vector<std::shared_ptr<const LatticeGeometry>> geometries(const ExperimentPlan& plan)
{
    std::vector<std::shared_ptr<const LatticeGeometry>> out;
    for (int L : plan.l_grid) out.push_back(std::make_shared<const LatticeGeometry>(plan.dim, L));
    return out;
}

bool nondecreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) return false;
    return true;
}

Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < 2) return {kNaN, kNaN};
    return fit_line(lx, ly);
}

std::ofstream open_series(const std::string& prefix, const std::string& name)
{
    const std::string path = prefix + "_" + name + ".dat";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.precision(17);
    return f;
}

}  // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::Condense: return "condense";
    case ExperimentKind::Spectrum: return "spectrum";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::Estimates: return "estimates";
    case ExperimentKind::Shells: return "shells";
    }
    return "unknown";
}

ExperimentKind parse_experiment(const std::string& name)
{
    for (auto k : {ExperimentKind::Condense, ExperimentKind::Spectrum, ExperimentKind::Scaling,
                   ExperimentKind::Estimates, ExperimentKind::Shells})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown experiment '" + name +
                                "', expected condense, spectrum, scaling, estimates or shells");
}

double theorem_coupling(int L, int dim, double c)
{
    if (L < 3) throw std::invalid_argument("theorem_coupling: needs L >= 3 so that log L > 1");
    const double log_l = std::log(static_cast<double>(L));
    return c * std::pow(static_cast<double>(L), -dim) / log_bracket(L, dim) / scale_f(log_l, dim) / log_l;
}

double condensation_eta(int L, int dim, double coupling)
{
    if (L < 3) throw std::invalid_argument("condensation_eta: needs L >= 3");
    const double log_l = std::log(static_cast<double>(L));
    return std::sqrt(std::abs(coupling * std::pow(static_cast<double>(L), dim) * log_bracket(L, dim) *
                              scale_f(log_l, dim)));
}

double CouplingSchedule::at(int L, int dim, std::size_t l_index) const
{
    if (kind == Kind::Theorem) return theorem_coupling(L, dim, c);
    if (values.size() == 1) return values[0];
    if (l_index >= values.size()) throw std::invalid_argument("coupling schedule has no value for this L");
    return values[l_index];
}

void ExperimentPlan::validate() const
{
    auto fail = [](const std::string& m) { throw std::invalid_argument("plan: " + m); };
    if (dim < 1 || dim > kMaxDim) fail("dim must be 1, 2 or 3");
    if (l_grid.empty()) fail("l_grid is empty");
    for (std::size_t i = 0; i < l_grid.size(); ++i) {
        if (l_grid[i] < 1) fail("L must be positive");
        if (i > 0 && l_grid[i] <= l_grid[i - 1]) fail("l_grid must be strictly increasing");
    }
    if (samples < 0 || (samples == 0 && kind != ExperimentKind::Shells)) fail("samples must be >= 1");
    if (!seed) fail("a master seed is required");
    if (!(tol_eig > 0.0) || !(tol_gp > 0.0)) fail("tolerances must be positive");
    if (workers < 1) fail("workers must be >= 1");
    disorder.validate();
    const bool uses_gp = kind == ExperimentKind::Condense || kind == ExperimentKind::Scaling;
    if (uses_gp) {
        if (schedule.kind == CouplingSchedule::Kind::Theorem) {
            if (l_grid.front() < 3) fail("the theorem schedule needs L >= 3");
        } else {
            if (schedule.values.size() != 1 && schedule.values.size() != l_grid.size())
                fail("explicit couplings need one value or one per L");
            for (double u : schedule.values)
                if (!(u >= 0.0)) fail("couplings must be >= 0");
            if (l_grid.front() < 3) fail("eta(L) needs L >= 3");
        }
    }
    if (kind == ExperimentKind::Spectrum && levels < 2) fail("levels must be >= 2");
    if (kind == ExperimentKind::Estimates) {
        if (sites_of(dim, l_grid.back()) > kDenseOracleLimit)
            fail("estimates use dense spectra; (2L+1)^d must not exceed " + std::to_string(kDenseOracleLimit));
        if (widths.empty() || !(window_hi > window_lo) || window_positions < 1) fail("bad window sweep");
        for (double w : widths)
            if (!(w > 0.0) || w > window_hi - window_lo) fail("widths must lie in (0, window length]");
    }
    if (kind == ExperimentKind::Shells) {
        if (eps_grid.empty() || fields < 1) fail("shells need eps values and fields >= 1");
        for (double e : eps_grid)
            if (!(e > 0.0 && e < 1.0)) fail("eps must lie in (0, 1)");
    }
}

bool RunRecord::same_content(const RunRecord& o) const
{
    return experiment == o.experiment && provenance == o.provenance && dim == o.dim && L == o.L &&
           same_double(coupling, o.coupling) && same_double(e0, o.e0) && same_double(e1, o.e1) &&
           same_double(e_gp, o.e_gp) && same_double(overlap, o.overlap) && same_double(gap, o.gap) &&
           same_double(ground_l4_4, o.ground_l4_4) && same_double(flatness, o.flatness) &&
           same_double(eta, o.eta) && certificate_valid == o.certificate_valid &&
           same_double(certificate_margin, o.certificate_margin) &&
           same_double(certificate_squared_margin, o.certificate_squared_margin) && x0 == o.x0 && x1 == o.x1 &&
           center_distance == o.center_distance && same_double(decay_rate, o.decay_rate) &&
           std::equal(eigenvalues.begin(), eigenvalues.end(), o.eigenvalues.begin(), o.eigenvalues.end(),
                      same_double) &&
           eig_iterations == o.eig_iterations && gp_iterations == o.gp_iterations &&
           same_double(gp_gradient, o.gp_gradient) && status == o.status && failure == o.failure;
}

std::vector<std::string> record_violations(const RunRecord& r)
{
    std::vector<std::string> out;
    if (!r.ok()) return out;
    const double s = kInvariantSlack;
    if (!std::isnan(r.e_gp)) {
        if (!(r.e0 <= r.e_gp + s)) out.push_back("E_GP below E_0");
        if (!(r.e_gp <= r.e0 + r.coupling * r.ground_l4_4 + s)) out.push_back("E_GP above E_0 + U ||phi_0||_4^4");
        if (r.certificate_valid && !(r.certificate_margin >= -s)) out.push_back("certificate bound violated");
    }
    if (!(r.flatness <= r.e0 + s)) out.push_back("flatness exceeds E_0");
    return out;
}

RunRecord run_sample(const ExperimentPlan& plan, std::size_t l_index, std::uint32_t sample)
{
    plan.validate();
    if (l_index >= plan.l_grid.size()) throw std::invalid_argument("run_sample: L index out of range");
    return sample_task(plan, std::make_shared<const LatticeGeometry>(plan.dim, plan.l_grid[l_index]), l_index,
                       sample);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task)
{
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<RunRecord> run_records(const ExperimentPlan& plan)
{
    plan.validate();
    const auto geoms = geometries(plan);
    const std::size_t per_level = static_cast<std::size_t>(plan.samples);
    std::vector<RunRecord> records(plan.l_grid.size() * per_level);
    parallel_for(records.size(), plan.workers, [&](std::size_t t) {
        const std::size_t li = t / per_level;
        records[t] = sample_task(plan, geoms[li], li, static_cast<std::uint32_t>(t % per_level));
    });
    return records;
}

Quantiles quantiles(std::vector<double> values)
{
    std::erase_if(values, [](double v) { return std::isnan(v); });
    Quantiles q;
    if (values.empty()) {
        q.q10 = q.q25 = q.median = q.q75 = q.q90 = q.min = q.max = kNaN;
        return q;
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    q.q10 = at(0.1);
    q.q25 = at(0.25);
    q.median = at(0.5);
    q.q75 = at(0.75);
    q.q90 = at(0.9);
    q.min = values.front();
    q.max = values.back();
    return q;
}

EnsembleSummary summarize(const ExperimentPlan& plan, const std::vector<RunRecord>& records)
{
    EnsembleSummary s;
    std::map<int, std::vector<const RunRecord*>> by_l;
    for (const auto& r : records) by_l[r.L].push_back(&r);

    std::vector<double> medians, fractions, normalized;
    for (int L : plan.l_grid) {
        LevelSummary lv;
        lv.L = L;
        std::vector<double> overlap, gap, e0, flat, norm_e0;
        int close = 0, condensed = 0;
        const double log_l = std::log(static_cast<double>(std::max(L, 2)));
        for (const RunRecord* r : by_l[L]) {
            lv.coupling = r->coupling;
            lv.eta = r->eta;
            if (!r->ok()) {
                ++lv.failed;
                continue;
            }
            ++lv.ok;
            overlap.push_back(r->overlap);
            gap.push_back(r->gap);
            e0.push_back(r->e0);
            flat.push_back(r->flatness);
            norm_e0.push_back(r->e0 * std::pow(log_l, 2.0 / plan.dim));
            if (r->center_distance <= plan.lambda * log_l) ++close;
            if (!std::isnan(r->overlap) && r->overlap >= 1.0 - r->eta) ++condensed;
            if (r->certificate_valid) ++lv.certificate_valid;
            if (!record_violations(*r).empty()) ++lv.violations;
        }
        lv.overlap = quantiles(overlap);
        lv.gap = quantiles(gap);
        lv.e0 = quantiles(e0);
        lv.flatness = quantiles(flat);
        lv.normalized_e0 = quantiles(norm_e0).median;
        const double denom = std::max(lv.ok, 1);
        lv.close_fraction = close / denom;
        lv.condensed_fraction = condensed / denom;
        s.total_violations += lv.violations;
        s.total_failed += lv.failed;
        medians.push_back(lv.overlap.median);
        fractions.push_back(lv.condensed_fraction);
        normalized.push_back(lv.normalized_e0);
        s.levels.push_back(lv);
    }
    s.median_overlap_nondecreasing = nondecreasing(medians);
    s.condensed_fraction_nondecreasing = nondecreasing(fractions);
    if (!normalized.empty()) {
        s.normalized_e0_min = *std::min_element(normalized.begin(), normalized.end());
        s.normalized_e0_max = *std::max_element(normalized.begin(), normalized.end());
    }
    return s;
}

Fit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae");
    Fit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

std::vector<EstimatesSummary> run_spectral_estimates(const ExperimentPlan& plan)
{
    plan.validate();
    if (plan.kind != ExperimentKind::Estimates) throw std::invalid_argument("run_spectral_estimates: wrong kind");
    const auto geoms = geometries(plan);
    const std::size_t nw = plan.widths.size();

    struct SampleStats {
        bool ok = false;
        std::vector<double> count, two;
        std::vector<long> hits, boxes;
        double gap = 0.0;
    };

    std::vector<EstimatesSummary> out;
    for (std::size_t li = 0; li < plan.l_grid.size(); ++li) {
        const auto& geom = geoms[li];
        const int L = plan.l_grid[li];
        std::vector<int> sides;
        for (int ell : plan.box_sides)
            if (ell >= 1 && ell <= geom->side()) sides.push_back(ell);

        std::vector<SampleStats> stats(static_cast<std::size_t>(plan.samples));
        parallel_for(stats.size(), plan.workers, [&](std::size_t s) {
            SampleStats& st = stats[s];
            st.count.assign(nw, 0.0);
            st.two.assign(nw, 0.0);
            st.hits.assign(sides.size(), 0);
            st.boxes.assign(sides.size(), 0);
            DisorderSpec spec = plan.disorder;
            spec.seed = *plan.seed;
            const auto r = sample_potential(spec, geom, static_cast<std::uint32_t>(li), static_cast<std::uint32_t>(s));
            const RealField spectrum = dense_spectrum(periodic_hamiltonian(r));
            st.gap = spectrum[1] - spectrum[0];
            for (std::size_t k = 0; k < nw; ++k) {
                const double w = plan.widths[k];
                const int m = plan.window_positions;
                for (int p = 0; p < m; ++p) {
                    const double lo =
                        plan.window_lo + (m > 1 ? (plan.window_hi - plan.window_lo - w) * p / (m - 1.0) : 0.0);
                    const Index c = count_eigenvalues_in(spectrum, lo, lo + w);
                    st.count[k] += static_cast<double>(c) / m;
                    st.two[k] += (c >= 2 ? 1.0 : 0.0) / m;
                }
            }
            for (std::size_t j = 0; j < sides.size(); ++j) {
                const double threshold = 1.0 / (static_cast<double>(sides[j]) * sides[j]);
                for (const Region& box : cubes_of_side(*geom, sides[j])) {
                    ++st.boxes[j];
                    if (dense_spectrum(restrict_hamiltonian(r, box))[0] <= threshold) ++st.hits[j];
                }
            }
            st.ok = true;
        });

        EstimatesSummary es;
        es.L = L;
        es.widths = plan.widths;
        es.box_sides = sides;
        es.gap_etas = plan.gap_etas;
        es.mean_counts.assign(nw, 0.0);
        es.minami_probability.assign(nw, 0.0);
        es.lifshitz_probability.assign(sides.size(), 0.0);
        es.lifshitz_boxes.assign(sides.size(), 0);
        es.gap_probability.assign(plan.gap_etas.size(), 0.0);
        std::vector<long> hits(sides.size(), 0);
        const double scale = std::pow(static_cast<double>(L), -plan.dim);
        for (const auto& st : stats) {
            if (!st.ok) {
                ++es.failed;
                continue;
            }
            ++es.samples;
            for (std::size_t k = 0; k < nw; ++k) {
                es.mean_counts[k] += st.count[k];
                es.minami_probability[k] += st.two[k];
            }
            for (std::size_t j = 0; j < sides.size(); ++j) {
                hits[j] += st.hits[j];
                es.lifshitz_boxes[j] += st.boxes[j];
            }
            for (std::size_t e = 0; e < plan.gap_etas.size(); ++e)
                if (st.gap <= plan.gap_etas[e] * scale) es.gap_probability[e] += 1.0;
        }
        const double n = std::max(es.samples, 1);
        for (std::size_t k = 0; k < nw; ++k) {
            es.mean_counts[k] /= n;
            es.minami_probability[k] /= n;
        }
        for (auto& p : es.gap_probability) p /= n;
        for (std::size_t j = 0; j < sides.size(); ++j)
            es.lifshitz_probability[j] =
                es.lifshitz_boxes[j] > 0 ? static_cast<double>(hits[j]) / es.lifshitz_boxes[j] : kNaN;
        for (std::size_t j = 1; j < sides.size(); ++j)
            if (es.lifshitz_probability[j] > es.lifshitz_probability[j - 1]) es.lifshitz_nonincreasing = false;

        double sww = 0.0, swm = 0.0;
        for (std::size_t k = 0; k < nw; ++k) {
            sww += plan.widths[k] * plan.widths[k];
            swm += plan.widths[k] * es.mean_counts[k];
        }
        es.wegner_slope = swm / sww;
        for (std::size_t k = 0; k < nw; ++k)
            es.wegner_max_deviation =
                std::max(es.wegner_max_deviation, std::abs(es.mean_counts[k] - es.wegner_slope * plan.widths[k]) /
                                                      std::max(es.mean_counts[k], 1e-300));
        es.minami_slope = loglog_fit(plan.widths, es.minami_probability).slope;
        es.gap_slope = loglog_fit(plan.gap_etas, es.gap_probability).slope;
        out.push_back(std::move(es));
    }
    return out;
}

ShellSummary run_shell_experiment(const ExperimentPlan& plan)
{
    plan.validate();
    const auto geoms = geometries(plan);
    ShellSummary s;
    std::vector<double> ground_ratios;

    for (std::size_t li = 0; li < plan.l_grid.size(); ++li) {
        const auto& geom = geoms[li];
        const int L = plan.l_grid[li];
        double c_max = 0.0, c_min = std::numeric_limits<double>::infinity();
        for (std::size_t ei = 0; ei < plan.eps_grid.size(); ++ei) {
            const double eps = plan.eps_grid[ei];
            if (eps * L < 1.0) continue;
            ShellLevel lv;
            lv.L = L;
            lv.eps = eps;
            lv.fields = plan.fields;
            std::vector<double> ratio(static_cast<std::size_t>(plan.fields));
            std::vector<char> sup_ok(ratio.size()), energy_ok(ratio.size());
            const double c_lat = shell_energy_constant(*geom);
            parallel_for(ratio.size(), plan.workers, [&](std::size_t i) {
                const auto index =
                    static_cast<std::uint32_t>((li * plan.eps_grid.size() + ei) * ratio.size() + i);
                const RealField u = random_low_energy_field(*geom, eps, *plan.seed, index);
                ratio[i] = four_norm_bound_check(*geom, u, eps).ratio;
                const auto sd = shell_decompose(*geom, u, eps);
                sup_ok[i] = sd.sup_bounds_hold(1e-9);
                energy_ok[i] = sd.shell_energy <= c_lat * sd.kinetic * (1.0 + 1e-12) + 1e-15;
            });
            lv.ratio = quantiles(ratio);
            lv.sup_violations = static_cast<int>(std::count(sup_ok.begin(), sup_ok.end(), 0));
            lv.energy_violations = static_cast<int>(std::count(energy_ok.begin(), energy_ok.end(), 0));
            lv.delta_trial_ratio = lp_norm(delta_trial_field(*geom, eps), Norm::L4) / scale_g(eps, geom->dim());
            lv.flat_trial_ratio = four_norm_bound_check(*geom, flat_fourier_trial_field(*geom, eps), eps).ratio;
            s.trial_constant = std::max({s.trial_constant, lv.delta_trial_ratio, lv.flat_trial_ratio});
            c_max = std::max(c_max, lv.ratio.max);
            c_min = std::min(c_min, lv.ratio.max);
            s.levels.push_back(lv);
        }
        s.constant_variation.push_back(c_max > 0.0 ? c_max / c_min : kNaN);

        std::vector<double> ratios(static_cast<std::size_t>(plan.samples), kNaN);
        std::vector<char> failed(ratios.size(), 0);
        parallel_for(ratios.size(), plan.workers, [&](std::size_t smp) {
            try {
                DisorderSpec spec = plan.disorder;
                spec.seed = *plan.seed;
                const auto r =
                    sample_potential(spec, geom, static_cast<std::uint32_t>(li), static_cast<std::uint32_t>(smp));
                LanczosOptions lopts;
                lopts.tol = plan.tol_eig;
                const RealField phi0 = lowest_eigenpairs(periodic_hamiltonian(r), 1, lopts).vector(0);
                const double eps = field_scale(*geom, phi0);
                if (eps < 1.0) ratios[smp] = four_norm_bound_check(*geom, phi0, eps).ratio;
            } catch (const std::exception&) {
                failed[smp] = 1;
            }
        });
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            if (failed[i]) ++s.failed;
            if (!std::isnan(ratios[i])) ground_ratios.push_back(ratios[i]);
        }
    }
    s.ground_states = static_cast<int>(ground_ratios.size());
    s.ground_state_ratio = quantiles(ground_ratios);
    return s;
}

void write_series(const std::string& prefix, const EnsembleSummary& s)
{
    auto overlap = open_series(prefix, "overlap");
    overlap << "# L median q10 q25 q75 q90\n";
    auto gap = open_series(prefix, "gap");
    gap << "# L median q10 q25 q75 q90\n";
    auto e0 = open_series(prefix, "e0");
    e0 << "# L median q10 q90 median_normalized flatness_median\n";
    auto cond = open_series(prefix, "condensed");
    cond << "# L U eta condensed_fraction close_fraction\n";
    for (const auto& lv : s.levels) {
        overlap << lv.L << ' ' << lv.overlap.median << ' ' << lv.overlap.q10 << ' ' << lv.overlap.q25 << ' '
                << lv.overlap.q75 << ' ' << lv.overlap.q90 << '\n';
        gap << lv.L << ' ' << lv.gap.median << ' ' << lv.gap.q10 << ' ' << lv.gap.q25 << ' ' << lv.gap.q75 << ' '
            << lv.gap.q90 << '\n';
        e0 << lv.L << ' ' << lv.e0.median << ' ' << lv.e0.q10 << ' ' << lv.e0.q90 << ' ' << lv.normalized_e0 << ' '
           << lv.flatness.median << '\n';
        cond << lv.L << ' ' << lv.coupling << ' ' << lv.eta << ' ' << lv.condensed_fraction << ' '
             << lv.close_fraction << '\n';
    }
}

void write_series(const std::string& prefix, const std::vector<EstimatesSummary>& s)
{
    auto wegner = open_series(prefix, "wegner");
    wegner << "# L width mean_count linear_fit\n";
    auto minami = open_series(prefix, "minami");
    minami << "# L width probability_two_or_more\n";
    auto lifshitz = open_series(prefix, "lifshitz");
    lifshitz << "# L ell probability boxes\n";
    auto gaplaw = open_series(prefix, "gaplaw");
    gaplaw << "# L eta probability_gap_below_eta_L^-d\n";
    for (const auto& e : s) {
        for (std::size_t k = 0; k < e.widths.size(); ++k) {
            wegner << e.L << ' ' << e.widths[k] << ' ' << e.mean_counts[k] << ' ' << e.wegner_slope * e.widths[k]
                   << '\n';
            minami << e.L << ' ' << e.widths[k] << ' ' << e.minami_probability[k] << '\n';
        }
        for (std::size_t j = 0; j < e.box_sides.size(); ++j)
            lifshitz << e.L << ' ' << e.box_sides[j] << ' ' << e.lifshitz_probability[j] << ' '
                     << e.lifshitz_boxes[j] << '\n';
        for (std::size_t j = 0; j < e.gap_etas.size(); ++j)
            gaplaw << e.L << ' ' << e.gap_etas[j] << ' ' << e.gap_probability[j] << '\n';
    }
}

void write_series(const std::string& prefix, const ShellSummary& s)
{
    auto f = open_series(prefix, "shells");
    f << "# L eps median_ratio q90_ratio max_ratio delta_trial_ratio flat_trial_ratio\n";
    for (const auto& lv : s.levels)
        f << lv.L << ' ' << lv.eps << ' ' << lv.ratio.median << ' ' << lv.ratio.q90 << ' ' << lv.ratio.max << ' '
          << lv.delta_trial_ratio << ' ' << lv.flat_trial_ratio << '\n';
}

}  // namespace gplab
