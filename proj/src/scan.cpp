#include "cascade/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cascade/version.hpp"

namespace cascade {

namespace {

constexpr double kBoundaryTolerance = 1e-6;
// Margin above the threshold for a cell to count as gain; suppresses the
// +-1e-16 arithmetic wobble of exactly-zero information differences.
constexpr double kGainMargin = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ParamSet {
    double eta, eps, mu, xi, p, A, B;
};

ParamSet from_fixed(const FixedParams& f) {
    return {f.eta, f.eps, f.mu, f.xi, f.p, f.A, f.B};
}

void set_param(ParamSet& ps, SweepParam which, double value) {
    switch (which) {
        case SweepParam::eta: ps.eta = value; break;
        case SweepParam::eps: ps.eps = value; break;
        case SweepParam::mu: ps.mu = value; break;
        case SweepParam::xi: ps.xi = value; break;
        case SweepParam::p: ps.p = value; break;
        case SweepParam::A: ps.A = value; break;
        case SweepParam::B: ps.B = value; break;
    }
}

void set_fixed(FixedParams& f, SweepParam which, double value) {
    switch (which) {
        case SweepParam::eta: f.eta = value; break;
        case SweepParam::eps: f.eps = value; break;
        case SweepParam::mu: f.mu = value; break;
        case SweepParam::xi: f.xi = value; break;
        case SweepParam::p: f.p = value; break;
        case SweepParam::A: f.A = value; break;
        case SweepParam::B: f.B = value; break;
    }
}

bool is_ab_axis(SweepParam param) {
    return param == SweepParam::A || param == SweepParam::B;
}

void check_axis_domain(const AxisSpec& axis) {
    const auto name = sweep_param_name(axis.param);
    if (axis.steps < 2) {
        throw std::invalid_argument(std::string(name) + " axis needs at least 2 steps");
    }
    if (!(axis.min < axis.max)) {
        throw std::invalid_argument(std::string(name) + " axis needs min < max");
    }
    double lo = 0.0, hi = 1.0;
    switch (axis.param) {
        case SweepParam::mu: lo = -1.0; break;
        case SweepParam::A:
        case SweepParam::B: hi = 2.0; break;
        default: break;
    }
    if (axis.min < lo || axis.max > hi || (axis.param == SweepParam::xi && axis.max >= 1.0)) {
        throw std::invalid_argument(std::string(name) + " axis range outside the legal domain");
    }
}

/// Comparison value of one sweep cell. NaN marks cells where the comparison
/// is undefined (eta_e at p in {0, 1} or a vanishing baseline).
class SweepEvaluator {
public:
    explicit SweepEvaluator(const SweepSpec& spec) : spec_(spec) {}

    double operator()(double xval, double yval) const {
        ParamSet ps = from_fixed(spec_.fixed);
        set_param(ps, spec_.x.param, xval);
        set_param(ps, spec_.y.param, yval);

        OutcomeTable scheme = scheme_table(ps);
        OutcomeTable bare = bare_table(ps);
        switch (spec_.comparison) {
            case GainComparison::info_gain:
                return mutual_information(scheme, ps.p) - mutual_information(bare, ps.p);
            case GainComparison::ml_gain:
                return ml_estimate(scheme, ps.p).q - ml_estimate(bare, ps.p).q;
            case GainComparison::eta_e_ratio: {
                if (ps.p <= 0.0 || ps.p >= 1.0) return kNaN;
                const auto num = effective_efficiency(mutual_information(scheme, ps.p), ps.p);
                const auto den = effective_efficiency(mutual_information(bare, ps.p), ps.p);
                if (!num || !den || *den <= 1e-12) return kNaN;
                return *num / *den;
            }
        }
        return kNaN;
    }

    double threshold() const {
        return spec_.comparison == GainComparison::eta_e_ratio ? 1.0 : 0.0;
    }

private:
    OutcomeTable scheme_table(const ParamSet& ps) const {
        const DetectorModel detector(ps.eta, ps.xi);
        if (spec_.layers <= kMaxLayers) {
            const CopierModel copier =
                is_ab_axis(spec_.x.param) || is_ab_axis(spec_.y.param)
                    ? CopierModel(general_ab_canonical(ps.A, ps.B))
                    : CopierModel(NoisyWZ(ps.eps, ps.mu));
            return build_outcome_table(SchemeConfig(spec_.layers, copier, detector, ps.p));
        }
        // xi = 0, mu = -1 only (validated): the recursion gives the scheme's
        // exact equivalent single-detector channel.
        const double eta_n = eta_e_recursion(ps.eps, ps.eta, spec_.layers);
        return OutcomeTable(0, {1.0 - eta_n, eta_n}, {1.0, 0.0});
    }

    OutcomeTable bare_table(const ParamSet& ps) const {
        const DetectorModel detector(ps.eta, ps.xi);
        const CopierModel copier = CopierModel(NoisyWZ(0.0, -1.0));
        return build_outcome_table(SchemeConfig(0, copier, detector, ps.p));
    }

    const SweepSpec& spec_;
};

void for_each_index(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::clamp(threads, 1, count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string trimmed_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::string_view sweep_param_name(SweepParam param) {
    switch (param) {
        case SweepParam::eta: return "eta";
        case SweepParam::eps: return "eps";
        case SweepParam::mu: return "mu";
        case SweepParam::xi: return "xi";
        case SweepParam::p: return "p";
        case SweepParam::A: return "A";
        case SweepParam::B: return "B";
    }
    return "?";
}

SweepParam parse_sweep_param(std::string_view name) {
    for (SweepParam param : {SweepParam::eta, SweepParam::eps, SweepParam::mu, SweepParam::xi,
                             SweepParam::p, SweepParam::A, SweepParam::B}) {
        if (sweep_param_name(param) == name) return param;
    }
    throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "'");
}

double axis_value(const AxisSpec& axis, int index) {
    const double n = axis.steps - 1;
    return (axis.min * (n - index) + axis.max * index) / n;
}

void validate(const SweepSpec& spec) {
    check_axis_domain(spec.x);
    check_axis_domain(spec.y);
    if (spec.x.param == spec.y.param) {
        throw std::invalid_argument("x and y axes must sweep distinct parameters");
    }
    if (spec.layers < 0) {
        throw std::invalid_argument("layers must be >= 0");
    }
    if (spec.layers > kMaxLayers) {
        const bool wz_noiseless = spec.fixed.xi == 0.0 && spec.fixed.mu == -1.0 &&
                                  !is_ab_axis(spec.x.param) && !is_ab_axis(spec.y.param) &&
                                  spec.x.param != SweepParam::xi && spec.y.param != SweepParam::xi &&
                                  spec.x.param != SweepParam::mu && spec.y.param != SweepParam::mu;
        if (!wz_noiseless) {
            throw std::invalid_argument("layers > 4 requires the xi = 0, mu = -1 recursion");
        }
    }
    // Fixed values must be constructible even if unused by this sweep.
    DetectorModel(spec.fixed.eta, spec.fixed.xi);
    NoisyWZ(spec.fixed.eps, spec.fixed.mu);
    general_ab_canonical(spec.fixed.A, spec.fixed.B);
    if (!(spec.fixed.p >= 0.0 && spec.fixed.p <= 1.0)) {
        throw std::invalid_argument("p must be in [0, 1]");
    }
}

RegionGrid run_sweep(const SweepSpec& spec, int threads) {
    validate(spec);
    const SweepEvaluator eval(spec);
    const double threshold = eval.threshold();
    const int nx = spec.x.steps;
    const int ny = spec.y.steps;

    RegionGrid grid;
    grid.spec = spec;
    grid.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    grid.gain.assign(static_cast<std::size_t>(nx) * ny, 0);
    std::vector<std::vector<BoundaryPoint>> column_boundary(nx);

    for_each_index(nx, threads, [&](int ix) {
        const double xval = axis_value(spec.x, ix);
        double* col = grid.values.data() + static_cast<std::size_t>(ix) * ny;
        std::uint8_t* colg = grid.gain.data() + static_cast<std::size_t>(ix) * ny;
        for (int iy = 0; iy < ny; ++iy) {
            col[iy] = eval(xval, axis_value(spec.y, iy));
            colg[iy] = col[iy] > threshold + kGainMargin ? 1 : 0;
        }
        for (int iy = 0; iy + 1 < ny; ++iy) {
            const double f0 = col[iy];
            const double f1 = col[iy + 1];
            if (!std::isfinite(f0) || !std::isfinite(f1)) continue;
            const bool g0 = f0 > threshold + kGainMargin;
            const bool g1 = f1 > threshold + kGainMargin;
            if (g0 == g1) continue;
            double lo = axis_value(spec.y, iy);
            double hi = axis_value(spec.y, iy + 1);
            while (hi - lo > kBoundaryTolerance) {
                const double mid = 0.5 * (lo + hi);
                if ((eval(xval, mid) > threshold + kGainMargin) == g0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            column_boundary[ix].push_back({xval, 0.5 * (lo + hi)});
        }
    });

    for (auto& pts : column_boundary) {
        grid.boundary.insert(grid.boundary.end(), pts.begin(), pts.end());
    }
    return grid;
}

Dataset grid_dataset(std::string name, const RegionGrid& grid) {
    Dataset d;
    d.name = std::move(name);
    d.columns = {std::string(sweep_param_name(grid.spec.x.param)),
                 std::string(sweep_param_name(grid.spec.y.param)), "value", "gain"};
    d.rows.reserve(grid.values.size());
    for (int ix = 0; ix < grid.spec.x.steps; ++ix) {
        const double xval = axis_value(grid.spec.x, ix);
        for (int iy = 0; iy < grid.spec.y.steps; ++iy) {
            d.rows.push_back(
                {xval, axis_value(grid.spec.y, iy), grid.value_at(ix, iy),
                 grid.gain_at(ix, iy) ? 1.0 : 0.0});
        }
    }
    return d;
}

Dataset boundary_dataset(std::string name, const RegionGrid& grid) {
    Dataset d;
    d.name = std::move(name);
    d.columns = {std::string(sweep_param_name(grid.spec.x.param)),
                 std::string(sweep_param_name(grid.spec.y.param))};
    d.rows.reserve(grid.boundary.size());
    for (const auto& pt : grid.boundary) d.rows.push_back({pt.x, pt.y});
    return d;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_csv(std::ostream& os, const Dataset& dataset) {
    os << "# spec_version " << kSpecVersion << "\n";
    for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
        os << (c ? "," : "") << dataset.columns[c];
    }
    os << "\n";
    for (const auto& row : dataset.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << (c ? "," : "") << format_double(row[c]);
        }
        os << "\n";
    }
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
    return ids;
}

namespace {

nlohmann::json axis_json(const AxisSpec& axis) {
    return {{"param", sweep_param_name(axis.param)},
            {"min", axis.min},
            {"max", axis.max},
            {"steps", axis.steps}};
}

nlohmann::json sweep_json(const SweepSpec& spec) {
    const char* cmp = spec.comparison == GainComparison::info_gain      ? "info-gain"
                      : spec.comparison == GainComparison::ml_gain      ? "ml-gain"
                                                                        : "eta_e-ratio";
    return {{"x", axis_json(spec.x)},
            {"y", axis_json(spec.y)},
            {"layers", spec.layers},
            {"comparison", cmp},
            {"fixed",
             {{"eta", spec.fixed.eta},
              {"eps", spec.fixed.eps},
              {"mu", spec.fixed.mu},
              {"xi", spec.fixed.xi},
              {"p", spec.fixed.p},
              {"A", spec.fixed.A},
              {"B", spec.fixed.B}}}};
}

FigurePreset preset_fig2(int threads) {
    SweepSpec spec;
    spec.x = {SweepParam::eta, 0.01, 1.0, 100};
    spec.y = {SweepParam::eps, 0.0, 1.0, 101};
    spec.layers = 3;
    spec.comparison = GainComparison::eta_e_ratio;
    spec.fixed.xi = 0.0;
    spec.fixed.mu = -1.0;
    spec.fixed.p = 0.5;
    RegionGrid grid = run_sweep(spec, threads);

    FigurePreset preset;
    preset.id = "fig2";
    preset.metadata = {{"spec_version", kSpecVersion},
                       {"id", "fig2"},
                       {"description",
                        "Relative efficiency gain eta_e/eta of the three-layer cascade over the "
                        "bare detector, noiseless devices"},
                       {"sweep", sweep_json(spec)}};
    preset.datasets.push_back(grid_dataset("fig2_grid", grid));
    preset.datasets.push_back(boundary_dataset("fig2_boundary", grid));
    return preset;
}

FigurePreset preset_fig3(int) {
    const double eta = 0.6;
    const double p = 0.5;
    std::vector<double> eps_grid;
    for (int i = 0; i <= 200; ++i) eps_grid.push_back(i / 200.0);
    eps_grid.push_back(5.0 / 7.0); // exact gain threshold for eta = 0.6
    std::sort(eps_grid.begin(), eps_grid.end());
    eps_grid.erase(std::unique(eps_grid.begin(), eps_grid.end()), eps_grid.end());

    Dataset curves;
    curves.name = "fig3_curves";
    curves.columns = {"eps", "eta_e_n0", "eta_e_n1", "eta_e_n2", "eta_e_n3", "eta_e_limit"};
    const DetectorModel detector(eta, 0.0);
    for (double eps : eps_grid) {
        std::vector<double> row = {eps};
        for (int layers = 0; layers <= 3; ++layers) {
            const SchemeConfig cfg(layers, NoisyWZ(eps, -1.0), detector, p);
            const auto eta_e = effective_efficiency(mutual_information(build_outcome_table(cfg), p), p);
            row.push_back(eta_e.value());
        }
        row.push_back(eps > 0.5 ? 2.0 - 1.0 / eps : 0.0);
        curves.rows.push_back(std::move(row));
    }

    FigurePreset preset;
    preset.id = "fig3";
    preset.metadata = {{"spec_version", kSpecVersion},
                       {"id", "fig3"},
                       {"description",
                        "Equivalent efficiency vs copier efficiency for 0..3 copier layers and "
                        "the infinite-layer limit max(0, 2 - 1/eps)"},
                       {"eta", eta},
                       {"xi", 0.0},
                       {"mu", -1.0},
                       {"p", p},
                       {"eps_grid", "201 uniform points on [0,1] plus the threshold 5/7"}};
    preset.datasets.push_back(std::move(curves));
    return preset;
}

FigurePreset boundary_family_preset(const std::string& id, const std::string& description,
                                    SweepParam member_param, const std::vector<double>& members,
                                    SweepSpec base, int threads) {
    FigurePreset preset;
    preset.id = id;
    nlohmann::json member_list = nlohmann::json::array();
    for (double value : members) {
        SweepSpec spec = base;
        set_fixed(spec.fixed, member_param, value);
        RegionGrid grid = run_sweep(spec, threads);
        const std::string name =
            id + "_boundary_" + std::string(sweep_param_name(member_param)) + "_" +
            trimmed_number(value);
        preset.datasets.push_back(boundary_dataset(name, grid));
        member_list.push_back({{"value", value}, {"dataset", name}});
    }
    preset.metadata = {{"spec_version", kSpecVersion},
                       {"id", id},
                       {"description", description},
                       {"family_param", sweep_param_name(member_param)},
                       {"members", member_list},
                       {"sweep", sweep_json(base)}};
    return preset;
}

FigurePreset preset_fig7(int threads) {
    SweepSpec base;
    base.x = {SweepParam::A, 0.0, 2.0, 201};
    base.y = {SweepParam::B, 0.0, 2.0, 201};
    base.layers = 1;
    base.comparison = GainComparison::info_gain;
    base.fixed.eta = 1e-3; // weak-detector realization
    base.fixed.xi = 0.0;

    const std::vector<double> priors = {0.1, 0.3, 0.5, 0.7, 0.9};
    FigurePreset preset =
        boundary_family_preset("fig7",
                               "Copier (A, B) regions that improve weak-detector information, "
                               "per photon prior p; landmarks: Wootters-Zurek (2,0), UQCM (5/3,1/3)",
                               SweepParam::p, priors, base, threads);

    nlohmann::json landmarks = nlohmann::json::array();
    for (double p : priors) {
        const double io = weak_detector_info(base.fixed.eta, p);
        landmarks.push_back(
            {{"p", p},
             {"wz", {{"A", 2.0}, {"B", 0.0}, {"gain", ab_weak_info(base.fixed.eta, p, 2.0, 0.0) > io}}},
             {"uqcm",
              {{"A", 5.0 / 3.0},
               {"B", 1.0 / 3.0},
               {"gain", ab_weak_info(base.fixed.eta, p, 5.0 / 3.0, 1.0 / 3.0) > io}}}});
    }
    preset.metadata["landmarks"] = std::move(landmarks);
    return preset;
}

} // namespace

FigurePreset figure_preset(const std::string& id, int threads) {
    if (id == "fig2") return preset_fig2(threads);
    if (id == "fig3") return preset_fig3(threads);

    SweepSpec base;
    base.x = {SweepParam::eta, 0.0, 1.0, 201};
    base.y = {SweepParam::eps, 0.0, 1.0, 201};
    base.layers = 1;
    base.comparison = GainComparison::info_gain;

    if (id == "fig4") {
        base.fixed.mu = -1.0;
        base.fixed.p = 0.5;
        return boundary_family_preset(
            "fig4", "Single-copier gain boundaries in (eta, eps) for dark-count levels xi",
            SweepParam::xi, {0.0, 0.01, 0.1}, base, threads);
    }
    if (id == "fig5") {
        base.fixed.xi = 0.0;
        base.fixed.p = 0.5;
        return boundary_family_preset(
            "fig5", "Single-copier gain boundaries in (eta, eps) for failure outputs mu",
            SweepParam::mu, {-1.0, -0.5, 0.0, 0.5, 1.0}, base, threads);
    }
    if (id == "fig6") {
        base.fixed.xi = 0.0;
        base.fixed.mu = 0.0;
        return boundary_family_preset(
            "fig6", "Single-copier gain boundaries in (eta, eps) for photon priors p",
            SweepParam::p, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, base, threads);
    }
    if (id == "fig7") return preset_fig7(threads);
    throw std::invalid_argument("unknown figure id '" + id + "'");
}

namespace {

double eps_min_for_gain(double eta, double mu, double xi, double p) {
    const DetectorModel detector(eta, xi);
    const OutcomeTable bare =
        build_outcome_table(SchemeConfig(0, NoisyWZ(0.0, -1.0), detector, p));
    const double base = mutual_information(bare, p);
    auto gain = [&](double eps) {
        const SchemeConfig cfg(1, NoisyWZ(eps, mu), detector, p);
        return mutual_information(build_outcome_table(cfg), p) - base;
    };
    double prev = gain(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double eps = i / 100.0;
        const double cur = gain(eps);
        if (cur > 0.0 && prev <= 0.0) {
            double lo = (i - 1) / 100.0;
            double hi = eps;
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                (gain(mid) > 0.0 ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev = cur;
    }
    return kNaN;
}

bool all_finite(const std::vector<std::vector<double>>& table) {
    for (const auto& row : table) {
        for (double v : row) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

} // namespace

MonotonicityReport boundary_monotonicity_report(Family family) {
    MonotonicityReport report;
    report.family = family;
    report.eta_grid = {0.2, 0.3, 0.4, 0.5, 0.6};

    double mu = -1.0;
    double xi = 0.0;
    double p = 0.5;
    switch (family) {
        case Family::xi: report.members = {0.0, 0.01, 0.1}; break;
        case Family::mu: report.members = {-1.0, 0.0, 1.0}; break;
        case Family::p:
            report.members = {0.1, 0.4, 0.5, 0.6, 0.9};
            mu = 0.0;
            break;
    }

    report.eps_min.resize(report.members.size());
    for (std::size_t mi = 0; mi < report.members.size(); ++mi) {
        for (double eta : report.eta_grid) {
            const double member = report.members[mi];
            double value = kNaN;
            switch (family) {
                case Family::xi: value = eps_min_for_gain(eta, mu, member, p); break;
                case Family::mu: value = eps_min_for_gain(eta, member, xi, p); break;
                case Family::p: value = eps_min_for_gain(eta, mu, xi, member); break;
            }
            report.eps_min[mi].push_back(value);
        }
    }

    if (!all_finite(report.eps_min)) {
        report.orderings_hold = false;
        report.notes.push_back("some members show no gain for any eps <= 1 on the eta grid");
        return report;
    }

    bool ok = true;
    for (std::size_t e = 0; e < report.eta_grid.size(); ++e) {
        switch (family) {
            case Family::xi:
                for (std::size_t mi = 0; mi + 1 < report.members.size(); ++mi) {
                    ok = ok && report.eps_min[mi][e] <= report.eps_min[mi + 1][e];
                }
                break;
            case Family::mu:
                for (std::size_t mi = 0; mi + 1 < report.members.size(); ++mi) {
                    ok = ok && report.eps_min[mi][e] < report.eps_min[mi + 1][e];
                }
                break;
            case Family::p: {
                for (std::size_t mi = 0; mi + 1 < report.members.size(); ++mi) {
                    ok = ok && report.eps_min[mi][e] > report.eps_min[mi + 1][e];
                }
                // members {0.4, 0.5, 0.6} sit at indices 1..3
                const double lo = std::min({report.eps_min[1][e], report.eps_min[2][e],
                                            report.eps_min[3][e]});
                const double hi = std::max({report.eps_min[1][e], report.eps_min[2][e],
                                            report.eps_min[3][e]});
                ok = ok && (hi - lo < 0.05);
                break;
            }
        }
    }
    report.orderings_hold = ok;
    switch (family) {
        case Family::xi:
            report.notes.push_back(ok ? "eps_min nondecreasing in xi at every eta"
                                      : "xi ordering violated");
            break;
        case Family::mu:
            report.notes.push_back(ok ? "eps_min strictly increasing in mu at every eta"
                                      : "mu ordering violated");
            break;
        case Family::p:
            report.notes.push_back(ok ? "eps_min strictly decreasing in p at every eta; "
                                        "p in {0.4, 0.5, 0.6} within 0.05"
                                      : "p ordering violated");
            break;
    }
    return report;
}

} // namespace cascade
