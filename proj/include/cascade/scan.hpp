#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/metrics.hpp"

namespace cascade {

enum class SweepParam { eta, eps, mu, xi, p, A, B };

std::string_view sweep_param_name(SweepParam param);
SweepParam parse_sweep_param(std::string_view name);

/// Inclusive uniform grid of `steps` points (steps >= 2) on [min, max].
struct AxisSpec {
    SweepParam param;
    double min;
    double max;
    int steps;
};

double axis_value(const AxisSpec& axis, int index);

/// What "gain" means for a sweep cell, always against the bare detector with
/// the same eta and xi:
///   info_gain   — I_m(scheme) - I_m(bare), gain when > 0
///   ml_gain     — Q(scheme) - Q(bare), gain when > 0
///   eta_e_ratio — eta_e(scheme) / eta_e(bare), gain when > 1
enum class GainComparison { info_gain, ml_gain, eta_e_ratio };

/// Values used for every parameter that is not on a sweep axis.
struct FixedParams {
    double eta = 0.6;
    double eps = 0.8;
    double mu = -1.0;
    double xi = 0.0;
    double p = 0.5;
    double A = 2.0;
    double B = 0.0;
};

/// 2-D parameter sweep. The copier is GeneralAB (canonical populations for
/// the cell's A, B) when an axis sweeps A or B, and NoisyWZ(eps, mu)
/// otherwise. layers > 4 is allowed only for xi = 0, mu = -1 sweeps, which
/// the closed-form recursion serves exactly.
struct SweepSpec {
    AxisSpec x;
    AxisSpec y;
    FixedParams fixed;
    int layers = 1;
    GainComparison comparison = GainComparison::info_gain;
};

void validate(const SweepSpec& spec);

struct BoundaryPoint {
    double x;
    double y;
};

/// Sweep result: compared value and gain verdict per cell, plus the gain
/// boundary, refined per column by bisection in the y parameter to 1e-6.
/// Cell (ix, iy) is stored at ix * y.steps + iy.
struct RegionGrid {
    SweepSpec spec;
    std::vector<double> values;
    std::vector<std::uint8_t> gain;
    std::vector<BoundaryPoint> boundary;

    double value_at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * spec.y.steps + iy]; }
    bool gain_at(int ix, int iy) const { return gain[static_cast<std::size_t>(ix) * spec.y.steps + iy] != 0; }
};

RegionGrid run_sweep(const SweepSpec& spec, int threads = 1);

/// Flat numeric table; the unit of CSV output.
struct Dataset {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Dataset grid_dataset(std::string name, const RegionGrid& grid);
Dataset boundary_dataset(std::string name, const RegionGrid& grid);

/// CSV with a `# spec_version` comment line, a header row, and doubles
/// printed with 17 significant digits.
void write_csv(std::ostream& os, const Dataset& dataset);
std::string format_double(double value);

/// Ready-made datasets for the standard figures:
///   fig2 — eta_e ratio grid, N = 3, xi = 0, mu = -1
///   fig3 — eta_e vs eps curves for N = 0..3 plus the N -> inf limit, eta = 0.6
///   fig4 — gain boundaries for xi in {0, 0.01, 0.1}, mu = -1, p = 1/2
///   fig5 — gain boundaries for mu in {-1, -0.5, 0, 0.5, 1}, xi = 0, p = 1/2
///   fig6 — gain boundaries for p in {0.1..0.9}, xi = 0, mu = 0
///   fig7 — weak-detector (eta = 1e-3) gain boundaries in (A, B) per p
struct FigurePreset {
    std::string id;
    nlohmann::json metadata;
    std::vector<Dataset> datasets;
};

const std::vector<std::string>& figure_ids();
FigurePreset figure_preset(const std::string& id, int threads = 1);

/// Minimal gain eps per family member over a fixed eta grid, with the
/// qualitative orderings checked: the xi boundary rises with xi, mu = -1
/// beats mu = 0 beats mu = 1, the p boundary falls as p grows and the
/// p in {0.4, 0.5, 0.6} curves stay within 0.05 of each other.
enum class Family { xi, mu, p };

struct MonotonicityReport {
    Family family;
    std::vector<double> eta_grid;
    std::vector<double> members;
    std::vector<std::vector<double>> eps_min; // [member][eta], NaN if no gain by eps = 1
    bool orderings_hold = false;
    std::vector<std::string> notes;
};

MonotonicityReport boundary_monotonicity_report(Family family);

} // namespace cascade
