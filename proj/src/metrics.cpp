#include "cascade/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cascade {

namespace {

constexpr double kInfoTolerance = 1e-9;
constexpr double kBisectTolerance = 1e-10;

void require_unit(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must be in [0, 1] (got " +
                                    std::to_string(value) + ")");
    }
}

double xlog2x(double x) {
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

double channel_information(const std::vector<double>& row1, const std::vector<double>& row0,
                           double p) {
    double total = 0.0;
    for (std::size_t j = 0; j < row1.size(); ++j) {
        const double pj = p * row1[j] + (1.0 - p) * row0[j];
        if (p > 0.0 && row1[j] > 0.0) total += p * row1[j] * std::log2(row1[j] / pj);
        if (p < 1.0 && row0[j] > 0.0) total += (1.0 - p) * row0[j] * std::log2(row0[j] / pj);
    }
    // Clamp rounding residue into [0, H2(p)].
    if (total < 0.0 && total > -kInfoTolerance) total = 0.0;
    const double h = binary_entropy(p);
    if (total > h && total < h + kInfoTolerance) total = h;
    return total;
}

} // namespace

double binary_entropy(double p) {
    require_unit(p, "p");
    return -xlog2x(p) - xlog2x(1.0 - p);
}

double mutual_information(const OutcomeTable& table, double p) {
    require_unit(p, "p");
    return channel_information(table.p_given_photon(), table.p_given_vacuum(), p);
}

double base_info(double eta, double p) {
    require_unit(eta, "eta");
    require_unit(p, "p");
    return channel_information({1.0 - eta, eta}, {1.0, 0.0}, p);
}

std::optional<double> effective_efficiency(double i_m, double p) {
    require_unit(p, "p");
    if (p == 0.0 || p == 1.0) return std::nullopt;
    const double h = binary_entropy(p);
    if (i_m < -kInfoTolerance || i_m > h + kInfoTolerance) {
        throw std::invalid_argument("i_m = " + std::to_string(i_m) +
                                    " outside [0, H2(p) = " + std::to_string(h) + "]");
    }
    if (i_m <= 0.0) return 0.0;
    if (i_m >= h - kBisectTolerance) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > kBisectTolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        (base_info(mid, p) < i_m ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double eta_e_closed_form(double eps, double eta) {
    require_unit(eps, "eps");
    require_unit(eta, "eta");
    return eps * (1.0 - (1.0 - eta) * (1.0 - eta));
}

double eta_e_recursion(double eps, double eta, int layers) {
    if (layers < 0) {
        throw std::invalid_argument("layers must be >= 0");
    }
    require_unit(eps, "eps");
    require_unit(eta, "eta");
    double value = eta;
    for (int i = 0; i < layers; ++i) value = eta_e_closed_form(eps, value);
    return value;
}

MLResult ml_estimate(const OutcomeTable& table, double p) {
    require_unit(p, "p");
    const auto& row1 = table.p_given_photon();
    const auto& row0 = table.p_given_vacuum();
    MLResult result;
    result.estimator_map.resize(row1.size());
    bool any0 = false;
    bool any1 = false;
    for (std::size_t j = 0; j < row1.size(); ++j) {
        const double joint1 = p * row1[j];
        const double joint0 = (1.0 - p) * row0[j];
        const bool photon = joint1 > joint0; // tie resolves to vacuum
        result.estimator_map[j] = photon ? 1 : 0;
        (photon ? any1 : any0) = true;
        result.q += photon ? joint1 : joint0;
    }
    result.degenerate = !(any0 && any1);
    return result;
}

MLUsefulness ml_usefulness(double eps, double eta, double xi, double p) {
    require_unit(eps, "eps");
    require_unit(eta, "eta");
    require_unit(p, "p");
    if (!(xi >= 0.0 && xi < 1.0)) {
        throw std::invalid_argument("xi must be in [0, 1)");
    }
    // Limits where the click outcomes carry no weight at all; the bound
    // expressions below degenerate there.
    if (eta == 0.0 || (eps == 0.0 && xi == 0.0)) return MLUsefulness::degenerate;

    const double lower = xi * xi / (eps * (1.0 - xi * xi) + 2.0 * xi * xi);
    const double nx = 1.0 - eta * xi;
    const double upper =
        nx * nx / (2.0 * nx * nx - eps * eta * (2.0 - eta * (1.0 + xi)) * (1.0 - xi));
    if (!(p > lower) || !(p < upper)) return MLUsefulness::degenerate;

    // Posterior at a single click (one detector fired, the other did not).
    const double single1 = eps * eta * (1.0 - eta) + (1.0 - eps) * eta * xi * nx;
    const double single0 = eta * xi * nx;
    return p * single1 > (1.0 - p) * single0 ? MLUsefulness::count_means_photon
                                             : MLUsefulness::count_means_vacuum_like;
}

double q0_closed_form(double eta, double xi, double p) {
    return 1.0 - p + eta * (p - xi * (1.0 - p));
}

double q1_closed_form(double eps, double eta, double xi, double p) {
    return 1.0 - p - eta * xi * (1.0 - 2.0 * p) * (2.0 - eta * xi) +
           eps * eta * p * (2.0 - eta - xi * (2.0 - eta * xi));
}

bool ml_gain_condition(double eps, double eta, double xi, double p) {
    require_unit(eps, "eps");
    require_unit(eta, "eta");
    require_unit(p, "p");
    if (!(xi >= 0.0 && xi < 1.0)) {
        throw std::invalid_argument("xi must be in [0, 1)");
    }
    const double denom = p * (1.0 - xi) * (eta * (1.0 + xi) - 2.0);
    if (denom == 0.0) {
        throw std::domain_error("gain threshold undefined at p = 0");
    }
    const double threshold = (xi * (1.0 - eta * xi) * (2.0 * p - 1.0) - p * (1.0 - xi)) / denom;
    return eps > threshold;
}

double weak_detector_info(double eta, double p) {
    require_unit(eta, "eta");
    require_unit(p, "p");
    return -eta * xlog2x(p);
}

double ab_weak_info(double eta, double p, double A, double B) {
    require_unit(eta, "eta");
    require_unit(p, "p");
    if (!(A >= 0.0 && A <= 2.0)) throw std::invalid_argument("A must be in [0, 2]");
    if (!(B >= 0.0 && B <= 2.0)) throw std::invalid_argument("B must be in [0, 2]");
    return eta * (p * xlog2x(A) + (1.0 - p) * xlog2x(B) - xlog2x(p * A + (1.0 - p) * B));
}

InfoResult evaluate_info(const OutcomeTable& table, double p) {
    InfoResult result;
    result.i_m = mutual_information(table, p);
    if (p > 0.0 && p < 1.0) result.eta_e = effective_efficiency(result.i_m, p);
    return result;
}

} // namespace cascade
