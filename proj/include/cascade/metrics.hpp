#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cascade/scheme.hpp"

namespace cascade {

/// H2(p) in bits, with 0 log 0 = 0.
double binary_entropy(double p);

/// Shannon mutual information in bits between the binary input (photon prior
/// p) and the detection outcome, evaluated exactly from the table with the
/// convention 0 log(0/x) = 0.
double mutual_information(const OutcomeTable& table, double p);

/// Mutual information of the bare noiseless detector channel (xi = 0) at
/// efficiency eta; the baseline that defines effective efficiency.
double base_info(double eta, double p);

/// Inverts base_info(., p) by bisection on eta in [0, 1] to absolute
/// tolerance 1e-10. Undefined (nullopt) for p in {0, 1}; throws if i_m
/// exceeds H2(p) by more than 1e-9.
std::optional<double> effective_efficiency(double i_m, double p);

/// eps [1 - (1-eta)^2]: effective efficiency of one copier layer in the
/// noiseless case (xi = 0, mu = -1), valid for every prior.
double eta_e_closed_form(double eps, double eta);

/// N-fold iteration of eta <- eps [1 - (1-eta)^2]. For eps > 1/2 the
/// iteration approaches 2 - 1/eps.
double eta_e_recursion(double eps, double eta, int layers);

/// Maximum-likelihood estimate of the input from each outcome. Posterior ties
/// resolve to 0 (vacuum). q = sum_j max_i P(j|i) P_i is the success
/// probability; degenerate means the estimator ignores the outcome.
struct MLResult {
    std::vector<std::uint8_t> estimator_map;
    double q = 0.0;
    bool degenerate = false;
};

MLResult ml_estimate(const OutcomeTable& table, double p);

/// Regimes of the one-layer estimator (mu = -1 implied). Non-degenerate means
/// a double click implies photon and a double no-click implies vacuum; the
/// two useful regimes differ in how a single click is read.
enum class MLUsefulness {
    count_means_photon,
    count_means_vacuum_like,
    degenerate,
};

MLUsefulness ml_usefulness(double eps, double eta, double xi, double p);

/// Success probability of the bare-detector estimator in its useful regime:
/// Q(0) = 1 - p + eta [p - xi (1-p)].
double q0_closed_form(double eta, double xi, double p);

/// Success probability of the one-copier estimator in the count-means-photon
/// regime (mu = -1):
/// Q(1) = 1 - p - eta xi (1-2p)(2 - eta xi) + eps eta p [2 - eta - xi (2 - eta xi)].
double q1_closed_form(double eps, double eta, double xi, double p);

/// True iff Q(1) > Q(0) in the non-degenerate count-means-photon regime,
/// via the closed-form threshold on eps. At xi = 0 this reduces to
/// eps > 1/(2 - eta).
bool ml_gain_condition(double eps, double eta, double xi, double p);

/// Leading-order information of the bare detector for weak detectors:
/// I_o(eta, p) = -eta p log2 p.
double weak_detector_info(double eta, double p);

/// Weak-detector information of the one-copier scheme in terms of the copier
/// parameters (A, B), with x log2 x = 0 at x = 0:
/// eta [ p A log2 A + (1-p) B log2 B - (pA + (1-p)B) log2(pA + (1-p)B) ].
double ab_weak_info(double eta, double p, double A, double B);

/// Mutual information plus the equivalent noiseless-detector efficiency
/// (undefined for p in {0, 1}).
struct InfoResult {
    double i_m = 0.0;
    std::optional<double> eta_e;
};

InfoResult evaluate_info(const OutcomeTable& table, double p);

} // namespace cascade
