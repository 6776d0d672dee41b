#pragma once

#include <array>
#include <utility>
#include <variant>
#include <vector>

#include "cascade/popstate.hpp"

namespace cascade {

/// Single-photon detector with quantum efficiency eta and dark-count
/// parameter xi. A click occurs with probability eta on a photon and
/// eta*xi on vacuum.
struct DetectorModel {
    double eta;
    double xi;

    DetectorModel(double eta, double xi);
};

struct ClickProbabilities {
    double p_click_given_photon;
    double p_click_given_vacuum;
};

ClickProbabilities click_probs(const DetectorModel& d);

/// Copier that produces two perfect copies with probability eps and otherwise
/// a fixed failure state set by mu: vacuum at mu=-1, uniform noise at mu=0,
/// two photons at mu=+1, linear mixes in between.
struct NoisyWZ {
    double eps;
    double mu;

    NoisyWZ(double eps, double mu);
};

/// Symmetric two-copy map given by its output populations for each basis
/// input: photon -> a1|11> + a2|00> + (1-a1-a2)/2 (|01>+|10>), vacuum the
/// same with b1, b2. Coherence terms are dropped; they do not contribute to
/// population measurements.
struct GeneralAB {
    double a1;
    double a2;
    double b1;
    double b2;

    GeneralAB(double a1, double a2, double b1, double b2);
};

/// Measure-and-prepare copier: measures the input with its own detector and
/// prepares two photons on a click, two vacua otherwise.
struct ClassicalCopier {
    DetectorModel detector;
};

using CopierModel = std::variant<NoisyWZ, GeneralAB, ClassicalCopier>;

/// Two-mode output populations for each basis input, indexed by
/// (original-branch bit) + 2*(dummy-branch bit).
struct CopierKernel {
    std::array<double, 4> from_vacuum;
    std::array<double, 4> from_photon;
};

CopierKernel copier_kernel(const CopierModel& copier);

/// Failure-output populations of the noisy copier for a given mu.
PopulationVector noise_state(double mu);

PopulationVector apply_noisy_wz(const NoisyWZ& c, const PopulationVector& input);
PopulationVector apply_general_ab(const GeneralAB& c, const PopulationVector& input);
PopulationVector apply_copier(const CopierModel& c, const PopulationVector& input);

/// The pair (A, B) = (1 + a1 - a2, 1 + b1 - b2); both lie in [0, 2].
std::pair<double, double> ab_parameters(const GeneralAB& c);

/// (A, B) of the population map induced by NoisyWZ(eps, mu):
/// A = 1 + mu + eps(1 - mu), B = 1 + mu - eps(1 + mu).
std::pair<double, double> ab_from_eps_mu(double eps, double mu);

/// Population-map equivalent of a noisy copier, for cross-checks.
GeneralAB general_ab_from_noisy_wz(const NoisyWZ& c);

/// Representative populations for a target (A, B) pair: all non-copy weight
/// is assigned to the |01>/|10> populations.
GeneralAB general_ab_canonical(double A, double B);

/// P(at least one count | photon) for the measure-and-prepare copier feeding
/// two detectors of the same efficiency: eta^2 (2 - eta).
double classical_copier_count_prob(double eta);

/// Joint click distribution of one detector per mode. Outcome bit b of the
/// returned index is the click of the detector on mode b; the result has one
/// entry per outcome bitstring and sums to 1.
std::vector<double> measure_all(const PopulationVector& v, const DetectorModel& d);

} // namespace cascade
