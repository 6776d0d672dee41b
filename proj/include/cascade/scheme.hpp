#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "cascade/devices.hpp"
#include "cascade/popstate.hpp"

namespace cascade {

/// Largest layer count served by exact enumeration (16 modes, 65536 outcomes).
inline constexpr int kMaxLayers = 4;

/// An N-layer copier cascade: the input passes through N generations of
/// copiers (2^N modes at the end), followed by one detector per mode.
/// N = 0 is the bare detector.
struct SchemeConfig {
    int layers;
    CopierModel copier;
    DetectorModel detector;
    double prior; // a priori photon probability

    SchemeConfig(int layers, CopierModel copier, DetectorModel detector, double prior);
};

/// Exact conditional outcome distributions P(outcome | input) of a scheme.
/// Outcomes are indexed by the click bitstring over the 2^N detectors, with
/// detector 0 in the least significant bit. Detector d sits at the leaf whose
/// root-to-leaf branch choices (original branch = 0, dummy branch = 1), read
/// first layer first, spell d in binary, most significant bit first.
class OutcomeTable {
public:
    OutcomeTable(int layers, std::vector<double> p_given_photon,
                 std::vector<double> p_given_vacuum);

    int layers() const { return layers_; }
    std::size_t outcomes() const { return p_given_photon_.size(); }
    const std::vector<double>& p_given_photon() const { return p_given_photon_; }
    const std::vector<double>& p_given_vacuum() const { return p_given_vacuum_; }

private:
    int layers_;
    std::vector<double> p_given_photon_;
    std::vector<double> p_given_vacuum_;
};

nlohmann::json outcome_table_to_json(const OutcomeTable& table);
OutcomeTable outcome_table_from_json(const nlohmann::json& j);

OutcomeTable build_outcome_table(const SchemeConfig& cfg);

/// Closed forms for the idealized cascade (eps = 1, xi = 0, mu = -1):
/// P(count | photon) = 1 - (1-eta)^(2^N) and
/// P(no photon | no count) = (1-p) / (1 - p + p (1-eta)^(2^N)).
struct SimpleSchemeProbs {
    double p_count_given_photon;
    double p_nophoton_given_nocount;
};

SimpleSchemeProbs simple_scheme_probs(double eta, int layers, double p);

/// Trial-by-trial Monte Carlo record of a scheme. Conditional frequencies
/// converge to the exact OutcomeTable. The generator is mt19937_64 seeded
/// directly with `seed`; each uniform consumes one 64-bit draw (top 53 bits).
/// Draw order per trial: input, then depth-first through the copier tree
/// (copier branch before subtrees, original branch first), detectors at the
/// leaves. The stream is bit-identical across platforms.
struct SampleResult {
    int layers = 0;
    std::uint64_t trials = 0;
    std::vector<std::uint8_t> inputs;                // per-trial input (1 = photon)
    std::vector<std::uint64_t> counts_given_photon;  // outcome counts by input
    std::vector<std::uint64_t> counts_given_vacuum;

    std::uint64_t photon_trials() const;
    std::uint64_t vacuum_trials() const;
    std::vector<double> freq_given_photon() const;
    std::vector<double> freq_given_vacuum() const;
    /// Frequencies as a validated OutcomeTable; requires both inputs observed.
    OutcomeTable empirical_table() const;
};

SampleResult sample_outcomes(const SchemeConfig& cfg, std::uint64_t trials, std::uint64_t seed);

/// 2x2 complex density matrix over {|0>, |1>} of a single mode.
using DensityMatrix2 = std::array<std::array<std::complex<double>, 2>, 2>;

/// Full density-matrix reference for the one-layer perfect-copier scheme:
/// embeds input (x) |0><0|, applies the CNOT unitary exactly (control = input
/// mode, target = dummy mode), then measures both modes. Outcome index =
/// click(mode 0) + 2 * click(mode 1).
struct CnotOracleResult {
    DensityMatrix4 state_after_copier;
    std::array<double, 4> outcome_probs;
};

CnotOracleResult cnot_oracle(const DensityMatrix2& input, const DetectorModel& detector);

} // namespace cascade
