#include "cascade/scheme.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace cascade {

namespace {

void check_row(const std::vector<double>& row, std::size_t expected) {
    if (row.size() != expected) {
        throw std::invalid_argument("outcome row must have 2^(2^layers) entries");
    }
    double sum = 0.0;
    for (double v : row) {
        if (!(v >= -kEntryTolerance)) {
            throw std::invalid_argument("negative outcome probability " + std::to_string(v));
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument("outcome row sums to " + std::to_string(sum) + ", expected 1");
    }
}

/// Applies the copier to mode `m` of a k-mode population vector. Mode m keeps
/// the original-branch copy; the dummy-branch copy is appended as mode k.
std::vector<double> apply_copier_to_mode(const std::vector<double>& in, int k, int m,
                                         const CopierKernel& kernel) {
    std::vector<double> out(in.size() << 1, 0.0);
    const std::size_t mbit = std::size_t{1} << m;
    const std::size_t newbit = std::size_t{1} << k;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double w = in[i];
        if (w == 0.0) continue;
        const auto& branch = (i & mbit) ? kernel.from_photon : kernel.from_vacuum;
        const std::size_t base = i & ~mbit;
        for (int c = 0; c < 4; ++c) {
            if (branch[c] == 0.0) continue;
            const std::size_t j = base | ((c & 1) ? mbit : 0) | ((c >> 1) ? newbit : 0);
            out[j] += w * branch[c];
        }
    }
    return out;
}

std::vector<double> outcome_row(const SchemeConfig& cfg, int input_bit) {
    const CopierKernel kernel = copier_kernel(cfg.copier);
    std::vector<double> state = {input_bit ? 0.0 : 1.0, input_bit ? 1.0 : 0.0};
    // paths[m] = branch choices from root to mode m, first layer first.
    std::vector<std::vector<std::uint8_t>> paths(1);
    for (int layer = 0; layer < cfg.layers; ++layer) {
        const int mode_count = 1 << layer;
        for (int m = 0; m < mode_count; ++m) {
            state = apply_copier_to_mode(state, mode_count + m, m, kernel);
            paths.push_back(paths[m]);
            paths[m].push_back(0);
            paths.back().push_back(1);
        }
    }

    std::vector<double> clicks =
        measure_all(PopulationVector(1 << cfg.layers, std::move(state)), cfg.detector);

    // Reorder click bits from construction order to detector order.
    std::vector<int> detector_of_mode(paths.size());
    for (std::size_t m = 0; m < paths.size(); ++m) {
        int d = 0;
        for (std::uint8_t b : paths[m]) d = (d << 1) | b;
        detector_of_mode[m] = d;
    }
    std::vector<double> row(clicks.size(), 0.0);
    for (std::size_t o = 0; o < clicks.size(); ++o) {
        std::size_t mapped = 0;
        for (std::size_t m = 0; m < paths.size(); ++m) {
            mapped |= ((o >> m) & 1u) << detector_of_mode[m];
        }
        row[mapped] = clicks[o];
    }
    return row;
}

double unit_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

int draw_kernel_branch(std::mt19937_64& gen, const std::array<double, 4>& probs) {
    const double u = unit_double(gen);
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        acc += probs[c];
        if (u < acc) return c;
    }
    return 3;
}

} // namespace

SchemeConfig::SchemeConfig(int layers_in, CopierModel copier_in, DetectorModel detector_in,
                           double prior_in)
    : layers(layers_in), copier(std::move(copier_in)), detector(detector_in), prior(prior_in) {
    if (layers < 0 || layers > kMaxLayers) {
        throw std::invalid_argument("layers must be in [0, " + std::to_string(kMaxLayers) +
                                    "] (got " + std::to_string(layers) + ")");
    }
    if (!(prior >= 0.0 && prior <= 1.0)) {
        throw std::invalid_argument("p must be in [0, 1] (got " + std::to_string(prior) + ")");
    }
}

OutcomeTable::OutcomeTable(int layers, std::vector<double> p_given_photon,
                           std::vector<double> p_given_vacuum)
    : layers_(layers),
      p_given_photon_(std::move(p_given_photon)),
      p_given_vacuum_(std::move(p_given_vacuum)) {
    if (layers_ < 0 || layers_ > kMaxLayers) {
        throw std::invalid_argument("layers must be in [0, " + std::to_string(kMaxLayers) + "]");
    }
    const std::size_t expected = std::size_t{1} << (std::size_t{1} << layers_);
    check_row(p_given_photon_, expected);
    check_row(p_given_vacuum_, expected);
}

nlohmann::json outcome_table_to_json(const OutcomeTable& table) {
    return nlohmann::json{{"layers", table.layers()},
                          {"p_given_photon", table.p_given_photon()},
                          {"p_given_vacuum", table.p_given_vacuum()}};
}

OutcomeTable outcome_table_from_json(const nlohmann::json& j) {
    return OutcomeTable(j.at("layers").get<int>(),
                        j.at("p_given_photon").get<std::vector<double>>(),
                        j.at("p_given_vacuum").get<std::vector<double>>());
}

OutcomeTable build_outcome_table(const SchemeConfig& cfg) {
    return OutcomeTable(cfg.layers, outcome_row(cfg, 1), outcome_row(cfg, 0));
}

SimpleSchemeProbs simple_scheme_probs(double eta, int layers, double p) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("eta must be in [0, 1]");
    }
    if (layers < 0) {
        throw std::invalid_argument("layers must be >= 0");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must be in [0, 1]");
    }
    double miss = 1.0 - eta; // (1-eta)^(2^N) by N squarings
    for (int i = 0; i < layers; ++i) miss *= miss;
    const double denom = 1.0 - p + p * miss;
    return {1.0 - miss, denom > 0.0 ? (1.0 - p) / denom
                                    : std::numeric_limits<double>::quiet_NaN()};
}

std::uint64_t SampleResult::photon_trials() const {
    std::uint64_t n = 0;
    for (auto c : counts_given_photon) n += c;
    return n;
}

std::uint64_t SampleResult::vacuum_trials() const {
    std::uint64_t n = 0;
    for (auto c : counts_given_vacuum) n += c;
    return n;
}

namespace {
std::vector<double> to_freq(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
    std::vector<double> f(counts.size(), 0.0);
    if (total == 0) return f;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return f;
}
} // namespace

std::vector<double> SampleResult::freq_given_photon() const {
    return to_freq(counts_given_photon, photon_trials());
}

std::vector<double> SampleResult::freq_given_vacuum() const {
    return to_freq(counts_given_vacuum, vacuum_trials());
}

OutcomeTable SampleResult::empirical_table() const {
    if (photon_trials() == 0 || vacuum_trials() == 0) {
        throw std::runtime_error("empirical table requires at least one trial of each input");
    }
    return OutcomeTable(layers, freq_given_photon(), freq_given_vacuum());
}

SampleResult sample_outcomes(const SchemeConfig& cfg, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    const CopierKernel kernel = copier_kernel(cfg.copier);
    const auto cp = click_probs(cfg.detector);
    const double pclick[2] = {cp.p_click_given_vacuum, cp.p_click_given_photon};

    std::mt19937_64 gen(seed);
    SampleResult result;
    result.layers = cfg.layers;
    result.trials = trials;
    result.inputs.resize(trials);
    const std::size_t n_outcomes = std::size_t{1} << (std::size_t{1} << cfg.layers);
    result.counts_given_photon.assign(n_outcomes, 0);
    result.counts_given_vacuum.assign(n_outcomes, 0);

    // Depth-first simulation of one subtree; returns its click bitstring.
    auto simulate = [&](auto&& self, int depth, int x) -> std::size_t {
        if (depth == 0) {
            return unit_double(gen) < pclick[x] ? 1u : 0u;
        }
        const int c = draw_kernel_branch(gen, x ? kernel.from_photon : kernel.from_vacuum);
        const std::size_t low = self(self, depth - 1, c & 1);
        const std::size_t high = self(self, depth - 1, c >> 1);
        return low | (high << (std::size_t{1} << (depth - 1)));
    };

    for (std::uint64_t t = 0; t < trials; ++t) {
        const int input = unit_double(gen) < cfg.prior ? 1 : 0;
        result.inputs[t] = static_cast<std::uint8_t>(input);
        const std::size_t outcome = simulate(simulate, cfg.layers, input);
        (input ? result.counts_given_photon : result.counts_given_vacuum)[outcome] += 1;
    }
    return result;
}

CnotOracleResult cnot_oracle(const DensityMatrix2& input, const DetectorModel& detector) {
    std::complex<double> trace = input[0][0] + input[1][1];
    if (std::abs(input[0][1] - std::conj(input[1][0])) > kEntryTolerance ||
        std::abs(input[0][0].imag()) > kEntryTolerance ||
        std::abs(input[1][1].imag()) > kEntryTolerance) {
        throw std::invalid_argument("input density matrix is not Hermitian");
    }
    if (std::abs(trace - 1.0) > kSumTolerance) {
        throw std::invalid_argument("input density matrix trace is not 1");
    }
    // 2x2 Hermitian PSD check via trace/determinant.
    const double det =
        (input[0][0] * input[1][1] - input[0][1] * input[1][0]).real();
    const double disc = std::max(trace.real() * trace.real() - 4.0 * det, 0.0);
    if (0.5 * (trace.real() - std::sqrt(disc)) < -kPsdTolerance) {
        throw std::invalid_argument("input density matrix is not positive semidefinite");
    }

    // rho (x) |0><0| with the dummy in mode 1; basis index = bit0 + 2*bit1.
    DensityMatrix4::Matrix joint{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) joint[i][j] = input[i][j];
    }
    // CNOT (control mode 0, target mode 1) permutes basis states 1 <-> 3.
    constexpr int perm[4] = {0, 3, 2, 1};
    DensityMatrix4::Matrix copied{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) copied[perm[i]][perm[j]] = joint[i][j];
    }
    DensityMatrix4 state(copied);

    const auto cp = click_probs(detector);
    const double pclick[2] = {cp.p_click_given_vacuum, cp.p_click_given_photon};
    std::array<double, 4> outcome{};
    for (int o = 0; o < 4; ++o) {
        double total = 0.0;
        for (int x = 0; x < 4; ++x) {
            const double p0 = (o & 1) ? pclick[x & 1] : 1.0 - pclick[x & 1];
            const double p1 = (o & 2) ? pclick[x >> 1] : 1.0 - pclick[x >> 1];
            total += state(x, x).real() * p0 * p1;
        }
        outcome[o] = total;
    }
    return {state, outcome};
}

} // namespace cascade
