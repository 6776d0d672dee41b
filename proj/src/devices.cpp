#include "cascade/devices.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cascade {

namespace {

void require_range(double value, double lo, double hi, const char* name) {
    if (!(value >= lo && value <= hi)) {
        throw std::invalid_argument(std::string(name) + " must be in [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "] (got " + std::to_string(value) +
                                    ")");
    }
}

std::array<double, 4> noise_populations(double mu) {
    std::array<double, 4> n;
    n.fill((1.0 - std::abs(mu)) / 4.0);
    if (mu > 0.0) {
        n[3] += mu;
    } else {
        n[0] += -mu;
    }
    return n;
}

PopulationVector two_mode_output(const CopierKernel& k, const PopulationVector& input) {
    if (input.modes() != 1) {
        throw std::invalid_argument("copier input must be a single-mode state");
    }
    std::vector<double> probs(4);
    for (int j = 0; j < 4; ++j) {
        probs[j] = input[0] * k.from_vacuum[j] + input[1] * k.from_photon[j];
    }
    return PopulationVector(2, std::move(probs));
}

} // namespace

DetectorModel::DetectorModel(double eta_in, double xi_in) : eta(eta_in), xi(xi_in) {
    require_range(eta, 0.0, 1.0, "eta");
    if (!(xi >= 0.0 && xi < 1.0)) {
        throw std::invalid_argument("xi must be in [0, 1) (got " + std::to_string(xi) + ")");
    }
}

ClickProbabilities click_probs(const DetectorModel& d) {
    return {d.eta, d.eta * d.xi};
}

NoisyWZ::NoisyWZ(double eps_in, double mu_in) : eps(eps_in), mu(mu_in) {
    require_range(eps, 0.0, 1.0, "eps");
    require_range(mu, -1.0, 1.0, "mu");
}

GeneralAB::GeneralAB(double a1_in, double a2_in, double b1_in, double b2_in)
    : a1(a1_in), a2(a2_in), b1(b1_in), b2(b2_in) {
    for (auto [v, name] : {std::pair{a1, "a1"}, {a2, "a2"}, {b1, "b1"}, {b2, "b2"}}) {
        if (!(v >= -kEntryTolerance)) {
            throw std::invalid_argument(std::string(name) + " must be >= 0 (got " +
                                        std::to_string(v) + ")");
        }
    }
    if (a1 + a2 > 1.0 + kEntryTolerance) {
        throw std::invalid_argument("a1 + a2 must be <= 1 (got " + std::to_string(a1 + a2) + ")");
    }
    if (b1 + b2 > 1.0 + kEntryTolerance) {
        throw std::invalid_argument("b1 + b2 must be <= 1 (got " + std::to_string(b1 + b2) + ")");
    }
}

PopulationVector noise_state(double mu) {
    require_range(mu, -1.0, 1.0, "mu");
    auto n = noise_populations(mu);
    return PopulationVector(2, std::vector<double>(n.begin(), n.end()));
}

CopierKernel copier_kernel(const CopierModel& copier) {
    return std::visit(
        [](const auto& c) -> CopierKernel {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, NoisyWZ>) {
                const auto n = noise_populations(c.mu);
                CopierKernel k;
                for (int j = 0; j < 4; ++j) {
                    k.from_photon[j] = (1.0 - c.eps) * n[j];
                    k.from_vacuum[j] = (1.0 - c.eps) * n[j];
                }
                k.from_photon[3] += c.eps;
                k.from_vacuum[0] += c.eps;
                return k;
            } else if constexpr (std::is_same_v<T, GeneralAB>) {
                const double ma = 0.5 * (1.0 - c.a1 - c.a2);
                const double mb = 0.5 * (1.0 - c.b1 - c.b2);
                return {{c.b2, mb, mb, c.b1}, {c.a2, ma, ma, c.a1}};
            } else {
                const auto cp = click_probs(c.detector);
                return {{1.0 - cp.p_click_given_vacuum, 0.0, 0.0, cp.p_click_given_vacuum},
                        {1.0 - cp.p_click_given_photon, 0.0, 0.0, cp.p_click_given_photon}};
            }
        },
        copier);
}

PopulationVector apply_noisy_wz(const NoisyWZ& c, const PopulationVector& input) {
    return two_mode_output(copier_kernel(c), input);
}

PopulationVector apply_general_ab(const GeneralAB& c, const PopulationVector& input) {
    return two_mode_output(copier_kernel(c), input);
}

PopulationVector apply_copier(const CopierModel& c, const PopulationVector& input) {
    return two_mode_output(copier_kernel(c), input);
}

std::pair<double, double> ab_parameters(const GeneralAB& c) {
    return {1.0 + c.a1 - c.a2, 1.0 + c.b1 - c.b2};
}

std::pair<double, double> ab_from_eps_mu(double eps, double mu) {
    require_range(eps, 0.0, 1.0, "eps");
    require_range(mu, -1.0, 1.0, "mu");
    return {1.0 + mu + eps * (1.0 - mu), 1.0 + mu - eps * (1.0 + mu)};
}

GeneralAB general_ab_from_noisy_wz(const NoisyWZ& c) {
    const auto k = copier_kernel(CopierModel(c));
    return GeneralAB(k.from_photon[3], k.from_photon[0], k.from_vacuum[3], k.from_vacuum[0]);
}

GeneralAB general_ab_canonical(double A, double B) {
    require_range(A, 0.0, 2.0, "A");
    require_range(B, 0.0, 2.0, "B");
    return GeneralAB(std::max(A - 1.0, 0.0), std::max(1.0 - A, 0.0), std::max(B - 1.0, 0.0),
                     std::max(1.0 - B, 0.0));
}

double classical_copier_count_prob(double eta) {
    require_range(eta, 0.0, 1.0, "eta");
    return eta * eta * (2.0 - eta);
}

std::vector<double> measure_all(const PopulationVector& v, const DetectorModel& d) {
    const auto cp = click_probs(d);
    const double pc[2] = {cp.p_click_given_vacuum, cp.p_click_given_photon};
    // Start from the occupation distribution and convert one mode at a time
    // into the corresponding click bit.
    std::vector<double> out = v.probs();
    for (int b = 0; b < v.modes(); ++b) {
        const std::size_t bit = std::size_t{1} << b;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i & bit) continue;
            const double w0 = out[i];
            const double w1 = out[i | bit];
            out[i] = (1.0 - pc[0]) * w0 + (1.0 - pc[1]) * w1;
            out[i | bit] = pc[0] * w0 + pc[1] * w1;
        }
    }
    return out;
}

} // namespace cascade
