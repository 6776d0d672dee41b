#include "cascade/popstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace cascade {

namespace {

void check_distribution(int modes, const std::vector<double>& probs) {
    if (modes < 1) {
        throw std::invalid_argument("modes must be >= 1 (got " + std::to_string(modes) + ")");
    }
    if (modes > 24) {
        throw std::invalid_argument("modes must be <= 24 (got " + std::to_string(modes) + ")");
    }
    if (probs.size() != (std::size_t{1} << modes)) {
        throw std::invalid_argument("probability array must have exactly 2^modes entries");
    }
    double sum = 0.0;
    for (double v : probs) {
        if (!(v >= -kEntryTolerance)) {
            throw std::invalid_argument("negative probability entry " + std::to_string(v));
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
}

} // namespace

PopulationVector::PopulationVector(int modes, std::vector<double> probs)
    : modes_(modes), probs_(std::move(probs)) {
    check_distribution(modes_, probs_);
}

PopulationVector PopulationVector::pure_state(int modes, std::string_view occupation) {
    if (static_cast<int>(occupation.size()) != modes) {
        throw std::invalid_argument("occupation bitstring must have exactly `modes` bits");
    }
    std::size_t index = 0;
    for (char c : occupation) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("occupation bitstring may contain only '0' and '1'");
        }
        index = (index << 1) | static_cast<std::size_t>(c - '0');
    }
    std::vector<double> probs(std::size_t{1} << modes, 0.0);
    probs[index] = 1.0;
    return PopulationVector(modes, std::move(probs));
}

PopulationVector tensor(const PopulationVector& a, const PopulationVector& b) {
    const int modes = a.modes() + b.modes();
    std::vector<double> probs(std::size_t{1} << modes, 0.0);
    for (std::size_t y = 0; y < b.size(); ++y) {
        if (b[y] == 0.0) continue;
        const std::size_t base = y << a.modes();
        for (std::size_t x = 0; x < a.size(); ++x) {
            probs[base | x] = a[x] * b[y];
        }
    }
    return PopulationVector(modes, std::move(probs));
}

PopulationVector marginalize(const PopulationVector& v, const std::vector<int>& keep) {
    if (keep.empty()) {
        throw std::invalid_argument("keep set must be nonempty");
    }
    std::vector<int> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("keep set contains duplicate mode indices");
    }
    for (int m : sorted) {
        if (m < 0 || m >= v.modes()) {
            throw std::invalid_argument("keep index " + std::to_string(m) + " out of range");
        }
    }
    const int out_modes = static_cast<int>(sorted.size());
    std::vector<double> probs(std::size_t{1} << out_modes, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t r = 0;
        for (int j = 0; j < out_modes; ++j) {
            r |= ((i >> sorted[j]) & 1u) << j;
        }
        probs[r] += v[i];
    }
    return PopulationVector(out_modes, std::move(probs));
}

DensityMatrix4::DensityMatrix4(Matrix entries) : entries_(entries) {
    std::complex<double> trace = 0.0;
    for (int i = 0; i < 4; ++i) {
        trace += entries_[i][i];
        for (int j = 0; j < 4; ++j) {
            if (std::abs(entries_[i][j] - std::conj(entries_[j][i])) > kEntryTolerance) {
                throw std::invalid_argument("density matrix is not Hermitian");
            }
        }
    }
    if (std::abs(trace - 1.0) > kSumTolerance) {
        throw std::invalid_argument("density matrix trace is not 1");
    }
    Eigen::Matrix4cd m;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = entries_[i][j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
        throw std::invalid_argument("density matrix is not positive semidefinite");
    }
}

PopulationVector diagonal_of(const DensityMatrix4& dm) {
    std::vector<double> probs(4);
    for (int i = 0; i < 4; ++i) {
        const double d = dm(i, i).real();
        if (d < -kPsdTolerance) {
            throw std::invalid_argument("diagonal entry " + std::to_string(d) + " below -1e-9");
        }
        probs[i] = std::max(d, 0.0);
    }
    return PopulationVector(2, std::move(probs));
}

} // namespace cascade
