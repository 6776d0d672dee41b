#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace cascade {

// Shared numeric tolerances for state invariants.
inline constexpr double kEntryTolerance = 1e-12;
inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kPsdTolerance = 1e-9;

/// Classical probability distribution over the photon-occupation bitstrings
/// of a k-mode register. Bit b of an index is the occupation of mode b;
/// mode 0 is the least significant bit. Immutable after construction.
class PopulationVector {
public:
    PopulationVector(int modes, std::vector<double> probs);

    /// Probability 1 on the given occupation bitstring. The string is written
    /// most-significant mode first, so pure_state(2, "10") occupies mode 1.
    static PopulationVector pure_state(int modes, std::string_view occupation);

    int modes() const { return modes_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t index) const { return probs_[index]; }
    const std::vector<double>& probs() const { return probs_; }

private:
    int modes_;
    std::vector<double> probs_;
};

/// Product distribution; `a` occupies the low-order modes of the result.
PopulationVector tensor(const PopulationVector& a, const PopulationVector& b);

/// Sums probabilities over all modes not listed in `keep`. The kept modes are
/// renumbered in increasing order of their original index.
PopulationVector marginalize(const PopulationVector& v, const std::vector<int>& keep);

/// 4x4 complex density matrix over the two-mode basis {|00>,|01>,|10>,|11>}
/// (same index convention as PopulationVector). Used by the verification
/// oracle only; the main pipeline works with populations.
class DensityMatrix4 {
public:
    using Matrix = std::array<std::array<std::complex<double>, 4>, 4>;

    /// Validates Hermiticity (1e-12 elementwise), unit trace (1e-9) and
    /// positive semidefiniteness (smallest eigenvalue >= -1e-9).
    explicit DensityMatrix4(Matrix entries);

    const Matrix& entries() const { return entries_; }
    std::complex<double> operator()(int row, int col) const { return entries_[row][col]; }

private:
    Matrix entries_;
};

/// Two-mode population vector holding the real diagonal of `dm`. Entries in
/// [-1e-9, 0) are clamped to zero; more negative diagonals are rejected.
PopulationVector diagonal_of(const DensityMatrix4& dm);

} // namespace cascade
