#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subdetect/rng.hpp"

namespace subdetect {

struct WeightSolution; // extremal.hpp

/// Noise standard-deviation schedule sigma_k = |k|^degree for |k| >= 1,
/// sigma_0 = 1. Symmetric in k, strictly positive.
struct SigmaSchedule {
    double degree = 0.0;

    double at(long k) const;
};

inline double sigma_at(const SigmaSchedule& schedule, long k) { return schedule.at(k); }

/// One experiment scenario: matrix sizes, active submatrix sizes, noise
/// level, ill-posedness degree, smoothness, energy radius, stored frequency
/// half-width and master seed.
struct ProblemConfig {
    int M = 1;
    int N = 1;
    int m = 1;
    int n = 1;
    double epsilon = 1.0;
    double s = 0.0;
    double tau = 1.0;
    double r = 0.1;
    int band = 1;
    std::uint64_t seed = 0;

    double p() const { return static_cast<double>(m) / M; }
    double q() const { return static_cast<double>(n) / N; }
    SigmaSchedule sigma() const { return SigmaSchedule{s}; }

    /// Throws config_error when any invariant fails.
    void validate() const;

    /// Flat key=value round-trip. Keys are exactly
    /// M,N,m,n,epsilon,s,tau,r,band,seed; unknown or missing keys are errors.
    static ProblemConfig from_kv_text(const std::string& text);
    static ProblemConfig from_kv_file(const std::string& path);
    std::string to_kv_text() const;
    void to_kv_file(const std::string& path) const;
};

/// Active rows A and columns B, 1-based, sorted ascending.
struct SupportMask {
    std::vector<int> rows;
    std::vector<int> cols;

    bool operator==(const SupportMask&) const = default;
};

/// Uniform draw over supports with |A|=m, |B|=n; rows and columns
/// independent. Deterministic given the stream.
SupportMask sample_support(const ProblemConfig& config, RngStream& rng);

/// Signal coefficients for the active cells. Cell (A[ai], B[bj]) owns the
/// slice at cell index ai*n+bj; within a cell k runs -band..band.
struct SignalBank {
    int band = 0;
    int cells = 0;
    std::vector<double> coeffs; // cells x (2*band+1)

    double at(int cell, int k) const { return coeffs[static_cast<std::size_t>(cell) * (2 * band + 1) + (k + band)]; }
    double& at(int cell, int k) { return coeffs[static_cast<std::size_t>(cell) * (2 * band + 1) + (k + band)]; }
};

struct SignRule {
    enum class Kind { plus, rademacher };
    Kind kind = Kind::plus;
    std::uint64_t seed = 0;

    static SignRule plus() { return {Kind::plus, 0}; }
    static SignRule rademacher(std::uint64_t seed) { return {Kind::rademacher, seed}; }
};

/// Least-favorable signal bank: every active cell carries +/- theta*_k.
/// `plus` keeps all signs positive, `rademacher` flips each (cell, k)
/// independently. Throws infeasible_error when the solution band exceeds
/// config.band.
SignalBank worst_case_signal(const WeightSolution& solution, const ProblemConfig& config,
                             const SignRule& sign_rule);

struct SignalClassReport {
    bool ok = true;
    int violating_cells = 0;
    double worst_ellipsoid_excess = 0.0; // ellipsoid sum minus 1, max over cells
    double worst_energy_deficit = 0.0;   // r^2 minus energy, max over cells
};

/// Per-cell check of the smoothness-class membership: ellipsoid sum at most
/// 1 and energy at least r^2, both within `rel_tol` relative slack.
SignalClassReport validate_signal_class(const SignalBank& bank, double tau, double r,
                                        double rel_tol = 1e-8);

/// Observations x_{ij,k} = xi_ij theta_{ij,k} + epsilon sigma_k eta with the
/// noise schedule that generated them. k runs -band..band.
struct ObservationTensor {
    int M = 0;
    int N = 0;
    int band = 0;
    double epsilon = 1.0;
    SigmaSchedule sigma;
    std::uint64_t flags = 0; // bit 0: generated under the alternative
    std::uint64_t seed = 0;

    std::vector<double> data; // ((i-1)*N + (j-1))*(2*band+1) + (k+band)

    double at(int i, int j, int k) const {
        return data[(static_cast<std::size_t>(i - 1) * N + (j - 1)) * (2 * band + 1) + (k + band)];
    }
    double& at(int i, int j, int k) {
        return data[(static_cast<std::size_t>(i - 1) * N + (j - 1)) * (2 * band + 1) + (k + band)];
    }

    /// Little-endian binary dump: header of five 64-bit words
    /// (M, N, band, flags, seed) followed by the row-major doubles.
    void dump_binary(const std::string& path) const;
    static ObservationTensor load_binary(const std::string& path, double epsilon, double s);
};

struct Alternative {
    SupportMask support;
    SignalBank bank;
};

/// Draws the tensor under the null (alt == nullptr) or under the given
/// alternative. Noise order is fixed: i, then j, then k ascending.
ObservationTensor generate_observations(const ProblemConfig& config, const Alternative* alt,
                                        RngStream& rng);

} // namespace subdetect
