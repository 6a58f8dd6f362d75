#pragma once

#include <string>
#include <vector>

#include "subdetect/model.hpp"

namespace subdetect {

/// Solution of the max-min weight program: optimal weights w_k, least
/// favorable squared coefficients theta2_k, band edge T (active |k| < T),
/// Lagrangian scale v, V_eps = l2 norm of v_k and detection value
/// a = V_eps / epsilon^2. Vectors cover k = 0..ceil(T); negative k by
/// symmetry.
struct WeightSolution {
    enum class Method { exact, asymptotic };

    double tau = 1.0;
    double s = 0.0;
    double epsilon = 1.0;
    double r = 0.1;

    double T = 1.0;
    double v = 0.0;
    double V_eps = 0.0;
    double a = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    Method method = Method::exact;

    std::vector<double> w;      // w_k for k = 0..ceil(T)
    std::vector<double> theta2; // (theta*_k)^2, same indexing

    int band() const { return static_cast<int>(w.size()) - 1; }
    double w_at(long k) const;
    double theta2_at(long k) const;
    /// theta*_k / (epsilon sigma_k), the per-frequency signal-to-noise.
    double u_at(long k) const;
    double max_w() const;
    /// Sum over all of Z (k=0 once, |k|>=1 twice).
    double sum_w() const;

    struct Residuals {
        double sum_w_sq;      // |sum w^2 - 1/2|
        double w_link_rel;    // worst relative gap in w_k = theta2_k/(2 sigma_k^2 V_eps)
        double a_sq_rel;      // relative gap in a^2 = (1/2) sum u_k^4
        double energy_rel;    // relative gap in sum theta2 = r^2
        double ellipsoid_rel; // gap in (2 pi)^{2 tau} sum |k|^{2 tau} theta2 = 1
    };
    Residuals identity_residuals() const;

    /// Text table: one header line (tau,s,epsilon,r,T,v,V_eps,a,method)
    /// followed by "k w_k theta2_k" lines for k = 0..ceil(T).
    std::string to_table() const;
    static WeightSolution from_table(const std::string& text);
};

struct ExtremalConstants {
    double kappa1;
    double kappa2;
    double kappa3;
    double c; // asymptotic constant in V_eps ~ c r^{2+(4s+1)/(2 tau)}
};
ExtremalConstants extremal_constants(double tau, double s);

/// Solves the two active constraints exactly on the integer lattice by
/// bisecting the band edge T (the constraint ratio is strictly increasing
/// in T), then scales v from the energy equation.
WeightSolution solve_extremal_exact(double tau, const SigmaSchedule& sigma, double epsilon,
                                    double r);

/// Closed-form solution with the asymptotic constants; intended for small r.
WeightSolution solve_extremal_asymptotic(double tau, double s, double epsilon, double r);

/// Detection value a(r) from the exact solver. Strictly increasing in r.
double a_of_r(double tau, double s, double epsilon, double r);

/// Inverse of a_of_r by bisection; relative tolerance 1e-8 on r.
double r_of_a(double tau, double s, double epsilon, double a_target);

} // namespace subdetect
