#include "subdetect/extremal.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "subdetect/errors.hpp"
#include "subdetect/numeric.hpp"

namespace subdetect {

double WeightSolution::w_at(long k) const {
    const long ak = std::labs(k);
    if (ak >= static_cast<long>(w.size())) return 0.0;
    return w[static_cast<std::size_t>(ak)];
}

double WeightSolution::theta2_at(long k) const {
    const long ak = std::labs(k);
    if (ak >= static_cast<long>(theta2.size())) return 0.0;
    return theta2[static_cast<std::size_t>(ak)];
}

double WeightSolution::u_at(long k) const {
    const SigmaSchedule sigma{s};
    return std::sqrt(theta2_at(k)) / (epsilon * sigma.at(k));
}

double WeightSolution::max_w() const {
    double best = 0.0;
    for (double x : w) best = std::max(best, x);
    return best;
}

double WeightSolution::sum_w() const {
    KahanSum sum;
    sum.add(w.empty() ? 0.0 : w[0]);
    for (std::size_t k = 1; k < w.size(); ++k) sum.add(2.0 * w[k]);
    return sum.value();
}

WeightSolution::Residuals WeightSolution::identity_residuals() const {
    const SigmaSchedule sigma{s};
    KahanSum w_sq, u4, energy, ellipsoid;
    double w_link = 0.0;
    for (int k = 0; k <= band(); ++k) {
        const double mult = (k == 0) ? 1.0 : 2.0;
        const double sig = sigma.at(k);
        const double wk = w[static_cast<std::size_t>(k)];
        const double t2 = theta2[static_cast<std::size_t>(k)];
        w_sq.add(mult * wk * wk);
        const double u2 = t2 / (epsilon * epsilon * sig * sig);
        u4.add(mult * u2 * u2);
        energy.add(mult * t2);
        if (k != 0) ellipsoid.add(2.0 * std::pow(static_cast<double>(k), 2.0 * tau) * t2);
        const double linked = t2 / (2.0 * sig * sig * V_eps);
        const double scale = std::max({std::abs(wk), std::abs(linked), 1e-300});
        w_link = std::max(w_link, std::abs(wk - linked) / scale);
    }
    Residuals res;
    res.sum_w_sq = std::abs(w_sq.value() - 0.5);
    res.w_link_rel = w_link;
    res.a_sq_rel = std::abs(0.5 * u4.value() - a * a) / (a * a);
    res.energy_rel = std::abs(energy.value() - r * r) / (r * r);
    res.ellipsoid_rel = std::abs(std::pow(2.0 * M_PI, 2.0 * tau) * ellipsoid.value() - 1.0);
    return res;
}

ExtremalConstants extremal_constants(double tau, double s) {
    ExtremalConstants k;
    const double sqrt2 = std::sqrt(2.0);
    k.kappa1 = 4.0 * sqrt2 * tau / ((4.0 * s + 1.0) * (4.0 * s + 2.0 * tau + 1.0));
    k.kappa2 = 4.0 * sqrt2 * tau * std::pow(2.0 * M_PI, 2.0 * tau) /
               ((4.0 * s + 2.0 * tau + 1.0) * (4.0 * s + 4.0 * tau + 1.0));
    k.kappa3 = 1.0 / (4.0 * s + 1.0) - 2.0 / (4.0 * s + 2.0 * tau + 1.0) +
               1.0 / (4.0 * s + 4.0 * tau + 1.0);
    const double c_sq = 2.0 * std::pow(k.kappa1 / k.kappa2, -(4.0 * s + 1.0) / (2.0 * tau)) *
                        k.kappa3 / (k.kappa1 * k.kappa1);
    k.c = std::sqrt(c_sq);
    return k;
}

namespace {

// Lattice sums over the active set {|k| < T}, with sigma_k^4 = k^{4s} and
// the k=0 term carrying sigma_0 = 1. Power tables keep the bisection free
// of pow() calls.
struct LatticeSums {
    double tau;
    double s;
    std::vector<double> sig4;   // k^{4s}, index k >= 1
    std::vector<double> k2tau;  // k^{2 tau}

    void ensure(std::size_t kmax) {
        if (kmax > (1u << 26))
            throw infeasible_error("extremal: band edge exceeds the desk-scale cap (2^26)");
        std::size_t from = sig4.size() + 1;
        sig4.resize(kmax);
        k2tau.resize(kmax);
        for (std::size_t k = from; k <= kmax; ++k) {
            sig4[k - 1] = std::pow(static_cast<double>(k), 4.0 * s);
            k2tau[k - 1] = std::pow(static_cast<double>(k), 2.0 * tau);
        }
    }

    // energy-side and ellipsoid-side sums for a given edge.
    void eval(double T, double* energy_side, double* ellipsoid_side) const {
        const double inv_t2tau = std::pow(T, -2.0 * tau);
        const long kact = static_cast<long>(std::ceil(T)) - 1;
        KahanSum en, ell;
        en.add(1.0); // k = 0
        for (long k = 1; k <= kact; ++k) {
            const double taper = 1.0 - k2tau[static_cast<std::size_t>(k - 1)] * inv_t2tau;
            if (taper <= 0.0) continue;
            const double base = 2.0 * sig4[static_cast<std::size_t>(k - 1)] * taper;
            en.add(base);
            ell.add(base * k2tau[static_cast<std::size_t>(k - 1)]);
        }
        *energy_side = en.value();
        *ellipsoid_side = ell.value();
    }

    // r^2 (2 pi)^{2 tau} * ellipsoid_side / energy_side; equals 1 at the
    // solution edge, strictly increasing in T.
    double constraint_ratio(double T, double r) const {
        double en, ell;
        eval(T, &en, &ell);
        return r * r * std::pow(2.0 * M_PI, 2.0 * tau) * ell / en;
    }
};

} // namespace

WeightSolution solve_extremal_exact(double tau, const SigmaSchedule& sigma, double epsilon,
                                    double r) {
    if (!(tau > 0.0) || !(sigma.degree >= 0.0) || !(epsilon > 0.0) || !(r > 0.0))
        throw std::invalid_argument("solve_extremal_exact: need tau>0, s>=0, epsilon>0, r>0");
    const double s = sigma.degree;
    const ExtremalConstants kc = extremal_constants(tau, s);

    LatticeSums sums{tau, s, {}, {}};
    double lo = 1.0;
    double hi = std::max(2.0, 10.0 * std::pow(kc.kappa1 / kc.kappa2, 1.0 / (2.0 * tau)) *
                                  std::pow(r, -1.0 / tau));
    sums.ensure(static_cast<std::size_t>(std::ceil(hi)));
    int widen = 0;
    while (sums.constraint_ratio(hi, r) <= 1.0) {
        if (++widen > 64)
            throw infeasible_error("extremal: radius exceeds class (no band edge balances the constraints)");
        hi *= 2.0;
        sums.ensure(static_cast<std::size_t>(std::ceil(hi)));
    }

    for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (sums.constraint_ratio(mid, r) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    if ((hi - lo) > 1e-9 * hi)
        throw infeasible_error("extremal: band-edge bisection did not converge");
    const double T = 0.5 * (lo + hi);

    double energy_side, ellipsoid_side;
    sums.eval(T, &energy_side, &ellipsoid_side);
    const double v = r * r / (std::sqrt(2.0) * energy_side);

    WeightSolution sol;
    sol.tau = tau;
    sol.s = s;
    sol.epsilon = epsilon;
    sol.r = r;
    sol.T = T;
    sol.v = v;
    sol.kappa1 = kc.kappa1;
    sol.kappa2 = kc.kappa2;
    sol.kappa3 = kc.kappa3;
    sol.method = WeightSolution::Method::exact;

    const int edge = static_cast<int>(std::ceil(T));
    sol.w.assign(static_cast<std::size_t>(edge) + 1, 0.0);
    sol.theta2.assign(static_cast<std::size_t>(edge) + 1, 0.0);

    const double inv_t2tau = std::pow(T, -2.0 * tau);
    KahanSum norm_sq;
    std::vector<double> v_k(static_cast<std::size_t>(edge) + 1, 0.0);
    for (int k = 0; k <= edge; ++k) {
        double taper;
        double sig2;
        if (k == 0) {
            taper = 1.0;
            sig2 = 1.0;
        } else {
            taper = 1.0 - sums.k2tau[static_cast<std::size_t>(k - 1)] * inv_t2tau;
            if (taper <= 0.0) continue;
            sig2 = std::sqrt(sums.sig4[static_cast<std::size_t>(k - 1)]);
        }
        v_k[static_cast<std::size_t>(k)] = v * sig2 * taper;
        sol.theta2[static_cast<std::size_t>(k)] = std::sqrt(2.0) * v * sig2 * sig2 * taper;
        norm_sq.add(((k == 0) ? 1.0 : 2.0) * v_k[static_cast<std::size_t>(k)] * v_k[static_cast<std::size_t>(k)]);
    }
    sol.V_eps = std::sqrt(norm_sq.value());
    sol.a = sol.V_eps / (epsilon * epsilon);
    for (int k = 0; k <= edge; ++k)
        sol.w[static_cast<std::size_t>(k)] = v_k[static_cast<std::size_t>(k)] / (std::sqrt(2.0) * sol.V_eps);
    return sol;
}

WeightSolution solve_extremal_asymptotic(double tau, double s, double epsilon, double r) {
    if (!(tau > 0.0) || !(s >= 0.0) || !(epsilon > 0.0) || !(r > 0.0))
        throw std::invalid_argument("solve_extremal_asymptotic: need tau>0, s>=0, epsilon>0, r>0");
    const ExtremalConstants kc = extremal_constants(tau, s);

    WeightSolution sol;
    sol.tau = tau;
    sol.s = s;
    sol.epsilon = epsilon;
    sol.r = r;
    sol.kappa1 = kc.kappa1;
    sol.kappa2 = kc.kappa2;
    sol.kappa3 = kc.kappa3;
    sol.method = WeightSolution::Method::asymptotic;

    sol.T = std::pow(kc.kappa1 / kc.kappa2, 1.0 / (2.0 * tau)) * std::pow(r, -1.0 / tau);
    sol.v = (1.0 / kc.kappa1) * std::pow(kc.kappa2 / kc.kappa1, (4.0 * s + 1.0) / (2.0 * tau)) *
            std::pow(r, 2.0 + (4.0 * s + 1.0) / tau);
    sol.V_eps = kc.c * std::pow(r, 2.0 + (4.0 * s + 1.0) / (2.0 * tau));
    sol.a = sol.V_eps / (epsilon * epsilon);

    const SigmaSchedule sigma{s};
    const int edge = std::max(1, static_cast<int>(std::ceil(sol.T)));
    sol.w.assign(static_cast<std::size_t>(edge) + 1, 0.0);
    sol.theta2.assign(static_cast<std::size_t>(edge) + 1, 0.0);
    for (int k = 0; k <= edge; ++k) {
        const double taper = 1.0 - std::pow(std::abs(static_cast<double>(k)) / sol.T, 2.0 * tau);
        if (taper <= 0.0) continue;
        const double sig2 = sigma.at(k) * sigma.at(k);
        sol.theta2[static_cast<std::size_t>(k)] = std::sqrt(2.0) * sol.v * sig2 * sig2 * taper;
        sol.w[static_cast<std::size_t>(k)] =
            sol.theta2[static_cast<std::size_t>(k)] / (2.0 * sig2 * sol.V_eps);
    }
    return sol;
}

double a_of_r(double tau, double s, double epsilon, double r) {
    return solve_extremal_exact(tau, SigmaSchedule{s}, epsilon, r).a;
}

double r_of_a(double tau, double s, double epsilon, double a_target) {
    if (!(a_target > 0.0)) throw std::invalid_argument("r_of_a: a_target must be > 0");
    const ExtremalConstants kc = extremal_constants(tau, s);

    // Asymptotic inversion gives the starting bracket.
    const double guess =
        std::pow(a_target * epsilon * epsilon / kc.c, 2.0 * tau / (4.0 * tau + 4.0 * s + 1.0));
    double lo = guess / 8.0;
    double hi = guess * 8.0;
    int widen = 0;
    while (a_of_r(tau, s, epsilon, lo) > a_target) {
        if (++widen > 200) throw infeasible_error("r_of_a: no lower bracket");
        lo /= 4.0;
    }
    widen = 0;
    while (a_of_r(tau, s, epsilon, hi) < a_target) {
        if (++widen > 200) throw infeasible_error("r_of_a: a_target unreachable within the class");
        hi *= 4.0;
    }
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (a_of_r(tau, s, epsilon, mid) < a_target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::string WeightSolution::to_table() const {
    std::ostringstream out;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "tau=%.17g s=%.17g epsilon=%.17g r=%.17g T=%.17g v=%.17g V_eps=%.17g a=%.17g method=%s\n",
                  tau, s, epsilon, r, T, v, V_eps, a,
                  method == Method::exact ? "exact" : "asymptotic");
    out << buf;
    for (int k = 0; k <= band(); ++k) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", k, w[static_cast<std::size_t>(k)],
                      theta2[static_cast<std::size_t>(k)]);
        out << buf;
    }
    return out.str();
}

WeightSolution WeightSolution::from_table(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw config_error("weight table: empty input");

    WeightSolution sol;
    std::string method_str;
    std::istringstream hs(header);
    std::string item;
    int seen = 0;
    while (hs >> item) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw config_error("weight table: bad header item '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        ++seen;
        if (key == "tau") sol.tau = std::stod(value);
        else if (key == "s") sol.s = std::stod(value);
        else if (key == "epsilon") sol.epsilon = std::stod(value);
        else if (key == "r") sol.r = std::stod(value);
        else if (key == "T") sol.T = std::stod(value);
        else if (key == "v") sol.v = std::stod(value);
        else if (key == "V_eps") sol.V_eps = std::stod(value);
        else if (key == "a") sol.a = std::stod(value);
        else if (key == "method") method_str = value;
        else throw config_error("weight table: unknown header key '" + key + "'");
    }
    if (seen != 9) throw config_error("weight table: header must carry 9 fields");
    if (method_str == "exact") sol.method = Method::exact;
    else if (method_str == "asymptotic") sol.method = Method::asymptotic;
    else throw config_error("weight table: unknown method '" + method_str + "'");

    const ExtremalConstants kc = extremal_constants(sol.tau, sol.s);
    sol.kappa1 = kc.kappa1;
    sol.kappa2 = kc.kappa2;
    sol.kappa3 = kc.kappa3;

    int k;
    double wk, t2;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (!(ls >> k >> wk >> t2)) throw config_error("weight table: bad row '" + line + "'");
        if (k != static_cast<int>(sol.w.size()))
            throw config_error("weight table: rows must be consecutive from k=0");
        sol.w.push_back(wk);
        sol.theta2.push_back(t2);
    }
    if (sol.w.empty()) throw config_error("weight table: no rows");
    return sol;
}

} // namespace subdetect
