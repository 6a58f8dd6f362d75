#include "subdetect/model.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "subdetect/errors.hpp"
#include "subdetect/extremal.hpp"
#include "subdetect/numeric.hpp"

namespace subdetect {

double SigmaSchedule::at(long k) const {
    if (k == 0) return 1.0;
    return std::pow(std::abs(static_cast<double>(k)), degree);
}

void ProblemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw config_error("config: " + msg); };
    if (M < 1 || N < 1) fail("M and N must be >= 1");
    if (m < 1 || m > M) fail("m must satisfy 1 <= m <= M");
    if (n < 1 || n > N) fail("n must satisfy 1 <= n <= N");
    if (!(epsilon > 0.0)) fail("epsilon must be > 0");
    if (!(s >= 0.0)) fail("s must be >= 0");
    if (!(tau > 0.0)) fail("tau must be > 0");
    if (!(r > 0.0)) fail("r must be > 0");
    if (band < 1) fail("band must be >= 1");
}

namespace {

const std::array<const char*, 10> kConfigKeys = {
    "M", "N", "m", "n", "epsilon", "s", "tau", "r", "band", "seed"};

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw config_error("config: bad integer for key '" + key + "': " + value);
    }
    if (pos != value.size())
        throw config_error("config: trailing characters in value for key '" + key + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw config_error("config: bad number for key '" + key + "': " + value);
    }
    if (pos != value.size())
        throw config_error("config: trailing characters in value for key '" + key + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw config_error("config: bad seed for key '" + key + "': " + value);
    }
    if (pos != value.size())
        throw config_error("config: trailing characters in value for key '" + key + "'");
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

ProblemConfig ProblemConfig::from_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kv.count(key)) throw config_error("config: duplicate key '" + key + "'");
        kv[key] = value;
    }
    for (const auto& [key, value] : kv) {
        (void)value;
        bool known = false;
        for (const char* k : kConfigKeys) known = known || key == k;
        if (!known) throw config_error("config: unknown key '" + key + "'");
    }
    for (const char* k : kConfigKeys)
        if (!kv.count(k)) throw config_error(std::string("config: missing key '") + k + "'");

    ProblemConfig cfg;
    cfg.M = static_cast<int>(parse_int("M", kv["M"]));
    cfg.N = static_cast<int>(parse_int("N", kv["N"]));
    cfg.m = static_cast<int>(parse_int("m", kv["m"]));
    cfg.n = static_cast<int>(parse_int("n", kv["n"]));
    cfg.epsilon = parse_real("epsilon", kv["epsilon"]);
    cfg.s = parse_real("s", kv["s"]);
    cfg.tau = parse_real("tau", kv["tau"]);
    cfg.r = parse_real("r", kv["r"]);
    cfg.band = static_cast<int>(parse_int("band", kv["band"]));
    cfg.seed = parse_u64("seed", kv["seed"]);
    cfg.validate();
    return cfg;
}

ProblemConfig ProblemConfig::from_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_kv_text(buf.str());
}

std::string ProblemConfig::to_kv_text() const {
    std::ostringstream out;
    char num[64];
    out << "M=" << M << "\nN=" << N << "\nm=" << m << "\nn=" << n << "\n";
    std::snprintf(num, sizeof num, "%.17g", epsilon);
    out << "epsilon=" << num << "\n";
    std::snprintf(num, sizeof num, "%.17g", s);
    out << "s=" << num << "\n";
    std::snprintf(num, sizeof num, "%.17g", tau);
    out << "tau=" << num << "\n";
    std::snprintf(num, sizeof num, "%.17g", r);
    out << "r=" << num << "\n";
    out << "band=" << band << "\nseed=" << seed << "\n";
    return out.str();
}

void ProblemConfig::to_kv_file(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw config_error("config: cannot write '" + path + "'");
    out << to_kv_text();
}

SupportMask sample_support(const ProblemConfig& config, RngStream& rng) {
    config.validate();
    return SupportMask{rng.sample_subset(config.M, config.m),
                       rng.sample_subset(config.N, config.n)};
}

SignalBank worst_case_signal(const WeightSolution& solution, const ProblemConfig& config,
                             const SignRule& sign_rule) {
    const int need = solution.band();
    if (need > config.band)
        throw infeasible_error("worst_case_signal: solution band " + std::to_string(need) +
                               " exceeds config band " + std::to_string(config.band));
    SignalBank bank;
    bank.band = config.band;
    bank.cells = config.m * config.n;
    bank.coeffs.assign(static_cast<std::size_t>(bank.cells) * (2 * config.band + 1), 0.0);

    RngStream signs = RngStream::derive(sign_rule.seed, {0x5167u});
    for (int cell = 0; cell < bank.cells; ++cell) {
        for (int k = -need; k <= need; ++k) {
            const double magnitude = std::sqrt(solution.theta2_at(k));
            if (magnitude == 0.0) continue;
            double sign = 1.0;
            if (sign_rule.kind == SignRule::Kind::rademacher)
                sign = (signs.next_u64() & 1u) ? 1.0 : -1.0;
            bank.at(cell, k) = sign * magnitude;
        }
    }
    return bank;
}

SignalClassReport validate_signal_class(const SignalBank& bank, double tau, double r,
                                        double rel_tol) {
    SignalClassReport report;
    const double ellipsoid_weight = std::pow(2.0 * M_PI, 2.0 * tau);
    for (int cell = 0; cell < bank.cells; ++cell) {
        KahanSum energy;
        KahanSum ellipsoid;
        for (int k = -bank.band; k <= bank.band; ++k) {
            const double theta = bank.at(cell, k);
            energy.add(theta * theta);
            if (k != 0)
                ellipsoid.add(std::pow(std::abs(static_cast<double>(k)), 2.0 * tau) * theta * theta);
        }
        const double ellipsoid_excess = ellipsoid_weight * ellipsoid.value() - 1.0;
        const double energy_deficit = r * r - energy.value();
        bool bad = false;
        if (ellipsoid_excess > rel_tol) bad = true;
        if (energy_deficit > rel_tol * r * r) bad = true;
        if (bad) ++report.violating_cells;
        report.worst_ellipsoid_excess = std::max(report.worst_ellipsoid_excess, ellipsoid_excess);
        report.worst_energy_deficit = std::max(report.worst_energy_deficit, energy_deficit);
    }
    report.ok = report.violating_cells == 0;
    return report;
}

ObservationTensor generate_observations(const ProblemConfig& config, const Alternative* alt,
                                        RngStream& rng) {
    config.validate();
    if (alt) {
        if (static_cast<int>(alt->support.rows.size()) != config.m ||
            static_cast<int>(alt->support.cols.size()) != config.n)
            throw std::invalid_argument("generate_observations: support shape mismatch");
        if (alt->bank.band > config.band)
            throw std::invalid_argument("generate_observations: bank band exceeds config band");
        if (alt->bank.cells != config.m * config.n)
            throw std::invalid_argument("generate_observations: bank cell count mismatch");
    }

    ObservationTensor tensor;
    tensor.M = config.M;
    tensor.N = config.N;
    tensor.band = config.band;
    tensor.epsilon = config.epsilon;
    tensor.sigma = config.sigma();
    tensor.seed = config.seed;
    tensor.flags = alt ? 1u : 0u;
    tensor.data.assign(static_cast<std::size_t>(config.M) * config.N * (2 * config.band + 1), 0.0);

    // Cell -> bank row lookup for active cells.
    std::vector<int> row_pos(static_cast<std::size_t>(config.M) + 1, -1);
    std::vector<int> col_pos(static_cast<std::size_t>(config.N) + 1, -1);
    if (alt) {
        for (int ai = 0; ai < config.m; ++ai) row_pos[static_cast<std::size_t>(alt->support.rows[static_cast<std::size_t>(ai)])] = ai;
        for (int bj = 0; bj < config.n; ++bj) col_pos[static_cast<std::size_t>(alt->support.cols[static_cast<std::size_t>(bj)])] = bj;
    }

    std::vector<double> noise_scale(static_cast<std::size_t>(config.band) + 1);
    for (int k = 0; k <= config.band; ++k) noise_scale[static_cast<std::size_t>(k)] = config.epsilon * tensor.sigma.at(k);

    for (int i = 1; i <= config.M; ++i) {
        for (int j = 1; j <= config.N; ++j) {
            const int cell = (alt && row_pos[static_cast<std::size_t>(i)] >= 0 && col_pos[static_cast<std::size_t>(j)] >= 0)
                                 ? row_pos[static_cast<std::size_t>(i)] * config.n + col_pos[static_cast<std::size_t>(j)]
                                 : -1;
            for (int k = -config.band; k <= config.band; ++k) {
                double x = noise_scale[static_cast<std::size_t>(std::abs(k))] * rng.normal();
                if (cell >= 0 && std::abs(k) <= alt->bank.band) x += alt->bank.at(cell, k);
                tensor.at(i, j, k) = x;
            }
        }
    }
    return tensor;
}

namespace {

void put_u64_le(std::ofstream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64_le(std::ifstream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

} // namespace

void ObservationTensor::dump_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("tensor: cannot write '" + path + "'");
    put_u64_le(out, static_cast<std::uint64_t>(M));
    put_u64_le(out, static_cast<std::uint64_t>(N));
    put_u64_le(out, static_cast<std::uint64_t>(band));
    put_u64_le(out, flags);
    put_u64_le(out, seed);
    for (double x : data) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        put_u64_le(out, bits);
    }
}

ObservationTensor ObservationTensor::load_binary(const std::string& path, double epsilon, double s) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("tensor: cannot open '" + path + "'");
    ObservationTensor tensor;
    tensor.M = static_cast<int>(get_u64_le(in));
    tensor.N = static_cast<int>(get_u64_le(in));
    tensor.band = static_cast<int>(get_u64_le(in));
    tensor.flags = get_u64_le(in);
    tensor.seed = get_u64_le(in);
    tensor.epsilon = epsilon;
    tensor.sigma = SigmaSchedule{s};
    if (!in || tensor.M < 1 || tensor.N < 1 || tensor.band < 0)
        throw config_error("tensor: corrupt header in '" + path + "'");
    const std::size_t count = static_cast<std::size_t>(tensor.M) * tensor.N * (2 * tensor.band + 1);
    tensor.data.resize(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        const std::uint64_t bits = get_u64_le(in);
        double x;
        std::memcpy(&x, &bits, 8);
        tensor.data[idx] = x;
    }
    if (!in) throw config_error("tensor: truncated payload in '" + path + "'");
    return tensor;
}

} // namespace subdetect
