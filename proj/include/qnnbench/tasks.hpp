#pragma once

// Benchmark data: logic-gate truth tables, the Fisher Iris set, and pure
// states labelled with their entanglement of formation. Each task comes with
// encoders for the three network families.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cvnn.hpp"
#include "errors.hpp"
#include "qnn.hpp"
#include "quantum_core.hpp"
#include "random.hpp"
#include "rvnn.hpp"

namespace qnnbench {

// ---------------------------------------------------------------- gates

struct GateRow {
    int p = 0;
    int q = 0;
    int target = 0;
};

struct GateTask {
    std::string name;
    std::array<GateRow, 4> rows; ///< inputs (00), (01), (10), (11) in that order
};

inline const std::array<std::string_view, 6>& gate_names() {
    static const std::array<std::string_view, 6> names{"AND", "NAND", "OR", "NOR", "XOR", "XNOR"};
    return names;
}

inline bool gate_is_linear(std::string_view name) { return name != "XOR" && name != "XNOR"; }

inline GateTask gate_dataset(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    auto eval = [&](int p, int q) -> int {
        if (upper == "AND") return p & q;
        if (upper == "NAND") return 1 - (p & q);
        if (upper == "OR") return p | q;
        if (upper == "NOR") return 1 - (p | q);
        if (upper == "XOR") return p ^ q;
        if (upper == "XNOR") return 1 - (p ^ q);
        throw ValidationError("unknown gate '" + std::string(name) + "'");
    };
    GateTask t{upper, {}};
    for (int i = 0; i < 4; ++i) {
        const int p = i >> 1;
        const int q = i & 1;
        t.rows[static_cast<std::size_t>(i)] = {p, q, eval(p, q)};
    }
    return t;
}

/// Bits enter as 0.0 / 1.0.
inline std::vector<RealPair> gate_encode_real(const GateTask& task) {
    std::vector<RealPair> pairs;
    for (const auto& r : task.rows)
        pairs.push_back({Eigen::Vector2d(r.p, r.q), Eigen::VectorXd::Constant(1, r.target)});
    return pairs;
}

/// Bits enter through M: 0 -> 1, 1 -> -1.
inline std::vector<ComplexPair> gate_encode_complex(const GateTask& task) {
    std::vector<ComplexPair> pairs;
    for (const auto& r : task.rows) {
        Eigen::VectorXcd x(2);
        x << cvnn_map_scalar(r.p), cvnn_map_scalar(r.q);
        pairs.push_back({x, Eigen::VectorXd::Constant(1, r.target)});
    }
    return pairs;
}

/// Bit pair (p, q) prepares the charge-basis state |pq>.
inline std::vector<QnnPair> gate_encode_qnn(const GateTask& task) {
    std::vector<QnnPair> pairs;
    for (const auto& r : task.rows) pairs.push_back({PureState::basis(2 * r.p + r.q), static_cast<double>(r.target)});
    return pairs;
}

// ----------------------------------------------------------------- iris

enum class Species : int { setosa = 0, versicolor = 1, virginica = 2 };

inline constexpr std::array<std::string_view, 3> species_names{"setosa", "versicolor", "virginica"};

struct IrisRecord {
    double sepal_length = 0.0;
    double sepal_width = 0.0;
    double petal_length = 0.0;
    double petal_width = 0.0;
    Species species = Species::setosa;

    std::array<double, 4> features() const { return {sepal_length, sepal_width, petal_length, petal_width}; }
    int label() const { return static_cast<int>(species); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_species(std::string_view s, Species& out) {
    std::string lower(trim(s));
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.rfind("iris-", 0) == 0) lower.erase(0, 5);
    for (std::size_t i = 0; i < species_names.size(); ++i)
        if (lower == species_names[i]) {
            out = static_cast<Species>(i);
            return true;
        }
    return false;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

} // namespace detail

/// Parses "sepal_length,sepal_width,petal_length,petal_width,species" rows.
/// A header is recognised when the first field of the first non-blank line
/// is not numeric. Requires exactly 150 records, 50 per species.
inline std::vector<IrisRecord> parse_iris(std::istream& in) {
    std::vector<IrisRecord> out;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        double probe = 0.0;
        if (!seen_content) {
            seen_content = true;
            if (!cells.empty() && !detail::parse_double(cells[0], probe)) continue; // header
        }
        if (cells.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(cells.size()));
        IrisRecord r;
        std::array<double*, 4> fields{&r.sepal_length, &r.sepal_width, &r.petal_length, &r.petal_width};
        for (std::size_t k = 0; k < 4; ++k) {
            if (!detail::parse_double(cells[k], *fields[k]))
                throw ParseError(line_no, "non-numeric feature '" + std::string(detail::trim(cells[k])) + "'");
            if (!(*fields[k] > 0.0)) throw ParseError(line_no, "features must be positive");
        }
        if (!detail::parse_species(cells[4], r.species))
            throw ParseError(line_no, "unknown species '" + std::string(detail::trim(cells[4])) + "'");
        out.push_back(r);
    }
    std::array<int, 3> counts{};
    for (const auto& r : out) ++counts[static_cast<std::size_t>(r.label())];
    if (out.size() != 150 || counts != std::array<int, 3>{50, 50, 50})
        throw DatasetIntegrityError("iris data must hold 150 records, 50 per species; got " +
                                    std::to_string(out.size()) + " (" + std::to_string(counts[0]) + "/" +
                                    std::to_string(counts[1]) + "/" + std::to_string(counts[2]) + ")");
    return out;
}

inline std::vector<IrisRecord> load_iris(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open iris file '" + path + "'");
    return parse_iris(in);
}

struct IrisSplit {
    std::vector<IrisRecord> train;
    std::vector<IrisRecord> test;
    std::vector<std::size_t> train_index; ///< positions in the source list
    std::vector<std::size_t> test_index;
};

/// n_train / 3 records per species for training, chosen by a seeded shuffle.
/// The test set is drawn from the remainder: 25 per species while that many
/// are left, otherwise the whole remainder. Both sets come back in a seeded
/// random order.
inline IrisSplit split_stratified(const std::vector<IrisRecord>& records, std::size_t n_train, std::uint64_t seed) {
    if (n_train == 0 || n_train % 3 != 0) throw ValidationError("n_train must be a positive multiple of 3");
    std::array<std::vector<std::size_t>, 3> by_species;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_species[static_cast<std::size_t>(records[i].label())].push_back(i);
    const std::size_t per = n_train / 3;
    for (const auto& v : by_species)
        if (v.size() < per + 1) throw ValidationError("n_train leaves no test records for some species");

    SeedStream rng = SeedStream(seed).child("iris-split");
    IrisSplit split;
    for (auto& v : by_species) {
        rng.shuffle(v);
        const std::size_t n_test = std::min<std::size_t>(25, v.size() - per);
        split.train_index.insert(split.train_index.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(per));
        split.test_index.insert(split.test_index.end(), v.begin() + static_cast<std::ptrdiff_t>(per),
                                v.begin() + static_cast<std::ptrdiff_t>(per + n_test));
    }
    rng.shuffle(split.train_index);
    rng.shuffle(split.test_index);
    for (auto i : split.train_index) split.train.push_back(records[i]);
    for (auto i : split.test_index) split.test.push_back(records[i]);
    return split;
}

/// Per-feature min-max constants, fitted once on the full data set.
struct IrisScaler {
    std::array<double, 4> lo{};
    std::array<double, 4> hi{};

    static IrisScaler fit(const std::vector<IrisRecord>& records) {
        if (records.empty()) throw ValidationError("cannot fit a scaler on no records");
        IrisScaler s;
        s.lo = s.hi = records.front().features();
        for (const auto& r : records) {
            const auto f = r.features();
            for (std::size_t k = 0; k < 4; ++k) {
                s.lo[k] = std::min(s.lo[k], f[k]);
                s.hi[k] = std::max(s.hi[k], f[k]);
            }
        }
        return s;
    }

    std::array<double, 4> scale(const IrisRecord& r) const {
        const auto f = r.features();
        std::array<double, 4> out{};
        for (std::size_t k = 0; k < 4; ++k) {
            const double span = hi[k] - lo[k];
            out[k] = span > 0 ? std::clamp((f[k] - lo[k]) / span, 0.0, 1.0) : 0.0;
        }
        return out;
    }
};

inline Eigen::VectorXd iris_onehot(Species s) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(3);
    t(static_cast<int>(s)) = 1.0;
    return t;
}

inline RealPair iris_encode_onehot(const IrisRecord& r, const IrisScaler& scaler) {
    const auto f = scaler.scale(r);
    return {Eigen::Vector4d(f[0], f[1], f[2], f[3]), iris_onehot(r.species)};
}

inline ComplexPair iris_encode_complex(const IrisRecord& r, const IrisScaler& scaler) {
    const auto f = scaler.scale(r);
    Eigen::VectorXcd x(4);
    for (int k = 0; k < 4; ++k) x(k) = cvnn_map_scalar(f[static_cast<std::size_t>(k)]);
    return {x, iris_onehot(r.species)};
}

/// (0.01 (a^2 + b^2) + c^2 + 1.8 d^2) / (a^2 + b^2 + c^2 + d^2)
inline double iris_target_polynomial(double a, double b, double c, double d) {
    const double n = a * a + b * b + c * c + d * d;
    if (!(n > 0.0)) throw ValidationError("zero feature vector");
    return (0.01 * (a * a + b * b) + c * c + 1.8 * d * d) / n;
}

/// Features become the amplitudes (a, b, c, d) after unit normalization,
/// with all phases zero.
inline QnnPair iris_encode_qnn(const IrisRecord& r) {
    const auto f = r.features();
    const PureState s = PureState::from_amplitudes(f[0], f[1], f[2], f[3]);
    return {s, iris_target_polynomial(s.a, s.b, s.c, s.d)};
}

/// Scalar-output class decision for the QNN: two cut points halfway
/// between the per-class mean training outputs, classes ordered
/// setosa < versicolor < virginica.
struct QnnIrisDecision {
    double cut_low = 0.0;
    double cut_high = 0.0;

    static QnnIrisDecision fit(const std::vector<double>& outputs, const std::vector<int>& labels) {
        if (outputs.size() != labels.size() || outputs.empty()) throw ValidationError("decision fit: bad input");
        std::array<double, 3> sum{};
        std::array<int, 3> n{};
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            sum[static_cast<std::size_t>(labels[i])] += outputs[i];
            ++n[static_cast<std::size_t>(labels[i])];
        }
        for (int c : n)
            if (c == 0) throw ValidationError("decision fit needs every class in the training set");
        std::array<double, 3> mean{};
        for (std::size_t c = 0; c < 3; ++c) mean[c] = sum[c] / n[c];
        return {0.5 * (mean[0] + mean[1]), 0.5 * (mean[1] + mean[2])};
    }

    int classify(double output) const {
        if (output < cut_low) return 0;
        if (output < cut_high) return 1;
        return 2;
    }
};

// ---------------------------------------------------------- entanglement

/// (|a|, |b|, |c|, |d|) of a normalized 4-D standard normal: uniform on the
/// nonnegative part of the unit 3-sphere. Phases zero or uniform in
/// [0, 2 pi).
inline PureState sample_pure_state(SeedStream& rng, bool zero_phases) {
    std::array<double, 4> v{};
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& x : v) {
            x = std::abs(rng.normal());
            n2 += x * x;
        }
    } while (!(n2 > 1e-300));
    const double n = std::sqrt(n2);
    PureState s{v[0] / n, v[1] / n, v[2] / n, v[3] / n};
    if (!zero_phases) {
        s.theta1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.theta2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.theta3 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return s;
}

struct WitnessPair {
    PureState state;
    double target = 0.0; ///< eof_pure(state)
};

/// |00>, (|00> + |11>)/sqrt2, (|0> + |1>)(|0> + |1>)/2, sqrt(.8)|00> + sqrt(.2)|11>
inline std::vector<WitnessPair> witness_quartet() {
    const double r = std::sqrt(0.5);
    const std::array<PureState, 4> states{
        PureState::basis(0),
        PureState{r, 0.0, 0.0, r},
        PureState{0.5, 0.5, 0.5, 0.5},
        PureState{std::sqrt(0.8), 0.0, 0.0, std::sqrt(0.2)},
    };
    std::vector<WitnessPair> out;
    for (const auto& s : states) out.push_back({s, eof_pure(s)});
    return out;
}

/// The quartet, followed by n - 4 zero-phase samples when n > 4. For n < 4
/// the leading n quartet states.
inline std::vector<WitnessPair> witness_dataset(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("witness dataset needs at least one pair");
    auto out = witness_quartet();
    out.resize(std::min<std::size_t>(n, out.size()));
    SeedStream rng = SeedStream(seed).child("witness-train");
    while (out.size() < n) {
        const PureState s = sample_pure_state(rng, true);
        out.push_back({s, eof_pure(s)});
    }
    for (const auto& p : out)
        if (std::abs(p.target - eof_pure(p.state)) > 1e-12) throw DatasetIntegrityError("witness target mismatch");
    return out;
}

/// Seeded zero-phase test states, shared by every network of a trial.
inline std::vector<WitnessPair> witness_testset(std::size_t n, std::uint64_t seed) {
    SeedStream rng = SeedStream(seed).child("witness-test");
    std::vector<WitnessPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        const PureState s = sample_pure_state(rng, true);
        out.push_back({s, eof_pure(s)});
    }
    return out;
}

inline std::vector<QnnPair> witness_encode_qnn(const std::vector<WitnessPair>& pairs) {
    std::vector<QnnPair> out;
    for (const auto& p : pairs) out.push_back({p.state, p.target});
    return out;
}

/// Real parts of the 16 density-matrix entries, row-major.
inline std::vector<RealPair> witness_encode_real(const std::vector<WitnessPair>& pairs) {
    std::vector<RealPair> out;
    for (const auto& p : pairs) {
        const Matrix4c rho = pure_to_density(p.state).matrix();
        Eigen::VectorXd x(16);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) x(4 * i + j) = rho(i, j).real();
        out.push_back({x, Eigen::VectorXd::Constant(1, p.target)});
    }
    return out;
}

/// Complex entries onto the unit circle: the modulus (at most 1) sets the
/// angle through M, the entry's own phase rotates it. Zero-phase states give
/// exactly M(rho_ij).
inline std::vector<ComplexPair> witness_encode_complex(const std::vector<WitnessPair>& pairs) {
    std::vector<ComplexPair> out;
    for (const auto& p : pairs) {
        const Matrix4c rho = pure_to_density(p.state).matrix();
        Eigen::VectorXcd x(16);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const Complex e = rho(i, j);
                const double mag = std::min(1.0, std::abs(e));
                x(4 * i + j) = cvnn_map_scalar(mag) * (mag > 0.0 ? e / std::abs(e) : Complex(1.0, 0.0));
            }
        out.push_back({x, Eigen::VectorXd::Constant(1, p.target)});
    }
    return out;
}

} // namespace qnnbench
