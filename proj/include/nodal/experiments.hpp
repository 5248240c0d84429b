// Monte Carlo experiments: zero statistics of random trigonometric
// polynomials, homology-match and certification rates against the probability
// bounds, and convergence of the orthant functional.
//
// Every trial draws from its own substream, so results do not depend on the
// number of worker threads; aggregation uses integer tallies in trial order.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nodal/admissibility.hpp"
#include "nodal/bounds.hpp"
#include "nodal/cubical.hpp"
#include "nodal/homology.hpp"
#include "nodal/orthant.hpp"
#include "nodal/patterns.hpp"
#include "nodal/random_fields.hpp"
#include "nodal/rng.hpp"

namespace nodal {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kDefaultDepth = 6;

/// Runs f(i) for i in [0, n) on up to `threads` workers (0 = all cores).
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// 95% Wilson score interval; (0, 1) when n = 0.
inline WilsonInterval wilson_interval(std::size_t successes, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---- zero statistics ----------------------------------------------------------

/// u' as a series of the same form: a'_k = a_k k 2 pi / L, with the cosine and
/// sine weights exchanged (and one negated).
inline Realization1D derivative(const Realization1D& r) {
    Realization1D d = r;
    const double w = 2.0 * std::numbers::pi / r.coeffs.L;
    d.g.assign(r.g.size(), 0.0);
    for (std::size_t k = 0; k < r.coeffs.a.size(); ++k) {
        d.coeffs.a[k] = r.coeffs.a[k] * static_cast<double>(k) * w;
        if (k == 0) continue;
        d.g[2 * k] = r.g[2 * k - 1];
        d.g[2 * k - 1] = -r.g[2 * k];
    }
    return d;
}

/// Zeros of a periodic realization on [0, L): sign changes on a `points`-cell
/// grid, refined by bisection to `tol`. Cells without a sign change but with an
/// interior extremum of the wrong sign contribute the close zero pair.
inline std::vector<double> find_zeros(const Realization1D& r, std::size_t points, double tol = 1e-12) {
    if (points < 2) throw std::invalid_argument("zero search needs at least 2 grid cells");
    const Realization1D dr = derivative(r);
    const std::vector<double> u = sample_lattice(r, points);
    const std::vector<double> du = sample_lattice(dr, points);
    const double L = r.coeffs.L;
    const double h = L / static_cast<double>(points);
    auto f = [&](double x) { return detail::evaluate_unchecked(r, x); };
    auto df = [&](double x) { return detail::evaluate_unchecked(dr, x); };
    // Root of g on [a, b] given g(a) has sign `neg_a` (true = negative).
    auto bisect = [&](auto&& g, double a, double b, bool neg_a) {
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            if ((g(m) < 0.0) == neg_a) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };
    std::vector<double> zeros;
    for (std::size_t i = 0; i < points; ++i) {
        const double a = h * static_cast<double>(i);
        const double b = i + 1 == points ? L : h * static_cast<double>(i + 1);
        const bool neg_a = u[i] < 0.0, neg_b = u[i + 1] < 0.0;
        if (neg_a != neg_b) {
            zeros.push_back(bisect(f, a, b, neg_a));
            continue;
        }
        if ((du[i] < 0.0) == (du[i + 1] < 0.0) || du[i] == 0.0 || du[i + 1] == 0.0) continue;
        const double xe = bisect(df, a, b, du[i] < 0.0);
        if ((f(xe) < 0.0) == neg_a) continue;
        zeros.push_back(bisect(f, a, xe, neg_a));
        zeros.push_back(bisect(f, xe, b, !neg_a));
    }
    return zeros;
}

/// Smallest circular gap between consecutive zeros on [0, L); L if fewer than two.
inline double min_circular_gap(const std::vector<double>& zeros, double L) {
    if (zeros.size() < 2) return L;
    std::vector<double> z(zeros);
    std::sort(z.begin(), z.end());
    double g = z.front() + L - z.back();
    for (std::size_t i = 1; i < z.size(); ++i) g = std::min(g, z[i] - z[i - 1]);
    return g;
}

struct ZeroStatsSummary {
    std::size_t N = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t grid_factor = 50;
    double mean_zeros = 0.0;
    double zeros_stderr = 0.0;
    double mean_min_gap = 0.0;
    double q05_min_gap = 0.0;
    std::size_t M95 = 0;       // least M with L / M below the 5th percentile of min gaps
    std::size_t odd_counts = 0;
    std::size_t gap_trials = 0;  // trials with at least two zeros
    double kac_rice = 0.0;     // expected zero count 2 sqrt(A1 / A0)

    bool operator==(const ZeroStatsSummary&) const = default;
};

inline ZeroStatsSummary zero_stats(std::size_t N, std::size_t trials, std::uint64_t seed, unsigned threads = 0,
                                   std::size_t grid_factor = 50) {
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    const CoeffSeq1D coeffs = trig_coeffs_1d(N);
    std::vector<std::size_t> counts(trials);
    std::vector<double> gaps(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const auto r = draw_realization(coeffs, rng::substream_seed(seed, t));
        const auto z = find_zeros(r, grid_factor * N);
        counts[t] = z.size();
        gaps[t] = min_circular_gap(z, coeffs.L);
    });
    ZeroStatsSummary s;
    s.N = N;
    s.trials = trials;
    s.seed = seed;
    s.grid_factor = grid_factor;
    double sum = 0, sum_sq = 0;
    std::vector<double> g;
    for (std::size_t t = 0; t < trials; ++t) {
        sum += static_cast<double>(counts[t]);
        sum_sq += static_cast<double>(counts[t]) * static_cast<double>(counts[t]);
        s.odd_counts += counts[t] % 2;
        if (counts[t] >= 2) g.push_back(gaps[t]);
    }
    const double n = static_cast<double>(trials);
    s.mean_zeros = sum / n;
    s.zeros_stderr = trials > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) / n) : 0.0;
    s.gap_trials = g.size();
    if (!g.empty()) {
        double gs = 0;
        for (double v : g) gs += v;
        s.mean_min_gap = gs / static_cast<double>(g.size());
        s.q05_min_gap = quantile(g, 0.05);
        s.M95 = static_cast<std::size_t>(std::floor(coeffs.L / s.q05_min_gap)) + 1;
    }
    const auto m = spectral_moments(coeffs);
    s.kac_rice = 2.0 * std::sqrt(m[1] / m[0]);
    return s;
}

// ---- homology experiments ------------------------------------------------------

struct TrialOutcome {
    bool certified = false;
    bool degenerate = false;
    bool match = false;
    bool unresolved = false;
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<TrialOutcome> per_M;
};

struct SoundnessException {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t M = 0;

    bool operator==(const SoundnessException&) const = default;
};

/// One output row; the CSV columns are exactly these fields in this order.
struct RateRow {
    std::string experiment;
    int dim = 1;
    std::size_t N = 0;
    std::size_t M = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double rate_match = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    double rate_certified = 0.0;
    double cert_lo = 0.0;
    double cert_hi = 1.0;
    double bound = 0.0;
    std::size_t degenerate = 0;
    std::size_t unresolved = 0;

    bool operator==(const RateRow&) const = default;
};

struct ResultsMeta {
    std::string version = kVersion;
    std::size_t survivors_B = kSurvivorsB;
    std::size_t survivors_I4 = kSurvivorsI4;
    std::size_t survivors_I = kSurvivorsI;
    int D = kDefaultDepth;
    double zero_tol = 0.0;

    bool operator==(const ResultsMeta&) const = default;
};

struct HomologySummary {
    ResultsMeta meta;
    std::vector<RateRow> rows;
    std::vector<SoundnessException> exceptions;  // certified, resolved, but mismatched
    std::vector<TrialRecord> records;           // in memory only

    bool operator==(const HomologySummary& o) const {
        return meta == o.meta && rows == o.rows && exceptions == o.exceptions;
    }
};

struct HomologyConfig {
    int dim = 1;
    std::optional<FieldCoeffs> coeffs;  // default: trigonometric polynomial of degree N
    std::size_t N = 5;
    std::vector<std::size_t> M_list;
    std::size_t trials = 100;
    int D = kDefaultDepth;
    std::uint64_t seed = 1;
    std::optional<double> zero_tol;  // default 1e-12 sqrt(A0)
    unsigned threads = 0;
};

inline FieldCoeffs resolve_coeffs(const HomologyConfig& cfg) {
    if (cfg.coeffs) {
        const bool is1 = std::holds_alternative<CoeffSeq1D>(*cfg.coeffs);
        if (is1 != (cfg.dim == 1)) throw std::invalid_argument("coefficient dimension does not match the experiment");
        return *cfg.coeffs;
    }
    if (cfg.dim == 1) return trig_coeffs_1d(cfg.N);
    return trig_coeffs_2d(cfg.N);
}

inline double default_zero_tol(const FieldCoeffs& c) {
    const double A0 = std::holds_alternative<CoeffSeq1D>(c) ? spectral_moments(std::get<CoeffSeq1D>(c))[0]
                                                             : spectral_moments(std::get<CoeffSeq2D>(c)).at(0, 0);
    return 1e-12 * std::sqrt(A0);
}

namespace detail {

template <class Realization>
std::vector<TrialOutcome> run_homology_trial(const Realization& r, const std::vector<std::size_t>& Ms, int D,
                                             double zero_tol, std::size_t max_frequency) {
    const std::size_t M_max = *std::max_element(Ms.begin(), Ms.end());
    const ReferenceBetti ref = reference_betti(r, default_reference_resolution(M_max, max_frequency), zero_tol);
    std::vector<TrialOutcome> out;
    for (std::size_t M : Ms) {
        TrialOutcome o;
        o.unresolved = !ref.resolved;
        const SignGrid grid = sign_grid(r, M, zero_tol);
        o.degenerate = grid.zero_count > 0;
        o.match = homology_match(betti_pair(grid), ref.betti);
        ValidationOutcome v;
        if constexpr (std::is_same_v<Realization, Realization1D>)
            v = validate_1d(r, M, D, zero_tol, 1);
        else
            v = validate_2d(r, M, D, zero_tol, 1);
        o.certified = v.certified();
        if (v.status == ValidationStatus::Degenerate) o.degenerate = true;
        out.push_back(o);
    }
    return out;
}

}  // namespace detail

/// Per trial: one reference at the finest resolution required by the largest
/// M, then Betti numbers and certification at every M.
inline HomologySummary homology_experiment(const HomologyConfig& cfg) {
    if (cfg.dim != 1 && cfg.dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (cfg.M_list.empty()) throw std::invalid_argument("M list is empty");
    for (std::size_t M : cfg.M_list)
        if (M < (cfg.dim == 2 ? 3u : 1u)) throw std::invalid_argument("M entries must be >= 1 (>= 3 in 2D)");
    const FieldCoeffs coeffs = resolve_coeffs(cfg);
    const double zero_tol = cfg.zero_tol.value_or(default_zero_tol(coeffs));
    if (zero_tol < 0.0) throw std::invalid_argument("zero_tol must be nonnegative");

    HomologySummary sum;
    sum.meta.D = cfg.D;
    sum.meta.zero_tol = zero_tol;
    sum.records.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        TrialRecord& rec = sum.records[t];
        rec.trial = t;
        rec.seed = rng::substream_seed(cfg.seed, t);
        if (const auto* c1 = std::get_if<CoeffSeq1D>(&coeffs))
            rec.per_M = detail::run_homology_trial(draw_realization(*c1, rec.seed), cfg.M_list, cfg.D, zero_tol,
                                                   c1->max_frequency());
        else {
            const auto& c2 = std::get<CoeffSeq2D>(coeffs);
            rec.per_M = detail::run_homology_trial(draw_realization(c2, rec.seed), cfg.M_list, cfg.D, zero_tol,
                                                   c2.max_frequency());
        }
    });

    std::size_t N = cfg.N;
    if (cfg.coeffs) N = std::visit([](const auto& c) { return c.max_frequency(); }, coeffs);
    for (std::size_t i = 0; i < cfg.M_list.size(); ++i) {
        const std::size_t M = cfg.M_list[i];
        RateRow row;
        row.experiment = cfg.dim == 1 ? "homology1d" : "homology2d";
        row.dim = cfg.dim;
        row.N = N;
        row.M = M;
        row.trials = cfg.trials;
        row.seed = cfg.seed;
        std::size_t valid = 0, matches = 0, certified = 0;
        for (const auto& rec : sum.records) {
            const TrialOutcome& o = rec.per_M[i];
            row.degenerate += o.degenerate;
            row.unresolved += o.unresolved;
            if (o.certified && !o.match && !o.unresolved) sum.exceptions.push_back({rec.trial, rec.seed, M});
            if (o.degenerate || o.unresolved) continue;
            ++valid;
            matches += o.match;
            certified += o.certified;
        }
        const auto cm = wilson_interval(matches, valid);
        const auto cc = wilson_interval(certified, valid);
        row.rate_match = valid ? static_cast<double>(matches) / static_cast<double>(valid) : 0.0;
        row.ci_lo = cm.lo;
        row.ci_hi = cm.hi;
        row.rate_certified = valid ? static_cast<double>(certified) / static_cast<double>(valid) : 0.0;
        row.cert_lo = cc.lo;
        row.cert_hi = cc.hi;
        if (const auto* c1 = std::get_if<CoeffSeq1D>(&coeffs))
            row.bound = bound_1d_periodic(spectral_moments(*c1), M).bound;
        else
            row.bound = bound_2d_periodic(spectral_moments(std::get<CoeffSeq2D>(coeffs)), M).bound;
        sum.rows.push_back(row);
    }
    std::sort(sum.exceptions.begin(), sum.exceptions.end(),
              [](const SoundnessException& a, const SoundnessException& b) {
                  return a.trial != b.trial ? a.trial < b.trial : a.M < b.M;
              });
    return sum;
}

// ---- orthant convergence -------------------------------------------------------

struct OrthantRow {
    std::string pattern;
    double delta = 0.0;
    double probability = 0.0;
    double stderr_ = 0.0;
    double functional = 0.0;
    double functional_stderr = 0.0;
    double limit = 0.0;

    bool operator==(const OrthantRow&) const = default;
};

struct OrthantSummary {
    std::vector<OrthantRow> rows;
    bool operator==(const OrthantSummary&) const = default;
};

/// The functional at each delta (delta index i uses substream i of the seed).
inline OrthantSummary orthant_convergence(const std::string& pattern, const FieldCoeffs& coeffs,
                                          const std::vector<double>& deltas, std::size_t samples, std::uint64_t seed,
                                          OrthantMethod method = OrthantMethod::Auto) {
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw std::invalid_argument("delta list must be decreasing");
    const Stencil st = named_stencil(pattern);
    const SpectralExpansion ex = expected_expansion(pattern, coeffs);
    const double limit = static_cast<double>(prop41_limit(st.signs, ex.v1_limit));
    OrthantSummary s;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto f = asymptotic_functional(coeffs, st, ex.v1_limit, deltas[i], method, samples,
                                             rng::substream_seed(seed, i));
        s.rows.push_back({pattern, deltas[i], f.probability, f.stderr_, f.functional, f.functional_stderr, limit});
    }
    return s;
}

// ---- persistence ---------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("error writing '" + path + "'");
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace detail

inline constexpr const char* kRateColumns =
    "experiment,dim,N,M,trials,seed,rate_match,ci_lo,ci_hi,rate_certified,cert_lo,cert_hi,bound,degenerate,unresolved";

inline std::string results_csv(const HomologySummary& s) {
    using detail::fmt_double;
    std::ostringstream out;
    out << "# nodal " << s.meta.version << "\n";
    out << "# patterns B=" << s.meta.survivors_B << " I4=" << s.meta.survivors_I4 << " I=" << s.meta.survivors_I << "\n";
    out << "# D=" << s.meta.D << "\n";
    out << "# zero_tol=" << fmt_double(s.meta.zero_tol) << "\n";
    for (const auto& e : s.exceptions) out << "# soundness_exception trial=" << e.trial << " seed=" << e.seed << " M=" << e.M << "\n";
    out << kRateColumns << "\n";
    for (const auto& r : s.rows)
        out << r.experiment << ',' << r.dim << ',' << r.N << ',' << r.M << ',' << r.trials << ',' << r.seed << ','
            << fmt_double(r.rate_match) << ',' << fmt_double(r.ci_lo) << ',' << fmt_double(r.ci_hi) << ','
            << fmt_double(r.rate_certified) << ',' << fmt_double(r.cert_lo) << ',' << fmt_double(r.cert_hi) << ','
            << fmt_double(r.bound) << ',' << r.degenerate << ',' << r.unresolved << "\n";
    return out.str();
}

inline nlohmann::ordered_json results_json(const HomologySummary& s) {
    nlohmann::ordered_json j;
    j["meta"] = {{"version", s.meta.version},
                 {"patterns", {{"B", s.meta.survivors_B}, {"I4", s.meta.survivors_I4}, {"I", s.meta.survivors_I}}},
                 {"D", s.meta.D},
                 {"zero_tol", s.meta.zero_tol}};
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : s.rows)
        j["rows"].push_back({{"experiment", r.experiment}, {"dim", r.dim}, {"N", r.N}, {"M", r.M}, {"trials", r.trials},
                             {"seed", r.seed}, {"rate_match", r.rate_match}, {"ci_lo", r.ci_lo}, {"ci_hi", r.ci_hi},
                             {"rate_certified", r.rate_certified}, {"cert_lo", r.cert_lo}, {"cert_hi", r.cert_hi},
                             {"bound", r.bound}, {"degenerate", r.degenerate}, {"unresolved", r.unresolved}});
    j["soundness_exceptions"] = nlohmann::ordered_json::array();
    for (const auto& e : s.exceptions) j["soundness_exceptions"].push_back({{"trial", e.trial}, {"seed", e.seed}, {"M", e.M}});
    return j;
}

inline HomologySummary parse_results_json(const nlohmann::json& j) {
    HomologySummary s;
    const auto& m = j.at("meta");
    s.meta.version = m.at("version").get<std::string>();
    s.meta.survivors_B = m.at("patterns").at("B").get<std::size_t>();
    s.meta.survivors_I4 = m.at("patterns").at("I4").get<std::size_t>();
    s.meta.survivors_I = m.at("patterns").at("I").get<std::size_t>();
    s.meta.D = m.at("D").get<int>();
    s.meta.zero_tol = m.at("zero_tol").get<double>();
    for (const auto& r : j.at("rows"))
        s.rows.push_back({r.at("experiment").get<std::string>(), r.at("dim").get<int>(), r.at("N").get<std::size_t>(),
                          r.at("M").get<std::size_t>(), r.at("trials").get<std::size_t>(),
                          r.at("seed").get<std::uint64_t>(), r.at("rate_match").get<double>(),
                          r.at("ci_lo").get<double>(), r.at("ci_hi").get<double>(),
                          r.at("rate_certified").get<double>(), r.at("cert_lo").get<double>(),
                          r.at("cert_hi").get<double>(), r.at("bound").get<double>(),
                          r.at("degenerate").get<std::size_t>(), r.at("unresolved").get<std::size_t>()});
    for (const auto& e : j.at("soundness_exceptions"))
        s.exceptions.push_back({e.at("trial").get<std::size_t>(), e.at("seed").get<std::uint64_t>(), e.at("M").get<std::size_t>()});
    return s;
}

inline HomologySummary parse_results_csv(const std::string& text) {
    HomologySummary s;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    auto value_after = [](const std::string& line, const std::string& key) {
        const auto p = line.find(key);
        if (p == std::string::npos) throw std::runtime_error("results metadata lacks '" + key + "'");
        const auto start = p + key.size();
        return line.substr(start, line.find(' ', start) - start);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# nodal ", 0) == 0) s.meta.version = line.substr(8);
            else if (line.rfind("# patterns ", 0) == 0) {
                s.meta.survivors_B = std::stoul(value_after(line, "B="));
                s.meta.survivors_I4 = std::stoul(value_after(line, "I4="));
                s.meta.survivors_I = std::stoul(value_after(line, " I="));
            } else if (line.rfind("# D=", 0) == 0) s.meta.D = std::stoi(line.substr(4));
            else if (line.rfind("# zero_tol=", 0) == 0) s.meta.zero_tol = std::stod(line.substr(11));
            else if (line.rfind("# soundness_exception ", 0) == 0)
                s.exceptions.push_back({std::stoul(value_after(line, "trial=")), std::stoull(value_after(line, "seed=")),
                                        std::stoul(value_after(line, "M="))});
            continue;
        }
        if (!header_seen) {
            if (line != kRateColumns) throw std::runtime_error("unexpected results header: " + line);
            header_seen = true;
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() != 15) throw std::runtime_error("results row must have 15 fields: " + line);
        s.rows.push_back({f[0], std::stoi(f[1]), std::stoul(f[2]), std::stoul(f[3]), std::stoul(f[4]), std::stoull(f[5]),
                          std::stod(f[6]), std::stod(f[7]), std::stod(f[8]), std::stod(f[9]), std::stod(f[10]),
                          std::stod(f[11]), std::stod(f[12]), std::stoul(f[13]), std::stoul(f[14])});
    }
    if (!header_seen) throw std::runtime_error("results file has no header row");
    return s;
}

enum class ResultsFormat { Csv, Json };

inline ResultsFormat parse_results_format(const std::string& s) {
    if (s == "csv") return ResultsFormat::Csv;
    if (s == "json") return ResultsFormat::Json;
    throw std::invalid_argument("format must be csv or json");
}

inline void write_results(const HomologySummary& s, const std::string& path, ResultsFormat format) {
    detail::write_text(path, format == ResultsFormat::Csv ? results_csv(s) : results_json(s).dump(2) + "\n");
}

inline HomologySummary read_results(const std::string& path, ResultsFormat format) {
    const std::string text = detail::read_text(path);
    return format == ResultsFormat::Csv ? parse_results_csv(text) : parse_results_json(nlohmann::json::parse(text));
}

inline std::string zero_stats_csv(const ZeroStatsSummary& s) {
    using detail::fmt_double;
    std::ostringstream out;
    out << "# nodal " << kVersion << "\n";
    out << "experiment,N,trials,seed,grid_factor,mean_zeros,zeros_stderr,kac_rice,mean_min_gap,q05_min_gap,M95,odd_counts,"
           "gap_trials\n";
    out << "zero_stats," << s.N << ',' << s.trials << ',' << s.seed << ',' << s.grid_factor << ','
        << fmt_double(s.mean_zeros) << ',' << fmt_double(s.zeros_stderr) << ',' << fmt_double(s.kac_rice) << ','
        << fmt_double(s.mean_min_gap) << ',' << fmt_double(s.q05_min_gap) << ',' << s.M95 << ',' << s.odd_counts << ','
        << s.gap_trials << "\n";
    return out.str();
}

inline nlohmann::ordered_json zero_stats_json(const ZeroStatsSummary& s) {
    return {{"experiment", "zero_stats"}, {"version", kVersion},   {"N", s.N},
            {"trials", s.trials},         {"seed", s.seed},         {"grid_factor", s.grid_factor},
            {"mean_zeros", s.mean_zeros}, {"zeros_stderr", s.zeros_stderr}, {"kac_rice", s.kac_rice},
            {"mean_min_gap", s.mean_min_gap}, {"q05_min_gap", s.q05_min_gap}, {"M95", s.M95},
            {"odd_counts", s.odd_counts}, {"gap_trials", s.gap_trials}};
}

inline std::string orthant_csv(const OrthantSummary& s) {
    using detail::fmt_double;
    std::ostringstream out;
    out << "# nodal " << kVersion << "\n";
    out << "experiment,pattern,delta,probability,stderr,functional,functional_stderr,limit\n";
    for (const auto& r : s.rows)
        out << "orthant," << r.pattern << ',' << fmt_double(r.delta) << ',' << fmt_double(r.probability) << ','
            << fmt_double(r.stderr_) << ',' << fmt_double(r.functional) << ',' << fmt_double(r.functional_stderr) << ','
            << fmt_double(r.limit) << "\n";
    return out.str();
}

inline nlohmann::ordered_json orthant_json(const OrthantSummary& s) {
    nlohmann::ordered_json j = {{"experiment", "orthant"}, {"version", kVersion}, {"rows", nlohmann::ordered_json::array()}};
    for (const auto& r : s.rows)
        j["rows"].push_back({{"pattern", r.pattern}, {"delta", r.delta}, {"probability", r.probability},
                             {"stderr", r.stderr_}, {"functional", r.functional},
                             {"functional_stderr", r.functional_stderr}, {"limit", r.limit}});
    return j;
}

}  // namespace nodal
