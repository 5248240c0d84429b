#include "nodal/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nodal/nodal.hpp"

namespace nodal::cli {
namespace {

using nlohmann::json;
using Realization = std::variant<Realization1D, Realization2D>;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Pattern libraries: NODAL_PATTERNS names a pattern file replacing the built-in one.
const PatternSet& active_patterns() {
    static const std::unique_ptr<PatternSet> from_env = []() -> std::unique_ptr<PatternSet> {
        const char* path = std::getenv("NODAL_PATTERNS");
        if (!path || !*path) return nullptr;
        return std::make_unique<PatternSet>(load_patterns(read_file(path)));
    }();
    return from_env ? *from_env : default_patterns();
}

FieldCoeffs coeffs_from_json(const json& j) {
    return coeff_dim(j) == 1 ? FieldCoeffs{coeffs_1d_from_json(j)} : FieldCoeffs{coeffs_2d_from_json(j)};
}

// Where a field comes from: a realization file, a coefficient file plus seed,
// or the degree-N trigonometric polynomial plus seed.
struct FieldSource {
    int dim = 1;
    std::size_t N = 5;
    std::string coeffs_file;
    std::string realization_file;
    std::uint64_t seed = 0;

    void add_to(CLI::App* app, bool with_realization = true) {
        app->add_option("--dim", dim, "Spatial dimension")->check(CLI::IsMember({1, 2}))->capture_default_str();
        app->add_option("--N", N, "Degree of the trigonometric polynomial")->capture_default_str();
        app->add_option("--coeffs", coeffs_file, "Coefficient file (JSON)");
        if (with_realization) app->add_option("--realization", realization_file, "Realization file (JSON)");
        app->add_option("--seed", seed, "Random seed")->capture_default_str();
    }

    FieldCoeffs coeffs() const {
        if (!coeffs_file.empty()) {
            FieldCoeffs c = coeffs_from_json(read_json_file(coeffs_file));
            const int d = std::holds_alternative<CoeffSeq1D>(c) ? 1 : 2;
            if (d != dim) throw UsageError("--dim does not match the coefficient file");
            return c;
        }
        if (dim == 1) return trig_coeffs_1d(N);
        return trig_coeffs_2d(N);
    }

    Realization realization() const {
        if (!realization_file.empty()) {
            const json j = read_json_file(realization_file);
            const int d = coeff_dim(j);
            if (d != dim) throw UsageError("--dim does not match the realization file");
            if (d == 1) return realization_1d_from_json(j);
            return realization_2d_from_json(j);
        }
        const FieldCoeffs c = coeffs();
        if (const auto* c1 = std::get_if<CoeffSeq1D>(&c)) return draw_realization(*c1, seed);
        return draw_realization(std::get<CoeffSeq2D>(c), seed);
    }
};

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

void write_or_print(std::ostream& out, const std::string& path, const std::string& text) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
}

json realization_json(const Realization& r) {
    json j;
    std::visit([&](const auto& x) { to_json(j, x); }, r);
    return j;
}

// ---- experiment configs ---------------------------------------------------------

void require_keys(const json& cfg, const std::set<std::string>& allowed) {
    if (!cfg.is_object()) throw UsageError("experiment config must be a JSON object");
    for (const auto& [key, value] : cfg.items())
        if (!allowed.count(key)) throw UsageError("unknown config key '" + key + "'");
}

template <class T>
T get_or(const json& cfg, const char* key, T fallback) {
    return cfg.contains(key) && !cfg.at(key).is_null() ? cfg.at(key).get<T>() : fallback;
}

std::optional<FieldCoeffs> config_coeffs(const json& cfg) {
    if (cfg.contains("coeffs") && cfg.contains("coeffs_file")) throw UsageError("give either coeffs or coeffs_file");
    if (cfg.contains("coeffs")) return coeffs_from_json(cfg.at("coeffs"));
    if (cfg.contains("coeffs_file")) return coeffs_from_json(read_json_file(cfg.at("coeffs_file").get<std::string>()));
    return std::nullopt;
}

int run_experiment(const std::string& kind, const json& cfg, unsigned threads_flag, bool threads_given,
                   std::ostream& out) {
    const std::string output = get_or<std::string>(cfg, "output", "");
    const auto format = parse_results_format(get_or<std::string>(cfg, "format", "csv"));
    const unsigned threads = threads_given ? threads_flag : get_or<unsigned>(cfg, "threads", 0);
    if (kind == "zero_stats") {
        require_keys(cfg, {"N", "trials", "seed", "grid_factor", "threads", "output", "format"});
        std::vector<std::size_t> Ns;
        if (cfg.contains("N") && cfg.at("N").is_array()) Ns = cfg.at("N").get<std::vector<std::size_t>>();
        else Ns = {get_or<std::size_t>(cfg, "N", 10)};
        const auto trials = get_or<std::size_t>(cfg, "trials", 1000);
        const auto seed = get_or<std::uint64_t>(cfg, "seed", 1);
        const auto factor = get_or<std::size_t>(cfg, "grid_factor", 50);
        std::string text;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < Ns.size(); ++i) {
            const auto s = zero_stats(Ns[i], trials, seed, threads, factor);
            if (format == ResultsFormat::Csv) {
                std::string csv = zero_stats_csv(s);
                if (i > 0) csv = csv.substr(csv.find('\n', csv.find('\n') + 1) + 1);  // drop repeated header lines
                text += csv;
            } else {
                rows.push_back(zero_stats_json(s));
            }
        }
        if (format == ResultsFormat::Json) text = rows.dump(2) + "\n";
        write_or_print(out, output, text);
        return kExitOk;
    }
    if (kind == "homology1d" || kind == "homology2d") {
        require_keys(cfg, {"N", "M", "trials", "D", "seed", "zero_tol", "coeffs", "coeffs_file", "threads", "output",
                           "format"});
        HomologyConfig hc;
        hc.dim = kind == "homology1d" ? 1 : 2;
        hc.N = get_or<std::size_t>(cfg, "N", hc.dim == 1 ? 5 : 3);
        hc.coeffs = config_coeffs(cfg);
        if (!cfg.contains("M")) throw UsageError("config needs an M list");
        hc.M_list = cfg.at("M").get<std::vector<std::size_t>>();
        hc.trials = get_or<std::size_t>(cfg, "trials", 100);
        hc.D = get_or<int>(cfg, "D", kDefaultDepth);
        hc.seed = get_or<std::uint64_t>(cfg, "seed", 1);
        if (cfg.contains("zero_tol") && !cfg.at("zero_tol").is_null()) hc.zero_tol = cfg.at("zero_tol").get<double>();
        hc.threads = threads;
        const HomologySummary s = homology_experiment(hc);
        write_or_print(out, output, format == ResultsFormat::Csv ? results_csv(s) : results_json(s).dump(2) + "\n");
        return kExitOk;
    }
    if (kind == "orthant") {
        require_keys(cfg, {"pattern", "N", "coeffs", "coeffs_file", "deltas", "samples", "seed", "method", "threads",
                           "output", "format"});
        const std::string pattern = get_or<std::string>(cfg, "pattern", "crossover1d");
        const Stencil st = named_stencil(pattern);
        const auto N = get_or<std::size_t>(cfg, "N", 3);
        FieldCoeffs coeffs = st.dim == 1 ? FieldCoeffs{trig_coeffs_1d(N)} : FieldCoeffs{trig_coeffs_2d(N)};
        if (auto c = config_coeffs(cfg)) coeffs = *c;
        std::vector<double> deltas = default_delta_sequence();
        if (cfg.contains("deltas")) deltas = cfg.at("deltas").get<std::vector<double>>();
        const auto s = orthant_convergence(pattern, coeffs, deltas, get_or<std::size_t>(cfg, "samples", 200000),
                                           get_or<std::uint64_t>(cfg, "seed", 1),
                                           parse_orthant_method(get_or<std::string>(cfg, "method", "auto")));
        write_or_print(out, output, format == ResultsFormat::Csv ? orthant_csv(s) : orthant_json(s).dump(2) + "\n");
        return kExitOk;
    }
    throw UsageError("unknown experiment kind '" + kind + "' (zero_stats, homology1d, homology2d, orthant)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nodal-domain homology: random fields, cubical approximations, certification and bounds", "nodal"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", std::string(kVersion));

    // gen
    FieldSource gen_src;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Draw a random field realization and print it as JSON");
    gen_src.add_to(gen, false);
    gen->add_option("--out", gen_out, "Write to this file instead of stdout");

    // eval
    FieldSource eval_src;
    std::vector<double> eval_x;
    auto* eval = app.add_subcommand("eval", "Evaluate a realization at a point");
    eval_src.add_to(eval);
    eval->add_option("--x", eval_x, "Point coordinates (one per dimension)")->required();

    // grid
    FieldSource grid_src;
    std::size_t grid_M = 8;
    double grid_tol = 0.0;
    auto* grid = app.add_subcommand("grid", "Sample signs on the (M+1)^dim grid");
    grid_src.add_to(grid);
    grid->add_option("--M", grid_M, "Discretization size")->required();
    grid->add_option("--zero-tol", grid_tol, "Values with |u| <= tol are flagged zero")->capture_default_str();

    // betti
    FieldSource betti_src;
    std::size_t betti_M = 8;
    double betti_tol = 0.0;
    bool betti_ref = false;
    auto* betti_cmd = app.add_subcommand("betti", "Betti numbers of the cubical approximations");
    betti_src.add_to(betti_cmd);
    betti_cmd->add_option("--M", betti_M, "Discretization size")->required();
    betti_cmd->add_option("--zero-tol", betti_tol, "Values with |u| <= tol are flagged zero")->capture_default_str();
    betti_cmd->add_flag("--reference", betti_ref, "Also compute the fine-grid reference and compare");

    // validate
    FieldSource val_src;
    std::size_t val_M = 8;
    int val_D = kDefaultDepth;
    double val_tol = 0.0;
    std::size_t val_max = 50;
    auto* validate = app.add_subcommand("validate", "Certify the cubical homology by dyadic admissibility");
    val_src.add_to(validate);
    validate->add_option("--M", val_M, "Discretization size")->required();
    validate->add_option("--depth", val_D, "Dyadic depth D")->capture_default_str();
    validate->add_option("--zero-tol", val_tol, "Values with |u| <= tol are flagged zero")->capture_default_str();
    validate->add_option("--max-violations", val_max, "Stop after this many violations (0 = all)")
        ->capture_default_str();

    // bound
    FieldSource bound_src;
    std::size_t bound_M = 0;
    double bound_target = 0.0;
    bool bound_torus = false;
    auto* bound = app.add_subcommand("bound", "Lower bound on the probability of correct homology");
    bound->add_option("--dim", bound_src.dim, "Spatial dimension")->check(CLI::IsMember({1, 2}))->capture_default_str();
    bound->add_option("--N", bound_src.N, "Degree of the trigonometric polynomial")->capture_default_str();
    bound->add_option("--coeffs", bound_src.coeffs_file, "Coefficient file (JSON)");
    auto* bound_M_opt = bound->add_option("--M", bound_M, "Discretization size");
    auto* bound_target_opt = bound->add_option("--target", bound_target, "Report the least M reaching this bound");
    bound->add_flag("--torus", bound_torus, "Periodic boundary conditions (2D only)");

    // orthant
    std::string orth_pattern = "crossover1d";
    std::string orth_coeffs;
    std::size_t orth_N = 3;
    double orth_delta = 0.01;
    std::size_t orth_samples = 200000;
    std::uint64_t orth_seed = 0;
    std::string orth_method = "auto";
    auto* orthant = app.add_subcommand("orthant", "Sign-pattern probability and its small-delta functional");
    orthant->add_option("--pattern", orth_pattern, "Stencil name")
        ->check(CLI::IsMember(stencil_names()))
        ->capture_default_str();
    orthant->add_option("--coeffs", orth_coeffs, "Coefficient file (JSON)");
    orthant->add_option("--N", orth_N, "Degree of the trigonometric polynomial")->capture_default_str();
    orthant->add_option("--delta", orth_delta, "Stencil scale")->capture_default_str();
    orthant->add_option("--samples", orth_samples, "Samples for the stochastic estimators")->capture_default_str();
    orthant->add_option("--seed", orth_seed, "Random seed")->capture_default_str();
    orthant->add_option("--method", orth_method, "auto, exact, mc or ray")
        ->check(CLI::IsMember({"auto", "exact", "mc", "ray"}))
        ->capture_default_str();

    // patterns check
    auto* patterns = app.add_subcommand("patterns", "Pattern-library tools");
    patterns->require_subcommand(1);
    std::string pat_file;
    auto* pat_check = patterns->add_subcommand("check", "Print survivor counts of a pattern file");
    pat_check->add_option("file", pat_file, "Pattern file (default: built-in library)");

    // experiment
    std::string exp_kind, exp_config;
    unsigned exp_threads = 0;
    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
    experiment->add_option("kind", exp_kind, "zero_stats, homology1d, homology2d or orthant")->required();
    experiment->add_option("--config", exp_config, "Experiment config (JSON)")->required();
    auto* exp_threads_opt = experiment->add_option("--threads", exp_threads, "Worker threads (default: all cores)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    try {
        if (*gen) {
            write_or_print(out, gen_out, realization_json(gen_src.realization()).dump(2) + "\n");
            return kExitOk;
        }
        if (*eval) {
            const Realization r = eval_src.realization();
            double value;
            if (const auto* r1 = std::get_if<Realization1D>(&r)) {
                if (eval_x.size() != 1) throw UsageError("1D evaluation needs one --x coordinate");
                value = evaluate(*r1, eval_x[0]);
            } else {
                if (eval_x.size() != 2) throw UsageError("2D evaluation needs two --x coordinates");
                value = evaluate(std::get<Realization2D>(r), eval_x[0], eval_x[1]);
            }
            emit(out, {{"x", eval_x}, {"value", value}});
            return kExitOk;
        }
        if (*grid) {
            const Realization r = grid_src.realization();
            json j;
            std::visit([&](const auto& x) { to_json(j, sign_grid(x, grid_M, grid_tol)); }, r);
            emit(out, j);
            return kExitOk;
        }
        if (*betti_cmd) {
            const Realization r = betti_src.realization();
            json j;
            std::visit(
                [&](const auto& x) {
                    const SignGrid g = sign_grid(x, betti_M, betti_tol);
                    const BettiPair b = betti_pair(g);
                    j = {{"M", betti_M}, {"zero_count", g.zero_count}, {"betti", b}};
                    if (betti_ref) {
                        const ReferenceBetti ref = reference_betti(
                            x, default_reference_resolution(betti_M, x.coeffs.max_frequency()), betti_tol);
                        j["reference"] = {{"M_ref", ref.M_ref}, {"resolved", ref.resolved}, {"betti", ref.betti}};
                        j["match"] = homology_match(b, ref.betti);
                    }
                },
                r);
            emit(out, j);
            return kExitOk;
        }
        if (*validate) {
            const Realization r = val_src.realization();
            ValidationOutcome o;
            if (const auto* r1 = std::get_if<Realization1D>(&r))
                o = validate_1d(*r1, val_M, val_D, val_tol, val_max);
            else
                o = validate_2d(std::get<Realization2D>(r), val_M, val_D, val_tol, val_max, active_patterns());
            emit(out, o);
            return o.certified() ? kExitOk : kExitNotCertified;
        }
        if (*bound) {
            const FieldCoeffs c = bound_src.coeffs();
            if (bound_torus && bound_src.dim != 2) throw UsageError("--torus applies to 2D only");
            const bool has_M = bound_M_opt->count() > 0, has_target = bound_target_opt->count() > 0;
            if (!has_M && !has_target) throw UsageError("bound needs --M or --target");
            auto eval_bound = [&](std::size_t M) {
                if (const auto* c1 = std::get_if<CoeffSeq1D>(&c)) return bound_1d_periodic(spectral_moments(*c1), M);
                const auto& c2 = std::get<CoeffSeq2D>(c);
                const auto m = spectral_moments(c2);
                if (bound_torus) {
                    BoundResult b = bound_2d_torus(c1_c2_periodic(m, c2.L).C2, c2.L, M);
                    b.constants["ratio"] = moment_ratio_2d(m);
                    return b;
                }
                BoundResult b = bound_2d_periodic(m, M);
                const auto cc = c1_c2_periodic(m, c2.L);
                b.constants["C1"] = cc.C1;
                b.constants["C2"] = cc.C2;
                return b;
            };
            json j;
            if (has_M) {
                if (bound_M < 1) throw UsageError("--M must be at least 1");
                j = eval_bound(bound_M);
            }
            if (has_target) {
                const std::size_t m = min_M([&](std::size_t M) { return eval_bound(M).bound; }, bound_target);
                if (!has_M) j = eval_bound(m);
                j["target"] = bound_target;
                j["min_M"] = m;
            }
            emit(out, j);
            return kExitOk;
        }
        if (*orthant) {
            const Stencil st = named_stencil(orth_pattern);
            FieldCoeffs c = st.dim == 1 ? FieldCoeffs{trig_coeffs_1d(orth_N)} : FieldCoeffs{trig_coeffs_2d(orth_N)};
            if (!orth_coeffs.empty()) c = coeffs_from_json(read_json_file(orth_coeffs));
            const SpectralExpansion ex = expected_expansion(orth_pattern, c);
            const auto f =
                asymptotic_functional(c, st, ex.v1_limit, orth_delta, parse_orthant_method(orth_method), orth_samples,
                                      orth_seed);
            emit(out, {{"pattern", orth_pattern},
                       {"delta", orth_delta},
                       {"estimate", f.probability},
                       {"stderr", f.stderr_},
                       {"functional", f.functional},
                       {"functional_stderr", f.functional_stderr},
                       {"limit", static_cast<double>(prop41_limit(st.signs, ex.v1_limit))}});
            return kExitOk;
        }
        if (*pat_check) {
            const std::string text = pat_file.empty() ? std::string(kDefaultPatternText) : read_file(pat_file);
            auto libs = parse_patterns(text);
            for (const char* name : {"B", "I4", "I5"})
                if (!libs.count(name)) throw PatternError(std::string("pattern file has no '") + name + "' library");
            const PatternLibrary I = merge_libraries("I", {&libs["I4"], &libs["I5"]});
            nlohmann::ordered_json j = {{"B", count_surviving(libs["B"])},
                                        {"I4", count_surviving(libs["I4"])},
                                        {"I", count_surviving(I)}};
            out << j.dump() << "\n";
            load_patterns(text);  // throws with a diagnostic if a checksum is off
            return kExitOk;
        }
        if (*experiment) {
            return run_experiment(exp_kind, read_json_file(exp_config), exp_threads, exp_threads_opt->count() > 0,
                                  out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace nodal::cli
