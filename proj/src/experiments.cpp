#include "aclab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "aclab/closed_forms.hpp"
#include "aclab/errors.hpp"
#include "aclab/estimation.hpp"
#include "aclab/parallel.hpp"
#include "aclab/rtn.hpp"
#include "aclab/sampleset_io.hpp"
#include "aclab/sha256.hpp"
#include "aclab/statevector.hpp"
#include "aclab/universal.hpp"

namespace aclab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::set<std::string> kExperiments = {"haar-ipr", "rmps",     "rpm", "simulate",    "rtn",
                                            "fit",      "collapse", "xeb", "distribution"};

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// ---- schema checking ------------------------------------------------------

struct Checker {
    ConfigDiagnostics& diag;
    std::string where;

    void fail(const std::string& msg) const { diag.errors.push_back(where + ": " + msg); }

    void known_fields(const json& j, const std::set<std::string>& allowed) const {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!allowed.count(it.key())) fail("unknown field '" + it.key() + "'");
    }

    bool require(const json& j, const std::string& key, json::value_t type,
                 const char* type_name) const {
        if (!j.contains(key)) {
            fail("missing required field '" + key + "'");
            return false;
        }
        const auto& v = j.at(key);
        const bool numeric_ok =
            (type == json::value_t::number_float && v.is_number()) ||
            (type == json::value_t::number_unsigned && v.is_number_unsigned()) ||
            (type == json::value_t::number_integer && v.is_number_integer());
        if (!numeric_ok && v.type() != type) {
            fail("field '" + key + "' must be a " + type_name);
            return false;
        }
        return true;
    }
};

Ensemble parse_ensemble(const std::string& s) {
    if (s == "unitary") return Ensemble::Unitary;
    if (s == "orthogonal") return Ensemble::Orthogonal;
    throw config_error("ensemble must be 'unitary' or 'orthogonal', got '" + s + "'");
}

void check_ensemble(const Checker& c, const json& p) {
    if (c.require(p, "ensemble", json::value_t::string, "string")) {
        const auto s = p.at("ensemble").get<std::string>();
        if (s != "unitary" && s != "orthogonal")
            c.fail("ensemble must be 'unitary' or 'orthogonal'");
    }
}

void check_int_list(const Checker& c, const json& p, const std::string& key, bool require_even) {
    if (!c.require(p, key, json::value_t::array, "array")) return;
    for (const auto& v : p.at(key)) {
        if (!v.is_number_integer()) {
            c.fail(key + " must contain integers");
            return;
        }
        if (require_even && v.get<long>() % 2 != 0)
            c.fail(key + " must contain even system sizes, got " + v.dump());
    }
}

std::size_t amplitude_cap_of(const json& p) {
    return p.value("amplitude_cap", kDefaultAmplitudeCap);
}

void check_statevector_size(const Checker& c, const json& p, long n, long d) {
    const double log2_dim = n * std::log2(static_cast<double>(d));
    const double cap = static_cast<double>(amplitude_cap_of(p));
    if (log2_dim > std::log2(cap))
        c.fail("d^N = " + std::to_string(d) + "^" + std::to_string(n) +
               " exceeds the amplitude cap of " + std::to_string(amplitude_cap_of(p)) +
               " (default 2^26) amplitudes");
}

void validate_params(Checker c, const std::string& experiment, const json& p) {
    if (!p.is_object()) {
        c.fail("params must be an object");
        return;
    }
    if (experiment == "haar-ipr") {
        c.known_fields(p, {"ensemble", "dimensions", "k_max"});
        check_ensemble(c, p);
        c.require(p, "dimensions", json::value_t::array, "array");
        c.require(p, "k_max", json::value_t::number_integer, "integer");
    } else if (experiment == "rmps") {
        c.known_fields(p, {"ensemble", "d", "chi", "n_list", "k_max"});
        check_ensemble(c, p);
        c.require(p, "d", json::value_t::number_integer, "integer");
        c.require(p, "chi", json::value_t::number_integer, "integer");
        check_int_list(c, p, "n_list", false);
        c.require(p, "k_max", json::value_t::number_integer, "integer");
    } else if (experiment == "rpm") {
        c.known_fields(p, {"epsilon", "t", "n_sites", "k_list"});
        c.require(p, "epsilon", json::value_t::number_float, "number");
        c.require(p, "t", json::value_t::number_integer, "integer");
        c.require(p, "n_sites", json::value_t::number_integer, "integer");
        c.require(p, "k_list", json::value_t::array, "array");
        if (p.contains("t") && p.at("t").is_number_integer() && p.at("t").get<long>() % 2 != 0)
            c.fail("rpm depth t must be even");
    } else if (experiment == "simulate") {
        c.known_fields(p, {"architecture", "ensemble", "n_sites", "d", "depth", "chi",
                           "realizations", "mode", "n_bitstrings", "amplitude_cap",
                           "kim_params", "with_purity"});
        if (c.require(p, "architecture", json::value_t::string, "string")) {
            const auto a = p.at("architecture").get<std::string>();
            if (a != "brickwork" && a != "staircase" && a != "kicked_ising")
                c.fail("architecture must be brickwork, staircase or kicked_ising");
            if (a != "kicked_ising") check_ensemble(c, p);
            if (a == "staircase")
                c.require(p, "chi", json::value_t::number_integer, "integer");
            else
                c.require(p, "depth", json::value_t::number_integer, "integer");
        }
        c.require(p, "n_sites", json::value_t::number_integer, "integer");
        c.require(p, "realizations", json::value_t::number_integer, "integer");
        if (c.require(p, "mode", json::value_t::string, "string")) {
            const auto m = p.at("mode").get<std::string>();
            if (m != "full_enumeration" && m != "uniform_bitstrings")
                c.fail("mode must be full_enumeration or uniform_bitstrings");
            if (m == "uniform_bitstrings")
                c.require(p, "n_bitstrings", json::value_t::number_integer, "integer");
        }
        if (p.contains("n_sites") && p.at("n_sites").is_number_integer())
            check_statevector_size(c, p, p.at("n_sites").get<long>(), p.value("d", 2));
    } else if (experiment == "rtn") {
        c.known_fields(p, {"ensemble", "n_sites", "t", "method", "tt_tol", "tt_max_bond"});
        check_ensemble(c, p);
        c.require(p, "n_sites", json::value_t::number_integer, "integer");
        c.require(p, "t", json::value_t::number_integer, "integer");
        if (p.contains("n_sites") && p.at("n_sites").is_number_integer() &&
            p.at("n_sites").get<long>() % 2 != 0)
            c.fail("rtn requires an even N, got " + p.at("n_sites").dump());
        if (p.contains("method")) {
            const auto m = p.at("method").get<std::string>();
            if (m != "exact" && m != "tensor_train" && m != "auto")
                c.fail("method must be exact, tensor_train or auto");
        }
    } else if (experiment == "collapse") {
        c.known_fields(p, {"ensemble", "n_list", "t_max", "method", "tt_tol", "tt_max_bond",
                           "fit_window"});
        check_ensemble(c, p);
        check_int_list(c, p, "n_list", true);
        c.require(p, "t_max", json::value_t::number_integer, "integer");
        if (p.contains("fit_window") &&
            (!p.at("fit_window").is_array() || p.at("fit_window").size() != 2))
            c.fail("fit_window must be [t_lo, t_hi]");
    } else if (experiment == "fit") {
        c.known_fields(p, {"ensemble", "mode", "input_csv", "generate"});
        check_ensemble(c, p);
        if (c.require(p, "mode", json::value_t::string, "string")) {
            const auto m = p.at("mode").get<std::string>();
            if (m != "alpha_only" && m != "alpha_beta") c.fail("mode must be alpha_only or alpha_beta");
        }
        if (!p.contains("input_csv") && !p.contains("generate"))
            c.fail("fit needs either input_csv or a generate block");
        if (p.contains("generate")) {
            const auto& g = p.at("generate");
            Checker gc{c.diag, c.where + ".generate"};
            gc.known_fields(g, {"alpha", "beta", "n_samples"});
            gc.require(g, "alpha", json::value_t::number_float, "number");
            gc.require(g, "beta", json::value_t::number_float, "number");
            gc.require(g, "n_samples", json::value_t::number_integer, "integer");
        }
    } else if (experiment == "distribution") {
        c.known_fields(p, {"ensemble", "n_sites", "depth", "d", "realizations",
                           "samples_per_realization", "histogram_bins", "amplitude_cap"});
        check_ensemble(c, p);
        c.require(p, "n_sites", json::value_t::number_integer, "integer");
        c.require(p, "depth", json::value_t::number_integer, "integer");
        c.require(p, "realizations", json::value_t::number_integer, "integer");
        c.require(p, "samples_per_realization", json::value_t::number_integer, "integer");
        if (p.contains("n_sites") && p.at("n_sites").is_number_integer())
            check_statevector_size(c, p, p.at("n_sites").get<long>(), p.value("d", 2));
    } else if (experiment == "xeb") {
        c.known_fields(p, {"n_sites", "depth_list", "epsilon_n_list", "realizations",
                           "trajectories_per_realization", "bitstrings_per_trajectory",
                           "fit_realizations", "fit_samples_per_realization", "amplitude_cap"});
        c.require(p, "n_sites", json::value_t::number_integer, "integer");
        c.require(p, "depth_list", json::value_t::array, "array");
        c.require(p, "epsilon_n_list", json::value_t::array, "array");
        c.require(p, "realizations", json::value_t::number_integer, "integer");
        if (p.contains("n_sites") && p.at("n_sites").is_number_integer())
            check_statevector_size(c, p, p.at("n_sites").get<long>(), 2);
    }
}

// ---- output helpers --------------------------------------------------------

struct OutputWriter {
    fs::path dir;
    std::vector<ManifestEntry> entries;

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw config_error("cannot write " + p.string());
        out << content;
        entries.push_back({name, sha256_hex(content), content.size()});
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

json fit_result_json(const FitResult& f) {
    json j;
    j["schema"] = 1;
    j["ensemble"] = ensemble_name(f.ensemble);
    j["alpha_hat"] = f.alpha_hat;
    j["beta_hat"] = f.beta_hat;
    j["alpha_err"] = f.alpha_err;
    j["beta_err"] = f.beta_err;
    j["covariance"] = f.covariance;
    j["log_likelihood"] = f.log_likelihood;
    j["n_samples"] = f.n_samples;
    j["ks_statistic"] = f.ks_statistic;
    j["converged"] = f.converged;
    j["sigma_method"] = f.sigma_method;
    if (!f.diagnostics.empty()) j["diagnostics"] = f.diagnostics;
    return j;
}

CircuitSpec spec_from_params(const json& p, std::uint64_t realization_seed) {
    CircuitSpec spec;
    const auto arch = p.value("architecture", std::string("brickwork"));
    spec.architecture = arch == "brickwork"    ? Architecture::Brickwork
                        : arch == "staircase"  ? Architecture::Staircase
                                               : Architecture::KickedIsing;
    spec.n_sites = p.at("n_sites").get<int>();
    spec.d = p.value("d", 2);
    spec.depth = p.value("depth", 1);
    spec.chi = p.value("chi", 2);
    if (spec.architecture != Architecture::KickedIsing)
        spec.ensemble = parse_ensemble(p.at("ensemble").get<std::string>());
    if (p.contains("kim_params")) {
        spec.kim.j = p.at("kim_params").value("j", spec.kim.j);
        spec.kim.b = p.at("kim_params").value("b", spec.kim.b);
        spec.kim.h = p.at("kim_params").value("h", spec.kim.h);
    }
    spec.seed = realization_seed;
    return spec;
}

// Disorder-averaged overlap collection: per-realization streams derived from
// the experiment seed; ordered concatenation keeps the output bytes identical
// for any worker count.
OverlapSampleSet collect_overlaps(const json& p, Ensemble ensemble, Architecture arch,
                                  std::uint64_t seed, std::uint64_t realizations,
                                  std::uint64_t per_realization, int workers,
                                  std::size_t amplitude_cap) {
    std::vector<std::vector<double>> buckets(realizations);
    parallel_for(realizations, workers, [&](std::size_t r) {
        json pr = p;
        CircuitSpec spec = spec_from_params(pr, Rng::derive_stream_seed(seed, r));
        spec.architecture = arch;
        spec.ensemble = ensemble;
        const PureState state = run_circuit(spec, {}, amplitude_cap);
        Rng sample_rng = Rng::stream(spec.seed, 2);
        SamplingMode mode;
        mode.full_enumeration = false;
        mode.n_bitstrings = per_realization;
        mode.with_purity = false;
        buckets[r] = overlap_statistics(state, mode, sample_rng, amplitude_cap).set.samples;
    });
    OverlapSampleSet set;
    for (const auto& b : buckets) set.samples.insert(set.samples.end(), b.begin(), b.end());
    CircuitSpec digest_spec = spec_from_params(p, 0);
    digest_spec.architecture = arch;
    digest_spec.ensemble = ensemble;
    set.meta.spec_digest = digest_spec.digest();
    set.meta.mode = "uniform_bitstrings(" + std::to_string(per_realization) + ")";
    set.meta.seed = seed;
    set.meta.realizations = realizations;
    return set;
}

// ---- experiment pipelines ---------------------------------------------------

void run_haar_ipr(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const Ensemble ens = parse_ensemble(p.at("ensemble").get<std::string>());
    const int k_max = p.at("k_max").get<int>();
    std::string csv = "ensemble,D,k,ipr\n";
    for (const auto& dv : p.at("dimensions")) {
        const double dim = dv.get<double>();
        for (int k = 1; k <= k_max; ++k)
            csv += std::string(ensemble_name(ens)) + "," + format_double(dim) + "," +
                   std::to_string(k) + "," + format_double(haar_ipr(ens, dim, k)) + "\n";
    }
    out.write("haar_ipr.csv", csv);
}

void run_rmps(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    RmpsSpec spec;
    spec.ensemble = parse_ensemble(p.at("ensemble").get<std::string>());
    spec.d = p.at("d").get<int>();
    spec.chi = p.at("chi").get<long>();
    const int k_max = p.at("k_max").get<int>();
    std::string csv = "ensemble,d,chi,N,k,ipr,log_ipr,log_ratio_to_haar,x,alpha,beta\n";
    for (const auto& nv : p.at("n_list")) {
        spec.n_sites = nv.get<long>();
        const auto sv = rmps_scaling_params(spec);
        for (int k = 1; k <= k_max; ++k) {
            const double li = rmps_log_ipr(spec, k);
            const double lh = haar_log_ipr(spec.ensemble, spec.n_sites * std::log(spec.d), k);
            csv += std::string(ensemble_name(spec.ensemble)) + "," + std::to_string(spec.d) +
                   "," + std::to_string(spec.chi) + "," + std::to_string(spec.n_sites) + "," +
                   std::to_string(k) + "," + format_double(std::exp(li)) + "," +
                   format_double(li) + "," + format_double(li - lh) + "," + format_double(sv.x) +
                   "," + format_double(sv.alpha) + "," + format_double(sv.beta) + "\n";
        }
    }
    out.write("rmps.csv", csv);
}

void run_rpm(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    RpmSpec spec;
    spec.epsilon = p.at("epsilon").get<double>();
    spec.t = p.at("t").get<long>();
    spec.n_sites = p.at("n_sites").get<long>();
    std::string csv = "k,epsilon,t,N,raw_sum,ratio_to_haar,x,asymptotic_ratio\n";
    for (const auto& kv : p.at("k_list")) {
        spec.k = kv.get<int>();
        const auto r = rpm_ipr_exact(spec);
        const double x = spec.n_sites / std::exp(spec.epsilon * spec.t);
        csv += std::to_string(spec.k) + "," + format_double(spec.epsilon) + "," +
               std::to_string(spec.t) + "," + std::to_string(spec.n_sites) + "," +
               format_double(r.raw_sum) + "," + format_double(r.ratio_to_haar) + "," +
               format_double(x) + "," +
               format_double(rpm_ipr_asymptotic(spec.k, x, spec.n_sites)) + "\n";
    }
    out.write("rpm.csv", csv);
}

void run_simulate(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const auto cap = amplitude_cap_of(p);
    const std::uint64_t realizations = p.at("realizations").get<std::uint64_t>();
    const bool full = p.at("mode").get<std::string>() == "full_enumeration";
    const bool with_purity = p.value("with_purity", true);

    struct Row {
        std::array<double, 5> ipr;
        double s2, purity, mean_omega;
    };
    std::vector<Row> rows(realizations);
    std::vector<std::vector<double>> buckets(realizations);
    parallel_for(realizations, cfg.workers, [&](std::size_t r) {
        const CircuitSpec spec = spec_from_params(p, Rng::derive_stream_seed(cfg.seed, r));
        const PureState state = run_circuit(spec, {}, cap);
        Rng sample_rng = Rng::stream(spec.seed, 2);
        SamplingMode mode;
        mode.full_enumeration = full;
        mode.n_bitstrings = full ? 0 : p.at("n_bitstrings").get<std::uint64_t>();
        mode.with_purity = with_purity;
        auto stats = overlap_statistics(state, mode, sample_rng, cap);
        double mean = 0.0;
        for (double w : stats.set.samples) mean += w;
        mean /= static_cast<double>(stats.set.samples.size());
        rows[r] = Row{stats.ipr, stats.s2, stats.half_chain_purity, mean};
        buckets[r] = std::move(stats.set.samples);
    });

    std::string csv = "realization,i1,i2,i3,i4,i5,s2,half_chain_purity,mean_omega\n";
    for (std::size_t r = 0; r < realizations; ++r) {
        csv += std::to_string(r);
        for (double v : rows[r].ipr) csv += "," + format_double(v);
        csv += "," + format_double(rows[r].s2) + "," + format_double(rows[r].purity) + "," +
               format_double(rows[r].mean_omega) + "\n";
    }
    out.write("stats.csv", csv);

    OverlapSampleSet set;
    for (auto& b : buckets) set.samples.insert(set.samples.end(), b.begin(), b.end());
    set.meta.spec_digest = spec_from_params(p, 0).digest();
    set.meta.mode = full ? "full_enumeration"
                         : "uniform_bitstrings(" +
                               std::to_string(p.at("n_bitstrings").get<std::uint64_t>()) + ")";
    set.meta.seed = cfg.seed;
    set.meta.realizations = realizations;
    const fs::path csv_path = out.dir / "samples.csv";
    save_sample_set(set, csv_path.string());
    std::ifstream in(csv_path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.entries.push_back({"samples.csv", sha256_hex(bytes), bytes.size()});
    std::ifstream min(csv_path.string() + ".meta.json", std::ios::binary);
    std::string mbytes((std::istreambuf_iterator<char>(min)), std::istreambuf_iterator<char>());
    out.entries.push_back({"samples.csv.meta.json", sha256_hex(mbytes), mbytes.size()});
}

RtnMethod method_from_params(const json& p) {
    RtnMethod m;
    const auto name = p.value("method", std::string("auto"));
    m.mode = name == "exact"          ? RtnMode::Exact
             : name == "tensor_train" ? RtnMode::TensorTrain
                                      : RtnMode::Auto;
    m.tt_tol = p.value("tt_tol", 1e-10);
    m.tt_max_bond = p.value("tt_max_bond", 256);
    return m;
}

void run_rtn(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const Ensemble ens = parse_ensemble(p.at("ensemble").get<std::string>());
    const int n = p.at("n_sites").get<int>();
    const int t = p.at("t").get<int>();
    const RtnMethod method = method_from_params(p);
    const auto i2 = contract_annealed_ipr2(n, t, ens, method);
    const auto pur = annealed_half_chain_purity(n, t, ens, method);
    std::string csv = "ensemble,N,t,annealed_I2,annealed_purity,method,trunc_error\n";
    csv += std::string(ensemble_name(ens)) + "," + std::to_string(n) + "," + std::to_string(t) +
           "," + format_double(i2.value) + "," + format_double(pur.value) + "," + i2.method +
           "," + format_double(std::max(i2.trunc_error, pur.trunc_error)) + "\n";
    out.write("rtn.csv", csv);
}

std::string annealed_series_csv(const AnnealedSeries& series) {
    std::string csv = "ensemble,N,t,annealed_I2,annealed_purity,delta_S2,method,trunc_error\n";
    for (const auto& pt : series.points)
        csv += std::string(ensemble_name(series.ensemble)) + "," + std::to_string(pt.n_sites) +
               "," + std::to_string(pt.t) + "," + format_double(pt.annealed_i2) + "," +
               format_double(pt.annealed_purity) + "," + format_double(pt.delta_s2) + "," +
               pt.method + "," + format_double(pt.trunc_error) + "\n";
    return csv;
}

void run_collapse(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const Ensemble ens = parse_ensemble(p.at("ensemble").get<std::string>());
    std::vector<int> n_list;
    for (const auto& nv : p.at("n_list")) n_list.push_back(nv.get<int>());
    const int t_max = p.at("t_max").get<int>();
    const RtnMethod method = method_from_params(p);
    const auto series = delta_s2_series(n_list, t_max, ens, method);

    FitWindow window;
    if (p.contains("fit_window")) {
        window.t_lo = p.at("fit_window")[0].get<int>();
        window.t_hi = p.at("fit_window")[1].get<int>();
    }
    json fits = json::array();
    double tau_sum = 0.0;
    DecayFit last_fit;
    for (int n : n_list) {
        std::vector<std::pair<int, double>> pts;
        for (const auto& pt : series.points)
            if (pt.n_sites == n) pts.emplace_back(pt.t, pt.delta_s2);
        last_fit = fit_decay_timescale(pts, static_cast<double>(n), window);
        tau_sum += last_fit.tau;
        fits.push_back({{"N", n},
                        {"tau", last_fit.tau},
                        {"window", {last_fit.window_lo, last_fit.window_hi}},
                        {"residual_rms", last_fit.residual_rms}});
    }
    const double tau = tau_sum / static_cast<double>(n_list.size());

    std::string csv = annealed_series_csv(series);
    // collapse variable N / 2^{t/tau} alongside the raw series
    std::string collapse_csv = "ensemble,N,t,x_collapse,delta_S2_over_N\n";
    for (const auto& pt : series.points)
        collapse_csv += std::string(ensemble_name(ens)) + "," + std::to_string(pt.n_sites) + "," +
                        std::to_string(pt.t) + "," +
                        format_double(pt.n_sites / std::pow(2.0, pt.t / tau)) + "," +
                        format_double(pt.delta_s2 / pt.n_sites) + "\n";
    out.write("delta_s2.csv", csv);
    out.write("collapse.csv", collapse_csv);
    json fit_json{{"schema", 1},
                  {"ensemble", ensemble_name(ens)},
                  {"tau", tau},
                  {"per_n", fits},
                  {"window", {last_fit.window_lo, last_fit.window_hi}}};
    out.write_json("decay_fit.json", fit_json);
}

void run_fit(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const Ensemble ens = parse_ensemble(p.at("ensemble").get<std::string>());
    FitSettings settings;
    settings.mode = p.at("mode").get<std::string>() == "alpha_only"
                        ? FitSettings::Mode::AlphaOnly
                        : FitSettings::Mode::AlphaBeta;
    settings.workers = cfg.workers;

    std::vector<double> samples;
    if (p.contains("generate")) {
        const auto& g = p.at("generate");
        const UniversalParams truth{ens, g.at("alpha").get<double>(), g.at("beta").get<double>()};
        const UniversalDistribution dist(truth);
        const OverlapSampler sampler(dist);
        Rng rng(cfg.seed);
        samples = sampler.sample(g.at("n_samples").get<std::size_t>(), rng);
    } else {
        samples = load_sample_set(p.at("input_csv").get<std::string>()).samples;
    }
    const FitResult fit = mle_fit(samples, ens, settings);
    out.write_json("fit.json", fit_result_json(fit));
}

std::string histogram_csv(const std::vector<double>& samples, int bins) {
    double hi = 0.0;
    for (double w : samples) hi = std::max(hi, w);
    hi = std::max(hi, 1e-9);
    std::vector<std::uint64_t> counts(bins, 0);
    for (double w : samples) {
        int b = static_cast<int>(w / hi * bins);
        if (b >= bins) b = bins - 1;
        counts[b]++;
    }
    const double width = hi / bins;
    std::string csv = "bin_lo,bin_hi,count,density\n";
    for (int b = 0; b < bins; ++b)
        csv += format_double(b * width) + "," + format_double((b + 1) * width) + "," +
               std::to_string(counts[b]) + "," +
               format_double(counts[b] / (width * samples.size())) + "\n";
    return csv;
}

void run_distribution(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const Ensemble ens = parse_ensemble(p.at("ensemble").get<std::string>());
    const auto set = collect_overlaps(
        p, ens, Architecture::Brickwork, cfg.seed, p.at("realizations").get<std::uint64_t>(),
        p.at("samples_per_realization").get<std::uint64_t>(), cfg.workers, amplitude_cap_of(p));

    const fs::path csv_path = out.dir / "samples.csv";
    save_sample_set(set, csv_path.string());
    std::ifstream in(csv_path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.entries.push_back({"samples.csv", sha256_hex(bytes), bytes.size()});

    out.write("histogram.csv", histogram_csv(set.samples, p.value("histogram_bins", 120)));

    FitSettings settings;
    settings.mode = FitSettings::Mode::AlphaBeta;
    settings.workers = cfg.workers;
    const FitResult fit = mle_fit(set.samples, ens, settings);
    json fj = fit_result_json(fit);
    fj["beta_significance_sigma"] = fit.beta_err > 0.0 ? fit.beta_hat / fit.beta_err : 0.0;
    out.write_json("fit.json", fj);
}

void run_xeb(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto& p = cfg.params;
    const int n = p.at("n_sites").get<int>();
    const std::uint64_t realizations = p.at("realizations").get<std::uint64_t>();
    const std::uint64_t trajectories = p.value("trajectories_per_realization", 8);
    const std::uint64_t per_traj = p.value("bitstrings_per_trajectory", 512);
    const std::uint64_t fit_realizations = p.value("fit_realizations", 100);
    const std::uint64_t fit_samples = p.value("fit_samples_per_realization", 2000);
    const auto cap = amplitude_cap_of(p);

    std::string csv =
        "epsilon,N,t,alpha,beta,xeb,xeb_std_error,i2_alpha_beta,fidelity_estimate,"
        "reference_fidelity,raw_over_reference,estimate_over_reference\n";
    json reports = json::array();

    for (const auto& tv : p.at("depth_list")) {
        const int t = tv.get<int>();
        json base = p;
        base["depth"] = t;
        base["d"] = 2;
        base["architecture"] = "brickwork";
        base["ensemble"] = "unitary";

        // fitted (alpha, beta) of the clean circuit at this depth
        const auto fit_set =
            collect_overlaps(base, Ensemble::Unitary, Architecture::Brickwork,
                             Rng::derive_stream_seed(cfg.seed, 7000 + t), fit_realizations,
                             fit_samples, cfg.workers, cap);
        FitSettings settings;
        settings.mode = FitSettings::Mode::AlphaBeta;
        settings.workers = cfg.workers;
        const FitResult fit = mle_fit(fit_set.samples, Ensemble::Unitary, settings);
        const UniversalParams fitted{Ensemble::Unitary, fit.alpha_hat, fit.beta_hat};

        for (const auto& ev : p.at("epsilon_n_list")) {
            const double eps = ev.get<double>() / static_cast<double>(n);
            auto ideal_provider = [&](std::uint64_t r) {
                CircuitSpec spec = spec_from_params(base, Rng::derive_stream_seed(cfg.seed, r));
                return run_circuit(spec, {}, cap);
            };
            auto noisy_sampler = [&](std::uint64_t r, std::uint64_t nbits, Rng& rng) {
                CircuitSpec spec = spec_from_params(base, Rng::derive_stream_seed(cfg.seed, r));
                NoiseModel noise{eps};
                std::vector<std::uint64_t> xs;
                xs.reserve(nbits);
                const std::uint64_t per = std::max<std::uint64_t>(1, nbits / trajectories);
                for (std::uint64_t j = 0; j < trajectories && xs.size() < nbits; ++j) {
                    Rng traj_rng = Rng::stream(spec.seed, 100 + j);
                    const PureState noisy = run_noisy_trajectory(spec, noise, traj_rng, cap);
                    const auto batch = born_sample(noisy, std::min(per, nbits - xs.size()), rng);
                    xs.insert(xs.end(), batch.begin(), batch.end());
                }
                return xs;
            };
            XebSettings xs;
            xs.n_bitstrings = realizations * trajectories * per_traj;
            xs.realizations = realizations;
            xs.seed = Rng::derive_stream_seed(cfg.seed, 9000 + t);
            xs.workers = cfg.workers;
            const XebReport rep =
                xeb_fidelity(ideal_provider, noisy_sampler, fitted, eps, n, t, xs);
            csv += format_double(eps) + "," + std::to_string(n) + "," + std::to_string(t) + "," +
                   format_double(rep.alpha) + "," + format_double(rep.beta) + "," +
                   format_double(rep.xeb_value) + "," + format_double(rep.xeb_std_error) + "," +
                   format_double(rep.i2_alpha_beta) + "," +
                   format_double(rep.fidelity_estimate) + "," +
                   format_double(rep.reference_fidelity) + "," +
                   format_double(rep.xeb_value / rep.reference_fidelity) + "," +
                   format_double(rep.fidelity_estimate / rep.reference_fidelity) + "\n";
            reports.push_back({{"epsilon", eps},
                               {"N", n},
                               {"t", t},
                               {"alpha", rep.alpha},
                               {"beta", rep.beta},
                               {"xeb", rep.xeb_value},
                               {"xeb_std_error", rep.xeb_std_error},
                               {"i2_alpha_beta", rep.i2_alpha_beta},
                               {"fidelity_estimate", rep.fidelity_estimate},
                               {"reference_fidelity", rep.reference_fidelity},
                               {"n_bitstrings", rep.n_bitstrings},
                               {"precision_warning", rep.precision_warning}});
        }
    }
    out.write("xeb.csv", csv);
    out.write_json("xeb.json", json{{"schema", 1}, {"reports", reports}});
}

}  // namespace

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["params"] = params;
    return j.dump();  // nlohmann objects iterate in sorted key order
}

std::string ExperimentConfig::digest() const { return sha256_hex(canonical_json()); }

std::string ConfigDiagnostics::joined() const {
    std::string s;
    for (const auto& e : errors) {
        if (!s.empty()) s += "\n";
        s += e;
    }
    return s;
}

ConfigDiagnostics validate_config_json(const nlohmann::json& j) {
    ConfigDiagnostics diag;
    Checker c{diag, "config"};
    if (!j.is_object()) {
        c.fail("top level must be an object");
        return diag;
    }
    c.known_fields(j, {"experiment", "seed", "workers", "out", "params"});
    if (c.require(j, "experiment", json::value_t::string, "string")) {
        const auto e = j.at("experiment").get<std::string>();
        if (!kExperiments.count(e)) c.fail("unknown experiment '" + e + "'");
    }
    if (!j.contains("seed"))
        c.fail("missing required field 'seed' (seeds are mandatory; no wall-clock defaults)");
    else if (!j.at("seed").is_number_unsigned())
        c.fail("seed must be an unsigned integer");
    if (j.contains("workers") && (!j.at("workers").is_number_integer() ||
                                  j.at("workers").get<long>() < 0))
        c.fail("workers must be a nonnegative integer");
    if (j.contains("out") && !j.at("out").is_string()) c.fail("out must be a string");
    if (!j.contains("params")) {
        c.fail("missing required field 'params'");
        return diag;
    }
    if (j.contains("experiment") && j.at("experiment").is_string()) {
        const auto e = j.at("experiment").get<std::string>();
        if (kExperiments.count(e))
            validate_params(Checker{diag, "params"}, e, j.at("params"));
    }
    return diag;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(path + ": " + e.what());
    }
    const auto diag = validate_config_json(j);
    if (!diag.ok()) throw config_error(path + ":\n" + diag.joined());
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.workers = j.value("workers", 0);
    cfg.output_dir = j.value("out", ".");
    cfg.params = j.at("params");
    return cfg;
}

json RunManifest::to_json() const {
    json j;
    j["schema"] = 1;
    j["experiment"] = experiment;
    j["config_digest"] = config_digest;
    j["code_version"] = code_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = json::array();
    for (const auto& e : outputs)
        j["outputs"].push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    return j;
}

RunManifest run_experiment(const ExperimentConfig& config) {
    {
        json j;
        j["experiment"] = config.experiment;
        j["seed"] = config.seed;
        j["params"] = config.params;
        const auto diag = validate_config_json(j);
        if (!diag.ok()) throw config_error(diag.joined());
    }
    RunManifest manifest;
    manifest.experiment = config.experiment;
    manifest.config_digest = config.digest();
    manifest.code_version = kCodeVersion;
    manifest.started_at = iso_now();

    OutputWriter out;
    out.dir = config.output_dir;
    fs::create_directories(out.dir);

    if (config.experiment == "haar-ipr") run_haar_ipr(config, out);
    else if (config.experiment == "rmps") run_rmps(config, out);
    else if (config.experiment == "rpm") run_rpm(config, out);
    else if (config.experiment == "simulate") run_simulate(config, out);
    else if (config.experiment == "rtn") run_rtn(config, out);
    else if (config.experiment == "collapse") run_collapse(config, out);
    else if (config.experiment == "fit") run_fit(config, out);
    else if (config.experiment == "distribution") run_distribution(config, out);
    else if (config.experiment == "xeb") run_xeb(config, out);
    else throw config_error("unknown experiment '" + config.experiment + "'");

    manifest.finished_at = iso_now();
    manifest.outputs = out.entries;
    std::ofstream mj(out.dir / "manifest.json", std::ios::binary);
    mj << manifest.to_json().dump(2) << "\n";
    return manifest;
}

}  // namespace aclab
