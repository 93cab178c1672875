#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ca/classify.hpp"
#include "ca/datasets.hpp"
#include "ca/errors.hpp"
#include "ca/io.hpp"
#include "ca/privacy.hpp"
#include "ca/reconstruction.hpp"
#include "ca/sensing.hpp"
#include "ca/version.hpp"

// The utility-versus-leakage evaluation loop. A sweep over the measurement
// count m pits the analyst (smashed-filter accuracy on compressed samples)
// against an adversary who knows the sensing matrix and mounts a
// reconstruction attack; m acts as the data owner's privacy throttle.
//
// Determinism contract: every random quantity of sweep point m, trial t is
// drawn from its own stream whose seed is derived from (master_seed, m, t)
// plus a fixed role salt, so reports are byte-identical across runs and
// independent of the worker count used to execute trials.

namespace ca {

struct AttackConfig {
    enum class Kind { Omp, Ista, Best };
    Kind kind = Kind::Best;
    std::optional<int> omp_k;        // default: max(1, m/2) at each sweep point
    std::vector<double> lambda_grid; // default: 9 log-spaced points in [1e-3, 10]
    int max_iters = 500;
    double tol = 1e-8;
};

inline const char* to_string(AttackConfig::Kind k) {
    switch (k) {
        case AttackConfig::Kind::Omp: return "omp";
        case AttackConfig::Kind::Ista: return "ista";
        case AttackConfig::Kind::Best: return "best";
    }
    return "unknown";
}

inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 9; ++i) grid.push_back(std::pow(10.0, -3.0 + 0.5 * i));
    return grid;
}

struct TaskConfig {
    enum class Kind { TwoClassPrint, PgmDir };
    Kind kind = Kind::TwoClassPrint;
    // two_class_print
    int defect_size = 24;
    double defect_amplitude = 0.5;
    std::uint64_t seed = 0;
    // pgm_dir
    std::string path;
    std::string labels;
};

struct ExperimentConfig {
    int n = 0;
    std::vector<int> m_sweep;
    Ensemble ensemble = Ensemble::Gaussian;
    std::optional<double> sigma;  // fixed measurement-noise level
    std::optional<double> snr_db; // per-signal level: sigma = |Phi x| / (sqrt(m) 10^(SNR/20))
    int trials = 1;
    int leakage_trials = 1;
    std::uint64_t master_seed = 0;
    AttackConfig attack;
    TaskConfig task;
    std::optional<DpParams> dp;
};

struct TradeoffRow {
    int m = 0;
    double ratio = 0.0;
    bool skipped = false;
    std::string skip_reason;
    double utility_accuracy_mean = 0.0;
    double utility_accuracy_std = 0.0;
    double leakage_relative_l2_median = 0.0;
    double leakage_psnr_db_median = 0.0;
    std::string attack_used;
    double wall_time_s = 0.0; // reported in CSV only; never part of the JSON
};

struct TradeoffReport {
    ExperimentConfig config;
    std::vector<TradeoffRow> rows;
};

// --- config parsing ----------------------------------------------------------

namespace detail {

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string_view item = trim(std::string_view(text).substr(pos, comma - pos));
        if (!item.empty()) out.push_back(parse_double(item, what));
        pos = comma + 1;
    }
    if (out.empty()) throw parameter_error(what + ": empty list");
    return out;
}

inline long parse_long(const std::string& text, const std::string& what) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw parameter_error(what + ": malformed integer '" + text + "'");
    return value;
}

inline std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw parameter_error(what + ": malformed unsigned integer '" + text + "'");
    return value;
}

} // namespace detail

// Builds an ExperimentConfig from flat key/value pairs (see load_config).
// Unknown keys are rejected so misspelled settings cannot silently fall back
// to defaults.
inline ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv) {
    static const char* known[] = {
        "n", "m_sweep", "ensemble", "sigma", "snr_db", "trials", "leakage_trials",
        "master_seed", "attack", "omp_k", "ista_lambda_grid", "ista_max_iters", "ista_tol",
        "task", "defect_size", "defect_amplitude", "task_seed", "task_path", "task_labels",
        "dp_epsilon", "dp_sensitivity"};
    for (const auto& [key, value] : kv) {
        (void)value;
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            throw parameter_error("unknown config key '" + key + "'");
    }
    const auto get = [&](const char* key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    const auto require = [&](const char* key) -> std::string {
        const auto v = get(key);
        if (!v) throw parameter_error(std::string("missing config key '") + key + "'");
        return *v;
    };

    ExperimentConfig cfg;
    cfg.n = static_cast<int>(detail::parse_long(require("n"), "n"));
    if (cfg.n < 1) throw parameter_error("n must be positive");

    for (double v : detail::parse_double_list(require("m_sweep"), "m_sweep")) {
        const int m = static_cast<int>(v);
        if (m < 1 || static_cast<double>(m) != v)
            throw parameter_error("m_sweep entries must be positive integers");
        cfg.m_sweep.push_back(m);
    }
    for (std::size_t i = 0; i + 1 < cfg.m_sweep.size(); ++i)
        if (cfg.m_sweep[i] >= cfg.m_sweep[i + 1])
            throw parameter_error("m_sweep must be strictly increasing");
    for (int m : cfg.m_sweep)
        if (m > cfg.n) throw parameter_error("m_sweep entries must not exceed n");

    cfg.ensemble = parse_ensemble(require("ensemble"));

    const auto sigma = get("sigma");
    const auto snr = get("snr_db");
    if (sigma && snr) throw parameter_error("config sets both sigma and snr_db");
    if (!sigma && !snr) throw parameter_error("config needs sigma or snr_db");
    if (sigma) {
        cfg.sigma = detail::parse_double(*sigma, "sigma");
        if (*cfg.sigma < 0.0) throw parameter_error("sigma must be nonnegative");
    } else {
        cfg.snr_db = detail::parse_double(*snr, "snr_db");
    }

    cfg.trials = static_cast<int>(detail::parse_long(require("trials"), "trials"));
    if (cfg.trials < 1) throw parameter_error("trials must be >= 1");
    cfg.leakage_trials = cfg.trials;
    if (const auto lt = get("leakage_trials")) {
        cfg.leakage_trials = static_cast<int>(detail::parse_long(*lt, "leakage_trials"));
        if (cfg.leakage_trials < 1) throw parameter_error("leakage_trials must be >= 1");
    }

    cfg.master_seed = detail::parse_u64(require("master_seed"), "master_seed");

    const std::string attack = require("attack");
    if (attack == "omp") cfg.attack.kind = AttackConfig::Kind::Omp;
    else if (attack == "ista") cfg.attack.kind = AttackConfig::Kind::Ista;
    else if (attack == "best") cfg.attack.kind = AttackConfig::Kind::Best;
    else throw parameter_error("attack must be omp, ista or best");
    if (const auto k = get("omp_k")) {
        cfg.attack.omp_k = static_cast<int>(detail::parse_long(*k, "omp_k"));
        if (*cfg.attack.omp_k < 1) throw parameter_error("omp_k must be >= 1");
    }
    cfg.attack.lambda_grid = default_lambda_grid();
    if (const auto grid = get("ista_lambda_grid"))
        cfg.attack.lambda_grid = detail::parse_double_list(*grid, "ista_lambda_grid");
    for (double l : cfg.attack.lambda_grid)
        if (!(l > 0.0)) throw parameter_error("ista_lambda_grid entries must be positive");
    if (const auto iters = get("ista_max_iters")) {
        cfg.attack.max_iters = static_cast<int>(detail::parse_long(*iters, "ista_max_iters"));
        if (cfg.attack.max_iters < 1) throw parameter_error("ista_max_iters must be >= 1");
    }
    if (const auto tol = get("ista_tol")) {
        cfg.attack.tol = detail::parse_double(*tol, "ista_tol");
        if (!(cfg.attack.tol > 0.0)) throw parameter_error("ista_tol must be positive");
    }

    const std::string task = require("task");
    if (task == "two_class_print") {
        cfg.task.kind = TaskConfig::Kind::TwoClassPrint;
        if (const auto v = get("defect_size"))
            cfg.task.defect_size = static_cast<int>(detail::parse_long(*v, "defect_size"));
        if (const auto v = get("defect_amplitude"))
            cfg.task.defect_amplitude = detail::parse_double(*v, "defect_amplitude");
        if (const auto v = get("task_seed")) cfg.task.seed = detail::parse_u64(*v, "task_seed");
    } else if (task == "pgm_dir") {
        cfg.task.kind = TaskConfig::Kind::PgmDir;
        cfg.task.path = require("task_path");
        cfg.task.labels = require("task_labels");
    } else {
        throw parameter_error("task must be two_class_print or pgm_dir");
    }

    const auto eps = get("dp_epsilon");
    const auto sens = get("dp_sensitivity");
    if (eps.has_value() != sens.has_value())
        throw parameter_error("dp_epsilon and dp_sensitivity must be set together");
    if (eps)
        cfg.dp = make_dp_params(detail::parse_double(*eps, "dp_epsilon"),
                                detail::parse_double(*sens, "dp_sensitivity"));
    return cfg;
}

// --- execution ---------------------------------------------------------------

namespace detail {

struct ResolvedTask {
    ClassTemplates templates;
    std::vector<Signal> utility_dataset;
    std::vector<Signal> leak_pool; // empty for generated tasks
    std::optional<PrintTask> print;
};

inline ResolvedTask resolve_task(const ExperimentConfig& cfg) {
    ResolvedTask out;
    if (cfg.task.kind == TaskConfig::Kind::TwoClassPrint) {
        out.print.emplace(cfg.n, cfg.task.defect_size, cfg.task.defect_amplitude, cfg.task.seed);
        out.templates = out.print->templates();
        out.utility_dataset = out.print->canonical_dataset();
    } else {
        // labels csv: one "filename,label" row per image.
        const std::string data = read_file(cfg.task.labels);
        std::vector<std::pair<std::string, std::string>> labels;
        std::size_t start = 0;
        while (start < data.size()) {
            std::size_t end = data.find('\n', start);
            if (end == std::string::npos) end = data.size();
            const std::string_view line = trim(std::string_view(data).substr(start, end - start));
            start = end + 1;
            if (line.empty()) continue;
            const std::size_t comma = line.find(',');
            if (comma == std::string_view::npos)
                throw format_error(cfg.task.labels + ": expected 'filename,label' rows");
            labels.emplace_back(std::string(trim(line.substr(0, comma))),
                                std::string(trim(line.substr(comma + 1))));
        }
        if (labels.empty()) throw dataset_error("pgm_dir task has an empty label file");
        for (const auto& [file, label] : labels) {
            const GrayImage img = load_pgm(cfg.task.path + "/" + file);
            if (img.height * img.width != cfg.n)
                throw dataset_error("pgm_dir image size does not match config n");
            Vec v(cfg.n);
            for (int i = 0; i < cfg.n; ++i) v[i] = img.pixels[static_cast<std::size_t>(i)];
            out.utility_dataset.push_back(
                Signal{std::move(v), label, std::array<int, 2>{img.height, img.width}});
        }
        out.templates = build_templates(out.utility_dataset);
        out.leak_pool = out.utility_dataset;
    }
    return out;
}

// Ground-truth signal the adversary tries to reconstruct in a given trial.
inline Signal leak_target(const ResolvedTask& task, const ExperimentConfig& cfg, int m, int t) {
    if (task.print) {
        const char* cls = (t % 2 == 0) ? "ok" : "defect";
        return task.print->sample(cls, derive_seed(cfg.master_seed,
                                                   static_cast<std::uint64_t>(m),
                                                   static_cast<std::uint64_t>(t), 4));
    }
    return task.leak_pool[static_cast<std::size_t>(t) % task.leak_pool.size()];
}

inline double resolve_sigma(const ExperimentConfig& cfg, const SensingMatrix& phi,
                            const Vec& clean_measurement) {
    if (cfg.sigma) return *cfg.sigma;
    const double m = static_cast<double>(phi.rows());
    return clean_measurement.norm() /
           (std::sqrt(m) * std::pow(10.0, *cfg.snr_db / 20.0));
}

inline Measurement measure(const ExperimentConfig& cfg, const SensingMatrix& phi,
                           const Signal& x, std::uint64_t noise_seed, std::uint64_t dp_seed) {
    Measurement y = acquire(phi, x);
    const double sigma = resolve_sigma(cfg, phi, y.values);
    if (sigma > 0.0) {
        Stream rng(noise_seed);
        for (int i = 0; i < y.values.size(); ++i) y.values[i] += sigma * rng.gaussian();
        y.noise_sigma = sigma;
    }
    if (cfg.dp) y.values = laplace_perturb(y.values, *cfg.dp, dp_seed);
    return y;
}

// Runs the configured attack and keeps the candidate with the smallest
// relative error: the adversary's best case, e.g. oracle lambda selection.
inline ReconMetrics attack_trial(const ExperimentConfig& cfg, const SensingMatrix& phi,
                                 const Measurement& y, const Signal& truth, int omp_k) {
    std::optional<ReconMetrics> best;
    const auto consider = [&](const SparseEstimate& est) {
        const ReconMetrics metrics = evaluate_reconstruction(truth, est, 1.0);
        if (!best || metrics.relative_l2 < best->relative_l2) best = metrics;
    };
    const AttackConfig& a = cfg.attack;
    if (a.kind == AttackConfig::Kind::Omp || a.kind == AttackConfig::Kind::Best)
        consider(omp(phi, y, omp_k));
    if (a.kind == AttackConfig::Kind::Ista || a.kind == AttackConfig::Kind::Best)
        for (double lambda : a.lambda_grid)
            consider(ista(phi, y, lambda, a.max_iters, a.tol));
    return *best;
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    if (k % 2 == 1) return values[k / 2];
    return 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

} // namespace detail

// Executes the sweep. `workers` only controls how trials are scheduled; the
// report content is identical for every worker count.
inline TradeoffReport run_tradeoff(const ExperimentConfig& cfg, int workers = 1) {
    if (cfg.n < 1 || cfg.m_sweep.empty()) throw parameter_error("invalid experiment config");
    if (workers < 1) workers = 1;

    const detail::ResolvedTask task = detail::resolve_task(cfg);
    if (task.templates.dim() != cfg.n)
        throw dataset_error("task dimension does not match config n");

    TradeoffReport report;
    report.config = cfg;

    for (const int m : cfg.m_sweep) {
        const auto started = std::chrono::steady_clock::now();
        TradeoffRow row;
        row.m = m;
        row.ratio = static_cast<double>(m) / static_cast<double>(cfg.n);

        const int omp_k = cfg.attack.omp_k.value_or(std::max(1, m / 2));
        const bool uses_omp = cfg.attack.kind != AttackConfig::Kind::Ista;
        if (uses_omp && omp_k > m) {
            row.skipped = true;
            row.skip_reason = "attack infeasible: omp k=" + std::to_string(omp_k) +
                              " exceeds m=" + std::to_string(m);
            report.rows.push_back(std::move(row));
            continue;
        }
        row.attack_used = to_string(cfg.attack.kind);

        const int total = std::max(cfg.trials, cfg.leakage_trials);
        std::vector<double> utility(static_cast<std::size_t>(cfg.trials));
        std::vector<double> leak_l2(static_cast<std::size_t>(cfg.leakage_trials));
        std::vector<double> leak_psnr(static_cast<std::size_t>(cfg.leakage_trials));

        std::atomic<int> next{0};
        std::mutex failure_mutex;
        std::exception_ptr failure;

        const auto run_trial = [&](int t) {
            const std::uint64_t base = derive_seed(cfg.master_seed,
                                                   static_cast<std::uint64_t>(m),
                                                   static_cast<std::uint64_t>(t));
            const SensingMatrix phi =
                generate_matrix(derive_seed(base, 1), m, cfg.n, cfg.ensemble);
            if (t < cfg.trials) {
                int correct = 0;
                for (std::size_t i = 0; i < task.utility_dataset.size(); ++i) {
                    const Signal& x = task.utility_dataset[i];
                    const Measurement y = detail::measure(cfg, phi, x, derive_seed(base, 2, i),
                                                          derive_seed(base, 3, i));
                    if (classify(y, phi, task.templates).label == *x.label) ++correct;
                }
                utility[static_cast<std::size_t>(t)] =
                    static_cast<double>(correct) / static_cast<double>(task.utility_dataset.size());
            }
            if (t < cfg.leakage_trials) {
                const Signal truth = detail::leak_target(task, cfg, m, t);
                const Measurement y = detail::measure(cfg, phi, truth, derive_seed(base, 5),
                                                      derive_seed(base, 6));
                const ReconMetrics metrics = detail::attack_trial(cfg, phi, y, truth, omp_k);
                leak_l2[static_cast<std::size_t>(t)] = metrics.relative_l2;
                leak_psnr[static_cast<std::size_t>(t)] = *metrics.psnr_db;
            }
        };

        const auto worker = [&] {
            for (int t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
                try {
                    run_trial(t);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };

        if (workers == 1) {
            for (int t = 0; t < total; ++t) run_trial(t);
        } else {
            std::vector<std::thread> pool;
            const int count = std::min(workers, total);
            pool.reserve(static_cast<std::size_t>(count));
            for (int w = 0; w < count; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
            if (failure) std::rethrow_exception(failure);
        }

        double mean = 0.0;
        for (double a : utility) mean += a;
        mean /= static_cast<double>(utility.size());
        double var = 0.0;
        for (double a : utility) var += (a - mean) * (a - mean);
        row.utility_accuracy_mean = mean;
        row.utility_accuracy_std =
            utility.size() > 1 ? std::sqrt(var / static_cast<double>(utility.size() - 1)) : 0.0;
        row.leakage_relative_l2_median = detail::median(leak_l2);
        row.leakage_psnr_db_median = detail::median(leak_psnr);
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        report.rows.push_back(std::move(row));
    }
    return report;
}

// Smallest sweep point whose mean utility reaches the target, if any.
inline std::optional<int> scan_min_components(const TradeoffReport& report, double target) {
    if (!(target > 0.0) || target > 1.0)
        throw parameter_error("target accuracy must lie in (0, 1]");
    for (const TradeoffRow& row : report.rows)
        if (!row.skipped && row.utility_accuracy_mean >= target) return row.m;
    return std::nullopt;
}

inline std::optional<int> min_components(const ExperimentConfig& cfg, double target,
                                         int workers = 1) {
    return scan_min_components(run_tradeoff(cfg, workers), target);
}

// --- report serialization ------------------------------------------------------

// Stable key order; wall time is deliberately absent so byte-identical JSON
// doubles as the determinism check.
inline std::string report_to_json(const TradeoffReport& report) {
    using json = nlohmann::ordered_json;
    const ExperimentConfig& cfg = report.config;

    json doc;
    doc["toolkit"] = {{"name", kToolkitName}, {"version", kToolkitVersion}};

    json jcfg;
    jcfg["n"] = cfg.n;
    jcfg["m_sweep"] = cfg.m_sweep;
    jcfg["ensemble"] = to_string(cfg.ensemble);
    if (cfg.sigma) jcfg["sigma"] = *cfg.sigma; else jcfg["sigma"] = nullptr;
    if (cfg.snr_db) jcfg["snr_db"] = *cfg.snr_db; else jcfg["snr_db"] = nullptr;
    jcfg["trials"] = cfg.trials;
    jcfg["leakage_trials"] = cfg.leakage_trials;
    jcfg["master_seed"] = cfg.master_seed;
    json jattack;
    jattack["kind"] = to_string(cfg.attack.kind);
    if (cfg.attack.omp_k) jattack["omp_k"] = *cfg.attack.omp_k; else jattack["omp_k"] = nullptr;
    jattack["lambda_grid"] = cfg.attack.lambda_grid;
    jattack["max_iters"] = cfg.attack.max_iters;
    jattack["tol"] = cfg.attack.tol;
    jcfg["attack"] = std::move(jattack);
    json jtask;
    if (cfg.task.kind == TaskConfig::Kind::TwoClassPrint) {
        jtask["kind"] = "two_class_print";
        jtask["defect_size"] = cfg.task.defect_size;
        jtask["defect_amplitude"] = cfg.task.defect_amplitude;
        jtask["seed"] = cfg.task.seed;
    } else {
        jtask["kind"] = "pgm_dir";
        jtask["path"] = cfg.task.path;
        jtask["labels"] = cfg.task.labels;
    }
    jcfg["task"] = std::move(jtask);
    if (cfg.dp)
        jcfg["dp"] = {{"epsilon", cfg.dp->epsilon}, {"sensitivity", cfg.dp->sensitivity}};
    else
        jcfg["dp"] = nullptr;
    doc["config"] = std::move(jcfg);

    json rows = json::array();
    for (const TradeoffRow& row : report.rows) {
        json jrow;
        jrow["m"] = row.m;
        jrow["ratio"] = row.ratio;
        jrow["skipped"] = row.skipped;
        if (row.skipped) {
            jrow["skip_reason"] = row.skip_reason;
            jrow["utility_accuracy_mean"] = nullptr;
            jrow["utility_accuracy_std"] = nullptr;
            jrow["leakage_relative_l2_median"] = nullptr;
            jrow["leakage_psnr_db_median"] = nullptr;
            jrow["attack_used"] = nullptr;
        } else {
            jrow["skip_reason"] = nullptr;
            jrow["utility_accuracy_mean"] = row.utility_accuracy_mean;
            jrow["utility_accuracy_std"] = row.utility_accuracy_std;
            jrow["leakage_relative_l2_median"] = row.leakage_relative_l2_median;
            jrow["leakage_psnr_db_median"] = row.leakage_psnr_db_median; // null if unbounded
            jrow["attack_used"] = row.attack_used;
        }
        rows.push_back(std::move(jrow));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

inline std::string report_to_csv(const TradeoffReport& report) {
    std::string out =
        "m,ratio,utility_accuracy_mean,utility_accuracy_std,"
        "leakage_relative_l2_median,leakage_psnr_db_median,attack_used,wall_time_s,skip_reason\n";
    for (const TradeoffRow& row : report.rows) {
        out += std::to_string(row.m);
        out += ',';
        out += detail::format_double(row.ratio);
        out += ',';
        if (row.skipped) {
            out += ",,,,,";
            out += detail::format_double(row.wall_time_s);
            out += ',';
            out += row.skip_reason;
        } else {
            out += detail::format_double(row.utility_accuracy_mean);
            out += ',';
            out += detail::format_double(row.utility_accuracy_std);
            out += ',';
            out += detail::format_double(row.leakage_relative_l2_median);
            out += ',';
            out += detail::format_double(row.leakage_psnr_db_median);
            out += ',';
            out += row.attack_used;
            out += ',';
            out += detail::format_double(row.wall_time_s);
            out += ',';
        }
        out += '\n';
    }
    return out;
}

} // namespace ca
