#include "sigest/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "sigest/davies_harte.hpp"
#include "sigest/errors.hpp"
#include "sigest/estimator.hpp"
#include "sigest/experiments.hpp"
#include "sigest/expected_signature.hpp"
#include "sigest/parallel.hpp"
#include "sigest/pl_signature.hpp"
#include "sigest/rng.hpp"
#include "sigest/stats.hpp"
#include "sigest/svg.hpp"

namespace sigest {

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_h(double H) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", H);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + p.string());
    out << content;
}

// Manifest: key=value lines, usable directly as --config for a rerun.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> kv;
    void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void add(const std::string& k, double v) { add(k, fmt17(v)); }
    void add(const std::string& k, long v) { add(k, std::to_string(v)); }
    void add(const std::string& k, int v) { add(k, std::to_string(v)); }
    void add(const std::string& k, std::uint64_t v) { add(k, std::to_string(v)); }
    std::string str() const {
        std::string s;
        for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
        return s;
    }
};

// Plain-text key=value config files.  Values loaded here become defaults;
// explicit flags (parsed afterwards by CLI11) override them.
class ConfigMap {
  public:
    static ConfigMap load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config file not found: " + path);
        ConfigMap m;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: expected key=value, got '" + line + "'");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            m.kv_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return m;
    }

    bool has(const std::string& k) const { return kv_.count(k) != 0; }

    void get(const std::string& k, std::string& out) {
        if (auto it = kv_.find(k); it != kv_.end()) {
            out = it->second;
            used_.insert(k);
        }
    }
    void get(const std::string& k, double& out) {
        std::string s;
        get(k, s);
        if (!s.empty()) out = parse_double(k, s);
    }
    template <class Int>
    void get_int(const std::string& k, Int& out) {
        std::string s;
        get(k, s);
        if (!s.empty()) {
            try {
                out = static_cast<Int>(std::stoll(s));
            } catch (...) {
                throw ConfigError("config: bad integer for " + k + ": '" + s + "'");
            }
        }
    }
    void get(const std::string& k, long& out) { get_int(k, out); }
    void get(const std::string& k, int& out) { get_int(k, out); }
    void get(const std::string& k, std::uint64_t& out) { get_int(k, out); }
    void get(const std::string& k, bool& out) {
        std::string s;
        get(k, s);
        if (!s.empty()) out = (s == "true" || s == "1");
    }
    void get(const std::string& k, std::vector<double>& out) {
        std::string s;
        get(k, s);
        if (s.empty()) return;
        out.clear();
        for (const auto& tok : split(s)) out.push_back(parse_double(k, tok));
    }
    void get(const std::string& k, std::vector<long>& out) {
        std::string s;
        get(k, s);
        if (s.empty()) return;
        out.clear();
        for (const auto& tok : split(s)) {
            try {
                out.push_back(std::stol(tok));
            } catch (...) {
                throw ConfigError("config: bad integer list for " + k);
            }
        }
    }

    // The run subcommand must match a manifest's recorded one, and every key
    // must have been consumed by the handler (typos are errors, not no-ops).
    void finish(const std::string& subcommand_name) {
        if (auto it = kv_.find("subcommand"); it != kv_.end() && it->second != subcommand_name)
            throw ConfigError("config was written by subcommand '" + it->second +
                              "', not '" + subcommand_name + "'");
        for (const auto& [k, v] : kv_) {
            if (k == "subcommand" || k == "artifact_version" || used_.count(k)) continue;
            throw ConfigError("config: unknown key '" + k + "' for subcommand " + subcommand_name);
        }
    }

  private:
    static double parse_double(const std::string& k, const std::string& s) {
        try {
            return std::stod(s);
        } catch (...) {
            throw ConfigError("config: bad number for " + k + ": '" + s + "'");
        }
    }
    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    }
    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
};

// Pre-parse scan for --config so its values can seed the option defaults.
std::string find_config_arg(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

struct CommonOpts {
    std::string out = "out";
    std::string config;
    int threads = 0;
    int resolved_threads() const { return threads > 0 ? threads : default_threads(); }
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--config", c.config, "key=value config file (flags override)");
    cmd->add_option("--threads", c.threads, "worker threads (default: all cores)");
}

void config_common(ConfigMap& m, CommonOpts& c) {
    m.get("out", c.out);
    m.get("threads", c.threads);
}

struct ModelOpts {
    double H = 0.5;
    std::vector<double> theta{1.0};
    std::vector<double> sigma{1.0};
    int d = 2;
    double delta = 0.1;

    FouParams params() const {
        FouParams p;
        p.H = H;
        p.d = d;
        p.delta = delta;
        p.theta = theta;
        p.sigma = sigma;
        if (p.theta.size() == 1) p.theta.assign(static_cast<std::size_t>(d), theta[0]);
        if (p.sigma.size() == 1) p.sigma.assign(static_cast<std::size_t>(d), sigma[0]);
        p.validate();
        return p;
    }
};

void add_model(CLI::App* cmd, ModelOpts& m) {
    cmd->add_option("--H", m.H, "Hurst parameter in (1/4, 1)");
    cmd->add_option("--theta", m.theta, "mean-reversion rate(s), scalar broadcasts")->delimiter(',');
    cmd->add_option("--sigma", m.sigma, "volatility(ies), scalar broadcasts")->delimiter(',');
    cmd->add_option("--d", m.d, "coordinates");
    cmd->add_option("--delta", m.delta, "block length");
}

void config_model(ConfigMap& cm, ModelOpts& m) {
    cm.get("H", m.H);
    cm.get("theta", m.theta);
    cm.get("sigma", m.sigma);
    cm.get("d", m.d);
    cm.get("delta", m.delta);
}

void manifest_model(Manifest& man, const ModelOpts& m) {
    man.add("H", m.H);
    std::string th, sg;
    for (std::size_t i = 0; i < m.theta.size(); ++i) th += (i ? "," : "") + fmt17(m.theta[i]);
    for (std::size_t i = 0; i < m.sigma.size(); ++i) sg += (i ? "," : "") + fmt17(m.sigma[i]);
    man.add("theta", th);
    man.add("sigma", sg);
    man.add("d", m.d);
    man.add("delta", m.delta);
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const CommonOpts& common, const ModelOpts& model, long K, long n,
                 std::uint64_t seed, long replication) {
    SimSpec spec;
    spec.fou = model.params();
    spec.K = K;
    spec.n = n;
    spec.master_seed = seed;
    spec.validate();

    Manifest man;
    man.add("subcommand", "simulate");
    man.add("artifact_version", kArtifactVersion);
    manifest_model(man, model);
    man.add("K", K);
    man.add("n", n);
    man.add("seed", seed);
    man.add("replication", replication);
    write_file(std::filesystem::path(common.out) / "manifest.txt", man.str());

    FouSampler sampler(spec, common.resolved_threads());
    const SampledPath path = sampler.sample(replication);

    std::string csv = "t";
    for (int i = 1; i <= path.d; ++i) csv += ",x" + std::to_string(i);
    csv += "\n";
    for (std::size_t t = 0; t < path.points(); ++t) {
        csv += fmt17(static_cast<double>(t) * path.h);
        for (int i = 0; i < path.d; ++i) csv += "," + fmt17(path.value(t, i));
        csv += "\n";
    }
    write_file(std::filesystem::path(common.out) / "path.csv", csv);
    std::cout << "wrote " << (std::filesystem::path(common.out) / "path.csv").string() << " ("
              << path.points() << " points)\n";
    return 0;
}

// --- ground-truth -----------------------------------------------------------

int cmd_ground_truth(const CommonOpts& common, const ModelOpts& model, int M, long mesh_L,
                     const std::string& method, bool dump_cov) {
    const FouParams p = model.params();

    Manifest man;
    man.add("subcommand", "ground-truth");
    man.add("artifact_version", kArtifactVersion);
    manifest_model(man, model);
    man.add("M", M);
    man.add("mesh-L", mesh_L);
    man.add("method", method);
    if (dump_cov) man.add("dump-cov", "true");
    write_file(std::filesystem::path(common.out) / "manifest.txt", man.str());

    GroundTruth gt;
    if (method == "auto")
        gt = make_ground_truth(p, M, mesh_L, common.resolved_threads());
    else if (method == "wick")
        gt = ground_truth_wick_mesh(p, M, mesh_L, common.resolved_threads());
    else if (method == "closed") {
        if (p.H < 0.5)
            throw DomainError("ground-truth: closed forms require H >= 1/2 (use --method wick)");
        gt = make_ground_truth(p, M, mesh_L, common.resolved_threads());
    } else {
        throw ConfigError("ground-truth: --method must be auto|wick|closed");
    }

    write_file(std::filesystem::path(common.out) / "ground_truth.csv", tensor_csv(gt.tensor));

    // Provenance sidecar: method per word, mesh size, quadrature tolerance.
    std::string prov = "word,method,mesh_L,quad_tol\n";
    const auto words = enumerate_words(p.d, M);
    for (std::size_t i = 0; i < words.size(); ++i)
        prov += word_label(words[i]) + "," + gt.provenance[i] + "," + std::to_string(gt.mesh_L) +
                "," + fmt17(gt.quad_tol) + "\n";
    write_file(std::filesystem::path(common.out) / "ground_truth_provenance.csv", prov);

    if (dump_cov) {
        const double h = p.delta / 512.0;
        CovarianceTable table(p, h, 513, common.resolved_threads());
        write_file(std::filesystem::path(common.out) / "covariance.csv", table.csv());
    }
    std::cout << "wrote ground_truth.csv (" << gt.tensor.size() << " coefficients, method "
              << gt_method_name(gt.method) << ")\n";
    return 0;
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const CommonOpts& common, const ModelOpts& model, long K, long n, int M,
                 int reps, std::uint64_t seed, long mesh_L) {
    SimSpec spec;
    spec.fou = model.params();
    spec.K = K;
    spec.n = n;
    spec.master_seed = seed;
    spec.validate();

    Manifest man;
    man.add("subcommand", "estimate");
    man.add("artifact_version", kArtifactVersion);
    manifest_model(man, model);
    man.add("K", K);
    man.add("n", n);
    man.add("M", M);
    man.add("reps", reps);
    man.add("seed", seed);
    man.add("mesh-L", mesh_L);
    write_file(std::filesystem::path(common.out) / "manifest.txt", man.str());

    const GroundTruth gt = make_ground_truth(spec.fou, M, mesh_L, common.resolved_threads());
    const MseResult res = replicate_mse(spec, M, gt, reps, common.resolved_threads());

    std::string csv = "rep,total_sq_err";
    for (int m = 1; m <= M; ++m) csv += ",level" + std::to_string(m) + "_sq_err";
    csv += "\n";
    for (int r = 0; r < res.reps; ++r) {
        csv += std::to_string(r) + "," + fmt17(res.rep_total[static_cast<std::size_t>(r)]);
        for (int m = 1; m <= M; ++m)
            csv += "," + fmt17(res.rep_level[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)]);
        csv += "\n";
    }
    write_file(std::filesystem::path(common.out) / "estimate.csv", csv);

    std::string summary = "mse,se";
    for (int m = 1; m <= M; ++m) summary += ",level" + std::to_string(m) + "_mse";
    summary += "\n" + fmt17(res.mean) + "," + fmt17(res.se);
    for (int m = 1; m <= M; ++m) summary += "," + fmt17(res.level_mean[static_cast<std::size_t>(m)]);
    summary += "\n";
    write_file(std::filesystem::path(common.out) / "estimate_summary.csv", summary);
    write_file(std::filesystem::path(common.out) / "estimate_mean_tensor.csv",
               tensor_csv(res.mean_estimate));
    std::cout << "mse=" << res.mean << " se=" << res.se << " over " << res.reps << " reps\n";
    return 0;
}

// --- experiment -------------------------------------------------------------

std::string sweep_column(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::bias: return "n";
        case ExperimentKind::variance: return "K";
        case ExperimentKind::allocation: return "N";
    }
    return "x";
}

int cmd_experiment(const CommonOpts& common, ExperimentKind kind, ExperimentConfig cfg) {
    cfg.kind = kind;
    cfg.threads = common.resolved_threads();
    cfg.apply_preset();
    cfg.validate();

    Manifest man;
    man.add("subcommand", std::string("experiment ") + experiment_kind_name(kind));
    man.add("artifact_version", kArtifactVersion);
    man.add("preset", cfg.preset == ScalePreset::desk ? "desk" : "paper");
    {
        std::string hs;
        for (std::size_t i = 0; i < cfg.H_list.size(); ++i) hs += (i ? "," : "") + fmt17(cfg.H_list[i]);
        man.add("H", hs);
        std::string sw;
        for (std::size_t i = 0; i < cfg.sweep.size(); ++i)
            sw += (i ? "," : "") + std::to_string(cfg.sweep[i]);
        man.add("sweep", sw);
    }
    man.add("delta", cfg.delta);
    man.add("theta", cfg.theta);
    man.add("sigma", cfg.sigma);
    man.add("d", cfg.d);
    man.add("M", cfg.M);
    man.add("reps", cfg.reps);
    man.add("B", cfg.bootstrap_B);
    man.add("seed", cfg.master_seed);
    man.add("bias-K", cfg.bias_K);
    man.add("variance-n", cfg.variance_n);
    man.add("mesh-L", cfg.gt_mesh_L);
    write_file(std::filesystem::path(common.out) / "manifest.txt", man.str());

    if (cfg.preset == ScalePreset::paper)
        std::cerr << "warning: paper preset replays the published protocol scale; expect hours of "
                     "compute and large memory\n";

    // Incremental flush: one CSV per H, rewritten after every finished cell.
    const std::string kind_name = experiment_kind_name(kind);
    std::map<double, std::vector<CellResult>> done;
    auto flush_cells = [&](double H) {
        const auto& cells = done[H];
        std::string csv = sweep_column(kind) + ",mse,se\n";
        for (const auto& c : cells)
            csv += std::to_string(c.sweep_value) + "," + fmt17(c.mse) + "," + fmt17(c.se) + "\n";
        write_file(std::filesystem::path(common.out) / (kind_name + "_" + fmt_h(H) + ".csv"), csv);
    };

    ExperimentResult result;
    try {
        result = run_experiment(
            cfg,
            [&](double H, const CellResult& cell) {
                done[H].push_back(cell);
                flush_cells(H);
            },
            [&](const std::string& msg) { std::cerr << "[" << kind_name << "] " << msg << "\n"; });
    } catch (...) {
        std::cerr << "experiment aborted; partial results flushed under " << common.out << "\n";
        throw;
    }

    // Re-emit per-H tables in sweep order (cells were computed largest-first),
    // then slopes and the plot.
    for (auto& h : result.per_H) {
        done[h.H] = h.cells;
        flush_cells(h.H);
    }
    std::string slopes = "H,slope,ci_low,ci_high,r2,bound\n";
    for (const auto& h : result.per_H)
        slopes += fmt_h(h.H) + "," + fmt17(h.regression.slope) + "," + fmt17(h.regression.ci_low) +
                  "," + fmt17(h.regression.ci_high) + "," + fmt17(h.regression.r2) + "," +
                  fmt17(h.bound_slope) + "\n";
    write_file(std::filesystem::path(common.out) / (kind_name + "_slopes.csv"), slopes);

    std::vector<SvgPanel> panels;
    for (const auto& h : result.per_H) {
        SvgPanel pan;
        pan.title = kind_name + std::string(", H=") + fmt_h(h.H);
        pan.x_label = sweep_column(kind) == "n" ? "n-1" : sweep_column(kind);
        pan.y_label = "MSE";
        for (const auto& c : h.cells) pan.points.emplace_back(regression_x(kind, c), c.mse);
        pan.fit_slope = h.regression.slope;
        pan.fit_intercept = h.regression.intercept;
        pan.bound_slope = h.bound_slope;
        panels.push_back(std::move(pan));
    }
    write_file(std::filesystem::path(common.out) / (kind_name + ".svg"),
               render_loglog_svg(panels));

    for (const auto& h : result.per_H)
        std::cout << kind_name << " H=" << fmt_h(h.H) << ": slope " << h.regression.slope << " ["
                  << h.regression.ci_low << ", " << h.regression.ci_high
                  << "], R2=" << h.regression.r2 << ", bound " << h.bound_slope << "\n";
    return 0;
}

int cmd_levelwise(const CommonOpts& common, const ModelOpts& model_base,
                  std::vector<double> H_list, long K, long n, int M, int reps,
                  std::uint64_t seed) {
    Manifest man;
    man.add("subcommand", "experiment levelwise");
    man.add("artifact_version", kArtifactVersion);
    {
        std::string hs;
        for (std::size_t i = 0; i < H_list.size(); ++i) hs += (i ? "," : "") + fmt17(H_list[i]);
        man.add("H", hs);
    }
    man.add("delta", model_base.delta);
    man.add("d", model_base.d);
    man.add("K", K);
    man.add("n", n);
    man.add("M", M);
    man.add("reps", reps);
    man.add("seed", seed);
    write_file(std::filesystem::path(common.out) / "manifest.txt", man.str());

    std::string csv = "H,level,variance,share\n";
    for (double H : H_list) {
        ModelOpts m = model_base;
        m.H = H;
        SimSpec spec;
        spec.fou = m.params();
        spec.K = K;
        spec.n = n;
        spec.master_seed = seed;
        const LevelwiseReport rep = levelwise_report(spec, M, reps, common.resolved_threads());
        for (int lvl = 2; lvl <= M; ++lvl) {
            csv += fmt_h(H) + "," + std::to_string(lvl) + "," +
                   fmt17(rep.level_variance[static_cast<std::size_t>(lvl)]) + "," +
                   fmt17(rep.share[static_cast<std::size_t>(lvl - 2)]) + "\n";
        }
        std::cout << "H=" << fmt_h(H) << " level-2 share " << rep.share[0] << "\n";
    }
    write_file(std::filesystem::path(common.out) / "levelwise.csv", csv);
    return 0;
}

// --- verify ------------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_verify(const CommonOpts& common) {
    Manifest man;
    man.add("subcommand", "verify");
    man.add("artifact_version", kArtifactVersion);
    write_file(std::filesystem::path(common.out) / "manifest.txt", man.str());

    std::vector<VerifyCheck> checks;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };
    NormalStream rng(814521u);
    auto random_path = [&](int segments, int d) {
        PiecewiseLinearPath p;
        p.d = d;
        for (int i = 0; i <= segments; ++i) {
            p.times.push_back(i);
            for (int j = 0; j < d; ++j) p.points.push_back(rng.next_normal());
        }
        return p;
    };

    // Shuffle identity on random PL paths.
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto path = random_path(6, 2);
            const auto S = signature_of_path(path, 4);
            const auto words = enumerate_words(2, 4);
            for (const auto& u : words) {
                if (u.length() == 0 || u.length() > 2) continue;
                for (const auto& v : words) {
                    if (v.length() == 0 || u.length() + v.length() > 4) continue;
                    const double lhs = S.at(u) * S.at(v);
                    const double rhs = hs_inner(shuffle(u, v, 2, 4), S);
                    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
                }
            }
        }
        add("shuffle identity (random PL paths)", worst < 1e-10, "max rel err " + fmt17(worst));
    }
    // Chen associativity.
    {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> inc(2);
            auto draw = [&] {
                inc[0] = rng.next_normal();
                inc[1] = rng.next_normal();
                return segment_signature(inc, 4);
            };
            const auto a = draw(), b = draw(), c = draw();
            const auto ab_c = chen_concat(chen_concat(a, b), c);
            const auto a_bc = chen_concat(a, chen_concat(b, c));
            for (std::size_t i = 0; i < ab_c.size(); ++i)
                worst = std::max(worst, std::abs(ab_c[i] - a_bc[i]));
        }
        add("Chen associativity", worst < 1e-12, "max abs err " + fmt17(worst));
    }
    // Level-1 telescoping on a simulated path.
    {
        SimSpec spec;
        spec.fou = FouParams::uniform(0.5, 1.0, 1.0, 2, 0.1);
        spec.K = 64;
        spec.n = 20;
        spec.master_seed = 7;
        FouSampler sampler(spec, common.resolved_threads());
        const auto path = sampler.sample(0);
        const auto est = block_average_estimate(path, 2);
        double worst = 0.0;
        const std::size_t last = path.points() - 1;
        for (int i = 0; i < 2; ++i) {
            const double tele = (path.value(last, i) - path.value(0, i)) / static_cast<double>(spec.K);
            worst = std::max(worst, std::abs(est.at(Word{i + 1}) - tele));
        }
        add("level-1 telescoping", worst < 1e-12, "max abs err " + fmt17(worst));
    }
    // Oracle equivalence: brute force halving.
    {
        const auto path = random_path(5, 2);
        const auto exact = signature_of_path(path, 4);
        double prev = -1.0;
        bool halves = true;
        double final_rel = 0.0;
        for (int refine : {8, 16, 32, 64}) {
            const auto bf = brute_force_signature(path, 4, refine);
            double err = 0.0;
            for (std::size_t i = 0; i < exact.size(); ++i)
                err = std::max(err, std::abs(bf[i] - exact[i]));
            if (prev > 0.0 && err > 0.75 * prev) halves = false;
            prev = err;
            final_rel = err / std::max(1.0, hs_norm(exact));
        }
        add("oracle equivalence (error halves)", halves && final_rel < 1e-2,
            "final rel err " + fmt17(final_rel));
    }
    // Quadrature vs closed form at H = 1/2.
    {
        FouCovariance cov(0.5, 1.0, 1.0, 1e-10);
        double worst = 0.0;
        for (double tau : {0.0, 0.05, 0.3, 1.0, 3.0, 10.0}) {
            const double closed = cov.variance() * std::exp(-tau);
            const double spectral = cov.R_spectral(tau);
            worst = std::max(worst, std::abs(spectral - closed) / cov.variance());
        }
        add("spectral quadrature vs OU closed form", worst < 1e-7, "max rel err " + fmt17(worst));
    }
    // zeta closed form vs numeric normalization.
    {
        double worst = 0.0;
        for (double H : {0.3, 0.4, 0.6, 0.75, 0.9}) {
            FouCovariance cov(H, 1.3, 0.8, 1e-10);
            const double numeric = cov.variance() / (2.0 * cov.spectral_density_integral());
            worst = std::max(worst, std::abs(numeric - cov.zeta()) / cov.zeta());
        }
        add("zeta normalization", worst < 1e-8, "max rel err " + fmt17(worst));
    }
    // Ground-truth shuffle self-consistency (wick mesh, small L for speed).
    {
        double worst = 0.0;
        for (double H : {0.40, 0.50, 0.60}) {
            const auto gt = ground_truth_wick_mesh(FouParams::uniform(H, 1.0, 1.0, 2, 0.1), 4, 256,
                                                   common.resolved_threads());
            worst = std::max(worst, shuffle_consistency(gt, 1, 2));
        }
        add("ground-truth shuffle consistency", worst < 0.0075, "max rel err " + fmt17(worst));
    }

    bool all = true;
    std::printf("%-44s %s\n", "check", "result");
    for (const auto& c : checks) {
        std::printf("%-44s %s  (%s)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.detail.c_str());
        all = all && c.pass;
    }
    std::printf("verify: %s\n", all ? "all checks passed" : "FAILURES PRESENT");
    return all ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) try {
    CLI::App app{"expected-signature estimation for stationary fOU processes"};
    app.require_subcommand(1);

    const std::string config_path = find_config_arg(argc, argv);
    ConfigMap config;
    const bool have_config = !config_path.empty();
    if (have_config) config = ConfigMap::load(config_path);
    const std::string sub_name = argc > 1 ? argv[1] : "";
    const std::string sub_kind = argc > 2 ? argv[2] : "";

    // simulate
    CommonOpts sim_common;
    ModelOpts sim_model;
    long sim_K = 4, sim_n = 101, sim_rep = 0;
    std::uint64_t sim_seed = 1;
    auto* sim = app.add_subcommand("simulate", "sample one stationary fOU path and write CSV");
    add_common(sim, sim_common);
    add_model(sim, sim_model);
    sim->add_option("--K", sim_K, "blocks");
    sim->add_option("--n", sim_n, "points per block");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--replication", sim_rep, "replication index");

    // ground-truth
    CommonOpts gt_common;
    ModelOpts gt_model;
    int gt_M = 4;
    long gt_L = 1024;
    std::string gt_method = "auto";
    bool gt_dump_cov = false;
    auto* gtc = app.add_subcommand("ground-truth", "deterministic expected signature");
    add_common(gtc, gt_common);
    add_model(gtc, gt_model);
    gtc->add_option("--M", gt_M, "truncation level (<= 4)");
    gtc->add_option("--mesh-L", gt_L, "wick mesh cells");
    gtc->add_option("--method", gt_method, "auto|wick|closed");
    gtc->add_flag("--dump-cov", gt_dump_cov, "also dump the covariance table CSV");

    // estimate
    CommonOpts est_common;
    ModelOpts est_model;
    long est_K = 64, est_n = 100, est_L = 1024;
    int est_M = 4, est_reps = 100;
    std::uint64_t est_seed = 1;
    auto* est = app.add_subcommand("estimate", "Monte Carlo block-averaging estimation error");
    add_common(est, est_common);
    add_model(est, est_model);
    est->add_option("--K", est_K, "blocks");
    est->add_option("--n", est_n, "points per block");
    est->add_option("--M", est_M, "truncation level");
    est->add_option("--reps", est_reps, "replications");
    est->add_option("--seed", est_seed, "master seed");
    est->add_option("--mesh-L", est_L, "ground-truth mesh cells (H < 1/2)");

    // experiment
    CommonOpts exp_common;
    auto* exp = app.add_subcommand("experiment", "rate experiments and reports");
    exp->require_subcommand(1);
    ExperimentConfig cfg;
    cfg.reps = 0;         // filled by preset unless overridden
    cfg.bootstrap_B = 0;
    cfg.delta = 0.0;
    cfg.bias_K = 0;
    cfg.variance_n = 0;
    std::string preset = "desk";
    std::vector<CLI::App*> kind_cmds;
    auto add_exp_sub = [&](const char* name, const char* desc) {
        auto* c = exp->add_subcommand(name, desc);
        add_common(c, exp_common);
        c->add_option("--preset", preset, "desk|paper");
        c->add_option("--H", cfg.H_list, "Hurst values")->delimiter(',');
        c->add_option("--sweep", cfg.sweep, "sweep values")->delimiter(',');
        c->add_option("--delta", cfg.delta, "block length");
        c->add_option("--theta", cfg.theta, "mean reversion");
        c->add_option("--sigma", cfg.sigma, "volatility");
        c->add_option("--d", cfg.d, "coordinates");
        c->add_option("--M", cfg.M, "truncation level");
        c->add_option("--reps", cfg.reps, "replications");
        c->add_option("--B", cfg.bootstrap_B, "bootstrap resamples");
        c->add_option("--seed", cfg.master_seed, "master seed");
        c->add_option("--bias-K", cfg.bias_K, "blocks for the bias experiment");
        c->add_option("--variance-n", cfg.variance_n, "points per block for the variance experiment");
        c->add_option("--mesh-L", cfg.gt_mesh_L, "ground-truth mesh cells");
        kind_cmds.push_back(c);
        return c;
    };
    auto* exp_bias = add_exp_sub("bias", "discretization-bias sweep over n");
    auto* exp_var = add_exp_sub("variance", "variance-decay sweep over K");
    auto* exp_alloc = add_exp_sub("allocation", "budget-allocation sweep over N");

    // experiment levelwise
    CommonOpts lw_common;
    ModelOpts lw_model;
    lw_model.delta = 0.1;
    std::vector<double> lw_H{0.40, 0.50, 0.60};
    long lw_K = 1000, lw_n = 100;
    int lw_M = 4, lw_reps = 50;
    std::uint64_t lw_seed = 1;
    auto* lw = exp->add_subcommand("levelwise", "per-level variance concentration report");
    add_common(lw, lw_common);
    lw->add_option("--H", lw_H, "Hurst values")->delimiter(',');
    lw->add_option("--delta", lw_model.delta, "block length");
    lw->add_option("--d", lw_model.d, "coordinates");
    lw->add_option("--K", lw_K, "blocks");
    lw->add_option("--n", lw_n, "points per block");
    lw->add_option("--M", lw_M, "truncation level");
    lw->add_option("--reps", lw_reps, "replications");
    lw->add_option("--seed", lw_seed, "master seed");

    // verify
    CommonOpts ver_common;
    auto* ver = app.add_subcommand("verify", "run the one-shot verification suite");
    add_common(ver, ver_common);

    // Config values become defaults for the addressed subcommand; explicit
    // flags parsed below override them.
    if (have_config) {
        if (sub_name == "simulate") {
            config_common(config, sim_common);
            config_model(config, sim_model);
            config.get("K", sim_K);
            config.get("n", sim_n);
            config.get("seed", sim_seed);
            config.get("replication", sim_rep);
            config.finish("simulate");
        } else if (sub_name == "ground-truth") {
            config_common(config, gt_common);
            config_model(config, gt_model);
            config.get("M", gt_M);
            config.get("mesh-L", gt_L);
            config.get("method", gt_method);
            config.get("dump-cov", gt_dump_cov);
            config.finish("ground-truth");
        } else if (sub_name == "estimate") {
            config_common(config, est_common);
            config_model(config, est_model);
            config.get("K", est_K);
            config.get("n", est_n);
            config.get("M", est_M);
            config.get("reps", est_reps);
            config.get("seed", est_seed);
            config.get("mesh-L", est_L);
            config.finish("estimate");
        } else if (sub_name == "experiment" && sub_kind == "levelwise") {
            config_common(config, lw_common);
            config.get("H", lw_H);
            config.get("delta", lw_model.delta);
            config.get("d", lw_model.d);
            config.get("K", lw_K);
            config.get("n", lw_n);
            config.get("M", lw_M);
            config.get("reps", lw_reps);
            config.get("seed", lw_seed);
            config.finish("experiment levelwise");
        } else if (sub_name == "experiment") {
            config_common(config, exp_common);
            config.get("preset", preset);
            config.get("H", cfg.H_list);
            config.get("sweep", cfg.sweep);
            config.get("delta", cfg.delta);
            config.get("theta", cfg.theta);
            config.get("sigma", cfg.sigma);
            config.get("d", cfg.d);
            config.get("M", cfg.M);
            config.get("reps", cfg.reps);
            config.get("B", cfg.bootstrap_B);
            config.get("seed", cfg.master_seed);
            config.get("bias-K", cfg.bias_K);
            config.get("variance-n", cfg.variance_n);
            config.get("mesh-L", cfg.gt_mesh_L);
            config.finish("experiment " + sub_kind);
        } else if (sub_name == "verify") {
            config_common(config, ver_common);
            config.finish("verify");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_common, sim_model, sim_K, sim_n, sim_seed, sim_rep);
        if (gtc->parsed())
            return cmd_ground_truth(gt_common, gt_model, gt_M, gt_L, gt_method, gt_dump_cov);
        if (est->parsed())
            return cmd_estimate(est_common, est_model, est_K, est_n, est_M, est_reps, est_seed, est_L);
        if (exp->parsed()) {
            if (preset == "desk")
                cfg.preset = ScalePreset::desk;
            else if (preset == "paper")
                cfg.preset = ScalePreset::paper;
            else
                throw ConfigError("experiment: --preset must be desk or paper");
            if (exp_bias->parsed()) return cmd_experiment(exp_common, ExperimentKind::bias, cfg);
            if (exp_var->parsed()) return cmd_experiment(exp_common, ExperimentKind::variance, cfg);
            if (exp_alloc->parsed())
                return cmd_experiment(exp_common, ExperimentKind::allocation, cfg);
            if (lw->parsed())
                return cmd_levelwise(lw_common, lw_model, lw_H, lw_K, lw_n, lw_M, lw_reps, lw_seed);
        }
        if (ver->parsed()) return cmd_verify(ver_common);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
} catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
} catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 2;
} catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
}

}  // namespace sigest
