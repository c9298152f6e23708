#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "otail/classify.hpp"
#include "otail/convolve.hpp"
#include "otail/errors.hpp"
#include "otail/grid.hpp"
#include "otail/json_io.hpp"
#include "otail/mc.hpp"
#include "otail/presets.hpp"
#include "otail/random_sum.hpp"
#include "otail/report.hpp"
#include "otail/theorem.hpp"
#include "otail/version.hpp"

namespace fs = std::filesystem;
using otail::json;

namespace {

// exit codes: 0 ok, 2 config/usage, 3 inconclusive verdict, 4 budget refusal
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInconclusive = 3;
constexpr int kBudget = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    double x_max = 200.0;
    long k_max = 10000;
    double tol = 1e-6;
    std::uint64_t seed = 1;
    long samples = 200000;
    double rogozin_A = 2.0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
    auto* cfg = cmd->add_option("--config", o.config_path, "path to a JSON run configuration");
    if (needs_config) cfg->required();
    cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
    cmd->add_option("--x-max", o.x_max, "largest abscissa of the evaluation grid");
    cmd->add_option("--k-max", o.k_max, "successor-index scan depth");
    cmd->add_option("--tol", o.tol, "absolute tolerance for deterministic tails");
    cmd->add_option("--seed", o.seed, "Monte Carlo seed");
    cmd->add_option("--samples", o.samples, "Monte Carlo sample count");
    cmd->add_option("--rogozin-A", o.rogozin_A, "absolute constant used in concentration bounds");
}

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    return json::parse(f);  // parse_error carries the byte position
}

void ensure_outdir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

std::string joined(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

json mc_agreement_report(const otail::TailGrid& det, const otail::McTailResult& mc) {
    long compared = 0, within = 0;
    double worst_z = 0, worst_x = 0;
    for (std::size_t i = 0; i < mc.xs.size(); ++i) {
        if (mc.estimate[i] < 1e-4) continue;
        const double d = det.survival_at(mc.xs[i]);
        const double se = std::max(mc.se[i], 1e-12);
        const double z = std::abs(d - mc.estimate[i]) / se;
        ++compared;
        if (z <= 3.0) ++within;
        if (z > worst_z) {
            worst_z = z;
            worst_x = mc.xs[i];
        }
    }
    return json{{"nodes_compared", compared},
                {"nodes_within_3se", within},
                {"worst_z", worst_z},
                {"worst_z_at_x", worst_x}};
}

int run_classify(const CommonOpts& o, const std::string& class_name) {
    const json cfg = load_config(o.config_path);
    const otail::RunConfig rc = otail::run_config_from_json(cfg);
    if (!rc.model) throw std::invalid_argument("classify: config needs a 'model'");
    const otail::TailClass cls = otail::tail_class_from_string(class_name);
    otail::ClassifyOptions copts;
    copts.x_max = o.x_max;
    const otail::ClassVerdict v = otail::classify(otail::TailRef(*rc.model), cls, copts);
    ensure_outdir(o.out_dir);
    const json prov = otail::provenance(cfg, "classify");
    otail::write_json_file(joined(o.out_dir, "verdict.json"), otail::class_verdict_to_json(v, prov));
    otail::write_text_file(joined(o.out_dir, "ratio.csv"), otail::ratio_csv(v.ratio, prov));
    std::cout << "class " << otail::to_string(cls) << ": " << otail::to_string(v.verdict) << "\n";
    return v.verdict == otail::Verdict::inconclusive ? kInconclusive : kOk;
}

int run_convolve(const CommonOpts& o, long n) {
    const json cfg = load_config(o.config_path);
    const otail::RunConfig rc = otail::run_config_from_json(cfg);
    if (!rc.sequence) throw std::invalid_argument("convolve: config needs a 'sequence'");
    const std::vector<double> xs = otail::make_hybrid_grid(o.x_max);
    const otail::TailGrid g = otail::conv_chain(*rc.sequence, n, xs, o.tol);
    ensure_outdir(o.out_dir);
    const json prov = otail::provenance(cfg, "convolve");
    otail::write_text_file(joined(o.out_dir, "sum_tail.csv"), otail::tail_grid_csv(g, prov));
    otail::write_json_file(joined(o.out_dir, "sum_tail.json"), otail::tail_grid_to_json(g, prov));
    std::cout << "S_" << n << " tail on " << g.xs.size() << " nodes, abs_error_bound "
              << otail::fmt17(g.abs_error_bound) << (g.tol_met ? "" : " (tolerance NOT met)") << "\n";
    return g.tol_met ? kOk : kBudget;
}

int run_random_sum(const CommonOpts& o, double decompose_x, double decompose_K) {
    const json cfg = load_config(o.config_path);
    const otail::RunConfig rc = otail::run_config_from_json(cfg);
    if (!rc.sequence || !rc.counting) {
        throw std::invalid_argument("random-sum: config needs 'sequence' and 'counting'");
    }
    const std::vector<double> xs = otail::make_hybrid_grid(o.x_max);
    otail::RandomSumOptions ro;
    ro.tol = o.tol;
    const otail::RandomSumResult r = otail::random_sum_tail(*rc.sequence, *rc.counting, xs, ro);
    ensure_outdir(o.out_dir);
    const json prov = otail::provenance(cfg, "random-sum");
    otail::write_text_file(joined(o.out_dir, "random_sum.csv"), otail::tail_grid_csv(r.grid, prov));
    json grid_json = otail::tail_grid_to_json(r.grid, prov);
    grid_json["truncation"] = r.truncation;
    grid_json["counting_remainder"] = r.counting_remainder;
    otail::write_json_file(joined(o.out_dir, "random_sum.json"), grid_json);
    if (decompose_x > 0) {
        const long kappa = rc.kappa.value_or(1);
        const otail::DecompositionTrace tr =
            otail::decomposition_trace(*rc.sequence, *rc.counting, kappa, decompose_K, decompose_x, ro);
        otail::write_json_file(joined(o.out_dir, "decomposition.json"),
                               otail::decomposition_to_json(tr, decompose_x, prov));
    }
    std::cout << "random-sum tail on " << r.grid.xs.size() << " nodes, truncation N = "
              << r.truncation << ", abs_error_bound " << otail::fmt17(r.grid.abs_error_bound)
              << (r.grid.tol_met ? "" : " (tolerance NOT met)") << "\n";
    return r.grid.tol_met ? kOk : kBudget;
}

int run_check(const CommonOpts& o, int theorem, long kappa_flag) {
    const json cfg = load_config(o.config_path);
    const otail::RunConfig rc = otail::run_config_from_json(cfg);
    if (!rc.sequence || !rc.counting) {
        throw std::invalid_argument("check: config needs 'sequence' and 'counting'");
    }
    const long kappa = kappa_flag > 0 ? kappa_flag : rc.kappa.value_or(1);
    otail::CheckOptions copts;
    copts.x_max = o.x_max;
    copts.k_max = o.k_max;
    otail::ConditionReport rep;
    if (theorem == 4) {
        rep = otail::check_theorem4(*rc.sequence, *rc.counting, kappa, copts);
    } else if (theorem == 5) {
        const auto upper = rc.counting->support_upper();
        rep = otail::check_theorem5(*rc.sequence, *rc.counting, kappa, upper.value_or(o.k_max), copts);
    } else if (theorem == 6) {
        rep = otail::check_theorem6(*rc.sequence, *rc.counting, kappa, copts);
    } else {
        throw std::invalid_argument("check: --theorem must be 4, 5, or 6");
    }
    ensure_outdir(o.out_dir);
    json prov = otail::provenance(cfg, "check");
    prov["rogozin_A"] = o.rogozin_A;
    otail::write_json_file(joined(o.out_dir, "check_t" + std::to_string(theorem) + ".json"),
                           otail::condition_report_to_json(rep, prov));
    std::cout << rep.theorem << " (kappa = " << kappa << "): " << otail::to_string(rep.overall) << "\n";
    for (const auto& c : rep.conditions) {
        std::cout << "  [" << otail::to_string(c.verdict) << "] " << c.label << ": " << c.summary << "\n";
    }
    return rep.overall == otail::Applicability::inconclusive ? kInconclusive : kOk;
}

int run_mc_validate(const CommonOpts& o) {
    const json cfg = load_config(o.config_path);
    const otail::RunConfig rc = otail::run_config_from_json(cfg);
    if (!rc.sequence || !rc.counting) {
        throw std::invalid_argument("mc-validate: config needs 'sequence' and 'counting'");
    }
    const std::vector<double> xs = otail::make_hybrid_grid(o.x_max);
    const otail::McTailResult mc =
        otail::simulate_random_sum(*rc.sequence, *rc.counting, o.samples, o.seed, xs);
    otail::RandomSumOptions ro;
    ro.tol = o.tol;
    const otail::RandomSumResult det = otail::random_sum_tail(*rc.sequence, *rc.counting, xs, ro);
    ensure_outdir(o.out_dir);
    const json prov = otail::provenance(cfg, "mc-validate");
    otail::write_text_file(joined(o.out_dir, "mc.csv"), otail::mc_csv(mc, prov));
    otail::write_json_file(joined(o.out_dir, "mc_manifest.json"), otail::mc_manifest(mc, prov));
    json agree = mc_agreement_report(det.grid, mc);
    agree["provenance"] = prov;
    otail::write_json_file(joined(o.out_dir, "mc_agreement.json"), agree);
    std::cout << "mc-validate: " << agree["nodes_within_3se"] << "/" << agree["nodes_compared"]
              << " nodes within 3 SE, worst z = " << agree["worst_z"].get<double>() << "\n";
    return kOk;
}

int run_example(const CommonOpts& o, int id, const otail::PresetParams& pp) {
    const otail::Preset preset = otail::make_preset(id, pp);
    otail::RunConfig rc;
    rc.sequence = preset.sequence;
    rc.counting = preset.counting;
    rc.kappa = preset.kappa;
    const json cfg = otail::run_config_to_json(rc);
    ensure_outdir(o.out_dir);
    otail::write_json_file(joined(o.out_dir, "config.json"), cfg);
    const json prov = otail::provenance(cfg, "example");

    otail::CheckOptions copts;
    copts.x_max = o.x_max;
    copts.k_max = o.k_max;
    otail::ConditionReport rep;
    if (preset.theorem == 4) {
        rep = otail::check_theorem4(preset.sequence, preset.counting, preset.kappa, copts);
    } else if (preset.theorem == 5) {
        rep = otail::check_theorem5(preset.sequence, preset.counting, preset.kappa, preset.bounded_D,
                                    copts);
    } else {
        rep = otail::check_theorem6(preset.sequence, preset.counting, preset.kappa, copts);
    }
    otail::write_json_file(joined(o.out_dir, "check_t" + std::to_string(preset.theorem) + ".json"),
                           otail::condition_report_to_json(rep, prov));
    std::cout << preset.name << ": " << rep.theorem << " " << otail::to_string(rep.overall) << "\n";

    if (id == 3) {
        // the uniform-ratio checker is expected to reject this configuration
        const otail::ConditionReport rep4 =
            otail::check_theorem4(preset.sequence, preset.counting, preset.kappa, copts);
        otail::write_json_file(joined(o.out_dir, "check_t4.json"),
                               otail::condition_report_to_json(rep4, prov));
        std::cout << preset.name << ": T4 " << otail::to_string(rep4.overall) << "\n";
    }

    const std::vector<double> xs = otail::make_hybrid_grid(o.x_max);
    otail::RandomSumOptions ro;
    ro.tol = o.tol;
    const otail::RandomSumResult rs = otail::random_sum_tail(preset.sequence, preset.counting, xs, ro);
    otail::write_text_file(joined(o.out_dir, "random_sum.csv"), otail::tail_grid_csv(rs.grid, prov));
    otail::write_json_file(joined(o.out_dir, "random_sum.json"),
                           otail::tail_grid_to_json(rs.grid, prov));

    otail::ClassifyOptions clopts;
    clopts.x_max = o.x_max;
    const otail::ClassVerdict ol =
        otail::classify(otail::TailRef(rs.grid), otail::TailClass::OL, clopts);
    otail::write_json_file(joined(o.out_dir, "classify_ol.json"),
                           otail::class_verdict_to_json(ol, prov));
    std::cout << "random-sum tail OL verdict: " << otail::to_string(ol.verdict) << "\n";

    const otail::McTailResult mc =
        otail::simulate_random_sum(preset.sequence, preset.counting, o.samples, o.seed, xs);
    otail::write_text_file(joined(o.out_dir, "mc.csv"), otail::mc_csv(mc, prov));
    otail::write_json_file(joined(o.out_dir, "mc_manifest.json"), otail::mc_manifest(mc, prov));
    json agree = mc_agreement_report(rs.grid, mc);
    agree["provenance"] = prov;
    otail::write_json_file(joined(o.out_dir, "mc_agreement.json"), agree);
    std::cout << "mc agreement: " << agree["nodes_within_3se"] << "/" << agree["nodes_compared"]
              << " nodes within 3 SE\n";

    const bool checker_ok = rep.overall == otail::Applicability::applies;
    const bool ol_ok = ol.verdict == otail::Verdict::member;
    return checker_ok && ol_ok ? kOk : kInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"otail " + std::string(otail::kToolVersion) +
                 ": numerical tail analysis for random sums of independent, "
                 "non-identically-distributed nonnegative random variables"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string class_name = "OL";
    long conv_n = 2;
    int theorem = 4;
    long kappa_flag = 0;
    int example_id = 1;
    double decompose_x = 0, decompose_K = 3.0;
    otail::PresetParams pp;

    CLI::App* c_classify = app.add_subcommand("classify", "tail-class membership verdict for a model");
    add_common(c_classify, o, true);
    c_classify->add_option("--class", class_name, "OL | L | Lgamma | D | S | Sstar");

    CLI::App* c_conv = app.add_subcommand("convolve", "tail of the partial sum S_n");
    add_common(c_conv, o, true);
    c_conv->add_option("--n", conv_n, "number of summands")->required();

    CLI::App* c_rs = app.add_subcommand("random-sum", "tail of the randomly stopped sum");
    add_common(c_rs, o, true);
    c_rs->add_option("--decompose-x", decompose_x, "also emit the four-term split at this x");
    c_rs->add_option("--decompose-K", decompose_K, "block constant K > 2 for the split");

    CLI::App* c_check = app.add_subcommand("check", "verify a sufficient-condition list");
    add_common(c_check, o, true);
    c_check->add_option("--theorem", theorem, "4 | 5 | 6")->required();
    c_check->add_option("--kappa", kappa_flag, "reference index kappa (default: from config)");

    CLI::App* c_ex = app.add_subcommand("example", "run a bundled preset end to end");
    add_common(c_ex, o, false);
    c_ex->add_option("--id", example_id, "1 | 2 | 3")->required();
    c_ex->add_option("--alpha", pp.alpha, "Pareto shape for preset 1");
    c_ex->add_option("--lambda", pp.lambda, "rate / Poisson mean parameter");
    c_ex->add_option("--D", pp.D, "prefix length / counting bound");

    CLI::App* c_mc = app.add_subcommand("mc-validate", "Monte Carlo cross-check of the random sum");
    add_common(c_mc, o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (app.got_subcommand(c_classify)) return run_classify(o, class_name);
        if (app.got_subcommand(c_conv)) return run_convolve(o, conv_n);
        if (app.got_subcommand(c_rs)) return run_random_sum(o, decompose_x, decompose_K);
        if (app.got_subcommand(c_check)) return run_check(o, theorem, kappa_flag);
        if (app.got_subcommand(c_ex)) return run_example(o, example_id, pp);
        if (app.got_subcommand(c_mc)) return run_mc_validate(o);
    } catch (const otail::BudgetExceeded& e) {
        std::cerr << "refused: " << e.what() << " (attained bound " << e.attained << ")\n";
        return kBudget;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
