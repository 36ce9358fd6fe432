#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fl/analysis.hpp"
#include "fl/io.hpp"
#include "fl/reductions.hpp"
#include "fl/rng.hpp"

namespace {

// Exit codes: 0 success, 2 usage or input error, 3 failed numeric check.
struct NumericCheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fl::MechanismSpec mechanism_from_arg(const std::string& arg) {
  if (arg == "cm") return fl::MechanismSpec::coordinate_wise_median();
  if (arg == "gm") return fl::MechanismSpec::geometric_median_mechanism();
  return fl::load_mechanism(arg);
}

void emit(const std::string& line, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << line << "\n";
  } else {
    fl::write_text_file(out_path, line + "\n");
  }
}

void run_theorem1(int n) {
  if (n < 3 || n % 2 == 0) throw CLI::ValidationError("--n must be an odd integer >= 3");
  const double value = fl::theorem1_value(n);
  const double tstar = fl::theorem1_tstar(n);
  const fl::FamilyPoint witness = fl::eta_profile((n - 1) / 2, tstar);
  const fl::ARReport ar = fl::approximation_ratio(
      fl::MechanismSpec::coordinate_wise_median(), witness.profile,
      fl::NormOrder::finite(1.0));
  std::string out = "{\"n\":" + std::to_string(n);
  out += ",\"value\":" + fl::format_double(value);
  out += ",\"t_star\":" + fl::format_double(tstar);
  out += ",\"witness\":" + fl::profile_to_json(witness.profile);
  out += ",\"recomputed_ar\":" + fl::format_double(ar.ratio);
  out += "}";
  std::cout << out << "\n";
  if (std::abs(ar.ratio - value) > 1e-9) {
    throw NumericCheckFailure("recomputed ratio disagrees with the closed form");
  }
}

void run_scan(int n, const std::string& p_text, long samples, std::uint64_t seed,
              const std::string& mech_arg, bool builtin_corpus,
              const std::string& csv_path, int threads) {
  const fl::NormOrder order = fl::parse_norm_order(p_text);
  const fl::MechanismSpec spec = mechanism_from_arg(mech_arg);
  fl::ScanConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.keep_samples = !csv_path.empty();
  if (builtin_corpus) cfg.corpus = fl::builtin_hard_profiles(n);
  const fl::ScanResult result = fl::worst_case_scan(spec, n, order, cfg);
  if (!csv_path.empty()) {
    fl::write_text_file(csv_path, fl::scan_samples_to_csv(result));
  }
  std::cout << fl::scan_summary_to_json(result) << "\n";
}

void run_family(int m, double t_min, double t_max, double step,
                const std::string& out_path) {
  const fl::FamilyScanResult result = fl::family_scan(m, {t_min, t_max, step});
  emit(fl::family_scan_to_csv(result), out_path.empty() ? "" : out_path);
}

void run_sp(const std::string& mech_arg, const std::string& profile_path,
            const std::vector<long>& random_spec, int refinements,
            const std::string& out_path) {
  const fl::MechanismSpec spec = mechanism_from_arg(mech_arg);
  fl::DeviationGrid grid;
  grid.refinements = refinements;
  if (!profile_path.empty()) {
    const fl::Profile profile = fl::load_profile(profile_path);
    emit(fl::deviation_report_to_json(fl::sp_deviation_search(spec, profile, grid)),
         out_path);
    return;
  }
  if (random_spec.size() != 3) {
    throw CLI::ValidationError("either --profile or --random <n> <count> <seed> is required");
  }
  const int n = static_cast<int>(random_spec[0]);
  const long count = random_spec[1];
  const std::uint64_t seed = static_cast<std::uint64_t>(random_spec[2]);
  if (n < 1 || count < 1) throw CLI::ValidationError("--random needs n >= 1 and count >= 1");

  const fl::SplitRng root = fl::SplitRng(seed).split(0xdef);
  fl::DeviationReport best;
  best.gain = -1.0;
  fl::Profile best_profile;
  for (long s = 0; s < count; ++s) {
    fl::SplitRng rng = root.split(static_cast<std::uint64_t>(s));
    std::vector<fl::Point> pts;
    for (int i = 0; i < n; ++i) {
      pts.push_back({rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)});
    }
    const fl::Profile profile{std::move(pts)};
    const fl::DeviationReport report = fl::sp_deviation_search(spec, profile, grid);
    if (report.gain > best.gain) {
      best = report;
      best_profile = profile;
    }
  }
  std::string out = "{\"instances\":" + std::to_string(count);
  out += ",\"max_gain\":" + fl::format_double(best.gain);
  out += ",\"report\":" + fl::deviation_report_to_json(best);
  out += ",\"profile\":" + fl::profile_to_json(best_profile);
  out += "}";
  emit(out, out_path);
}

void run_reduce(const std::string& profile_path, const std::string& out_path) {
  const fl::Profile profile = fl::load_profile(profile_path);
  emit(fl::reduction_trace_to_json(fl::reduce_to_icp(profile)), out_path);
}

void run_bounds(const std::string& p_text) {
  const fl::NormOrder order = fl::parse_norm_order(p_text);
  std::cout << fl::pnorm_bounds_to_json(order, fl::pnorm_bounds(order)) << "\n";
}

void run_dominance(const std::string& mech_arg, int m) {
  if (m < 1) throw CLI::ValidationError("--m must be >= 1");
  const fl::MechanismSpec spec = mechanism_from_arg(mech_arg);
  const fl::DominanceResult result = fl::dominance_experiment(spec, m);
  std::cout << fl::dominance_result_to_json(result) << "\n";
  if (result.max_ar < result.theorem_value - 1e-6) {
    throw NumericCheckFailure("adversarial search stayed below the closed-form value");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facility location mechanisms on the plane: ratios, scans, reductions"};
  app.require_subcommand(1);

  int t1_n = 3;
  CLI::App* theorem1 = app.add_subcommand("theorem1", "closed-form worst-case ratio");
  theorem1->add_option("--n", t1_n, "number of agents (odd)")->required();

  int scan_n = 3;
  std::string scan_p = "1";
  long scan_samples = 0;
  std::uint64_t scan_seed = 0;
  std::string scan_mech = "cm";
  std::string scan_corpus;
  std::string scan_csv;
  int scan_threads = 1;
  CLI::App* scan = app.add_subcommand("scan", "random worst-case search");
  scan->add_option("--n", scan_n, "number of agents")->required();
  scan->add_option("--p", scan_p, "norm order (decimal or inf)");
  scan->add_option("--samples", scan_samples, "number of random profiles")->required();
  scan->add_option("--seed", scan_seed, "seed");
  scan->add_option("--mech", scan_mech, "mechanism: cm, gm, or a spec file");
  scan->add_option("--corpus", scan_corpus, "extra candidates: builtin");
  scan->add_option("--csv", scan_csv, "write per-sample ratios to this file");
  scan->add_option("--threads", scan_threads, "worker threads");

  int fam_m = 1;
  double fam_tmin = 0.0, fam_tmax = 0.0, fam_step = 0.0;
  std::string fam_out;
  CLI::App* family = app.add_subcommand("family", "worst-case family sweep (CSV)");
  family->add_option("--m", fam_m, "family size parameter")->required();
  family->add_option("--t-min", fam_tmin, "grid start")->required();
  family->add_option("--t-max", fam_tmax, "grid end")->required();
  family->add_option("--step", fam_step, "grid step")->required();
  family->add_option("--out", fam_out, "output path (default stdout)");

  std::string sp_mech = "cm";
  std::string sp_profile;
  std::vector<long> sp_random;
  int sp_refinements = 0;
  std::string sp_out;
  CLI::App* sp = app.add_subcommand("sp", "manipulation search over a deviation grid");
  sp->add_option("--mech", sp_mech, "mechanism: cm, gm, or a spec file");
  sp->add_option("--profile", sp_profile, "profile file");
  sp->add_option("--random", sp_random, "random corpus: n count seed")->expected(3);
  sp->add_option("--refinements", sp_refinements, "grid refinement passes");
  sp->add_option("--out", sp_out, "output path (default stdout)");

  std::string red_profile;
  std::string red_out;
  CLI::App* reduce = app.add_subcommand("reduce", "run the family reduction pipeline");
  reduce->add_option("--profile", red_profile, "profile file")->required();
  reduce->add_option("--out", red_out, "output path (default stdout)");

  std::string bounds_p = "2";
  CLI::App* bounds = app.add_subcommand("bounds", "ratio bounds for a norm order");
  bounds->add_option("--p", bounds_p, "norm order (>= 2, or inf)")->required();

  std::string dom_mech;
  int dom_m = 1;
  CLI::App* dominance = app.add_subcommand("dominance", "adversarial scheme evaluation");
  dominance->add_option("--mech", dom_mech, "scheme: cm or a spec file")->required();
  dominance->add_option("--m", dom_m, "family size parameter")->required();

  try {
    app.parse(argc, argv);
    if (*theorem1) run_theorem1(t1_n);
    if (*scan) {
      if (scan_samples < 1) throw CLI::ValidationError("--samples must be >= 1");
      if (!scan_corpus.empty() && scan_corpus != "builtin") {
        throw CLI::ValidationError("--corpus only supports: builtin");
      }
      run_scan(scan_n, scan_p, scan_samples, scan_seed, scan_mech,
               scan_corpus == "builtin", scan_csv, scan_threads);
    }
    if (*family) {
      if (fam_tmin > fam_tmax) throw CLI::ValidationError("--t-min must not exceed --t-max");
      if (!(fam_step > 0.0)) throw CLI::ValidationError("--step must be positive");
      run_family(fam_m, fam_tmin, fam_tmax, fam_step, fam_out);
    }
    if (*sp) run_sp(sp_mech, sp_profile, sp_random, sp_refinements, sp_out);
    if (*reduce) run_reduce(red_profile, red_out);
    if (*bounds) run_bounds(bounds_p);
    if (*dominance) run_dominance(dom_mech, dom_m);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const NumericCheckFailure& e) {
    std::cerr << "numeric check failed: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
