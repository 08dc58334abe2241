// Experiment runner: istiefel_cli {run,verify,batch} [--config FILE] [--key value ...]
#include "istiefel/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

// Flags that mirror ExperimentConfig keys one-to-one.
const char* const kKeys[] = {"problem", "n",         "p",       "m",        "k",         "kp",
                             "km",      "l",         "matrix",  "matrix-param", "metric", "retraction",
                             "rstop",   "max-iter",  "seed",    "out-dir",  "mtx-K",     "mtx-M",
                             "a-layout", "init",     "bb-inner", "verify-a", "seeds"};

struct Flags {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_flags(CLI::App* app, Flags& flags) {
  app->add_option("--config", flags.config_file, "key = value config file; flags override it");
  for (const char* key : kKeys) app->add_option(std::string("--") + key, flags.values[key]);
}

istiefel::ExperimentConfig load(CLI::App* app, const Flags& flags) {
  istiefel::ExperimentConfig cfg;
  if (!flags.config_file.empty()) cfg.read(flags.config_file);
  for (const char* key : kKeys) {
    if (app->count(std::string("--") + key) > 0) cfg.set(key, flags.values.at(key));
  }
  return cfg;
}

void print_summary(const nlohmann::json& s) {
  std::cout << s["status"].get<std::string>() << "  obj " << s["obj"].get<double>() << "  gradnorm "
            << s["gradnorm"].get<double>() << "  feas " << s["feas"].get<double>() << "  iter "
            << s["iter"].get<int>() << "  feval " << s["feval"].get<int>() << "  cpu_s " << s["cpu_s"].get<double>();
  if (s.contains("eig_rel_err")) std::cout << "  eig_rel_err " << s["eig_rel_err"].get<double>();
  if (s.contains("oracle_obj")) std::cout << "  oracle_obj " << s["oracle_obj"].get<double>();
  if (s.contains("diff")) std::cout << "  diff " << s["diff"].get<double>();
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian gradient descent on the indefinite Stiefel manifold"};
  app.require_subcommand(1);
  Flags run_flags, verify_flags, batch_flags;
  CLI::App* run = app.add_subcommand("run", "solve one instance and write summary.json, history.csv");
  CLI::App* verify = app.add_subcommand("verify", "property suite on a small instance");
  CLI::App* batch = app.add_subcommand("batch", "repeat run over consecutive seeds and average");
  add_flags(run, run_flags);
  add_flags(verify, verify_flags);
  add_flags(batch, batch_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      const istiefel::RunOutcome out = istiefel::run_experiment(load(run, run_flags));
      print_summary(out.summary);
      return out.exit_code;
    }
    if (batch->parsed()) {
      const istiefel::BatchOutcome out = istiefel::run_batch(load(batch, batch_flags));
      for (const auto& r : out.runs) {
        std::cout << "seed " << r.summary["seed"].get<std::uint64_t>() << "  ";
        print_summary(r.summary);
      }
      std::cout << "mean " << out.mean.dump() << '\n';
      return out.exit_code;
    }
    const istiefel::VerifyReport report = istiefel::run_verify(load(verify, verify_flags), std::cout);
    std::cout << (report.all_passed() ? "all checks passed" : "some checks failed") << '\n';
    return report.all_passed() ? 0 : 4;
  } catch (const istiefel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
