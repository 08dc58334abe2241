#include "istiefel/experiment.hpp"

#include "istiefel/mtx_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace istiefel {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

Index parse_size(std::string_view key, std::string_view value) {
  const auto v = parse_number<long long>(key, value);
  if (v < 0) throw ConfigError("'" + std::string(key) + "' must be non-negative");
  return static_cast<Index>(v);
}

// Rethrows parse failures of enum-valued keys as ConfigError.
template <class F>
void check_name(F&& parse) {
  try {
    parse();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void fail(const std::string& msg) { throw ConfigError(msg); }

std::string num(Index v) { return std::to_string(v); }

}  // namespace

void ExperimentConfig::set(std::string_view raw_key, std::string_view raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '_', '-');
  const std::string value = trim(raw_value);
  if (key == "problem") {
    problem = value;
  } else if (key == "n") {
    n = parse_size(key, value);
  } else if (key == "p") {
    p = parse_size(key, value);
  } else if (key == "m") {
    m = parse_size(key, value);
  } else if (key == "k") {
    k = parse_size(key, value);
  } else if (key == "kp") {
    kp = parse_size(key, value);
  } else if (key == "km") {
    km = parse_size(key, value);
  } else if (key == "l") {
    l = parse_size(key, value);
  } else if (key == "matrix") {
    matrix = value;
  } else if (key == "matrix-param") {
    if (value.empty()) {
      matrix_param.reset();
    } else {
      matrix_param = parse_number<double>(key, value);
    }
  } else if (key == "metric") {
    metric = value;
  } else if (key == "retraction") {
    retraction = value;
  } else if (key == "rstop") {
    rstop = parse_number<double>(key, value);
  } else if (key == "max-iter") {
    max_iter = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out-dir") {
    out_dir = value;
  } else if (key == "mtx-K" || key == "mtx-k") {
    mtx_k = value;
  } else if (key == "mtx-M" || key == "mtx-m") {
    mtx_m = value;
  } else if (key == "a-layout") {
    a_layout = value;
  } else if (key == "init") {
    init = value;
  } else if (key == "bb-inner") {
    bb_inner = value;
  } else if (key == "verify-a") {
    verify_a = value;
  } else if (key == "seeds") {
    seeds = parse_number<int>(key, value);
  } else {
    fail("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::read(std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("config line " + std::to_string(lineno) + ": expected key = value");
    set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
}

void ExperimentConfig::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  read(in);
}

void ExperimentConfig::write(std::ostream& out) const {
  out << std::setprecision(17);
  out << "problem = " << problem << '\n'
      << "n = " << n << '\n'
      << "p = " << p << '\n'
      << "m = " << m << '\n'
      << "k = " << k << '\n'
      << "kp = " << kp << '\n'
      << "km = " << km << '\n'
      << "l = " << l << '\n'
      << "matrix = " << matrix << '\n';
  if (matrix_param) out << "matrix-param = " << *matrix_param << '\n';
  out << "metric = " << metric << '\n';
  if (!retraction.empty()) out << "retraction = " << retraction << '\n';
  out << "rstop = " << rstop << '\n'
      << "max-iter = " << max_iter << '\n'
      << "seed = " << seed << '\n'
      << "out-dir = " << out_dir << '\n';
  if (!mtx_k.empty()) out << "mtx-K = " << mtx_k << '\n';
  if (!mtx_m.empty()) out << "mtx-M = " << mtx_m << '\n';
  out << "a-layout = " << a_layout << '\n';
  if (!init.empty()) out << "init = " << init << '\n';
  out << "bb-inner = " << bb_inner << '\n'
      << "verify-a = " << verify_a << '\n'
      << "seeds = " << seeds << '\n';
}

void ExperimentConfig::resolve() {
  check_name([&] { parse_metric_choice(metric); });
  check_name([&] { parse_a_layout(a_layout); });
  if (!retraction.empty()) check_name([&] { parse_cayley_form(retraction); });
  if (!init.empty()) check_name([&] { parse_init_choice(init); });
  if (bb_inner != "euclidean" && bb_inner != "metric") fail("unknown bb-inner '" + bb_inner + "' (euclidean, metric)");
  if (verify_a != "indefinite" && verify_a != "spd" && verify_a != "singular") {
    fail("unknown verify-a '" + verify_a + "' (indefinite, spd, singular)");
  }
  if (!(rstop >= 0.0)) fail("rstop must be non-negative");
  if (max_iter < 0) fail("max-iter must be non-negative");
  if (seeds < 1) fail("seeds must be at least 1");

  const bool uses_named_matrix = !(problem == "procrustes" || (problem == "lrevp" && !mtx_k.empty()));
  if (uses_named_matrix) {
    check_name([&] {
      const TestMatrix kind = parse_test_matrix(matrix);
      if (kind == TestMatrix::moler && !matrix_param && matrix == "mohler") matrix_param = 0.5;
      if (test_matrix_takes_param(kind) && !matrix_param) {
        throw std::invalid_argument("matrix '" + matrix + "' needs matrix-param");
      }
      if (!test_matrix_takes_param(kind) && matrix_param) {
        throw std::invalid_argument("matrix '" + matrix + "' takes no matrix-param");
      }
      if (kind == TestMatrix::kms && !(std::abs(*matrix_param) < 1.0)) {
        throw std::invalid_argument("kms needs |matrix-param| < 1");
      }
    });
  }

  auto resolve_split = [&] {
    if (p == 0 && m == 0) fail(problem + " needs p and m (A has p positive and m negative eigenvalues)");
    if (n == 0) n = p + m;
    if (p + m != n) fail("p + m = n violated: p + m = " + num(p + m) + " but n = " + num(n));
  };

  if (problem == "tracemin") {
    resolve_split();
    if (k == 0) k = kp + km;
    if (kp + km != k) fail("kp + km = k violated: kp + km = " + num(kp + km) + " but k = " + num(k));
    if (k < 1) fail("k must be at least 1 (set kp and km)");
    if (kp > p) {
      fail("kp <= p violated: kp = " + num(kp) + " but A has only p = " + num(p) +
           " positive eigenvalues, so no X satisfies X^T A X = J");
    }
    if (km > m) {
      fail("km <= m violated: km = " + num(km) + " but A has only m = " + num(m) +
           " negative eigenvalues, so no X satisfies X^T A X = J");
    }
  } else if (problem == "matexeq") {
    resolve_split();
    if (k == 0) k = kp;
    if (km != 0) fail("matexeq uses J = I_k; km must be 0");
    kp = k;
    if (k < 1) fail("k must be at least 1");
    if (k > p) {
      fail("k <= p violated: J = I_k needs k = " + num(k) + " positive directions but A has p = " + num(p));
    }
  } else if (problem == "procrustes") {
    resolve_split();
    if (l == 0) l = n;
    if (l < n) fail("l >= n violated: l = " + num(l) + ", n = " + num(n));
    k = n;
    kp = p;
    km = m;
  } else if (problem == "lrevp") {
    if (mtx_k.empty() != mtx_m.empty()) fail("lrevp needs both mtx-K and mtx-M, or neither");
    if (mtx_k.empty()) {
      if (p == 0) fail("lrevp needs p (size of K and M) or mtx-K/mtx-M");
      if (n != 0 && n != 2 * p) fail("lrevp has n = 2p; got n = " + num(n) + ", p = " + num(p));
      n = 2 * p;
    }
    if (k == 0) k = kp;
    if (k < 1) fail("k must be at least 1");
    if (p != 0 && k > p) fail("k <= p violated: k = " + num(k) + ", p = " + num(p));
    kp = k;
    km = 0;
  } else {
    fail("unknown problem '" + problem + "' (tracemin, lrevp, procrustes, matexeq)");
  }
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s;
  s.rstop = rstop;
  s.max_iter = max_iter;
  if (!retraction.empty()) s.cayley_form = parse_cayley_form(retraction);
  s.bb_inner = bb_inner == "metric" ? BBInner::metric : BBInner::euclidean;
  return s;
}

Instance build_instance(const ExperimentConfig& c) {
  std::mt19937_64 rng(c.seed);
  const MetricChoice metric = parse_metric_choice(c.metric);
  if (c.problem == "tracemin") {
    TraceMinSetup s;
    s.matrix = parse_test_matrix(c.matrix);
    s.matrix_param = c.matrix_param;
    s.p = c.p;
    s.m = c.m;
    s.k_p = c.kp;
    s.k_m = c.km;
    s.layout = parse_a_layout(c.a_layout);
    s.metric = metric;
    s.init = c.init.empty() ? InitChoice::smallest : parse_init_choice(c.init);
    return trace_min_instance(s, rng);
  }
  if (c.problem == "matexeq") {
    MatrixEquationSetup s;
    s.matrix = parse_test_matrix(c.matrix);
    s.matrix_param = c.matrix_param;
    s.p = c.p;
    s.m = c.m;
    s.k = c.k;
    s.metric = metric;
    s.init = c.init.empty() ? InitChoice::largest : parse_init_choice(c.init);
    return matrix_equation_instance(s, rng);
  }
  if (c.problem == "procrustes") return procrustes_instance(c.l, c.p, c.m, metric, rng);
  if (c.problem == "lrevp") {
    SymMatrix k_mat, m_mat;
    if (!c.mtx_k.empty()) {
      k_mat = SymMatrix(read_matrix_market(c.mtx_k), 1e-8);
      m_mat = SymMatrix(read_matrix_market(c.mtx_m), 1e-8);
    } else {
      k_mat = test_matrix(parse_test_matrix(c.matrix), c.p, c.matrix_param);
      m_mat = test_matrix(TestMatrix::tridiag, c.p);
    }
    if (c.k > k_mat.order()) throw ConfigError("k exceeds the size of K");
    Problem prob = lrevp_problem(k_mat, m_mat, c.k);
    Matrix x0 = lrevp_initial_guess(k_mat.order(), c.k, rng);
    return Instance{std::move(prob), std::move(x0), {}, lrevp_h(k_mat, m_mat)};
  }
  throw ConfigError("unknown problem '" + c.problem + "'");
}

int exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return 0;
    case RunStatus::max_iter: return 2;
    case RunStatus::stalled: return 3;
  }
  return 1;
}

RunOutcome run_experiment(const ExperimentConfig& config, bool write_files) {
  ExperimentConfig cfg = config;
  cfg.resolve();
  const Instance inst = build_instance(cfg);
  RunOutcome out;
  out.record = solve(inst.problem, inst.x0, cfg.solver_config());
  const RunRecord& r = out.record;
  out.exit_code = exit_code(r.status);

  nlohmann::json& s = out.summary;
  s["problem"] = cfg.problem;
  s["status"] = std::string(to_string(r.status));
  s["obj"] = r.f_final;
  s["gradnorm"] = r.gradnorm_final;
  s["gradnorm_rel"] = r.gradnorm_initial > 0 ? r.gradnorm_final / r.gradnorm_initial : 0.0;
  s["feas"] = r.feas_final;
  s["iter"] = r.iterations;
  s["feval"] = r.fevals;
  s["cpu_s"] = r.cpu_s;
  s["retraction"] = std::string(to_string(r.form));
  s["n"] = inst.problem.spec.n();
  s["k"] = inst.problem.spec.k();
  s["seed"] = cfg.seed;

  if (inst.trace_matrix) {
    const PencilEigResult e = extract_eigenpairs(*inst.trace_matrix, inst.problem.spec, r.x_final, cfg.kp, cfg.km);
    s["eig_rel_err"] = e.rel_err;
    s["lambda_plus"] = std::vector<double>(e.lambda_plus.data(), e.lambda_plus.data() + e.lambda_plus.size());
    s["lambda_minus"] = std::vector<double>(e.lambda_minus.data(), e.lambda_minus.data() + e.lambda_minus.size());
    // dense generalized eigensolve; affordable at modest n only
    if (inst.problem.spec.n() <= 500) {
      const PencilOracleResult o = pencil_oracle(*inst.trace_matrix, inst.problem.spec.a_sym(), cfg.kp, cfg.km);
      s["oracle_obj"] = o.optimal_value;
    }
  }
  if (inst.reference) s["diff"] = (r.x_final - *inst.reference).norm();

  if (write_files) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "summary.json") << s.dump(2) << '\n';
    std::ofstream history(dir / "history.csv");
    r.write_csv(history);
    std::ofstream echo(dir / "config.txt");
    cfg.write(echo);
    write_matrix_market(dir / "x_final.mtx", r.x_final);
  }
  return out;
}

BatchOutcome run_batch(const ExperimentConfig& config, bool write_files) {
  ExperimentConfig base = config;
  base.resolve();
  BatchOutcome out;
  const std::vector<std::string> fields = {"obj", "gradnorm", "feas", "diff", "eig_rel_err", "iter", "feval", "cpu_s"};
  std::vector<std::string> present;

  for (int i = 0; i < base.seeds; ++i) {
    ExperimentConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(i);
    c.out_dir = (std::filesystem::path(base.out_dir) / ("seed_" + std::to_string(c.seed))).string();
    out.runs.push_back(run_experiment(c, write_files));
    out.exit_code = std::max(out.exit_code, out.runs.back().exit_code);
  }
  for (const auto& f : fields) {
    if (!out.runs.front().summary.contains(f)) continue;
    present.push_back(f);
    double sum = 0.0;
    for (const auto& run : out.runs) sum += run.summary[f].get<double>();
    out.mean[f] = sum / static_cast<double>(out.runs.size());
  }
  int converged = 0;
  for (const auto& run : out.runs) converged += run.exit_code == 0;
  out.mean["converged"] = converged;
  out.mean["runs"] = out.runs.size();

  if (write_files) {
    std::filesystem::create_directories(base.out_dir);
    std::ofstream csv(std::filesystem::path(base.out_dir) / "batch.csv");
    csv << std::setprecision(17) << "seed,status";
    for (const auto& f : present) csv << ',' << f;
    csv << '\n';
    for (const auto& run : out.runs) {
      csv << run.summary["seed"].get<std::uint64_t>() << ',' << run.summary["status"].get<std::string>();
      for (const auto& f : present) csv << ',' << run.summary[f].get<double>();
      csv << '\n';
    }
    csv << "mean," << converged << '/' << out.runs.size();
    for (const auto& f : present) csv << ',' << out.mean[f].get<double>();
    csv << '\n';
    std::ofstream(std::filesystem::path(base.out_dir) / "batch_summary.json") << out.mean.dump(2) << '\n';
  }
  return out;
}

bool VerifyReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const VerifyItem& i) { return i.passed; });
}

}  // namespace istiefel
