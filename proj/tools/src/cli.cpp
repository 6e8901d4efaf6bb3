#include "striplab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "striplab/conditions.hpp"
#include "striplab/constructions.hpp"
#include "striplab/errors.hpp"
#include "striplab/frame.hpp"
#include "striplab/frame_file.hpp"
#include "striplab/recovery.hpp"
#include "striplab/report.hpp"
#include "striplab/verify.hpp"

namespace striplab::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { kJson, kCsv };

void emit(const Record& record, Format format, std::ostream& out) {
  out << (format == Format::kJson ? to_json(record) : to_csv(record));
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic:
    case ErrorCode::kTruncatedPayload:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kIoError:
      return kExitIo;
    case ErrorCode::kNonConvergence:
    case ErrorCode::kMaxItersExceeded:
      return kExitNumeric;
    default:
      return kExitUsage;
  }
}

void add_format_flags(CLI::App* sub, bool* json, bool* csv) {
  auto* j = sub->add_flag("--json", *json, "Structured output (default)");
  auto* c = sub->add_flag("--csv", *csv, "CSV output: header line plus one value line");
  j->excludes(c);
}

// ---- build ----

struct BuildArgs {
  std::string family;
  std::optional<std::int64_t> m, n, s, r, t, p, d;
  std::vector<std::int64_t> coeffs;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::string input;
  std::string output;
  bool no_timestamp = false;
};

SensingMatrix import_etf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  CsvMatrix csv;
  std::optional<SensingMatrix> phi;
  try {
    csv = read_csv(in);
    FrameInfo info;
    info.family = "etf-import";
    phi.emplace(std::move(csv.entries), csv.kind, info, NormCheck::kWarn);
  } catch (const Error& e) {
    if (exit_code_for(e.code()) == kExitIo) throw;
    throw Error(ErrorCode::kDimensionMismatch, std::string("malformed frame CSV: ") + e.what());
  }
  const EtfReport etf = validate_etf(*phi);
  if (!etf.is_etf) {
    throw Error(ErrorCode::kDimensionMismatch,
                "imported frame is not an equiangular tight frame (norm deviation " +
                    format_number(etf.max_norm_deviation) + ", coherence deviation " +
                    format_number(etf.max_coherence_deviation) + ")");
  }
  return *std::move(phi);
}

int do_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<SensingMatrix> phi;
  if (a.family == "etf-import") {
    if (a.input.empty()) throw UsageError("etf-import needs --input CSV");
    phi.emplace(import_etf(a.input));
  } else {
    FamilySpec request;
    request.family = a.family;
    const std::pair<const char*, const std::optional<std::int64_t>*> keys[] = {
        {"m", &a.m}, {"n", &a.n}, {"s", &a.s}, {"r", &a.r},
        {"t", &a.t}, {"p", &a.p}, {"d", &a.d}};
    for (const auto& [key, value] : keys) {
      if (*value) request.params[key] = **value;
    }
    request.coeffs = a.coeffs;
    request.seed = a.seed;
    if (a.budget) request.column_budget = *a.budget;
    phi.emplace(build_family(request));
  }
  SaveOptions opts;
  opts.timestamp = !a.no_timestamp;
  save_frame(*phi, a.output, opts);
  for (const auto& w : phi->info().warnings) err << "warning: " << w << '\n';
  out << "wrote " << a.output << ": " << phi->info().family << ' ' << phi->rows() << 'x'
      << phi->cols() << ' ' << to_string(phi->kind()) << '\n';
  return kExitOk;
}

// ---- params ----

int do_params(const std::string& file, Format format, std::ostream& out) {
  const SensingMatrix phi = load_frame(file);
  emit(frame_report(phi, coherence_profile(phi)), format, out);
  return kExitOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string statistic;
  std::string file;
  std::int64_t k = 0;
  double threshold = 0.0;
  bool exhaustive = false;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  double ci = 0.99;
  std::uint64_t budget = kDefaultSubsetBudget;
};

Record tail_record(const TailQuery& q, const TailEstimate& e) {
  Record r;
  r.add("statistic", to_string(q.statistic));
  r.add("k", q.k);
  r.add("threshold", q.threshold);
  if (const auto* mc = std::get_if<MonteCarlo>(&q.method)) {
    r.add("method", "monte-carlo");
    r.add("trials", mc->trials);
    r.add("seed", mc->seed);
  } else {
    r.add("method", "exhaustive");
    r.add("trials", std::monostate{});
    r.add("seed", std::monostate{});
  }
  r.add("exceedances", e.exceedances);
  r.add("samples", e.samples);
  r.add("point-estimate", e.point_estimate);
  r.add("ci-low", e.ci_low);
  r.add("ci-high", e.ci_high);
  r.add("ci-level", e.ci_level);
  r.add("exact", e.exact);
  r.add("hoeffding-half-width", e.hoeffding_half_width);
  return r;
}

int do_verify(const VerifyArgs& a, Format format, std::ostream& out) {
  if (a.exhaustive == a.trials.has_value()) {
    throw UsageError("choose exactly one of --exhaustive or --trials N --seed S");
  }
  if (a.trials && !a.seed) throw UsageError("Monte Carlo verification needs an explicit --seed");
  const SensingMatrix phi = load_frame(a.file);
  TailQuery q;
  q.statistic = parse_statistic(a.statistic);
  q.k = a.k;
  q.threshold = a.threshold;
  q.ci_level = a.ci;
  q.subset_budget = a.budget;
  if (a.exhaustive) {
    q.method = Exhaustive{};
  } else {
    q.method = MonteCarlo{*a.trials, *a.seed};
  }
  const TailEstimate e = estimate_tail(phi, q);
  Record r;
  r.add("family", phi.info().family);
  r.add("m", phi.rows());
  r.add("N", phi.cols());
  r.append(tail_record(q, e));
  emit(r, format, out);
  return kExitOk;
}

// ---- check ----

struct CheckArgs {
  std::string kind;
  std::string frame;
  std::optional<double> mu, mu2, normsq, m, n, k, delta, eps, beta, a, alpha;
  std::array<double, 6> c{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

double need(const std::optional<double>& v, const char* flag, const std::string& kind) {
  if (!v) throw UsageError("check " + kind + " needs " + flag);
  return *v;
}

Record constraint_fields(const Constraint& c, const std::string& prefix) {
  Record r;
  r.add(prefix + ".lhs", c.lhs);
  r.add(prefix + ".rhs", c.rhs);
  r.add(prefix + ".holds", c.holds());
  return r;
}

int do_check(CheckArgs a, Format format, std::ostream& out) {
  if (!a.frame.empty()) {
    const SensingMatrix phi = load_frame(a.frame);
    const CoherenceProfile p = coherence_profile(phi);
    a.mu = a.mu.value_or(p.mu);
    a.mu2 = a.mu2.value_or(p.mu_bar_sq);
    a.normsq = a.normsq.value_or(p.spectral_norm * p.spectral_norm);
    a.m = a.m.value_or(static_cast<double>(phi.rows()));
    a.n = a.n.value_or(static_cast<double>(phi.cols()));
  }
  const std::string& kind = a.kind;
  Record r;
  r.add("check", kind);

  if (kind == "sinclevel") {
    const double n = need(a.n, "--n", kind);
    const double delta = need(a.delta, "--delta", kind);
    const double eps = need(a.eps, "--eps", kind);
    r.add("N", n);
    r.add("delta", delta);
    r.add("eps", eps);
    r.add("sinc-level", required_sinc_level(delta, n, eps));
    emit(r, format, out);
    return kExitOk;
  }

  if (kind == "cor1") {
    const double mu = need(a.mu, "--mu", kind);
    const double mu2 = need(a.mu2, "--mu2", kind);
    const double k = need(a.k, "--k", kind);
    const double alpha = need(a.alpha, "--alpha", kind);
    const double beta = need(a.beta, "--beta", kind);
    const Corollary1Result c = a.a ? check_corollary1(mu, mu2, k, alpha, beta, *a.a)
                                   : scan_corollary1(mu, mu2, k, alpha, beta);
    r.add("mu", mu).add("mu-bar-sq", mu2).add("k", k).add("alpha", alpha).add("beta", beta);
    r.add("a", c.a);
    r.add("holds", c.holds);
    r.add("bound", c.bound);
    for (const auto& cs : c.constraints) r.append(constraint_fields(cs, cs.label));
    emit(r, format, out);
    return kExitOk;
  }

  ConditionInputs in;
  in.mu = need(a.mu, "--mu or --frame", kind);
  in.mu_bar_sq = need(a.mu2, "--mu2 or --frame", kind);
  in.spectral_norm_sq = need(a.normsq, "--normsq or --frame", kind);
  in.n = need(a.n, "--n or --frame", kind);
  in.k = need(a.k, "--k", kind);
  in.m = a.m.value_or(0.0);
  in.delta = a.delta.value_or(0.0);
  in.eps = a.eps.value_or(0.0);
  r.add("mu", in.mu).add("mu-bar-sq", in.mu_bar_sq).add("spectral-norm-sq", in.spectral_norm_sq);
  r.add("m", in.m).add("N", in.n).add("k", in.k);

  if (kind == "thm1") {
    in.delta = need(a.delta, "--delta", kind);
    in.eps = need(a.eps, "--eps", kind);
    r.add("delta", in.delta).add("eps", in.eps);
    r.add("eps-limit", theorem1_eps_limit(in.k));
    const TheoremWitness w = check_theorem1(in);
    r.add("feasible", w.feasible);
    r.add("a", w.a ? FieldValue(*w.a) : FieldValue{});
    r.add("b", w.b ? FieldValue(*w.b) : FieldValue{});
    r.add("c", w.c ? FieldValue(*w.c) : FieldValue{});
    r.add("slack", w.slack);
    r.add("binding-constraint", w.binding_constraint);
    r.add("never-satisfied", w.never_satisfied);
  } else if (kind == "thm2") {
    in.eps = need(a.eps, "--eps", kind);
    double beta = 0.0;
    if (a.beta) {
      beta = *a.beta;
    } else if (a.alpha) {
      beta = theorem2_beta_for_alpha(*a.alpha, in.n, in.eps);
    } else {
      throw UsageError("check thm2 needs --beta or --alpha");
    }
    const Theorem2Result t = a.a ? check_theorem2(in, beta, *a.a) : scan_theorem2(in, beta);
    r.add("eps", in.eps).add("beta", beta);
    r.add("a", t.a);
    r.add("holds", t.holds);
    r.add("alpha", t.alpha);
    for (const auto& cs : t.constraints) r.append(constraint_fields(cs, cs.label));
  } else if (kind == "regime") {
    RegimeConstants constants;
    constants.c = a.c;
    const RegimeReport rep = regime_report(in, constants);
    for (std::size_t i = 0; i < a.c.size(); ++i) r.add("C" + std::to_string(i + 1), a.c[i]);
    r.add("near-optimal", rep.near_optimal);
    r.add("coherence", rep.coherence);
    r.add("extended", rep.extended);
    r.add("heuristic", rep.heuristic);
    for (const auto& cl : rep.clauses) {
      r.add("clauses." + cl.label + ".lhs", cl.lhs);
      r.add("clauses." + cl.label + ".rhs", cl.rhs);
      r.add("clauses." + cl.label + ".holds", cl.holds);
    }
  } else {
    throw UsageError("unknown check '" + kind + "'");
  }
  emit(r, format, out);
  return kExitOk;
}

// ---- recover ----

struct RecoverArgs {
  std::string file;
  std::int64_t k = 0;
  std::uint64_t trials = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string mag = "unit";
  std::optional<double> tol;
  std::optional<double> tail;
};

int do_recover(const RecoverArgs& a, Format format, std::ostream& out) {
  const SensingMatrix phi = load_frame(a.file);
  RecoveryOptions opts;
  opts.k = a.k;
  opts.trials = a.trials;
  opts.eps = a.eps;
  opts.seed = a.seed;
  opts.magnitudes = parse_magnitude_rule(a.mag);
  opts.tail_level = a.tail;
  if (a.tol) opts.solver.feasibility_tol = *a.tol;
  const RecoverySummary s = recovery_experiment(phi, opts);

  Record r;
  r.add("family", phi.info().family);
  r.add("m", phi.rows());
  r.add("N", phi.cols());
  r.add("k", a.k);
  r.add("trials", a.trials);
  r.add("eps", a.eps);
  r.add("delta", a.delta);
  r.add("magnitudes", to_string(opts.magnitudes));
  r.add("seed", a.seed);
  r.add("failures", s.failures);
  r.add("failure-rate", s.failure_rate);
  r.add("failure-ci-low", s.failure_ci.low);
  r.add("failure-ci-high", s.failure_ci.high);
  r.add("exact-recoveries", s.exact_recoveries);
  r.add("exact-recovery-rate", s.exact_rate);
  r.add("exact-ci-low", s.exact_ci.low);
  r.add("exact-ci-high", s.exact_ci.high);
  r.add("reference-line", s.reference_line);
  r.add("nonconverged", s.nonconverged);
  r.add("feasibility-violations", s.feasibility_violations);
  r.add("objective-violations", s.objective_violations);
  r.add("max-residual", s.max_residual);
  emit(r, format, out);
  return s.nonconverged > 0 ? kExitNumeric : kExitOk;
}

// ---- export ----

int do_export(const std::string& file, const std::string& csv_path, std::ostream& out) {
  const SensingMatrix phi = load_frame(file);
  if (csv_path == "-") {
    write_csv(phi, out);
    return kExitOk;
  }
  std::ofstream f(csv_path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open '" + csv_path + "' for writing");
  write_csv(phi, f);
  if (!f) throw Error(ErrorCode::kIoError, "write to '" + csv_path + "' failed");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensing-matrix construction, StRIP/SINC verification and recovery experiments",
               "striplab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "striplab 0.3.0");

  bool json = false;
  bool csv = false;

  BuildArgs b;
  auto* build = app.add_subcommand("build", "Construct a frame and write it to a frame file");
  build->add_option("family", b.family, "Family name")
      ->required()
      ->check(CLI::IsMember({"gaussian", "random-harmonic", "chirp", "simplex-etf",
                             "reed-muller", "delsarte-goethals", "sub-fourier", "etf-import"}));
  build->add_option("--m", b.m, "Rows (chirp/simplex/gaussian/harmonic/sub-fourier)");
  build->add_option("--n", b.n, "Columns (gaussian, random-harmonic)");
  build->add_option("--s", b.s, "Field degree parameter (reed-muller, delsarte-goethals)");
  build->add_option("--r", b.r, "Delsarte-Goethals rank");
  build->add_option("--t", b.t, "Reed-Muller subcode parameter");
  build->add_option("--p", b.p, "Prime modulus (sub-fourier)");
  build->add_option("--d", b.d, "Polynomial degree (sub-fourier)");
  build->add_option("--coeffs", b.coeffs, "Polynomial coefficients, leading first")
      ->delimiter(',');
  build->add_option("--seed", b.seed, "Seed for randomized families");
  build->add_option("--budget", b.budget, "Column budget for code-based families");
  build->add_option("--input", b.input, "CSV input for etf-import (row,col,re,im)");
  build->add_option("-o,--output", b.output, "Frame file to write")->required();
  build->add_flag("--no-timestamp", b.no_timestamp, "Omit the creation timestamp");

  std::string params_file;
  auto* params = app.add_subcommand("params", "Coherence profile of a frame file");
  params->add_option("file", params_file)->required();
  add_format_flags(params, &json, &csv);

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify", "Estimate a tail probability");
  verify->add_option("statistic", v.statistic)
      ->required()
      ->check(CLI::IsMember({"strip", "sinc", "colsum"}));
  verify->add_option("file", v.file)->required();
  verify->add_option("--k", v.k, "Support size")->required();
  verify->add_option("--threshold", v.threshold, "delta for strip, alpha otherwise")
      ->required();
  verify->add_flag("--exhaustive", v.exhaustive, "Enumerate every support");
  verify->add_option("--trials", v.trials, "Monte Carlo trials");
  verify->add_option("--seed", v.seed, "Monte Carlo seed");
  verify->add_option("--ci", v.ci, "Confidence level")->capture_default_str();
  verify->add_option("--budget", v.budget, "Exhaustive evaluation budget")
      ->capture_default_str();
  add_format_flags(verify, &json, &csv);

  CheckArgs c;
  auto* check = app.add_subcommand("check", "Evaluate a sufficient condition");
  check->add_option("kind", c.kind)
      ->required()
      ->check(CLI::IsMember({"thm1", "thm2", "cor1", "regime", "sinclevel"}));
  check->add_option("--frame", c.frame, "Take mu, mu-bar-sq, norm, m and N from a frame file");
  check->add_option("--mu", c.mu);
  check->add_option("--mu2", c.mu2, "Average coherence mu-bar-sq");
  check->add_option("--normsq", c.normsq, "Squared spectral norm");
  check->add_option("--m", c.m);
  check->add_option("--n", c.n);
  check->add_option("--k", c.k);
  check->add_option("--delta", c.delta);
  check->add_option("--eps", c.eps);
  check->add_option("--beta", c.beta);
  check->add_option("--a", c.a);
  check->add_option("--alpha", c.alpha);
  for (std::size_t i = 0; i < c.c.size(); ++i) {
    check->add_option("--c" + std::to_string(i + 1), c.c[i], "Regime constant")
        ->capture_default_str();
  }
  add_format_flags(check, &json, &csv);

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Basis Pursuit recovery experiment");
  recover->add_option("file", rec.file)->required();
  recover->add_option("--k", rec.k)->required();
  recover->add_option("--trials", rec.trials)->required();
  recover->add_option("--eps", rec.eps)->required();
  recover->add_option("--delta", rec.delta)->required();
  recover->add_option("--seed", rec.seed)->required();
  recover->add_option("--mag", rec.mag, "unit or uniform:LO,HI")->capture_default_str();
  recover->add_option("--tol", rec.tol, "Feasibility tolerance relative to the measurements");
  recover->add_option("--tail", rec.tail, "Off-support level in [0,1) for compressible signals");
  add_format_flags(recover, &json, &csv);

  std::string export_file;
  std::string export_csv;
  auto* exp = app.add_subcommand("export", "Write a frame file as long-format CSV");
  exp->add_option("file", export_file)->required();
  exp->add_option("--csv", export_csv, "Output path, '-' for stdout")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Format format = csv ? Format::kCsv : Format::kJson;
  try {
    if (*build) return do_build(b, out, err);
    if (*params) return do_params(params_file, format, out);
    if (*verify) return do_verify(v, format, out);
    if (*check) return do_check(c, format, out);
    if (*recover) return do_recover(rec, format, out);
    if (*exp) return do_export(export_file, export_csv, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace striplab::cli
