// Command-line front end: solve problem files, run benchmark families,
// print hierarchy sizes and re-verify reports.
//
// Exit codes: 0 success, 1 usage error, 2 solver failure, 3 extraction
// failure (with --extract), 4 parse error, 5 verification failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rhsos/generators.h"
#include "rhsos/problem_io.h"
#include "rhsos/relaxation.h"
#include "rhsos/report.h"

namespace {

using namespace rhsos;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitExtraction = 3;
constexpr int kExitParse = 4;
constexpr int kExitVerify = 5;

struct CommonFlags {
  int order = 1;
  std::string hierarchy = "real";
  double tol = 0.0;
  int max_iter = 200;
  bool extract = false;
  bool no_phase_symmetry = false;
  bool no_facial_reduction = false;
  bool local_search = false;
  int samples = 10000;
  std::uint64_t seed = 1;
  std::string report_path;
  std::string dump_path;
  bool verbose = false;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--order,-r", f.order, "Relaxation order")->required();
  cmd->add_option("--hierarchy", f.hierarchy, "real | complex | rpop")
      ->check(CLI::IsMember({"real", "complex", "rpop"}));
  cmd->add_option("--tol", f.tol, "Solver tolerance (default: $RHSOS_TOL or 1e-8)");
  cmd->add_option("--max-iter", f.max_iter, "Solver iteration limit");
  cmd->add_flag("--no-phase-symmetry", f.no_phase_symmetry,
                "Keep all moments instead of the phase-invariant ones");
  cmd->add_flag("--no-facial-reduction", f.no_facial_reduction,
                "Keep rows implied by holomorphic equalities");
  cmd->add_option("--samples", f.samples, "Local search samples");
  cmd->add_option("--report", f.report_path, "Write the run report here");
  cmd->add_option("--dump-sdpa", f.dump_path, "Write the SDP data as sparse triplets");
  cmd->add_flag("--verbose,-v", f.verbose, "Print solver iterations");
}

double DefaultTol() {
  if (const char* env = std::getenv("RHSOS_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
    std::cerr << "warning: ignoring malformed RHSOS_TOL='" << env << "'\n";
  }
  return 1e-8;
}

RunOptions ToRunOptions(const CommonFlags& f) {
  RunOptions o;
  o.hierarchy = ParseHierarchy(f.hierarchy);
  o.order = f.order;
  o.sdp.tol = f.tol > 0.0 ? f.tol : DefaultTol();
  o.sdp.max_iter = f.max_iter;
  o.sdp.verbose = f.verbose;
  o.build.phase_symmetry = !f.no_phase_symmetry;
  o.build.facial_reduction = !f.no_facial_reduction;
  o.extract = f.extract;
  o.local_search = f.local_search;
  o.local.samples = f.samples;
  o.local.seed = f.seed;
  return o;
}

void PrintPoint(const std::vector<Complex>& z) {
  std::cout << "(";
  for (size_t i = 0; i < z.size(); ++i) {
    std::cout << (i ? ", " : "") << z[i].real() << (z[i].imag() < 0 ? "-" : "+")
              << std::abs(z[i].imag()) << "i";
  }
  std::cout << ")";
}

void PrintSummary(const RunReport& r) {
  std::cout.precision(10);
  std::cout << "instance    " << r.instance.name << "\n"
            << "hierarchy   " << ToString(r.hierarchy) << ", order " << r.order << "\n"
            << "size        " << r.num_vars << " variables, " << r.block_sizes.size()
            << " blocks, " << r.num_equalities << " equalities\n"
            << "status      " << ToString(r.status) << " after " << r.iterations
            << " iterations" << (r.message.empty() ? "" : " (" + r.message + ")") << "\n"
            << "bound       " << r.bound;
  if (r.instance.value_transform == ValueTransform::kSqrt) {
    std::cout << " (sqrt of " << r.raw_bound << ")";
  }
  std::cout << "\n"
            << "certificate residual " << r.certificate.residual << ", min Gram eigenvalue "
            << r.certificate.min_gram_eigenvalue << (r.certificate.valid ? "" : " (invalid)")
            << "\n";
  if (r.extraction_run) {
    std::cout << "extraction  " << ToString(r.extraction.status);
    if (!r.extraction.method.empty()) std::cout << " [" << r.extraction.method << "]";
    if (!r.extraction.message.empty()) std::cout << ": " << r.extraction.message;
    std::cout << "\n";
    for (const AtomCheck& a : r.extraction.atoms) {
      std::cout << "  atom ";
      PrintPoint(a.point);
      std::cout << " weight " << a.weight << " violation " << a.violation << " objective "
                << a.objective << "\n";
    }
  }
  if (r.local) {
    std::cout << "local bound " << r.local->reported_value << " at ";
    PrintPoint(r.local->point);
    std::cout << "\n";
  }
  std::cout << "time        " << r.seconds << " s\n";
}

int Finish(const RunReport& r, const CommonFlags& f) {
  PrintSummary(r);
  if (!f.report_path.empty()) WriteTextFile(f.report_path, SerializeReport(r));
  if (r.status != SdpStatus::kOptimal && r.status != SdpStatus::kNearOptimal) return kExitSolver;
  if (r.extraction_run && r.extraction.status == ExtractionStatus::kFailed) {
    return kExitExtraction;
  }
  return kExitOk;
}

int RunInstance(const CPOPInstance& inst, const CommonFlags& f) {
  const RunOptions opt = ToRunOptions(f);
  if (opt.hierarchy == Hierarchy::kReal) RequireRealCoefficients(inst);
  if (!f.dump_path.empty()) {
    const LMIProgram prog = BuildRelaxation(inst, opt.hierarchy, opt.order, opt.build);
    std::ofstream out(f.dump_path);
    if (!out) throw std::runtime_error("cannot write '" + f.dump_path + "'");
    WriteSdpDump(prog.sdp, out);
  }
  return Finish(RunSolve(inst, opt), f);
}

int RunVerify(const std::string& path) {
  const RunReport r = ParseReport(ReadTextFile(path));
  const VerifyResult v = VerifyReport(r);
  std::cout.precision(6);
  std::cout << "max discrepancy " << v.max_discrepancy << "\n";
  for (const std::string& s : v.failures) std::cout << "FAIL " << s << "\n";
  std::cout << (v.ok ? "verified" : "verification failed") << "\n";
  return v.ok ? kExitOk : kExitVerify;
}

int RunStats(int n, int r) {
  const ComplexityStats s = ComputeComplexityStats(n, r);
  std::cout << "hierarchy  block_side  num_vars\n";
  std::cout << "real       " << s.real.block_side << "  " << s.real.num_vars << "\n";
  std::cout << "complex    " << s.complex.block_side << "  " << s.complex.num_vars << "\n";
  std::cout << "rpop       " << s.real_pop.block_side << "  " << s.real_pop.num_vars << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment and Hermitian sum-of-squares relaxations for complex polynomial "
               "optimization"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string problem_path;
  CLI::App* solve = app.add_subcommand("solve", "Solve a problem file");
  solve->add_option("file", problem_path, "Problem file")->required();
  AddCommonFlags(solve, solve_flags);
  solve->add_flag("--extract", solve_flags.extract, "Detect optimality and extract atoms");
  solve->add_flag("--local-search", solve_flags.local_search, "Sample a local upper bound");
  solve->add_option("--seed", solve_flags.seed, "Local search seed");

  CommonFlags bench_flags;
  bench_flags.extract = true;
  bench_flags.local_search = true;
  std::string family;
  int bench_n = 0;
  CLI::App* bench = app.add_subcommand("bench", "Generate and solve a benchmark instance");
  bench->add_option("family", family, "Benchmark family")
      ->required()
      ->check(CLI::IsMember(FamilyNames()));
  bench->add_option("--n", bench_n, "Family size parameter");
  bench->add_option("--seed", bench_flags.seed, "Seed for random families and local search");
  AddCommonFlags(bench, bench_flags);

  std::string gen_family;
  std::string gen_out;
  int gen_n = 0;
  std::uint64_t gen_seed = 1;
  CLI::App* gen = app.add_subcommand("generate", "Write a benchmark instance as a problem file");
  gen->add_option("family", gen_family, "Benchmark family")
      ->required()
      ->check(CLI::IsMember(FamilyNames()));
  gen->add_option("--n", gen_n, "Family size parameter");
  gen->add_option("--seed", gen_seed, "Seed for random families");
  gen->add_option("--out,-o", gen_out, "Output file (stdout if omitted)");

  int stats_n = 0;
  int stats_r = 0;
  CLI::App* stats = app.add_subcommand("stats", "Print dense hierarchy sizes");
  stats->add_option("--n", stats_n, "Number of complex variables")
      ->required()
      ->check(CLI::PositiveNumber);
  stats->add_option("--order,-r", stats_r, "Relaxation order")
      ->required()
      ->check(CLI::NonNegativeNumber);

  std::string report_path;
  CLI::App* verify = app.add_subcommand("verify", "Re-check a run report without solving");
  verify->add_option("report", report_path, "Report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return RunInstance(LoadProblem(problem_path), solve_flags);
    if (*bench) return RunInstance(MakeFamily(family, bench_n, bench_flags.seed), bench_flags);
    if (*gen) {
      const std::string text = SerializeProblem(MakeFamily(gen_family, gen_n, gen_seed));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        WriteTextFile(gen_out, text);
      }
      return kExitOk;
    }
    if (*stats) return RunStats(stats_n, stats_r);
    if (*verify) return RunVerify(report_path);
  } catch (const ProblemParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const MalformedInput& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
