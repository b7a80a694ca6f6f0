// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
//
//   acceptance [work_dir]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "symlind/cli.hpp"
#include "symlind/validation.hpp"

using namespace symlind;

namespace {

constexpr std::uint64_t kSeed = 20240611;

/// MemAvailable in bytes, 0 when unknown.
std::uint64_t available_memory() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::uint64_t kb = 0;
  std::string unit;
  while (in >> key >> kb >> unit)
    if (key == "MemAvailable:") return kb * 1024;
  return 0;
}

bool report(int criterion, const CheckResult& r) {
  std::printf("%s criterion %d: %s  value %.3g  threshold %.3g  %.1f s  %s\n", r.passed ? "PASS" : "FAIL", criterion,
              r.name.c_str(), r.value, r.threshold, r.seconds, r.detail.c_str());
  std::fflush(stdout);
  return r.passed;
}

/// Lambda ensemble of N atoms through the simulate run path.
CheckResult scaling(const std::filesystem::path& dir) {
  return detail::timed([&] {
    // 21 Krylov vectors, the sparse generator and the stored trajectory take
    // roughly 520 bytes per symmetric coefficient.
    const int n = available_memory() >= 3'108'105ull * 520 ? 20 : 12;
    RunConfig c;
    c.mode = Mode::simulate;
    c.N = n;
    c.model.kind = ModelSpec::Kind::lambda;
    c.model.lambda = LambdaParams{n, 0.6, 1.1, 0.5, 0.0, 0.5, 1.0};
    Operator rho = Operator::Zero(3, 3);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.3;
    rho(2, 2) = 0.5;
    rho(2, 0) = rho(0, 2) = 0.1;
    c.initial.rho1 = rho;
    const double g = c.model.lambda.gamma();
    c.grid = {0.0, 0.5 / g, 3};
    c.observables = {{"p0", dyad(0, 0, 3)}, {"p1", dyad(1, 1, 3)}, {"p2", dyad(2, 2, 3)}};
    c.method = Method::krylov;
    c.tol = 1e-8;
    c.krylov_dim = 20;
    const RunReport rep = run(c, (dir / "scaling.csv").string());
    CheckResult r{"scaling demonstration", false, rep.max_trace_deviation, 1e-6, "", 0.0};
    if (rep.exit_code != kExitOk) {
      r.detail = "N=" + std::to_string(n) + " run failed: " + rep.message;
      r.value = 1.0;
      return r;
    }
    r.passed = rep.max_trace_deviation <= 1e-6;
    r.detail = "M=3 N=" + std::to_string(n) + " s=" + std::to_string(rep.sym_size) + " (full space 9^" +
               std::to_string(n) + ")";
    return r;
  });
}

} // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "acceptance_work";
  std::filesystem::create_directories(dir);
  bool all = true;
  PhysicalityStats phys;
  all &= report(1, check_dimensions());
  all &= report(2, check_appendix({2, 3}, 1e-12));
  all &= report(3, check_oracle(20, kSeed, &phys, 1e-8));
  all &= report(4, check_ground_state_bch(1e-12));
  all &= report(5, check_disentangling(10, 11, 1e-10));
  all &= report(6, check_triple_agreement(20, kSeed + 1, &phys, 1e-7));
  all &= report(7, check_physicality(phys, 1e-8));
  all &= report(8, check_ladder_actions(4));
  all &= report(9, scaling(dir));
  return all ? 0 : 1;
}
